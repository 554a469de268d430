from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hilbzeta.qzeta import okounkov_z
from hilbzeta.series import (
    NonUnitSeriesError,
    PowerSeries,
    divide_one_minus,
    euler_product,
    ps_add,
    ps_int_pow,
    ps_inv,
    ps_mul,
    q_derivative,
)

from conftest import naive_product, partitions, sigma

ORDER = 8

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def series_of(order=ORDER, unit=False):
    coeffs = st.lists(rationals, min_size=order + 1, max_size=order + 1)
    if unit:
        coeffs = coeffs.filter(lambda c: c[0] != 0)
    return coeffs.map(PowerSeries.from_coeffs)


# -- examples ---------------------------------------------------------------

def test_addition_examples():
    a = PowerSeries.from_coeffs([1, 1, 0])
    b = PowerSeries.from_coeffs([1, -1, 0])
    assert ps_add(a, b) == PowerSeries.from_coeffs([2, 0, 0])
    f = PowerSeries.from_coeffs([3, Fraction(1, 2), 7])
    assert f + PowerSeries.zero(2) == f
    z2 = okounkov_z(2, 5)
    assert list(z2 + z2) == [0] + [2 * sigma(1, k) for k in range(1, 6)]


def test_multiplication_examples():
    N = 6
    geometric = PowerSeries.from_coeffs([1] * (N + 1))
    assert PowerSeries.from_coeffs([1, -1], N) * geometric == PowerSeries.one(N)
    z2 = okounkov_z(2, 4)
    assert list(z2 * z2) == [0, 0, 1, 6, 17]
    assert z2 * PowerSeries.one(4) == z2


def test_inverse_examples():
    assert ps_inv(PowerSeries.from_coeffs([1, -1], 5)) == PowerSeries.from_coeffs([1] * 6)
    assert ps_inv(PowerSeries.one(3)) == PowerSeries.one(3)
    counts = [sum(1 for _ in partitions(n)) for n in range(13)]
    assert list(ps_inv(euler_product(12))) == counts
    assert counts[:6] == [1, 1, 2, 3, 5, 7]


def test_inverse_rejects_non_unit():
    with pytest.raises(NonUnitSeriesError, match="non-unit"):
        ps_inv(PowerSeries.from_coeffs([0, 1, 2]))
    with pytest.raises(NonUnitSeriesError):
        ps_int_pow(PowerSeries.from_coeffs([0, 1]), -2)


def test_integer_power_examples():
    assert ps_int_pow(PowerSeries.from_coeffs([1, 1, 0, 0]), 2) == PowerSeries.from_coeffs([1, 2, 1, 0])
    f = PowerSeries.from_coeffs([5, 1, 2])
    assert f ** 0 == PowerSeries.one(2)
    assert list(ps_int_pow(euler_product(5), -24)) == [1, 24, 324, 3200, 25650, 176256]


def test_inverse_power_of_euler_product_by_factors():
    # 24 copies of each 1/(1 - q^i), applied one factor at a time
    N = 5
    values = [1] + [0] * N
    for i in range(1, N + 1):
        divide_one_minus(values, i, 24)
    assert PowerSeries.from_ints(values) == ps_int_pow(euler_product(N), -24)


def test_euler_product_examples():
    assert euler_product(0) == PowerSeries.one(0)
    assert list(euler_product(7)) == [1, -1, -1, 0, 0, 1, 0, 1]
    assert list(euler_product(12)) == [1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]


def test_euler_product_is_pentagonal_to_fifty():
    N = 50
    expected = [0] * (N + 1)
    k = 0
    while True:
        hit = False
        for m in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2):
            if m <= N:
                expected[m] = (-1) ** k
                hit = True
        if not hit:
            break
        k += 1
    assert list(euler_product(N)) == expected


def test_euler_product_against_direct_finite_product():
    N = 15
    values = [Fraction(1)] + [Fraction(0)] * N
    for i in range(1, N + 1):
        factor = [Fraction(0)] * (N + 1)
        factor[0] = Fraction(1)
        factor[i] = Fraction(-1)
        values = naive_product(values, factor, N)
    assert list(euler_product(N)) == values


def test_q_derivative_examples():
    assert q_derivative(PowerSeries.one(3)).is_zero()
    assert q_derivative(PowerSeries.monomial(3, 4)) == PowerSeries.monomial(3, 4, 3)
    assert list(okounkov_z(2, 4).q_derivative()) == [0, 1, 6, 12, 28]


def test_mixed_orders_truncate_to_smaller():
    a = PowerSeries.one(5)
    b = PowerSeries.one(3)
    assert (a + b).order == 3
    assert (a * b).order == 3


def test_first_mismatch_and_order_check():
    a = PowerSeries.from_coeffs([1, 2, 3, 4])
    b = PowerSeries.from_coeffs([1, 2, 5, 4])
    assert a.first_mismatch(b) == 2
    assert a.first_mismatch(b, 1) is None
    with pytest.raises(ValueError):
        a.first_mismatch(b, 7)


def test_from_coeffs_rejects_negative_order():
    with pytest.raises(ValueError):
        PowerSeries.from_coeffs([1], -1)


def test_text_rendering():
    assert PowerSeries.from_coeffs([0, 1, Fraction(-1, 2)]).to_text() == "q -1/2*q^2"
    assert PowerSeries.zero(2).to_text() == "0"


# -- properties -------------------------------------------------------------

@given(series_of(), series_of(), series_of())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == PowerSeries.zero(ORDER)


@given(series_of(), series_of())
def test_product_matches_naive_convolution(a, b):
    assert list(ps_mul(a, b)) == naive_product(a.coeffs, b.coeffs, ORDER)


@given(series_of(), series_of())
def test_leibniz_rule(a, b):
    assert q_derivative(a * b) == q_derivative(a) * b + a * q_derivative(b)


@given(series_of(unit=True))
def test_inverse_is_two_sided(a):
    assert a * ps_inv(a) == PowerSeries.one(ORDER)
    assert ps_inv(ps_inv(a)) == a


@given(series_of(unit=True), st.integers(-4, 4), st.integers(-4, 4))
def test_power_laws(a, m, n):
    assert ps_int_pow(a, m) * ps_int_pow(a, n) == ps_int_pow(a, m + n)


@given(series_of())
def test_json_and_csv_round_trip(a):
    assert PowerSeries.from_json(a.to_json()) == a
    assert PowerSeries.from_csv(a.to_csv()) == a


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=12), st.integers(1, 5), st.integers(1, 3))
def test_stride_division_inverts_multiplication(values, m, times):
    order = len(values) - 1
    f = PowerSeries.from_ints(values)
    divided = PowerSeries.from_ints(divide_one_minus(list(values), m, times))
    factor = ps_int_pow(PowerSeries.from_coeffs([1] + [0] * (m - 1) + [-1], order), times) \
        if m <= order else PowerSeries.one(order)
    assert divided * factor == f
