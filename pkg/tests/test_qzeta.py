from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hilbzeta.qzeta import (
    Composition,
    PolynomialQ,
    QMExpression,
    QZetaCombination,
    RecognitionFailure,
    SelfCheckError,
    Z,
    bernoulli,
    bracket,
    bracket_divisor_sum,
    eisenstein,
    eulerian_family,
    eulerian_numerator,
    okounkov_family,
    okounkov_z,
    q_poly,
    qm_basis,
    qm_monomials,
    qm_recognize,
    qzeta_eval,
    z_generic,
)
from hilbzeta.series import PowerSeries

from conftest import divisor_series, sigma


def poly(*coeffs):
    return PolynomialQ.from_coeffs(coeffs)


def brute_nested_divisor_sum(entries, order):
    """sum over n_1 > ... > n_l, d_i of prod d_i^(s_i - 1)/(s_i - 1)! q^(sum n_i d_i)."""
    from itertools import product
    from math import factorial

    out = [Fraction(0)] * (order + 1)
    l = len(entries)
    for ns in product(range(1, order + 1), repeat=l):
        if any(ns[i] <= ns[i + 1] for i in range(l - 1)):
            continue
        for ds in product(range(1, order + 1), repeat=l):
            e = sum(n * d for n, d in zip(ns, ds))
            if e <= order:
                w = Fraction(1)
                for s, d in zip(entries, ds):
                    w *= Fraction(d ** (s - 1), factorial(s - 1))
                out[e] += w
    return out


# -- polynomial families ----------------------------------------------------

def test_eulerian_numerators():
    assert eulerian_numerator(1) == poly(0, 1)
    assert eulerian_numerator(2) == poly(0, 1)
    assert eulerian_numerator(3) == poly(0, 1, 1)
    assert eulerian_numerator(4) == poly(0, 1, 4, 1)
    assert eulerian_numerator(5) == poly(0, 1, 11, 11, 1)
    with pytest.raises(ValueError):
        eulerian_numerator(0)


@pytest.mark.parametrize("s", range(1, 8))
def test_eulerian_numerator_generates_powers(s):
    # R(t)/(1-t)^s = sum d^(s-1) t^d, checked as power series in t
    N = 12
    R = PowerSeries.from_coeffs(eulerian_numerator(s).coeffs, N)
    denom = PowerSeries.from_coeffs([1, -1], N) ** s
    assert list(R * denom.inverse()) == [0] + [d ** (s - 1) for d in range(1, N + 1)]


def test_q_poly_examples():
    assert q_poly("O", 4) == poly(0, 0, 1)
    assert q_poly("O", 3) == poly(0, 1, 1)
    assert q_poly("E", 3) == poly(0, Fraction(1, 2), Fraction(1, 2))
    for bad in (("O", 1), ("E", 0), ("X", 2)):
        with pytest.raises(ValueError):
            q_poly(*bad)


def test_families_agree_with_q_poly():
    for s in range(2, 9):
        assert okounkov_family(s) == q_poly("O", s)
        assert eulerian_family(s) == q_poly("E", s)


# -- nested sums -------------------------------------------------------------

def test_z_generic_examples():
    assert z_generic(okounkov_family, (), 5) == PowerSeries.one(5)
    assert list(z_generic(okounkov_family, (2,), 4)) == [0, 1, 3, 4, 7]
    assert list(z_generic(eulerian_family, (2, 2), 4)) == [0, 0, 0, 1, 3]


def test_z_generic_rejects_nonvanishing_constant():
    family = {2: poly(1, 1)}
    with pytest.raises(ValueError, match="must vanish"):
        z_generic(family, (2,), 4)


def test_bracket_examples():
    assert list(bracket(1, 4)) == [0, 1, 2, 2, 3]
    assert list(bracket(2, 4)) == [0, 1, 3, 4, 7]
    assert list(bracket(3, 3)) == [0, Fraction(1, 2), Fraction(5, 2), 5]


def test_bracket_self_check_detects_disagreement(monkeypatch):
    import hilbzeta.qzeta as qz

    real = qz.bracket_divisor_sum
    monkeypatch.setattr(qz, "bracket_divisor_sum",
                        lambda comp, order: real(comp, order) + PowerSeries.monomial(3, order))
    with pytest.raises(SelfCheckError, match="q\\^3"):
        qz.bracket(2, 6)


@pytest.mark.parametrize("entries", [(1,), (2,), (3,), (1, 1), (2, 1), (3, 2), (2, 2, 1)])
def test_bracket_matches_brute_divisor_sum(entries):
    N = 9
    assert list(bracket(entries, N)) == brute_nested_divisor_sum(entries, N)
    assert list(bracket_divisor_sum(entries, N)) == brute_nested_divisor_sum(entries, N)


def test_okounkov_examples():
    # the q^4 coefficient of Z(4) is 11: d=4 on n=1 gives 10 and d=2 on n=2 gives 1
    assert list(okounkov_z(4, 5)) == [0, 0, 1, 4, 11, 20]
    assert list(okounkov_z(3, 4)) == [0, 1, 5, 10, 21]
    assert okounkov_z(3, 4) == bracket(3, 4).scale(2)
    with pytest.raises(ValueError):
        okounkov_z((2, 1), 4)


@pytest.mark.parametrize("s,weight", [
    (2, lambda d: d),
    (3, lambda d: d * d),
    (4, lambda d: Fraction(d ** 3 - d, 6)),
])
def test_okounkov_single_against_divisor_oracle(s, weight):
    N = 30
    assert list(okounkov_z(s, N)) == divisor_series(N, weight)


def test_okounkov_double_against_brute_sum():
    # Z(2,2) = sum_{n>m} q^n q^m / ((1-q^n)^2 (1-q^m)^2)
    N = 10
    z2_terms = {}
    for n in range(1, N + 1):
        values = [0] * (N + 1)
        for d in range(1, N // n + 1):
            values[n * d] = d
        z2_terms[n] = PowerSeries.from_ints(values)
    total = PowerSeries.zero(N)
    for n in range(1, N + 1):
        for m in range(1, n):
            total = total + z2_terms[n] * z2_terms[m]
    assert okounkov_z((2, 2), N) == total


# -- Bernoulli and Eisenstein -----------------------------------------------

def test_bernoulli_examples():
    b = bernoulli(12)
    assert b[0] == 1
    assert b[1] == Fraction(-1, 2)
    assert b[2] == Fraction(1, 6)
    assert b[6] == Fraction(1, 42)
    assert b[12] == Fraction(-691, 2730)
    assert all(b[k] == 0 for k in range(3, 13, 2))


def test_eisenstein_constants_and_coefficients():
    assert eisenstein(2, 3)[0] == Fraction(-1, 24)
    assert eisenstein(4, 3)[0] == Fraction(1, 1440)
    assert eisenstein(6, 3)[0] == Fraction(-1, 60480)
    g4 = eisenstein(4, 10)
    assert list(g4)[1:] == [Fraction(sigma(3, n), 6) for n in range(1, 11)]
    for bad in (0, 3, -2):
        with pytest.raises(ValueError):
            eisenstein(bad, 4)


# -- symbolic combinations --------------------------------------------------

def test_combination_arithmetic():
    c = Z(2) ** 2 - Z(2) * Z(2)
    assert c.is_zero()
    assert (Z(2) + 1).constant == 1
    assert Z(2, 2).weight() == 4
    assert (Z(2) * Z(3)).terms == {(Composition((2,)), Composition((3,))): 1}
    assert str(Fraction(1, 3) * Z(2) ** 2 - Fraction(1, 12) * Z(4)) == "-1/12*Z(4) + 1/3*Z(2)^2"
    with pytest.raises(ValueError):
        QZetaCombination({(Composition((1,)),): 1})


def test_qzeta_eval_examples():
    assert qzeta_eval(QZetaCombination.constant_of(1), 4) == PowerSeries.one(4)
    half = Fraction(1, 2) * (Z(2) - Z(3))
    assert list(qzeta_eval(half, 3)) == [0, 0, -1, -3]
    N = 6
    assert qzeta_eval(Z(2, 2), N) == qzeta_eval(Fraction(-1, 2) * Z(4) + Fraction(1, 2) * Z(2) ** 2, N)


zeta_monomials = st.lists(
    st.lists(st.integers(2, 6), min_size=1, max_size=2).map(tuple), min_size=0, max_size=2
).map(lambda comps: tuple(Composition(c) for c in comps))
combinations = st.dictionaries(zeta_monomials, st.fractions(max_denominator=30), max_size=5).map(
    QZetaCombination)


@given(combinations)
def test_combination_json_round_trip(c):
    assert QZetaCombination.from_json(c.to_json()) == c


@given(combinations, combinations)
def test_expansion_is_a_ring_map(a, b):
    N = 8
    assert qzeta_eval(a * b, N) == qzeta_eval(a, N) * qzeta_eval(b, N)
    assert qzeta_eval(a + b, N) == qzeta_eval(a, N) + qzeta_eval(b, N)


# -- quasimodular recognition -------------------------------------------------

def test_qm_monomial_counts():
    assert qm_monomials(0) == [(0, 0, 0)]
    assert set(qm_monomials(4)) == {(0, 0, 0), (1, 0, 0), (2, 0, 0), (0, 1, 0)}
    assert len(qm_monomials(6)) == 7
    assert len(qm_monomials(8)) == 11
    (t, s), = qm_basis(0, 5)
    assert t == (0, 0, 0) and s == PowerSeries.one(5)


def test_recognize_theta_form_and_zero():
    f = qzeta_eval(Fraction(1, 3) * Z(2) ** 2 - Fraction(1, 12) * Z(4), 30)
    assert qm_recognize(f, 4) == QMExpression({(2, 0, 0): Fraction(1, 3), (0, 1, 0): Fraction(-1, 12)})
    assert qm_recognize(PowerSeries.zero(20), 6).is_zero()


def test_recognize_rejects_z3_with_index():
    with pytest.raises(RecognitionFailure) as info:
        qm_recognize(okounkov_z(3, 30), 4)
    assert info.value.index is not None
    assert not info.value.ambiguous


def test_recognize_reports_preconditions():
    f = okounkov_z(2, 10)
    with pytest.raises(ValueError):
        qm_recognize(f, 4, fit_count=2)
    with pytest.raises(ValueError):
        qm_recognize(PowerSeries.zero(3), 4, fit_count=4, verify_count=5)


def test_recognize_reports_ambiguity(monkeypatch):
    import hilbzeta.qzeta as qz

    real = qz.qm_basis

    def degenerate(weight_bound, order):
        basis = real(weight_bound, order)
        return basis[:-1] + [(basis[-1][0], basis[1][1])]  # last member duplicates Z(2)

    monkeypatch.setattr(qz, "qm_basis", degenerate)
    with pytest.raises(RecognitionFailure) as info:
        qz.qm_recognize(okounkov_z(2, 10), 4)
    assert info.value.ambiguous and info.value.index is None


def test_recognition_fit_window_is_always_determined():
    for w in range(0, 17, 2):
        assert qm_recognize(PowerSeries.zero(len(qm_monomials(w)) + 2), w).is_zero()


qm_expressions = st.dictionaries(
    st.sampled_from(qm_monomials(8)),
    st.fractions(max_denominator=50).filter(lambda x: x != 0),
    max_size=11,
).map(QMExpression)


@given(qm_expressions)
def test_recognize_inverts_expansion(e):
    f = e.expand(31)
    assert qm_recognize(f, 8, fit_count=11, verify_count=20) == e
    assert QMExpression.from_json(e.to_json()) == e
    assert e.to_qzeta().to_qm() == e
