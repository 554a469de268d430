"""Independent brute-force oracles shared by the test modules."""
from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def sigma(power: int, n: int) -> int:
    """Sum of d^power over divisors d of n, by trial division."""
    return sum(d ** power for d in range(1, n + 1) if n % d == 0)


def divisor_series(order: int, weight=lambda d: d) -> list[Fraction]:
    """Coefficients of sum_{n,d} weight(d) q^{nd}."""
    out = [Fraction(0)] * (order + 1)
    for n in range(1, order + 1):
        for d in range(1, order // n + 1):
            out[n * d] += Fraction(weight(d))
    return out


def partitions(n: int, largest: int | None = None):
    """All partitions of n as non-increasing tuples."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in partitions(n - part, part):
            yield (part,) + rest


def naive_product(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i in range(order + 1):
        for j in range(order + 1 - i):
            out[i + j] += Fraction(a[i]) * Fraction(b[j])
    return out


@pytest.fixture(scope="session")
def oracles():
    return {
        "sigma": sigma,
        "divisor_series": divisor_series,
        "partitions": partitions,
        "naive_product": naive_product,
    }
