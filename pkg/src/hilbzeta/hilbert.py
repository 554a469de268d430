"""
Reduced generating series for Chern characters of tautological bundles.

Everything here is "reduced": the Goettsche factor (q;q)_infinity^(-chi) has
been divided out.  The nested sums are evaluated exactly by only visiting
index tuples whose term has q-adic valuation at most the requested order.
Term kernels work on plain integer coefficient lists and rescale once.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator, Mapping

from .qzeta import QZetaCombination, SelfCheckError, Z, bracket
from .series import PowerSeries, as_fraction, divide_one_minus, euler_product, ps_int_pow


# ---------------------------------------------------------------------------
# generalized partitions

@dataclass(frozen=True)
class GenPartition:
    """Multiset of nonzero integer parts, stored as sorted (part, multiplicity) pairs."""

    parts: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for part, mult in self.parts:
            if part == 0:
                raise ValueError("generalized partitions have no zero parts")
            if mult <= 0:
                raise ValueError("multiplicities must be positive")

    @classmethod
    def from_parts(cls, parts: Iterable[int]) -> "GenPartition":
        return cls(tuple(sorted(Counter(parts).items())))

    @classmethod
    def from_multiplicities(cls, mults: Mapping[int, int]) -> "GenPartition":
        return cls(tuple(sorted((p, m) for p, m in mults.items() if m)))

    def multiplicity(self, part: int) -> int:
        return dict(self.parts).get(part, 0)

    @property
    def length(self) -> int:
        return sum(m for _, m in self.parts)

    @property
    def size(self) -> int:
        return sum(p * m for p, m in self.parts)

    @property
    def positive_size(self) -> int:
        return sum(p * m for p, m in self.parts if p > 0)

    @property
    def square_sum(self) -> int:
        return sum(p * p * m for p, m in self.parts)

    @property
    def factorial(self) -> int:
        out = 1
        for _, m in self.parts:
            out *= factorial(m)
        return out

    def positive_part(self) -> "GenPartition":
        return GenPartition(tuple((p, m) for p, m in self.parts if p > 0))

    def operator_order(self) -> list[int]:
        """Parts left to right as the Heisenberg product is written:
        creation operators with the largest |part| first, then annihilations
        in increasing order."""
        neg = sorted((p for p, m in self.parts if p < 0 for _ in range(m)))
        pos = sorted((p for p, m in self.parts if p > 0 for _ in range(m)))
        return neg + pos

    def __str__(self):
        if not self.parts:
            return "()"
        return "(" + " ".join(f"{p}^{m}" if m > 1 else str(p) for p, m in self.parts) + ")"


def zero_size_partitions(length: int, max_part: int) -> Iterator[GenPartition]:
    """All generalized partitions of 0 with the given length and parts in [-max_part, max_part]."""
    values = [p for p in range(-max_part, max_part + 1) if p]

    def walk(start: int, left: int, total: int, chosen: list[int]):
        if left == 0:
            if total == 0:
                yield GenPartition.from_parts(chosen)
            return
        for idx in range(start, len(values)):
            p = values[idx]
            # the remaining parts are >= p, so the final sum is at least this
            if total + p * left > 0:
                break
            if total + p + (left - 1) * values[-1] < 0:
                continue
            chosen.append(p)
            yield from walk(idx, left - 1, total + p, chosen)
            chosen.pop()

    yield from walk(0, length, 0, [])


# ---------------------------------------------------------------------------
# surface data

@dataclass(frozen=True)
class SurfacePairings:
    """Numerical data of a surface X and a class alpha in its cohomology.

    ``pair_e``, ``pair_1``, ``pair_K``, ``pair_K2`` are the integrals of
    alpha against e_X, 1_X, K_X and K_X^2.  ``K2``, ``KL``, ``L2`` are the
    intersection numbers of the canonical class and a line bundle L.
    """

    chi: int = 0
    pair_e: Fraction = Fraction(0)
    pair_1: Fraction = Fraction(0)
    pair_K: Fraction = Fraction(0)
    pair_K2: Fraction = Fraction(0)
    K2: int | None = None
    KL: int | None = None
    L2: int | None = None

    def __post_init__(self):
        for name in ("pair_e", "pair_1", "pair_K", "pair_K2"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    @classmethod
    def for_surface(cls, chi: int, K2: int | None = None, KL: int | None = None,
                    L2: int | None = None) -> "SurfacePairings":
        """Pairings of the fundamental class alpha = 1_X."""
        return cls(chi=chi, pair_e=chi, pair_1=0, pair_K=0,
                   pair_K2=0 if K2 is None else K2, K2=K2, KL=KL, L2=L2)

    def _require(self, *names: str):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ValueError(f"surface data is missing {', '.join(missing)}")

    def with_unit(self) -> "SurfacePairings":
        self._require("K2")
        return SurfacePairings.for_surface(self.chi, self.K2, self.KL, self.L2)

    def with_line_class(self) -> "SurfacePairings":
        """Pairings of alpha = c_1(L): only <K_X, L> survives."""
        self._require("KL")
        return SurfacePairings(chi=self.chi, pair_K=self.KL, K2=self.K2, KL=self.KL, L2=self.L2)

    def with_point_multiple(self, c) -> "SurfacePairings":
        """Pairings of alpha = c times the point class."""
        return SurfacePairings(chi=self.chi, pair_1=as_fraction(c), K2=self.K2, KL=self.KL, L2=self.L2)

    def k_power(self, j: int) -> Fraction:
        """<K_X^j, alpha>; zero above j = 2 on a surface."""
        return (self.pair_1, self.pair_K, self.pair_K2)[j] if j <= 2 else Fraction(0)

    def binomial_pairing(self, p: int) -> Fraction:
        """<(1_X - K_X)^p, alpha>."""
        return sum((comb(p, j) * (-1) ** j * self.k_power(j) for j in range(min(p, 2) + 1)), Fraction(0))

    @classmethod
    def from_dict(cls, data: Mapping) -> "SurfacePairings":
        if "chi" not in data:
            raise ValueError("surface description needs 'chi'")
        opt = {k: (int(data[k]) if data.get(k) is not None else None) for k in ("K2", "KL", "L2")}
        raw = data.get("pairings")
        if raw is None:
            return cls.for_surface(int(data["chi"]), **opt)
        return cls(
            chi=int(data["chi"]),
            pair_e=as_fraction(raw.get("e", 0)),
            pair_1=as_fraction(raw.get("1", 0)),
            pair_K=as_fraction(raw.get("K", 0)),
            pair_K2=as_fraction(raw.get("K2", 0)),
            **opt,
        )

    @classmethod
    def from_json(cls, text: str) -> "SurfacePairings":
        return cls.from_dict(json.loads(text))


def unit_pairings() -> dict[str, SurfacePairings]:
    """The four unit pairing vectors, keyed by the class they pick out."""
    return {
        "e": SurfacePairings(pair_e=1),
        "1": SurfacePairings(pair_1=1),
        "K": SurfacePairings(pair_K=1),
        "K2": SurfacePairings(pair_K2=1),
    }


# ---------------------------------------------------------------------------
# integer term kernels

def _term(order: int, shift: int, denominators: Iterable[int]) -> list[int]:
    """Coefficients of q^shift / prod_m (1 - q^m) up to ``order``."""
    values = [0] * (order + 1)
    if shift > order:
        return values
    values[shift] = 1
    for m in denominators:
        divide_one_minus(values, m, 1, start=shift)
    return values


def _accumulate(acc: list[int], values: list[int], weight: int = 1):
    if weight:
        for k, v in enumerate(values):
            if v:
                acc[k] += weight * v


def _series(acc: list[int], den: int = 1) -> PowerSeries:
    return PowerSeries.from_ints(acc, Fraction(1, den))


def goettsche_series(chi: int, order: int) -> PowerSeries:
    """(q;q)_infinity^(-chi), the unreduced Euler-characteristic series."""
    return ps_int_pow(euler_product(order), -chi)


# ---------------------------------------------------------------------------
# closed-form trace for a single Heisenberg monomial

def _monomial_product(order: int, pos: Mapping[int, int], neg: Mapping[int, int]) -> PowerSeries:
    """prod_n (-1)^{m_n}/(m_n! mt_n!) q^{n m_n} / (1-q^n)^{m_n + mt_n}."""
    shift = sum(n * m for n, m in pos.items())
    coeff = Fraction(1)
    denominators = []
    for n in set(pos) | set(neg):
        m, mt = pos.get(n, 0), neg.get(n, 0)
        coeff *= Fraction((-1) ** m, factorial(m) * factorial(mt))
        denominators.extend([n] * (m + mt))
    return _series(_term(order, shift, denominators)).scale(coeff)


def trace_closed_form_reduced(lam: GenPartition, p: SurfacePairings, order: int) -> PowerSeries:
    """Reduced trace of q^n W a_lambda(alpha)/lambda^! with z set to 1.

    First summand: <(1-K)^{sum m_n}, alpha> times the monomial product.
    Second summand: one contraction of a matched pair (n, -n), weighted by
    <e_X, alpha> and -n q^n/(1-q^n), with both multiplicities lowered by one.
    """
    pos = {n: m for n, m in lam.parts if n > 0}
    neg = {-n: m for n, m in lam.parts if n < 0}
    total = _monomial_product(order, pos, neg).scale(p.binomial_pairing(sum(pos.values())))
    if p.pair_e:
        for n in sorted(set(pos) & set(neg)):
            pos1 = dict(pos)
            neg1 = dict(neg)
            pos1[n] -= 1
            neg1[n] -= 1
            contraction = _series(_term(order, n, [n])).scale(-n)
            total = total + (contraction * _monomial_product(order, pos1, neg1)).scale(p.pair_e)
    return total


# ---------------------------------------------------------------------------
# the sum families

def _s_n2(order: int) -> PowerSeries:
    acc = [0] * (order + 1)
    for n in range(2, order + 1):
        _accumulate(acc, _term(order, n, (n, n)), n * n - 1)
    return _series(acc, 12)


def _s_2n1(order: int) -> PowerSeries:
    acc = [0] * (order + 1)
    for n in range(2, order + 1):
        _accumulate(acc, _term(order, n, (n, n)), (n - 1) * (2 * n - 1))
    return _series(acc, 12)


def pair_sum(order: int, weight=lambda i, j: 1) -> PowerSeries:
    """sum_{i,j>0} weight(i,j) q^{i+j} / ((1-q^i)(1-q^j)(1-q^{i+j})) with integer weights."""
    acc = [0] * (order + 1)
    for i in range(1, order):
        for j in range(1, order - i + 1):
            _accumulate(acc, _term(order, i + j, (i, j, i + j)), weight(i, j))
    return _series(acc)


def _s_ij(order: int) -> PowerSeries:
    return pair_sum(order, lambda i, j: i + j - 1).scale(Fraction(1, 2))


def _t_111(order: int) -> PowerSeries:
    acc = [0] * (order + 1)
    for i in range(1, order + 1):
        for j in range(1, order - i + 1):
            for k in range(1, order - i - j + 1):
                s = i + j + k
                _accumulate(acc, _term(order, s, (i, j, k, s)))
    return _series(acc)


def _t_22(order: int) -> PowerSeries:
    acc = [0] * (order + 1)
    for s in range(2, order + 1):
        for i in range(1, s):
            for k in range(1, s):
                _accumulate(acc, _term(order, s, (i, s - i, k, s - k)))
    return _series(acc)


def _e_mix(order: int) -> PowerSeries:
    acc = [0] * (order + 1)
    for i in range(2, order + 1):
        for j in range(1, min(i, order - i + 1)):
            _accumulate(acc, _term(order, i + j, (i, j, j)), i)
            _accumulate(acc, _term(order, i + j, (j, i, i)), j)
    for i in range(1, order // 2 + 1):
        _accumulate(acc, _term(order, 2 * i, (i, i, i)), i)
    return _series(acc)


def _nm(order: int) -> PowerSeries:
    acc = [0] * (order + 1)
    for n in range(2, order + 1):
        for m in range(1, n):
            _accumulate(acc, _term(order, n, (n, n, m)), n)
    return _series(acc)


def _d1(order: int) -> PowerSeries:
    return bracket((1,), order, self_check=False).q_derivative()


SUM_FAMILIES = {
    "S_n2": _s_n2,
    "S_2n1": _s_2n1,
    "S_ij": _s_ij,
    "T_111": _t_111,
    "T_22": _t_22,
    "E_mix": _e_mix,
    "NM": _nm,
    "D1": _d1,
}


def sum_family(name: str, order: int) -> PowerSeries:
    if name not in SUM_FAMILIES:
        raise ValueError(f"unknown sum family {name!r}; known: {', '.join(SUM_FAMILIES)}")
    if order < 1:
        raise ValueError("sum families need order >= 1")
    return _cached_family(name, order)


_FAMILY_CACHE: dict[tuple[str, int], PowerSeries] = {}


def _cached_family(name: str, order: int) -> PowerSeries:
    key = (name, order)
    if key not in _FAMILY_CACHE:
        _FAMILY_CACHE[key] = SUM_FAMILIES[name](order)
    return _FAMILY_CACHE[key]


def theta2(order: int) -> PowerSeries:
    """-(1/3) T_111 + (1/4) T_22, a weight-4 quasimodular form."""
    if order < 2:
        raise ValueError("theta2 needs order >= 2")
    return sum_family("T_111", order).scale(Fraction(-1, 3)) + sum_family("T_22", order).scale(Fraction(1, 4))


# auxiliary single and nested sums used by the identity checks

def divisor_weighted(order: int, power: int = 1, denominator_exp: int = 1) -> PowerSeries:
    """sum_{n>0} n^power q^n / (1 - q^n)^denominator_exp."""
    acc = [0] * (order + 1)
    for n in range(1, order + 1):
        _accumulate(acc, _term(order, n, (n,) * denominator_exp), n ** power)
    return _series(acc)


def cubic_mixed_sum(order: int) -> PowerSeries:
    """sum_{n>0} (n q^{2n} + n q^n) / (1 - q^n)^3."""
    acc = [0] * (order + 1)
    for n in range(1, order + 1):
        _accumulate(acc, _term(order, n, (n, n, n)), n)
        _accumulate(acc, _term(order, 2 * n, (n, n, n)), n)
    return _series(acc)


def nested_leading_square(order: int, depth: int) -> PowerSeries:
    """sum_{n_1 > ... > n_depth > 0} q^{n_1} / ((1-q^{n_1})^2 (1-q^{n_2}) ... (1-q^{n_depth}))."""
    acc = [0] * (order + 1)

    def walk(upper: int, chosen: list[int]):
        if len(chosen) == depth:
            _accumulate(acc, _term(order, chosen[0], [chosen[0], chosen[0]] + chosen[1:]))
            return
        left = depth - len(chosen)
        for n in range(left, upper):
            walk(n, chosen + [n])

    for n1 in range(depth, order + 1):
        walk(n1, [n1])
    return _series(acc)


def power_tail(order: int, k: int) -> PowerSeries:
    """sum_{n>0} q^{kn} / (1 - q^n)^{k+1}."""
    acc = [0] * (order + 1)
    for n in range(1, order // k + 1):
        _accumulate(acc, _term(order, k * n, (n,) * (k + 1)))
    return _series(acc)


def e_mix_free(order: int) -> PowerSeries:
    """sum_{i,j>0} (i q^i/(1-q^i)) (q^j/(1-q^j)^2): the diagonal absorbed into a free double sum."""
    acc = [0] * (order + 1)
    for i in range(1, order):
        for j in range(1, order - i + 1):
            _accumulate(acc, _term(order, i + j, (i, j, j)), i)
    return _series(acc)


def f1_middle_line(order: int) -> PowerSeries:
    """sum_m (m-1) q^m/(1-q^m)^2 + sum_{m1,m2} q^{m1+m2}/((1-q^{m1})(1-q^{m2})(1-q^{m1+m2}))."""
    return divisor_weighted(order, 1, 2) - divisor_weighted(order, 0, 2) + pair_sum(order)


# ---------------------------------------------------------------------------
# ordered sums over generalized partitions and their free-sum symmetrization

def nonincreasing_tuples(k: int, max_total: int, min_part: int = 1) -> Iterator[tuple[int, ...]]:
    """i_1 >= i_2 >= ... >= i_k >= min_part with sum <= max_total."""
    def walk(prefix: tuple[int, ...], upper: int, budget: int):
        if len(prefix) == k:
            yield prefix
            return
        left = k - len(prefix)
        for i in range(min(upper, budget - (left - 1) * min_part), min_part - 1, -1):
            yield from walk(prefix + (i,), i, budget - i)

    yield from walk((), max_total, max_total)


def ordered_triple_sum(order: int, positive_triple: bool) -> PowerSeries:
    """Sum over lambda = (-i,-j,-k, i+j+k) (or (-i-j-k, k, j, i)) with i >= j >= k > 0
    of q^{i+j+k} / (lambda^! (1-q^i)(1-q^j)(1-q^k)(1-q^{i+j+k}))."""
    total = PowerSeries.zero(order)
    for i, j, k in nonincreasing_tuples(3, order):
        s = i + j + k
        parts = (-s, i, j, k) if positive_triple else (-i, -j, -k, s)
        lam = GenPartition.from_parts(parts)
        total = total + _series(_term(order, s, (i, j, k, s))).scale(Fraction(1, lam.factorial))
    return total


def ordered_balanced_sum(order: int) -> PowerSeries:
    """Sum over lambda = (-i, -j, l, k), i >= j > 0, k >= l > 0, i + j = k + l."""
    total = PowerSeries.zero(order)
    for s in range(2, order + 1):
        for i, j in nonincreasing_tuples(2, s):
            if i + j != s:
                continue
            for k, l in nonincreasing_tuples(2, s):
                if k + l != s:
                    continue
                lam = GenPartition.from_parts((-i, -j, l, k))
                total = total + _series(_term(order, s, (i, j, k, l))).scale(Fraction(1, lam.factorial))
    return total


def ordered_pair_sum(order: int) -> PowerSeries:
    """sum_{1 <= i <= j} (i+j-1)/2 * 1/(1+delta_ij) * q^{i+j}/((1-q^i)(1-q^j)(1-q^{i+j}));
    the weight 1/(1+delta_ij) is lambda^! of lambda = (-j, -i, i+j)."""
    total = PowerSeries.zero(order)
    for j, i in nonincreasing_tuples(2, order):
        lam = GenPartition.from_parts((-j, -i, i + j))
        weight = Fraction(i + j - 1, 2 * lam.factorial)
        total = total + _series(_term(order, i + j, (i, j, i + j))).scale(weight)
    return total


# ---------------------------------------------------------------------------
# the reduced series F_2^alpha, F_1^alpha, F_0^alpha

def f2_reduced_direct(p: SurfacePairings, order: int, ordered: bool = False) -> PowerSeries:
    """(q;q)^chi F_2^alpha as the explicit combination of nested sums.

    With ``ordered`` the three partition-indexed sums are evaluated literally
    over i >= j >= k with 1/lambda^! weights; otherwise their free-sum
    equivalents T_111/6 and T_22/4 are used.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    one_minus_k = p.binomial_pairing(1)
    one_minus_k_sq = p.binomial_pairing(2)
    one_minus_k_cube = p.binomial_pairing(3)
    total = PowerSeries.zero(order)
    if p.pair_e:
        total = total - (sum_family("S_n2", order) + sum_family("E_mix", order)).scale(p.pair_e)
    if p.pair_K2:
        total = total + (sum_family("S_2n1", order)
                         + sum_family("S_ij", order).scale(Fraction(1, 2))).scale(p.pair_K2)
    if ordered:
        neg_triple = ordered_triple_sum(order, positive_triple=False)
        pos_triple = ordered_triple_sum(order, positive_triple=True)
        balanced = ordered_balanced_sum(order)
    else:
        neg_triple = pos_triple = sum_family("T_111", order).scale(Fraction(1, 6))
        balanced = sum_family("T_22", order).scale(Fraction(1, 4))
    total = total + neg_triple.scale(one_minus_k) + pos_triple.scale(one_minus_k_cube)
    total = total - balanced.scale(one_minus_k_sq)
    return total


# The e_X coefficient is -S_n2 - E_mix with S_n2 = (5/12)Z(4) - (1/6)Z(2)^2 and
# E_mix = Z(2)^2; it is cross-checked against the Fock oracle.
F2_E_COEFF = -Fraction(5, 12) * Z(4) - Fraction(5, 6) * Z(2) ** 2
F2_ONE_COEFF = Fraction(1, 12) * Z(4) - Fraction(1, 3) * Z(2) ** 2
F2_K_COEFF = -Fraction(1, 6) * Z(4) + Fraction(2, 3) * Z(2) ** 2
F2_K2_COEFF = Fraction(13, 12) * Z(4) - Fraction(1, 3) * Z(2) ** 2 - Fraction(1, 4) * Z(3) + Fraction(1, 4) * Z(2)

THETA2_FORM = Fraction(1, 3) * Z(2) ** 2 - Fraction(1, 12) * Z(4)


def f2_reduced_symbolic(p: SurfacePairings) -> QZetaCombination:
    return (F2_E_COEFF * p.pair_e + F2_ONE_COEFF * p.pair_1
            + F2_K_COEFF * p.pair_K + F2_K2_COEFF * p.pair_K2)


def f0_reduced(p: SurfacePairings) -> QZetaCombination:
    return Z(2) * (p.pair_1 - p.pair_K + p.pair_e)


def f1_reduced(p: SurfacePairings) -> QZetaCombination:
    return (Z(3) - Z(2)) * ((p.pair_K - p.pair_K2) / 2)


def ch1_display(surface: SurfacePairings) -> QZetaCombination:
    surface._require("K2", "KL")
    return (Z(2) - Z(3)) * Fraction(surface.K2, 2) - Z(2) * surface.KL


def ch1_reduced(surface: SurfacePairings) -> QZetaCombination:
    """<ch_1^L>' assembled from F_1 at alpha = 1_X and F_0 at alpha = L."""
    surface._require("K2", "KL")
    assembled = f1_reduced(surface.with_unit()) + f0_reduced(surface.with_line_class())
    if assembled != ch1_display(surface):
        raise SelfCheckError("assembled ch1 series disagrees with its closed form")
    return assembled


def ch2_display(surface: SurfacePairings) -> QZetaCombination:
    surface._require("K2", "KL", "L2")
    return (F2_E_COEFF * surface.chi
            + (Z(3) - Z(2)) * Fraction(surface.KL, 2)
            + F2_K2_COEFF * surface.K2
            + Z(2) * Fraction(surface.L2, 2))


def ch2_assembled(surface: SurfacePairings) -> QZetaCombination:
    """F_2 at alpha = 1_X, plus F_1 at alpha = L, plus F_0 at alpha = L^2/2."""
    surface._require("K2", "KL", "L2")
    return (f2_reduced_symbolic(surface.with_unit())
            + f1_reduced(surface.with_line_class())
            + f0_reduced(surface.with_point_multiple(Fraction(surface.L2, 2))))


def ch2_reduced(surface: SurfacePairings) -> QZetaCombination:
    assembled = ch2_assembled(surface)
    if assembled != ch2_display(surface):
        raise SelfCheckError("assembled ch2 series disagrees with its closed form")
    return assembled
