"""
Multiple q-zeta values, Eisenstein series and recognition of quasimodular forms.

The central object is the generic nested sum

    Z_Q(s_1, ..., s_l) = sum_{n_1 > ... > n_l >= 1} prod_i Q_{s_i}(q^{n_i}) / (1 - q^{n_i})^{s_i}

for a family of polynomials Q_s with Q_s(0) = 0.  Two families are provided:
the Eulerian family (giving the bracket series [s_1, ..., s_l]) and the
Okounkov family (giving Z(s_1, ..., s_l)).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Iterable, Mapping, Sequence, Union

from .linalg import IncrementalSystem
from .series import PowerSeries, as_fraction, divide_one_minus, format_fraction


# ---------------------------------------------------------------------------
# compositions and polynomials

@dataclass(frozen=True, order=True)
class Composition:
    entries: tuple[int, ...]

    def __post_init__(self):
        if any((not isinstance(s, int)) or s < 1 for s in self.entries):
            raise ValueError(f"composition entries must be positive integers, got {self.entries}")

    @classmethod
    def of(cls, value: Union["Composition", int, Sequence[int]]) -> "Composition":
        if isinstance(value, Composition):
            return value
        if isinstance(value, int):
            return cls((value,))
        return cls(tuple(int(s) for s in value))

    @property
    def weight(self) -> int:
        return sum(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __str__(self):
        return "(" + ",".join(map(str, self.entries)) + ")"


CompositionLike = Union[Composition, int, Sequence[int]]


@dataclass(frozen=True)
class PolynomialQ:
    """Univariate polynomial in t over Q; coefficients listed from t^0 upward."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        values = list(self.coeffs)
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in values))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable) -> "PolynomialQ":
        return cls(tuple(as_fraction(c) for c in coeffs))

    @property
    def degree(self) -> int:
        if not self.coeffs:
            raise ValueError("the zero polynomial has no degree")
        return len(self.coeffs) - 1

    def __call__(self, t):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def scale(self, c) -> "PolynomialQ":
        c = as_fraction(c)
        return PolynomialQ(tuple(c * a for a in self.coeffs))

    def __mul__(self, other: "PolynomialQ") -> "PolynomialQ":
        if not self.coeffs or not other.coeffs:
            return PolynomialQ(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolynomialQ(tuple(out))

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                mono = "1" if k == 0 else ("t" if k == 1 else f"t^{k}")
                terms.append(mono if c == 1 and k else f"{c}*{mono}")
        return " + ".join(terms) or "0"


def eulerian_numerator(s: int) -> PolynomialQ:
    """R(t) = t P_{s-1}(t), the numerator with R(t)/(1-t)^s = sum_{d>=1} d^(s-1) t^d.

    The coefficients r_0..r_D follow from the unit lower-triangular system
    obtained by multiplying the truncated right-hand side by (1-t)^s; the
    coefficients beyond degree D are checked to vanish as well.
    """
    if s < 1:
        raise ValueError("the Eulerian numerator needs s >= 1")
    degree = max(s - 1, 1)
    check = 2 * s + 2
    rhs = [0] + [d ** (s - 1) for d in range(1, check + 1)]
    binom = [(-1) ** j * comb(s, j) for j in range(s + 1)]
    out = []
    for k in range(check + 1):
        out.append(sum(binom[j] * rhs[k - j] for j in range(min(k, s) + 1)))
    if any(out[degree + 1:]):
        raise ArithmeticError(f"Eulerian numerator for s={s} did not terminate at degree {degree}")
    return PolynomialQ.from_coeffs(out[: degree + 1])


def q_poly(family: str, s: int) -> PolynomialQ:
    """Q_s^E(t) = t P_{s-1}(t)/(s-1)!  or the Okounkov polynomial Q_s^O(t)."""
    if family == "E":
        if s < 1:
            raise ValueError("Q^E is defined for s >= 1")
        return eulerian_numerator(s).scale(Fraction(1, factorial(s - 1)))
    if family == "O":
        if s < 2:
            raise ValueError("Q^O is defined for s >= 2")
        if s % 2 == 0:
            return PolynomialQ.from_coeffs([0] * (s // 2) + [1])
        return PolynomialQ.from_coeffs([0] * ((s - 1) // 2) + [1, 1])
    raise ValueError(f"unknown polynomial family {family!r}; expected 'E' or 'O'")


Family = Union[Mapping[int, PolynomialQ], Callable[[int], PolynomialQ]]


def _family_member(Q: Family, s: int) -> PolynomialQ:
    poly = Q[s] if isinstance(Q, Mapping) else Q(s)
    if poly.coeffs and poly.coeffs[0] != 0:
        raise ValueError(f"Q_{s}(0) must vanish for the nested sum to converge q-adically")
    return poly


def _factor(poly: PolynomialQ, s: int, n: int, order: int) -> PowerSeries:
    # Q(q^n) / (1 - q^n)^s, valuation >= n
    values = [Fraction(0)] * (order + 1)
    for k, c in enumerate(poly.coeffs):
        if c and n * k <= order:
            values[n * k] = c
    divide_one_minus(values, n, s, start=n)
    return PowerSeries(tuple(values))


def z_generic(Q: Family, comp: CompositionLike, order: int) -> PowerSeries:
    """The nested sum Z_Q(comp) truncated at ``order``.

    Every factor has q-adic valuation at least n_i, so only n_1 <= order can
    contribute.  The sum is accumulated from the innermost index outward:
    prefix[n] holds the partial nested sum over all later indices below n.
    """
    comp = Composition.of(comp)
    polys = [_family_member(Q, s) for s in comp.entries]
    if not comp.entries:
        return PowerSeries.one(order)
    zero = PowerSeries.zero(order)
    prefix: list[PowerSeries] | None = None
    for poly, s in zip(reversed(polys), reversed(comp.entries)):
        running = zero
        new_prefix = [zero] * (order + 2)
        for n in range(1, order + 2):
            new_prefix[n] = running
            if n > order:
                break
            inner = None if prefix is None else prefix[n]
            if inner is not None and inner.is_zero():
                continue
            term = _factor(poly, s, n, order)
            if inner is not None:
                term = term * inner
            running = running + term
        prefix = new_prefix
    return prefix[order + 1]


def eulerian_family(s: int) -> PolynomialQ:
    return _eulerian_cached(s)


def okounkov_family(s: int) -> PolynomialQ:
    return _okounkov_cached(s)


@lru_cache(maxsize=None)
def _eulerian_cached(s: int) -> PolynomialQ:
    return q_poly("E", s)


@lru_cache(maxsize=None)
def _okounkov_cached(s: int) -> PolynomialQ:
    return q_poly("O", s)


class SelfCheckError(ArithmeticError):
    """Two independent computations of the same series disagreed."""


def bracket_divisor_sum(comp: CompositionLike, order: int) -> PowerSeries:
    """[s_1,...,s_l] from the multi-index sum over n_i, d_i with sum n_i d_i <= order.

    Independent of the Eulerian polynomials: the coefficients are accumulated
    directly as prod d_i^(s_i - 1) / prod (s_i - 1)!.
    """
    comp = Composition.of(comp)
    s = comp.entries
    length = len(s)
    values = [0] * (order + 1)
    if length == 0:
        values[0] = 1
        return PowerSeries.from_ints(values)

    def walk(i: int, upper: int, exponent: int, weight: int):
        remaining = length - i - 1
        floor = remaining * (remaining + 1) // 2  # smallest exponent the later indices can add
        for n in range(remaining + 1, upper):
            if exponent + n + floor > order:
                break
            d = 1
            while exponent + n * d + floor <= order:
                w = weight * d ** (s[i] - 1)
                if remaining == 0:
                    values[exponent + n * d] += w
                else:
                    walk(i + 1, n, exponent + n * d, w)
                d += 1

    walk(0, order + 1, 0, 1)
    den = 1
    for si in s:
        den *= factorial(si - 1)
    return PowerSeries.from_ints(values, Fraction(1, den))


def bracket(comp: CompositionLike, order: int, self_check: bool = True) -> PowerSeries:
    """Bachmann-Kuehn bracket [s_1, ..., s_l]; all s_i >= 1.

    With ``self_check`` the nested sum over Eulerian numerators is compared
    with the multi-index divisor form and a SelfCheckError is raised on any
    disagreement.
    """
    comp = Composition.of(comp)
    result = z_generic(eulerian_family, comp, order)
    if self_check:
        other = bracket_divisor_sum(comp, order)
        k = result.first_mismatch(other)
        if k is not None:
            raise SelfCheckError(f"bracket {comp} disagrees with its divisor form at q^{k}")
    return result


def okounkov_z(comp: CompositionLike, order: int) -> PowerSeries:
    """Z(s_1, ..., s_l) with every s_i >= 2."""
    comp = Composition.of(comp)
    if any(s < 2 for s in comp.entries):
        raise ValueError(f"Okounkov series need every entry >= 2, got {comp}")
    return _okounkov_cached_series(comp.entries, order)


@lru_cache(maxsize=512)
def _okounkov_cached_series(entries: tuple[int, ...], order: int) -> PowerSeries:
    return z_generic(okounkov_family, Composition(entries), order)


# ---------------------------------------------------------------------------
# Bernoulli numbers and Eisenstein series

@dataclass(frozen=True)
class BernoulliTable:
    values: tuple[Fraction, ...]

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]

    def __len__(self):
        return len(self.values)


def bernoulli(upto: int) -> BernoulliTable:
    """B_0..B_upto from t/(e^t - 1): sum_{k<=m} C(m+1, k) B_k = 0 for m >= 1."""
    values = [Fraction(1)]
    for m in range(1, upto + 1):
        acc = sum((comb(m + 1, k) * values[k] for k in range(m)), Fraction(0))
        values.append(-acc / (m + 1))
    return BernoulliTable(tuple(values))


def divisor_power_sums(power: int, order: int) -> list[int]:
    """sigma_power(n) for n = 0..order, with sigma(0) = 0."""
    sigma = [0] * (order + 1)
    for d in range(1, order + 1):
        dp = d ** power
        for n in range(d, order + 1, d):
            sigma[n] += dp
    return sigma


def eisenstein(two_k: int, order: int) -> PowerSeries:
    """G_{2k} = (-B_{2k}/(4k) + sum_n sigma_{2k-1}(n) q^n) / (2k-1)!."""
    if two_k < 2 or two_k % 2:
        raise ValueError("Eisenstein series are indexed by even weights >= 2")
    k = two_k // 2
    b = bernoulli(two_k)[two_k]
    scale = Fraction(1, factorial(two_k - 1))
    values = [Fraction(v) for v in divisor_power_sums(two_k - 1, order)]
    values[0] = -b / (4 * k)
    return PowerSeries(tuple(scale * v for v in values))


# ---------------------------------------------------------------------------
# symbolic combinations

Monomial = tuple[Composition, ...]


def _monomial_key(mono: Monomial):
    return (sum(c.weight for c in mono), len(mono), tuple(c.entries for c in mono))


def _clean(terms: Mapping) -> dict:
    return {k: v for k, v in terms.items() if v != 0}


class QZetaCombination:
    """A Q-linear combination of products of Okounkov series Z(s_1, ..., s_l).

    A term is keyed by a sorted tuple of compositions (the empty tuple is the
    constant term), so Z(2)^2 is the key ((2,), (2,)).
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        cleaned = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(sorted(Composition.of(c) for c in mono))
            for comp in mono:
                if any(s < 2 for s in comp.entries):
                    raise ValueError(f"Okounkov compositions need entries >= 2, got {comp}")
            cleaned[mono] = cleaned.get(mono, Fraction(0)) + as_fraction(coeff)
        self._terms = _clean(cleaned)

    @classmethod
    def z(cls, *entries: int) -> "QZetaCombination":
        return cls({(Composition(tuple(entries)),): 1})

    @classmethod
    def constant_of(cls, c) -> "QZetaCombination":
        return cls({(): c})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    @property
    def constant(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _monomial_key(kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def weight(self) -> int:
        return max((sum(c.weight for c in m) for m in self._terms), default=0)

    def __eq__(self, other):
        if isinstance(other, QZetaCombination):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def _coerce(self, other) -> "QZetaCombination":
        if isinstance(other, QZetaCombination):
            return other
        return QZetaCombination.constant_of(as_fraction(other))

    def __add__(self, other):
        other = self._coerce(other)
        merged = dict(self._terms)
        for k, v in other._terms.items():
            merged[k] = merged.get(k, Fraction(0)) + v
        return QZetaCombination(merged)

    __radd__ = __add__

    def __neg__(self):
        return QZetaCombination({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, QZetaCombination):
            c = as_fraction(other)
            return QZetaCombination({k: c * v for k, v in self._terms.items()})
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = tuple(sorted(m1 + m2))
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return QZetaCombination(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = QZetaCombination.constant_of(1)
        for _ in range(e):
            result = result * self
        return result

    def __repr__(self):
        return f"QZetaCombination({self})"

    def __str__(self):
        return _render(self.items(), _render_zeta_monomial)

    def to_qm(self) -> "QMExpression | None":
        """The same element as a polynomial in Z(2), Z(4), Z(6), if it is one."""
        out = {}
        for mono, coeff in self._terms.items():
            exps = [0, 0, 0]
            for comp in mono:
                if len(comp) != 1 or comp.entries[0] not in (2, 4, 6):
                    return None
                exps[comp.entries[0] // 2 - 1] += 1
            out[tuple(exps)] = coeff
        return QMExpression(out)

    def to_dict(self) -> dict:
        terms = []
        for mono, coeff in self.items():
            if not mono:
                continue
            if len(mono) == 1:
                terms.append({"composition": list(mono[0].entries), "coeff": format_fraction(coeff)})
            else:
                terms.append({"product": [list(c.entries) for c in mono], "coeff": format_fraction(coeff)})
        return {"constant": format_fraction(self.constant), "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "QZetaCombination":
        terms: dict = {(): as_fraction(data.get("constant", "0"))}
        for term in data.get("terms", []):
            if "composition" in term:
                mono = (Composition.of(term["composition"]),)
            else:
                mono = tuple(Composition.of(c) for c in term["product"])
            mono = tuple(sorted(mono))
            terms[mono] = terms.get(mono, Fraction(0)) + as_fraction(term["coeff"])
        return cls(terms)

    @classmethod
    def from_json(cls, text: str) -> "QZetaCombination":
        return cls.from_dict(json.loads(text))


def Z(*entries: int) -> QZetaCombination:
    """Symbolic Okounkov series Z(s_1, ..., s_l)."""
    return QZetaCombination.z(*entries)


def _render_zeta_monomial(mono: Monomial) -> str:
    counts: dict[Composition, int] = {}
    for comp in mono:
        counts[comp] = counts.get(comp, 0) + 1
    pieces = []
    for comp, e in counts.items():
        base = "Z(" + ",".join(map(str, comp.entries)) + ")"
        pieces.append(base if e == 1 else f"{base}^{e}")
    return "*".join(pieces)


def _render(items, render_mono) -> str:
    out = []
    for mono, coeff in items:
        body = render_mono(mono)
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        out.append(f"{sign} {text}")
    if not out:
        return "0"
    joined = " ".join(out)
    return joined[2:] if joined.startswith("+ ") else "-" + joined[2:]


def qzeta_eval(c: QZetaCombination, order: int) -> PowerSeries:
    """Expand a symbolic combination as a power series."""
    total = PowerSeries.zero(order)
    for mono, coeff in c.items():
        term = PowerSeries.one(order)
        for comp in mono:
            term = term * okounkov_z(comp, order)
        total = total + term.scale(coeff)
    return total


# ---------------------------------------------------------------------------
# quasimodular forms as polynomials in Z(2), Z(4), Z(6)

Triple = tuple[int, int, int]


def _triple_weight(t: Triple) -> int:
    return 2 * t[0] + 4 * t[1] + 6 * t[2]


class QMExpression:
    """Element of Q[Z(2), Z(4), Z(6)] keyed by exponent triples (a, b, c)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Triple, object] | None = None):
        cleaned = {}
        for t, coeff in (terms or {}).items():
            t = tuple(int(x) for x in t)
            if len(t) != 3 or min(t) < 0:
                raise ValueError(f"exponent triples must be three naturals, got {t}")
            cleaned[t] = cleaned.get(t, Fraction(0)) + as_fraction(coeff)
        self._terms = _clean(cleaned)

    @property
    def terms(self) -> dict[Triple, Fraction]:
        return dict(self._terms)

    @property
    def constant(self) -> Fraction:
        return self._terms.get((0, 0, 0), Fraction(0))

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (_triple_weight(kv[0]), kv[0]))

    def weight(self) -> int:
        return max((_triple_weight(t) for t in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, QMExpression):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"QMExpression({self})"

    def __str__(self):
        def render(t):
            names = []
            for name, e in zip(("Z(2)", "Z(4)", "Z(6)"), t):
                if e:
                    names.append(name if e == 1 else f"{name}^{e}")
            return "*".join(names)
        return _render(self.items(), render)

    def to_qzeta(self) -> QZetaCombination:
        out = {}
        for (a, b, c), coeff in self._terms.items():
            mono = (Composition((2,)),) * a + (Composition((4,)),) * b + (Composition((6,)),) * c
            out[mono] = coeff
        return QZetaCombination(out)

    def expand(self, order: int) -> PowerSeries:
        return qzeta_eval(self.to_qzeta(), order)

    def to_dict(self) -> dict:
        terms = [
            {"monomial": list(t), "coeff": format_fraction(c)}
            for t, c in self.items()
            if t != (0, 0, 0)
        ]
        return {"constant": format_fraction(self.constant), "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "QMExpression":
        terms = {(0, 0, 0): as_fraction(data.get("constant", "0"))}
        for term in data.get("terms", []):
            t = tuple(term["monomial"])
            terms[t] = terms.get(t, Fraction(0)) + as_fraction(term["coeff"])
        return cls(terms)

    @classmethod
    def from_json(cls, text: str) -> "QMExpression":
        return cls.from_dict(json.loads(text))


def qm_monomials(weight_bound: int) -> list[Triple]:
    """Exponent triples with 2a + 4b + 6c <= weight_bound, graded then lexicographic."""
    triples = [
        (a, b, c)
        for c in range(weight_bound // 6 + 1)
        for b in range((weight_bound - 6 * c) // 4 + 1)
        for a in range((weight_bound - 6 * c - 4 * b) // 2 + 1)
    ]
    return sorted(triples, key=lambda t: (_triple_weight(t), t))


def qm_basis(weight_bound: int, order: int) -> list[tuple[Triple, PowerSeries]]:
    z2, z4, z6 = (okounkov_z(s, order) for s in (2, 4, 6))
    out = []
    for a, b, c in qm_monomials(weight_bound):
        out.append(((a, b, c), (z2 ** a) * (z4 ** b) * (z6 ** c)))
    return out


class RecognitionFailure(Exception):
    """No unique element of Q[Z(2), Z(4), Z(6)] reproduces the given coefficients.

    ``index`` is the first coefficient that could not be matched, or None when
    the fitting window left the system underdetermined (``ambiguous``).
    """

    def __init__(self, message: str, index: int | None = None, ambiguous: bool = False):
        super().__init__(message)
        self.index = index
        self.ambiguous = ambiguous


def qm_recognize(
    f: PowerSeries,
    weight_bound: int,
    fit_count: int | None = None,
    verify_count: int | None = None,
) -> QMExpression:
    """Write ``f`` as a polynomial in Z(2), Z(4), Z(6) of weight <= weight_bound.

    The coefficients of q^0 .. q^(fit_count-1) determine the candidate exactly;
    the next ``verify_count`` coefficients must then agree as well.
    """
    size = len(qm_monomials(weight_bound))
    if fit_count is None:
        fit_count = size
    if verify_count is None:
        verify_count = len(f) - fit_count
    if fit_count < size:
        raise ValueError(f"fit_count {fit_count} is smaller than the basis size {size}")
    if verify_count < 0 or fit_count + verify_count > len(f):
        raise ValueError(
            f"need {fit_count + verify_count} coefficients, the series has {len(f)}"
        )
    basis = qm_basis(weight_bound, fit_count + verify_count - 1)
    system = IncrementalSystem(len(basis))
    for k in range(fit_count):
        if not system.add_equation([series[k] for _, series in basis], f[k]):
            raise RecognitionFailure(f"no combination matches the coefficients up to q^{k}", index=k)
    solution = system.unique_solution()
    if solution is None:
        raise RecognitionFailure(
            "ambiguous: the fitting window does not determine the combination; increase fit_count",
            ambiguous=True,
        )
    for k in range(fit_count, fit_count + verify_count):
        predicted = sum((x * series[k] for x, (_, series) in zip(solution, basis)), Fraction(0))
        if predicted != f[k]:
            raise RecognitionFailure(f"fitted combination disagrees at q^{k}", index=k)
    return QMExpression({t: x for (t, _), x in zip(basis, solution)})
