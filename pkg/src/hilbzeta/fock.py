"""
Brute-force Fock space of a model surface, used as an independent oracle.

The cohomology of the surface is modelled by a small Frobenius ring with
basis 1, D_1..D_r, pt.  Fock states are sparse dicts from monomials to
Fractions; a monomial is a sorted tuple of (n, j) pairs standing for the
creation operator a_{-n}(b_j).  Everything is truncated at total degree
``n_max``; creation operators that would leave the window drop the term and
mark the operator as truncated.  Traces only read diagonal blocks, which
normal-ordered operators compute exactly below the window.
"""
from __future__ import annotations

import json
from bisect import insort
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .hilbert import GenPartition, SurfacePairings, zero_size_partitions
from .linalg import solve_exact
from .series import PowerSeries

Monomial = tuple[tuple[int, int], ...]
State = dict[Monomial, Fraction]
Element = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# model cohomology rings

def _hyperbolic() -> list[list[int]]:
    return [[0, 1], [1, 0]]


def _e8_negative() -> list[list[int]]:
    # Cartan matrix of E8, negated
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]
    m = [[0] * 8 for _ in range(8)]
    for i in range(8):
        m[i][i] = -2
    for a, b in edges:
        m[a][b] = m[b][a] = 1
    return m


def _block_diagonal(blocks: Sequence[list[list[int]]]) -> list[list[int]]:
    size = sum(len(b) for b in blocks)
    out = [[0] * size for _ in range(size)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return out


class FrobeniusRing:
    """Even cohomology of a surface with b_1 = 0.

    Index 0 is the unit, 1..r are divisor classes with intersection matrix
    ``intersection``, and r + 1 is the point class.
    """

    def __init__(self, intersection: Sequence[Sequence[int]], K: Sequence[int],
                 L: Sequence[int] | None = None, chi: int | None = None, name: str = "model"):
        r = len(intersection)
        if any(len(row) != r for row in intersection):
            raise ValueError("intersection matrix must be square")
        if any(intersection[i][j] != intersection[j][i] for i in range(r) for j in range(r)):
            raise ValueError("intersection matrix must be symmetric")
        if len(K) != r or (L is not None and len(L) != r):
            raise ValueError("K and L need one coordinate per divisor class")
        if chi is not None and chi != 2 + r:
            raise ValueError(f"chi must equal 2 + r = {2 + r} for a model with b_1 = 0")
        self.name = name
        self.r = r
        self.dim = r + 2
        self.pt = r + 1
        self.Q = [[int(v) for v in row] for row in intersection]
        self.chi = 2 + r
        self.unit = self.basis_vector(0)
        self.point = self.basis_vector(self.pt)
        self.K = self.divisor(K)
        self.L = None if L is None else self.divisor(L)
        self.euler = self.scale(self.point, self.chi)
        self.gram = [[self.pairing(self.basis_vector(i), self.basis_vector(j)) for j in range(self.dim)]
                     for i in range(self.dim)]
        self.dual = self._dual_basis()
        self._tau_cache: dict[tuple[int, Element], list[tuple[Fraction, tuple[int, ...]]]] = {}

    # -- construction -------------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping) -> "FrobeniusRing":
        try:
            r = int(data["r"])
            q = data["intersection"]
            k = data["K"]
        except KeyError as exc:
            raise ValueError(f"ring description is missing {exc.args[0]!r}") from None
        if len(q) != r:
            raise ValueError("intersection matrix size does not match r")
        return cls(q, k, data.get("L"), data.get("chi"), name=data.get("name", "model"))

    @classmethod
    def from_json(cls, text: str) -> "FrobeniusRing":
        return cls.from_dict(json.loads(text))

    @classmethod
    def projective_plane(cls) -> "FrobeniusRing":
        return cls([[1]], [-3], [1], name="P2")

    @classmethod
    def quadric(cls) -> "FrobeniusRing":
        return cls(_hyperbolic(), [-2, -2], [1, 0], name="P1xP1")

    @classmethod
    def k3_small(cls) -> "FrobeniusRing":
        """K-trivial stand-in with a hyperbolic plane as lattice (chi = 4)."""
        return cls(_hyperbolic(), [0, 0], [1, 1], name="K3-small")

    @classmethod
    def k3(cls) -> "FrobeniusRing":
        lattice = _block_diagonal([_hyperbolic()] * 3 + [_e8_negative()] * 2)
        L = [1, 1] + [0] * 20
        return cls(lattice, [0] * 22, L, name="K3")

    # -- elements -----------------------------------------------------------

    def basis_vector(self, i: int) -> Element:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def divisor(self, coords: Sequence[int]) -> Element:
        return (Fraction(0),) + tuple(Fraction(c) for c in coords) + (Fraction(0),)

    def element(self, unit=0, divisor: Sequence = (), point=0) -> Element:
        d = list(divisor) + [0] * (self.r - len(divisor))
        return (Fraction(unit),) + tuple(Fraction(c) for c in d) + (Fraction(point),)

    @staticmethod
    def scale(x: Element, c) -> Element:
        return tuple(c * v for v in x)

    @staticmethod
    def add(x: Element, y: Element) -> Element:
        return tuple(a + b for a, b in zip(x, y))

    def multiply(self, x: Element, y: Element) -> Element:
        r = self.r
        out = [Fraction(0)] * self.dim
        out[0] = x[0] * y[0]
        for i in range(1, r + 1):
            out[i] = x[0] * y[i] + x[i] * y[0]
        top = x[0] * y[self.pt] + x[self.pt] * y[0]
        for i in range(1, r + 1):
            if x[i]:
                for j in range(1, r + 1):
                    if y[j] and self.Q[i - 1][j - 1]:
                        top += x[i] * y[j] * self.Q[i - 1][j - 1]
        out[self.pt] = top
        return tuple(out)

    def integral(self, x: Element) -> Fraction:
        return x[self.pt]

    def pairing(self, x: Element, y: Element) -> Fraction:
        return self.integral(self.multiply(x, y))

    def _dual_basis(self) -> list[Element]:
        """b_j^dual with <b_i, b_j^dual> = delta_ij."""
        out = []
        for j in range(self.dim):
            rhs = [Fraction(int(i == j)) for i in range(self.dim)]
            sol = solve_exact(self.gram, rhs)
            if sol is None:
                raise ValueError("intersection form is degenerate")
            out.append(tuple(sol))
        return out

    @property
    def K2(self) -> int:
        return int(self.pairing(self.K, self.K))

    @property
    def KL(self) -> int:
        if self.L is None:
            raise ValueError("ring has no line class")
        return int(self.pairing(self.K, self.L))

    @property
    def L2(self) -> int:
        if self.L is None:
            raise ValueError("ring has no line class")
        return int(self.pairing(self.L, self.L))

    def pairings(self, alpha: Element) -> SurfacePairings:
        K2 = self.multiply(self.K, self.K)
        return SurfacePairings(
            chi=self.chi,
            pair_e=self.pairing(self.euler, alpha),
            pair_1=self.integral(alpha),
            pair_K=self.pairing(self.K, alpha),
            pair_K2=self.pairing(K2, alpha),
            K2=self.K2,
            KL=None if self.L is None else self.KL,
            L2=None if self.L is None else self.L2,
        )

    def surface(self) -> SurfacePairings:
        return SurfacePairings.for_surface(self.chi, self.K2,
                                           None if self.L is None else self.KL,
                                           None if self.L is None else self.L2)

    # -- diagonal pushforward -------------------------------------------------

    def tau(self, k: int, alpha: Element) -> list[tuple[Fraction, tuple[int, ...]]]:
        """Kuenneth expansion of the k-fold diagonal pushforward of alpha.

        Returned as (c, (j_1..j_k)) meaning c * b_{j_1}^dual x ... x b_{j_k}^dual,
        with c = integral of alpha * b_{j_1} * ... * b_{j_k}.
        """
        key = (k, tuple(alpha))
        if key in self._tau_cache:
            return self._tau_cache[key]
        terms: list[tuple[Fraction, tuple[int, ...]]] = []

        def walk(prod: Element, chosen: tuple[int, ...]):
            if not any(prod):
                return
            if len(chosen) == k:
                c = self.integral(prod)
                if c:
                    terms.append((c, chosen))
                return
            for j in range(self.dim):
                walk(self.multiply(prod, self.basis_vector(j)), chosen + (j,))

        walk(tuple(alpha), ())
        self._tau_cache[key] = terms
        return terms

    def frobenius_defect(self) -> list[tuple[int, int]]:
        """Pairs (alpha, beta) of basis indices where contracting the first
        tensor factor of tau_2(alpha) against beta fails to give alpha * beta."""
        bad = []
        for a in range(self.dim):
            alpha = self.basis_vector(a)
            for b in range(self.dim):
                beta = self.basis_vector(b)
                acc = tuple(Fraction(0) for _ in range(self.dim))
                for c, (j1, j2) in self.tau(2, alpha):
                    w = self.pairing(self.dual[j1], beta)
                    if w:
                        acc = self.add(acc, self.scale(self.dual[j2], c * w))
                if acc != self.multiply(alpha, beta):
                    bad.append((a, b))
        return bad


# ---------------------------------------------------------------------------
# Fock space and operators

def _degree(mono: Monomial) -> int:
    return sum(n for n, _ in mono)


def _add_into(acc: State, key: Monomial, value: Fraction):
    v = acc.get(key, 0) + value
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class FockOperator:
    """Linear operator given column by column; columns are cached."""

    def __init__(self, space: "FockSpace", column: Callable[[Monomial], State], truncated: bool = False):
        self.space = space
        self._column = column
        self._cache: dict[Monomial, State] = {}
        self.truncated = truncated

    def column(self, mono: Monomial) -> State:
        col = self._cache.get(mono)
        if col is None:
            col = self._column(mono)
            self._cache[mono] = col
        return col

    def apply(self, state: Mapping[Monomial, Fraction]) -> State:
        out: State = {}
        for mono, c in state.items():
            if c:
                for m2, v in self.column(mono).items():
                    _add_into(out, m2, c * v)
        return out

    def __call__(self, state: Mapping[Monomial, Fraction]) -> State:
        return self.apply(state)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.space, lambda m: self.apply(other.column(m)),
                            self.truncated or other.truncated)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        def col(m):
            out = dict(self.column(m))
            for k, v in other.column(m).items():
                _add_into(out, k, v)
            return out
        return FockOperator(self.space, col, self.truncated or other.truncated)

    def __neg__(self) -> "FockOperator":
        return self.scale(-1)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return self + (-other)

    def scale(self, c) -> "FockOperator":
        c = Fraction(c)
        if c == 0:
            return self.space.zero()
        return FockOperator(self.space, lambda m: {k: c * v for k, v in self.column(m).items()},
                            self.truncated)

    def __mul__(self, c) -> "FockOperator":
        return self.scale(c)

    __rmul__ = __mul__

    def block(self, degree: int) -> dict[Monomial, State]:
        return {m: self.column(m) for m in self.space.basis(degree)}

    def diagonal_trace(self, degree: int) -> Fraction:
        return sum((self.column(m).get(m, Fraction(0)) for m in self.space.basis(degree)), Fraction(0))


def sum_operators(space: "FockSpace", ops: Iterable[tuple[Fraction, FockOperator]]) -> FockOperator:
    """Linear combination sum c_i * op_i, computed column-wise in one pass."""
    ops = [(Fraction(c), op) for c, op in ops if c]

    def col(m):
        out: State = {}
        for c, op in ops:
            for k, v in op.column(m).items():
                _add_into(out, k, c * v)
        return out

    return FockOperator(space, col, any(op.truncated for _, op in ops))


class FockSpace:
    """Degree-truncated Fock space over a model ring."""

    def __init__(self, ring: FrobeniusRing, n_max: int):
        if n_max < 0:
            raise ValueError("n_max must be a natural number")
        self.ring = ring
        self.n_max = n_max
        self._basis: dict[int, list[Monomial]] = {}
        self._weight_cache: dict[Element, list[Fraction]] = {}

    vacuum: Monomial = ()

    def basis(self, degree: int) -> list[Monomial]:
        """Colored partitions of ``degree``: monomials in a_{-n}(b_j), sorted."""
        if degree in self._basis:
            return self._basis[degree]
        gens = [(n, j) for n in range(1, degree + 1) for j in range(self.ring.dim)]
        out: list[Monomial] = []

        def walk(start: int, left: int, chosen: list[tuple[int, int]]):
            if left == 0:
                out.append(tuple(chosen))
                return
            for idx in range(start, len(gens)):
                g = gens[idx]
                if g[0] > left:
                    break
                chosen.append(g)
                walk(idx, left - g[0], chosen)
                chosen.pop()

        walk(0, degree, [])
        self._basis[degree] = out
        return out

    def dimension(self, degree: int) -> int:
        return len(self.basis(degree))

    def identity(self) -> FockOperator:
        return FockOperator(self, lambda m: {m: Fraction(1)})

    def zero(self) -> FockOperator:
        return FockOperator(self, lambda m: {})

    # raw actions on states; used by the operator builders

    def create(self, n: int, beta: Element, state: Mapping[Monomial, Fraction]) -> tuple[State, bool]:
        out: State = {}
        dropped = False
        coords = [(j, b) for j, b in enumerate(beta) if b]
        for mono, c in state.items():
            if _degree(mono) + n > self.n_max:
                dropped = dropped or bool(coords)
                continue
            for j, b in coords:
                new = list(mono)
                insort(new, (n, j))
                _add_into(out, tuple(new), c * b)
        return out, dropped

    def annihilate(self, n: int, beta: Element, state: Mapping[Monomial, Fraction]) -> State:
        weights = self._weights(beta)
        out: State = {}
        for mono, c in state.items():
            previous = None
            for idx, gen in enumerate(mono):
                if gen == previous:
                    continue
                previous = gen
                m, j = gen
                if m != n or not weights[j]:
                    continue
                k = mono.count(gen)
                new = mono[:idx] + mono[idx + 1:]
                _add_into(out, new, c * (-n * k) * weights[j])
        return out

    def _weights(self, beta: Element) -> list[Fraction]:
        """<beta, b_j> for every basis index j, cached per class."""
        w = self._weight_cache.get(beta)
        if w is None:
            ring = self.ring
            w = [ring.pairing(beta, ring.basis_vector(j)) for j in range(ring.dim)]
            self._weight_cache[beta] = w
        return w

    def act(self, n: int, beta: Element, state: Mapping[Monomial, Fraction]) -> tuple[State, bool]:
        if n < 0:
            return self.create(-n, beta, state)
        if n > 0:
            return self.annihilate(n, beta, state), False
        return {}, False


def heisenberg(space: FockSpace, n: int, alpha: Element) -> FockOperator:
    """a_n(alpha); n = 0 gives the zero operator."""
    if n == 0:
        return space.zero()
    op = FockOperator(space, lambda m: {})

    def col(m):
        out, dropped = space.act(n, alpha, {m: Fraction(1)})
        if dropped:
            op.truncated = True
        return out

    op._column = col
    return op


def a_lambda(space: FockSpace, lam: GenPartition, alpha: Element) -> FockOperator:
    """a_lambda(alpha): the ordered Heisenberg monomial applied to tau_{l(lambda)} alpha.

    Creation operators stand to the left with the largest |part| first, then
    annihilations in increasing order; the rightmost operator acts first.
    """
    ring = space.ring
    if lam.length == 0:
        return space.identity().scale(ring.integral(alpha))
    parts = lam.operator_order()
    if any(abs(p) > space.n_max for p in parts):
        return space.zero()
    terms = ring.tau(len(parts), alpha)
    op = FockOperator(space, lambda m: {})

    def col(m):
        out: State = {}
        for c, js in terms:
            state: State = {m: Fraction(1)}
            for p, j in zip(reversed(parts), reversed(js)):
                state, dropped = space.act(p, ring.dual[j], state)
                if dropped:
                    op.truncated = True
                if not state:
                    break
            for k, v in state.items():
                _add_into(out, k, c * v)
        return out

    op._column = col
    return op


def g2_operator(space: FockSpace, alpha: Element) -> FockOperator:
    """The degree-2 Chern character operator of the tautological bundle."""
    ring = space.ring
    n_max = space.n_max
    K_alpha = ring.multiply(ring.K, alpha)
    K2_alpha = ring.multiply(ring.K, K_alpha)
    e_alpha = ring.multiply(ring.euler, alpha)
    ops: list[tuple[Fraction, FockOperator]] = []
    for lam in zero_size_partitions(4, n_max):
        ops.append((Fraction(-1, lam.factorial), a_lambda(space, lam, alpha)))
    if any(K_alpha):
        for lam in zero_size_partitions(3, n_max):
            ops.append((-Fraction(lam.positive_size - 1, 2 * lam.factorial), a_lambda(space, lam, K_alpha)))
    for n in range(1, n_max + 1):
        pair = GenPartition.from_parts((-n, n))
        if any(e_alpha):
            ops.append((Fraction(n * n - 1, 12), a_lambda(space, pair, e_alpha)))
        if any(K2_alpha):
            ops.append((-Fraction((n - 1) * (2 * n - 1), 12), a_lambda(space, pair, K2_alpha)))
    return sum_operators(space, ops)


def exp_operator(space: FockSpace, generator: FockOperator) -> FockOperator:
    """exp of an operator that strictly shifts degree, summed until the series stops."""
    op = FockOperator(space, lambda m: {})

    def col(m):
        out: State = {m: Fraction(1)}
        term: State = {m: Fraction(1)}
        k = 0
        while term:
            k += 1
            term = generator.apply(term)
            term = {key: v / k for key, v in term.items()}
            for key, v in term.items():
                _add_into(out, key, v)
        if generator.truncated:
            op.truncated = True
        return out

    op._column = col
    return op


def gamma_minus(space: FockSpace, beta: Element) -> FockOperator:
    """exp(sum_n (1/n) a_{-n}(beta)) with z = 1."""
    gen = sum_operators(space, ((Fraction(1, n), heisenberg(space, -n, beta))
                                for n in range(1, space.n_max + 1)))
    return exp_operator(space, gen)


def gamma_plus(space: FockSpace, beta: Element) -> FockOperator:
    """exp(sum_n (1/n) a_n(beta)) with z = 1."""
    gen = sum_operators(space, ((Fraction(1, n), heisenberg(space, n, beta))
                                for n in range(1, space.n_max + 1)))
    return exp_operator(space, gen)


def w_operator(space: FockSpace) -> FockOperator:
    """W = Gamma_-(1 - K) Gamma_+(-1) for the trivial line bundle, with z = t = 1."""
    ring = space.ring
    one_minus_k = ring.add(ring.unit, ring.scale(ring.K, -1))
    minus_one = ring.scale(ring.unit, -1)
    return gamma_minus(space, one_minus_k) @ gamma_plus(space, minus_one)


def exponential_coefficient(space: FockSpace, beta: Element, mono: Monomial) -> Fraction:
    """Coefficient of ``mono`` in exp(sum_n (1/n) sum_j beta_j a_{-n}(b_j)) |0>.

    The creation operators commute, so the exponential factors over the
    generators (n, j) and each contributes (beta_j/n)^k / k!.
    """
    out = Fraction(1)
    previous = None
    for gen in mono:
        if gen == previous:
            continue
        previous = gen
        n, j = gen
        k = mono.count(gen)
        if not beta[j]:
            return Fraction(0)
        out *= (beta[j] / n) ** k / factorial(k)
    return out


def _complement(whole: Monomial, part: Monomial) -> Monomial | None:
    rest = list(whole)
    for gen in part:
        try:
            rest.remove(gen)
        except ValueError:
            return None
    return tuple(rest)


def trace_q_W(space: FockSpace, M: FockOperator | None = None, W: FockOperator | None = None) -> PowerSeries:
    """sum_d q^d Tr(W M restricted to degree d), for d up to n_max.

    With an explicit ``W`` its columns are applied directly.  Otherwise W is
    factored as Gamma_- Gamma_+: Gamma_+ runs as an operator and the diagonal
    entry of the Gamma_- multiplication is read off from its exponential
    coefficients, which avoids materializing Gamma_- columns.
    """
    coeffs = []
    if W is None:
        ring = space.ring
        one_minus_k = ring.add(ring.unit, ring.scale(ring.K, -1))
        g_plus = gamma_plus(space, ring.scale(ring.unit, -1))
    for d in range(space.n_max + 1):
        total = Fraction(0)
        for m in space.basis(d):
            state = M.column(m) if M is not None else {m: Fraction(1)}
            if W is not None:
                total += W.apply(state).get(m, Fraction(0))
                continue
            for w, c in g_plus.apply(state).items():
                rest = _complement(m, w)
                if rest is not None:
                    total += c * exponential_coefficient(space, one_minus_k, rest)
        coeffs.append(total)
    return PowerSeries(tuple(coeffs))
