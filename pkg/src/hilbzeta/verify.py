"""
Registry of exact identities with a small runner.

Each check returns a ``CheckResult``.  Series identities compare both sides
coefficient by coefficient and report the first index where they differ;
symbolic identities compare QZetaCombinations directly.  The closed forms
used on the right-hand sides are module attributes so a test can corrupt
one and watch the suite catch it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import hilbert
from .fock import FockSpace, FrobeniusRing, a_lambda, g2_operator, trace_q_W, w_operator
from .hilbert import (
    SurfacePairings,
    cubic_mixed_sum,
    divisor_weighted,
    e_mix_free,
    f1_middle_line,
    f2_reduced_direct,
    f2_reduced_symbolic,
    goettsche_series,
    nested_leading_square,
    ordered_balanced_sum,
    ordered_pair_sum,
    ordered_triple_sum,
    pair_sum,
    power_tail,
    sum_family,
    theta2,
    trace_closed_form_reduced,
    unit_pairings,
    zero_size_partitions,
)
from .qzeta import QZetaCombination, Z, bracket, eisenstein, okounkov_z, qzeta_eval
from .series import PowerSeries

SUITES = ("qzeta", "hilbert", "oracle")

# closed forms on the right-hand sides
EISENSTEIN_FORMS = {
    2: Fraction(-1, 24) + Z(2),
    4: Fraction(1, 1440) + Fraction(1, 6) * Z(2) + Z(4),
    6: Fraction(-1, 60480) + Fraction(1, 120) * Z(2) + Fraction(1, 4) * Z(4) + Z(6),
}
DERIVATIVE_Z2 = 5 * Z(4) - 2 * Z(2) ** 2 + Z(2)
PAIR_SUM_WEIGHTED_TAIL = -5 * Z(4) + 2 * Z(2) ** 2 - Z(2)
T22_TAIL = Fraction(4, 3) * Z(2) ** 2 - Fraction(1, 3) * Z(4)
T111_TAIL = Fraction(17, 2) * Z(4) - Z(2) ** 2 + Fraction(3, 2) * Z(2)
THETA2_FORM = hilbert.THETA2_FORM


@dataclass(frozen=True)
class CheckResult:
    name: str
    suite: str
    passed: bool
    index: int | None = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        where = f" (first mismatch at q^{self.index})" if self.index is not None else ""
        extra = f" {self.detail}" if self.detail else ""
        return f"{status} [{self.suite}] {self.name}{where}{extra}"


def compare_series(name: str, suite: str, lhs: PowerSeries, rhs: PowerSeries) -> CheckResult:
    k = lhs.first_mismatch(rhs)
    if k is None:
        return CheckResult(name, suite, True)
    return CheckResult(name, suite, False, k, f"lhs={lhs[k]} rhs={rhs[k]}")


def compare_symbolic(name: str, suite: str, lhs: QZetaCombination, rhs: QZetaCombination) -> CheckResult:
    if lhs == rhs:
        return CheckResult(name, suite, True)
    return CheckResult(name, suite, False, None, f"difference {lhs - rhs}")


# ---------------------------------------------------------------------------
# q-zeta identities

def _qzeta_checks(order: int) -> dict[str, Callable[[], CheckResult]]:
    N = order
    ev = lambda c: qzeta_eval(c, N)  # noqa: E731
    s = "qzeta"
    checks = {
        "bracket.z2_is_bracket2": lambda: compare_series("bracket.z2_is_bracket2", s, okounkov_z(2, N), bracket(2, N)),
        "bracket.z3_is_twice_bracket3": lambda: compare_series(
            "bracket.z3_is_twice_bracket3", s, okounkov_z(3, N), bracket(3, N).scale(2)),
        "bracket.z4_relation": lambda: compare_series(
            "bracket.z4_relation", s, okounkov_z(4, N), bracket(4, N) - bracket(2, N).scale(Fraction(1, 6))),
        "divisor.weighted_geometric_is_z2": lambda: compare_series(
            "divisor.weighted_geometric_is_z2", s, divisor_weighted(N, 1, 1), ev(Z(2))),
        "derivative.z2_square_weighted": lambda: compare_series(
            "derivative.z2_square_weighted", s, divisor_weighted(N, 2, 2), ev(DERIVATIVE_Z2)),
        "derivative.z2_q_derivative": lambda: compare_series(
            "derivative.z2_q_derivative", s, okounkov_z(2, N).q_derivative(), ev(DERIVATIVE_Z2)),
        "derivative.cubic_mixed": lambda: compare_series(
            "derivative.cubic_mixed", s, cubic_mixed_sum(N), ev(DERIVATIVE_Z2)),
        "nested.leading_square_depth2": lambda: compare_series(
            "nested.leading_square_depth2", s, nested_leading_square(N, 2), power_tail(N, 2)),
        "nested.leading_square_depth3": lambda: compare_series(
            "nested.leading_square_depth3", s, nested_leading_square(N, 3), power_tail(N, 3)),
        "pairs.unweighted": lambda: compare_series(
            "pairs.unweighted", s, pair_sum(N), ev(Z(3)) - sum_family("D1", N)),
        "pairs.weighted": lambda: compare_series(
            "pairs.weighted", s, pair_sum(N, lambda i, j: i + j),
            sum_family("NM", N).scale(2) + sum_family("D1", N) + ev(PAIR_SUM_WEIGHTED_TAIL)),
        "quadruple.t22_reduction": lambda: compare_series(
            "quadruple.t22_reduction", s, sum_family("T_22", N),
            ev(T22_TAIL) + sum_family("T_111", N).scale(Fraction(4, 3))),
        "quadruple.t111_reduction": lambda: compare_series(
            "quadruple.t111_reduction", s, sum_family("T_111", N),
            sum_family("NM", N).scale(-3) - sum_family("D1", N).scale(Fraction(3, 2)) + ev(T111_TAIL)),
        "quadruple.theta2_quasimodular": lambda: compare_series(
            "quadruple.theta2_quasimodular", s, theta2(N), ev(THETA2_FORM)),
        "mixed.e_mix_is_z2_squared": lambda: compare_series(
            "mixed.e_mix_is_z2_squared", s, sum_family("E_mix", N), ev(Z(2) ** 2)),
        "mixed.e_mix_diagonal_absorbed": lambda: compare_series(
            "mixed.e_mix_diagonal_absorbed", s, sum_family("E_mix", N), e_mix_free(N)),
    }
    for k in (1, 2):
        name = f"square.z{2 * k}{2 * k}_shuffle"
        checks[name] = (lambda k=k, name=name: compare_series(
            name, s, okounkov_z((2 * k, 2 * k), N),
            ev(Fraction(-1, 2) * Z(4 * k) + Fraction(1, 2) * Z(2 * k) ** 2)))
    for w in (2, 4, 6):
        name = f"eisenstein.g{w}"
        checks[name] = (lambda w=w, name=name: compare_series(
            name, s, eisenstein(w, N), ev(EISENSTEIN_FORMS[w])))
    return checks


# ---------------------------------------------------------------------------
# reduced Hilbert-scheme series

def partition_counts(order: int) -> list[int]:
    """p(0..order) by the standard dynamic programme over part sizes."""
    counts = [1] + [0] * order
    for part in range(1, order + 1):
        for n in range(part, order + 1):
            counts[n] += counts[n - part]
    return counts


def _hilbert_checks(order: int) -> dict[str, Callable[[], CheckResult]]:
    N = order
    s = "hilbert"
    symmetrize_order = min(N, 25)
    M = symmetrize_order
    checks: dict[str, Callable[[], CheckResult]] = {}
    for key, p in unit_pairings().items():
        name = f"f2.unit_{key}"
        checks[name] = (lambda p=p, name=name: compare_series(
            name, s, f2_reduced_direct(p, N), qzeta_eval(f2_reduced_symbolic(p), N)))
    checks.update({
        "f1.dual_path": lambda: compare_series(
            "f1.dual_path", s, f1_middle_line(N), qzeta_eval(Z(3) - Z(2), N)),
        "f2.ordered_sums_agree": lambda: compare_series(
            "f2.ordered_sums_agree", s,
            f2_reduced_direct(SurfacePairings(pair_1=1, pair_K=1, pair_K2=1, pair_e=1), M, ordered=True),
            f2_reduced_direct(SurfacePairings(pair_1=1, pair_K=1, pair_K2=1, pair_e=1), M)),
        "symmetrize.negative_triple": lambda: compare_series(
            "symmetrize.negative_triple", s, ordered_triple_sum(M, False),
            sum_family("T_111", M).scale(Fraction(1, 6))),
        "symmetrize.positive_triple": lambda: compare_series(
            "symmetrize.positive_triple", s, ordered_triple_sum(M, True),
            sum_family("T_111", M).scale(Fraction(1, 6))),
        "symmetrize.balanced_pairs": lambda: compare_series(
            "symmetrize.balanced_pairs", s, ordered_balanced_sum(M),
            sum_family("T_22", M).scale(Fraction(1, 4))),
        "symmetrize.pair_weights": lambda: compare_series(
            "symmetrize.pair_weights", s, ordered_pair_sum(M),
            sum_family("S_ij", M).scale(Fraction(1, 2))),
        "goettsche.partition_counts": lambda: compare_series(
            "goettsche.partition_counts", s, goettsche_series(1, N),
            PowerSeries.from_ints(partition_counts(N))),
        "ch1.assembly": _ch1_assembly,
        "ch2.assembly": _ch2_assembly,
    })
    return checks


def _ch1_assembly() -> CheckResult:
    # linear in (K2, KL): unit vectors settle it for all surfaces
    for K2, KL in ((1, 0), (0, 1), (9, -3)):
        surface = SurfacePairings.for_surface(0, K2, KL, 0)
        assembled = (hilbert.f1_reduced(surface.with_unit())
                     + hilbert.f0_reduced(surface.with_line_class()))
        result = compare_symbolic("ch1.assembly", "hilbert", assembled, hilbert.ch1_display(surface))
        if not result.passed:
            return result
    return CheckResult("ch1.assembly", "hilbert", True)


def _ch2_assembly() -> CheckResult:
    for chi, K2, KL, L2 in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (3, 9, -3, 1)):
        surface = SurfacePairings.for_surface(chi, K2, KL, L2)
        result = compare_symbolic("ch2.assembly", "hilbert",
                                  hilbert.ch2_assembled(surface), hilbert.ch2_display(surface))
        if not result.passed:
            return result
    return CheckResult("ch2.assembly", "hilbert", True)


# ---------------------------------------------------------------------------
# Fock-space oracle

def _oracle_checks(depth: int) -> dict[str, Callable[[], CheckResult]]:
    s = "oracle"
    spaces: dict[str, tuple[FockSpace, object]] = {}

    def space(name: str):
        if name not in spaces:
            ring = FrobeniusRing.projective_plane() if name == "P2" else FrobeniusRing.k3_small()
            sp = FockSpace(ring, depth)
            spaces[name] = (sp, w_operator(sp))
        return spaces[name]

    def goettsche(name: str) -> CheckResult:
        sp, W = space(name)
        return compare_series(f"oracle.{name}.goettsche", s, trace_q_W(sp, W=W),
                              goettsche_series(sp.ring.chi, depth))

    def monomial_traces(name: str) -> CheckResult:
        sp, W = space(name)
        ring = sp.ring
        g = goettsche_series(ring.chi, depth)
        label = f"oracle.{name}.monomial_traces"
        for length in range(5):
            for lam in zero_size_partitions(length, min(3, depth)):
                for i in range(ring.dim):
                    alpha = ring.basis_vector(i)
                    lhs = trace_q_W(sp, a_lambda(sp, lam, alpha).scale(Fraction(1, lam.factorial)), W)
                    rhs = g * trace_closed_form_reduced(lam, ring.pairings(alpha), depth)
                    k = lhs.first_mismatch(rhs)
                    if k is not None:
                        return CheckResult(label, s, False, k, f"lambda={lam} basis={i}")
        return CheckResult(label, s, True)

    def chern2(name: str) -> CheckResult:
        sp, W = space(name)
        ring = sp.ring
        g = goettsche_series(ring.chi, depth)
        label = f"oracle.{name}.chern2"
        for i in range(ring.dim):
            alpha = ring.basis_vector(i)
            lhs = trace_q_W(sp, g2_operator(sp, alpha), W)
            rhs = g * qzeta_eval(f2_reduced_symbolic(ring.pairings(alpha)), depth)
            k = lhs.first_mismatch(rhs)
            if k is not None:
                return CheckResult(label, s, False, k, f"basis={i}")
        return CheckResult(label, s, True)

    checks = {}
    for name in ("P2", "K3-small"):
        checks[f"oracle.{name}.goettsche"] = lambda name=name: goettsche(name)
        checks[f"oracle.{name}.chern2"] = lambda name=name: chern2(name)
    checks["oracle.P2.monomial_traces"] = lambda: monomial_traces("P2")
    return checks


def registry(order: int = 30, depth: int = 5) -> dict[str, dict[str, Callable[[], CheckResult]]]:
    return {
        "qzeta": _qzeta_checks(order),
        "hilbert": _hilbert_checks(order),
        "oracle": _oracle_checks(depth),
    }


def run_suite(suite: str = "all", order: int = 30, depth: int = 5) -> list[CheckResult]:
    """Run one suite (or all) and return results sorted by identity name."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    reg = registry(order, depth)
    chosen = SUITES if suite == "all" else (suite,)
    results = []
    for name_of_suite in chosen:
        for name in sorted(reg[name_of_suite]):
            results.append(reg[name_of_suite][name]())
    return sorted(results, key=lambda r: r.name)
