"""Exact q-series for multiple q-zeta values and tautological integrals on Hilbert schemes of points."""
from .series import PowerSeries, euler_product, ps_add, ps_int_pow, ps_inv, ps_mul
from .qzeta import (
    Composition,
    QMExpression,
    QZetaCombination,
    RecognitionFailure,
    Z,
    bracket,
    eisenstein,
    okounkov_z,
    qm_recognize,
    qzeta_eval,
    z_generic,
)
from .hilbert import (
    GenPartition,
    SurfacePairings,
    ch1_reduced,
    ch2_reduced,
    f0_reduced,
    f1_reduced,
    f2_reduced_direct,
    f2_reduced_symbolic,
    sum_family,
    theta2,
    trace_closed_form_reduced,
)

__version__ = "0.1.0"

__all__ = [
    "Composition",
    "GenPartition",
    "PowerSeries",
    "QMExpression",
    "QZetaCombination",
    "RecognitionFailure",
    "SurfacePairings",
    "Z",
    "bracket",
    "ch1_reduced",
    "ch2_reduced",
    "eisenstein",
    "euler_product",
    "f0_reduced",
    "f1_reduced",
    "f2_reduced_direct",
    "f2_reduced_symbolic",
    "okounkov_z",
    "ps_add",
    "ps_int_pow",
    "ps_inv",
    "ps_mul",
    "qm_recognize",
    "qzeta_eval",
    "sum_family",
    "theta2",
    "trace_closed_form_reduced",
    "z_generic",
]
