"""Nahm sums: positive and complex solutions of Nahm's equations, asymptotic
expansions at q -> 1, modularity screening, exact q-series identities, the
tensor and doubling transforms, and Bloch-Wigner audits."""

from .asymptotics import (
    AsymptoticExpansion,
    HalfPowerSeries,
    c_polynomial,
    d_polynomials,
    direct_log_nahm_sum,
    expansion,
    gaussian_moment,
    p_polynomial,
    pochhammer_tail_bound,
    pochhammer_tail_expansion,
)
from .errors import (
    DivergentProduct,
    DivisionByZeroSeries,
    DomainError,
    NahmError,
    NoConvergence,
    NotPositiveDefinite,
    ParseError,
    PrecisionError,
    UnsupportedFamily,
)
from .numerics import (
    bernoulli_number,
    bernoulli_polynomial,
    bloch_wigner_D,
    eval_li,
    recognize_rational,
    rogers_L,
)
from .polynomial import MultiPoly
from .qseries import (
    QSeries,
    Verdict,
    eta,
    jacobi_partial_sum,
    nahm_sum,
    pochhammer,
    theta5,
    verify_identity,
)
from .screening import (
    BlochAudit,
    RunConfig,
    ScreenReport,
    bloch_audit,
    reproduce_tables,
    screen_triple,
    search_B_C,
)
from .system import (
    FamilyId,
    NahmTriple,
    PositiveSolution,
    SolutionSet,
    bloch_regulator,
    residual,
    solve_family,
    solve_positive,
)
from .transforms import TransformRecord, double_transform, tensor_transform, verify_transform

__version__ = "0.1.0"
