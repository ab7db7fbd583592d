"""High-precision bilateral sums attached to Ramanujan-like series for 1/pi^2."""

from .analysis import (
    DerivedSeries, KJExpansion, MirrorData, kj_expansion, limit_series, mirror, mirror_t_q,
    tau_of, tau_relation_residual, upside_down_eval, upside_down_of, wronskian_p,
)
from .bilateral import (
    BilateralValue, Discovery, FourierData, backward_sum, discover, eval_f, forward_sum,
    fourier_rhs, solve_fourier,
)
from .catalog import FormulaRecord, SeriesShape, load_catalog, normalize, verify_identity
from .engine import (
    ContinuationPath, HoloOperator, TermRatio, build_annihilator, continue_path, eval_anywhere,
    sum_direct,
)
from .errors import (
    CatalogError, ExtrapolationInstability, IdentificationError, IllConditioned,
    NonConvergenceError, NumericFailure, PoleError, PrecisionExhausted, StepUnderflow,
)
from .exact import ExactTerm, exact_term, exact_terms
from .numerics import (
    QuadElem, golden_phi, log_gamma, pochhammer, polygamma, quad_reconstruct, rationalize,
)
from .relations import IntegerRelation, SupercongruenceReport, check_supercongruence, dirichlet_L5, pslq

__version__ = "0.1.0"
