"""Digital nets over prime fields with spectral discrepancy analysis.

Construction of (0, n, d)-nets (including the polynomial-evaluation code
construction), b-adic Haar and Walsh coefficient machinery for the
discrepancy function, Besov/L2 norm reports, and exact oracles.
"""
from .cs import (
    CodeSpace,
    CSParams,
    cs_code_space,
    cs_generating_matrices,
    cs_point_set,
    dual_code,
    verify_dual_properties,
)
from .errors import (
    BaseMismatch,
    BaseTooSmall,
    CapExceeded,
    InvalidParams,
    NetFileError,
    NonTerminatingExpansion,
    NotPrime,
    QmcNetError,
    SizeOverflow,
)
from .field import Polynomial, PrimeField, is_prime, lucas_binomial
from .haar import (
    BesovParams,
    HaarIndex,
    NormReport,
    besov_quasi_norm,
    discrepancy_coeff,
    haar_eval,
    indicator_coeff,
    parseval_l2,
    volume_coeff,
)
from .nets import (
    DualSet,
    GeneratingMatrices,
    PointSet,
    char_sum,
    dual_set,
    generate_points,
    is_net,
    load_pointset,
    save_pointset,
)
from .norms import (
    AuditReport,
    coeff_bound_audit,
    disc_eval,
    scaling_table,
    warnock_l2,
)
from .walsh import (
    ThetaResult,
    fine_price_coeff,
    haar_walsh_inner,
    residual_check,
    theta,
    walsh_eval,
)

__version__ = "1.0.0"
