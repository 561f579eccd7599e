"""Laboratory for iterative eigenvalue algorithms restricted to PSD matrices.

Implements the naive QR and Cholesky-LR iterations with shifting and
deflation, the PSD-matrix/ellipsoid correspondence as first-class
observables, empirical checks of the dynamics, and an interactive
session service for steering iterations by hand.
"""

from .errors import (
    DimensionMismatch,
    EigenLabError,
    IndexOutOfRange,
    MaxItersExceeded,
    NoConvergence,
    ShiftNotPancaking,
    SingularMatrix,
    UnknownSession,
    ValidationError,
)
from .linalg import (
    QrFactors,
    SpectralDecomp,
    as_matrix,
    check_sym_psd,
    cholesky,
    jacobi_eigen,
    offdiag_norm,
    qr_decompose,
    scale_of,
)
from .engine import (
    IterationState,
    RunConfig,
    ShiftStrategy,
    TraceRecord,
    advance,
    deflate_if_converged,
    gershgorin_lower_bound,
    initial_state,
    lr_step,
    make_psd,
    qr_step,
    reconstruct_eigensystem,
    run,
    select_shift,
    shifted_qr_step,
    wilkinson_shift,
)
from .ellipse import (
    AlignmentMetrics,
    EllipseView2D,
    EllipsoidView,
    alignment_metrics,
    ellipse_from_params,
    to_ellipse2d,
    to_ellipsoid,
)

__version__ = "0.1.0"
