"""Monte Carlo site percolation on Sierpinski carpets."""

from .analysis import (
    FitResult,
    connectivity,
    dimensionality,
    fit_exponent,
    fit_quadratic,
    predict_pc_from_d,
    predict_pc_from_q,
    remainder_error,
)
from .errors import (
    CarpetError,
    InsufficientDataError,
    LatticeSizeError,
    ParameterError,
    SingularFitError,
    UndefinedStatisticError,
)
from .estimator import PcEstimate, SweepGrid, SweepResult, estimate_pc, estimate_pc_single, run_sweep
from .lattice import (
    CarpetSpec,
    CellPattern,
    Family,
    SiteLattice,
    base_pattern,
    build_carpet,
    build_carpet_recursive,
    build_carpet_tdm,
)
from .percolation import (
    ClusterLabels,
    Configuration,
    Connectivity,
    label_clusters_oracle,
    label_clusters_scan,
    occupy,
    second_moment,
)

__version__ = "0.1.0"
