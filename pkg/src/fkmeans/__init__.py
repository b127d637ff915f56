"""Subspace clustering via factorial and reduced k-means, with a Monte Carlo
consistency harness and a small CLI.

An optional ``THREADS`` environment variable caps the BLAS thread pools used
by the numerical kernels; it is honored on a best-effort basis and must be
set before numpy is first imported in the process.
"""

import os as _os

if "THREADS" in _os.environ and "numpy" not in __import__("sys").modules:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["THREADS"])

from .model import (  # noqa: E402
    Centroids,
    DataMatrix,
    FitResult,
    Loading,
    LossSpec,
    Membership,
    SQUARED_LOSS,
    fkm_objective,
    psi_eval,
    rkm_decomposition_check,
    rkm_objective,
)
from .linalg import (  # noqa: E402
    SymEigResult,
    orthonormalize,
    procrustes_rotation,
    random_loading,
    sym_eig,
)
from .kmeans import KMeansConfig, kmeans_fit  # noqa: E402
from .fkm import (  # noqa: E402
    FkmConfig,
    fkm_assign,
    fkm_fit,
    fkm_update_centroids,
    fkm_update_loading,
)
from .rkm import RkmConfig, rkm_assign, rkm_fit, rkm_update  # noqa: E402
from .tandem import pca, tandem_fit  # noqa: E402
from .metrics import (  # noqa: E402
    ParamPoint,
    adjusted_rand_index,
    aligned_distance,
    frobenius_distance,
    hausdorff_distance,
    product_distance,
    rotate_param,
    symmetric_hausdorff_distance,
)
from .synthdata import (  # noqa: E402
    DiscretePopulation,
    MixturePopulation,
    generate_paper_scenario,
    paper_scenario_population,
    sample,
)
from .consistency import (  # noqa: E402
    ConsistencyConfig,
    ConsistencyReport,
    IdentificationConditionError,
    SllnCheckConfig,
    population_risk,
    run_consistency,
    run_slln_check,
)

__version__ = "0.1.0"

__all__ = [
    "Centroids", "DataMatrix", "FitResult", "Loading", "LossSpec", "Membership",
    "SQUARED_LOSS", "psi_eval", "fkm_objective", "rkm_objective",
    "rkm_decomposition_check",
    "SymEigResult", "sym_eig", "orthonormalize", "random_loading",
    "procrustes_rotation",
    "KMeansConfig", "kmeans_fit",
    "FkmConfig", "fkm_assign", "fkm_update_loading", "fkm_update_centroids",
    "fkm_fit",
    "RkmConfig", "rkm_assign", "rkm_update", "rkm_fit",
    "pca", "tandem_fit",
    "ParamPoint", "rotate_param", "frobenius_distance", "hausdorff_distance",
    "symmetric_hausdorff_distance", "product_distance", "aligned_distance",
    "adjusted_rand_index",
    "MixturePopulation", "DiscretePopulation", "generate_paper_scenario",
    "paper_scenario_population", "sample",
    "ConsistencyConfig", "ConsistencyReport", "SllnCheckConfig",
    "IdentificationConditionError", "population_risk", "run_consistency",
    "run_slln_check",
]
