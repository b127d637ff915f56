"""Monte Carlo checks of the strong-consistency behavior at desk scale.

Two experiments are provided:

* :func:`run_consistency` fits the factorial model on growing samples and
  tracks (a) the best loss, an estimate of the optimal achievable risk on
  the empirical measure, and (b) the rotation-aligned distance from each fit
  to a high-n reference fit standing in for the set of population optima.
  Both should trend to their limits as n grows.  The distance is
  :func:`fkmeans.metrics.aligned_distance`, whose centroid component is the
  *directed* Hausdorff distance with the fitted centers on the max side.

* :func:`run_slln_check` takes a finite-support population, where the
  population risk is an exact weighted sum, and measures the sup over a
  fixed random parameter grid of |empirical risk - population risk|,
  which should decay roughly like n^(-1/2).

All sub-streams are derived from the config seed, so reports are
reproducible end to end.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .fkm import FkmConfig, fkm_fit
from .linalg import _random_frame
from .metrics import ParamPoint, adjusted_rand_index, aligned_distance
from .model import Centroids, Loading, LossSpec, SQUARED_LOSS, _min_sq_residuals, _sq_distances
from .rng import derive_seed
from .synthdata import DiscretePopulation, MixturePopulation, sample

#: Restarts used for the single high-n reference fit.
REFERENCE_RESTARTS = 200
#: Restarts used for the j = 1..k-1 fits of the identification check.
IDENTIFICATION_RESTARTS = 50
#: Required loss decrease between successive cluster counts.
IDENTIFICATION_MARGIN = 1e-6

# Sub-stream indices hung off the config seed.
_STREAM_REFERENCE = 0
_STREAM_SAMPLES = 1
_STREAM_GRID = 2
_STREAM_COUNTS = 3


class IdentificationConditionError(RuntimeError):
    """The fitted losses do not strictly decrease with the cluster count."""

    def __init__(self, losses):
        self.losses = tuple(float(v) for v in losses)
        pretty = ", ".join(f"m_{j + 1}={v:.6g}" for j, v in enumerate(self.losses))
        super().__init__(
            "identification condition violated: losses by cluster count do not "
            f"strictly decrease by {IDENTIFICATION_MARGIN:g} ({pretty})"
        )


@dataclass(frozen=True)
class ConsistencyConfig:
    population: MixturePopulation | DiscretePopulation
    k: int
    q: int
    sample_sizes: tuple[int, ...]
    replications: int
    reference_n: int = 100_000
    fit: FkmConfig | None = None
    seed: int = 0

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sample_sizes)
        if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sample_sizes must be non-empty and ascending")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.reference_n <= max(sizes):
            raise ValueError("reference_n must exceed the largest sample size")
        object.__setattr__(self, "sample_sizes", sizes)

    def fit_config(self) -> FkmConfig:
        # Centering is off by default: the harness estimates optima of the raw
        # population, and a data-dependent shift would smear the optimum's
        # location across replications.  An explicit ``fit`` wins.
        base = self.fit if self.fit is not None else FkmConfig(
            k=self.k, q=self.q, center_columns=False)
        return replace(base, k=self.k, q=self.q)


@dataclass(frozen=True)
class SllnCheckConfig:
    grid_size: int
    ball_radius: float
    sample_sizes: tuple[int, ...]
    k: int
    q: int
    seed: int = 0

    def __post_init__(self):
        if self.grid_size < 1:
            raise ValueError("grid_size must be >= 1")
        if not self.ball_radius > 0:
            raise ValueError("ball_radius must be positive")
        sizes = tuple(int(n) for n in self.sample_sizes)
        if not sizes:
            raise ValueError("sample_sizes must be non-empty")
        if self.k < 1 or self.q < 1:
            raise ValueError("k and q must be >= 1")
        object.__setattr__(self, "sample_sizes", sizes)


@dataclass(frozen=True)
class ConsistencyRow:
    sample_size: int
    loss_mean: float
    loss_sd: float
    distance_mean: float
    distance_sd: float
    ari_mean: float
    # Raw per-replication values, index-aligned across sample sizes so
    # within-replication trends can be paired.
    losses: tuple[float, ...] = ()
    distances: tuple[float, ...] = ()


@dataclass(frozen=True)
class ConsistencyReport:
    rows: tuple[ConsistencyRow, ...]
    reference_n: int
    reference_loss: float
    replications: int
    identification_losses: tuple[float, ...]
    k: int
    q: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "kind": "theorem1",
            "k": self.k,
            "q": self.q,
            "seed": self.seed,
            "replications": self.replications,
            "reference_n": self.reference_n,
            "reference_loss": self.reference_loss,
            "identification_losses": list(self.identification_losses),
            "rows": [
                {
                    "sample_size": r.sample_size,
                    "loss_mean": r.loss_mean,
                    "loss_sd": r.loss_sd,
                    "distance_mean": r.distance_mean,
                    "distance_sd": r.distance_sd,
                    "ari_mean": r.ari_mean,
                    "losses": list(r.losses),
                    "distances": list(r.distances),
                }
                for r in self.rows
            ],
        }


def population_risk(pop: DiscretePopulation, t: ParamPoint,
                    spec: LossSpec = SQUARED_LOSS) -> float:
    """Exact population loss ``sum_m probs_m min_j psi(||A^T atom_m - f_j||)``."""
    if pop.p != t.loading.p:
        raise ValueError(f"population has p={pop.p}, loading has p={t.loading.p}")
    proj = pop.atoms @ t.loading.values
    d2 = _min_sq_residuals(proj, t.centroids.values)
    return float(pop.probs @ d2 ** (spec.exponent / 2.0))


def _separation_warning(pop, k: int) -> None:
    """Loose pre-check that the population can support k distinct clusters."""
    if isinstance(pop, MixturePopulation):
        if pop.k < k:
            warnings.warn(
                f"population has {pop.k} components but the fit asks for k={k}; "
                "the identification condition may fail", stacklevel=3)
            return
        d2 = _sq_distances(pop.means, pop.means)
        d2[np.diag_indices(pop.k)] = np.inf
        if pop.k > 1 and np.sqrt(d2.min()) < 2.0 * pop.within_sd:
            warnings.warn(
                "population cluster means are closer than two within-cluster "
                "standard deviations; consistency trends may be weak", stacklevel=3)
    elif isinstance(pop, DiscretePopulation):
        if pop.m < k:
            warnings.warn(
                f"population has {pop.m} atoms but the fit asks for k={k}", stacklevel=3)


def run_consistency(cfg: ConsistencyConfig) -> ConsistencyReport:
    """Fit on growing samples and aggregate loss / aligned-distance / ARI trends.

    The reference optimizer is a heavy-restart fit on a sample of
    ``cfg.reference_n`` points; before the main sweep, the losses of the
    j = 1..k fits on the reference sample must strictly decrease
    (:class:`IdentificationConditionError` otherwise).
    """
    pop = cfg.population
    _separation_warning(pop, cfg.k)
    fit_cfg = cfg.fit_config()

    ref_data, _ = sample(pop, cfg.reference_n, derive_seed(cfg.seed, _STREAM_REFERENCE, 0))
    reference = fkm_fit(ref_data, replace(
        fit_cfg, restarts=REFERENCE_RESTARTS,
        seed=derive_seed(cfg.seed, _STREAM_REFERENCE, 1)))
    ident_losses = []
    for j in range(1, cfg.k):
        ident = fkm_fit(ref_data, replace(
            fit_cfg, k=j, restarts=IDENTIFICATION_RESTARTS,
            seed=derive_seed(cfg.seed, _STREAM_REFERENCE, 2, j)))
        ident_losses.append(ident.loss)
    ident_losses.append(reference.loss)
    if any(a - b <= IDENTIFICATION_MARGIN for a, b in zip(ident_losses, ident_losses[1:])):
        raise IdentificationConditionError(ident_losses)

    theta_ref = ParamPoint(reference.loading, reference.centroids)
    rows = []
    for i, n in enumerate(cfg.sample_sizes):
        losses = np.empty(cfg.replications)
        distances = np.empty(cfg.replications)
        aris = np.empty(cfg.replications)
        for r in range(cfg.replications):
            data, truth = sample(pop, n, derive_seed(cfg.seed, _STREAM_SAMPLES, i, r, 0))
            fit = fkm_fit(data, replace(
                fit_cfg, seed=derive_seed(cfg.seed, _STREAM_SAMPLES, i, r, 1)))
            losses[r] = fit.loss
            distances[r] = aligned_distance(
                ParamPoint(fit.loading, fit.centroids), theta_ref)
            aris[r] = adjusted_rand_index(fit.labels, truth)
        ddof = 1 if cfg.replications > 1 else 0
        rows.append(ConsistencyRow(
            sample_size=n,
            loss_mean=float(losses.mean()), loss_sd=float(losses.std(ddof=ddof)),
            distance_mean=float(distances.mean()),
            distance_sd=float(distances.std(ddof=ddof)),
            ari_mean=float(aris.mean()),
            losses=tuple(float(v) for v in losses),
            distances=tuple(float(v) for v in distances)))
    return ConsistencyReport(rows=tuple(rows), reference_n=cfg.reference_n,
                             reference_loss=reference.loss,
                             replications=cfg.replications,
                             identification_losses=tuple(ident_losses),
                             k=cfg.k, q=cfg.q, seed=cfg.seed)


def _draw_grid(rng, p: int, q: int, k: int, radius: float, size: int):
    """Random parameter points: Haar loadings x centers uniform in the
    q-ball of the given radius."""
    grid = []
    for _ in range(size):
        frame = _random_frame(rng, p, q)
        direction = rng.standard_normal((k, q))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radii = radius * rng.random(k) ** (1.0 / q)
        grid.append(ParamPoint(Loading(frame), Centroids(direction * radii[:, None])))
    return grid


def _sup_gap(pop: DiscretePopulation, weights: np.ndarray, grid,
             spec: LossSpec) -> float:
    """Sup over the grid of |risk under ``weights`` - risk under ``pop.probs``|."""
    gap = 0.0
    delta = weights - pop.probs
    for t in grid:
        proj = pop.atoms @ t.loading.values
        d2 = np.clip(_sq_distances(proj, t.centroids.values).min(axis=1), 0.0, None)
        gap = max(gap, abs(float(delta @ d2 ** (spec.exponent / 2.0))))
    return gap


def run_slln_check(pop: DiscretePopulation, cfg: SllnCheckConfig,
                   spec: LossSpec = SQUARED_LOSS) -> list[tuple[int, float]]:
    """Decay table of the uniform empirical/population risk gap.

    For each sample size n the empirical measure is realized by a seeded
    multinomial draw of atom counts (equivalent in law to n i.i.d. draws
    from the population, and exact: the empirical measure of a finite
    support lives on the atoms).  Returns ``[(n, sup_gap), ...]``.
    """
    if cfg.q >= pop.p:
        raise ValueError(f"q={cfg.q} must be smaller than the population's p={pop.p}")
    grid_rng = np.random.default_rng(derive_seed(cfg.seed, _STREAM_GRID))
    grid = _draw_grid(grid_rng, pop.p, cfg.q, cfg.k, cfg.ball_radius, cfg.grid_size)
    table = []
    for i, n in enumerate(cfg.sample_sizes):
        rng = np.random.default_rng(derive_seed(cfg.seed, _STREAM_COUNTS, i))
        counts = rng.multinomial(n, pop.probs)
        table.append((int(n), _sup_gap(pop, counts / n, grid, spec)))
    return table
