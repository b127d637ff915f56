"""Seeded generators: the benchmark mixture scenario and finite-support
populations with exactly computable population risk.

The benchmark scenario plants k spherical Gaussian clusters on a circle in a
2-dimensional informative plane and appends independent Gaussian noise
columns.  The noise columns default to a *larger* standard deviation than
the within-cluster spread, so methods driven by total variance (PCA, RKM,
tandem) are drawn to the noise subspace while the cluster structure hides in
the low-variance informative plane; see ``DEFAULT_NOISE_SD``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DataMatrix, Membership

#: Standard deviation of the noise columns in the benchmark scenario.  The
#: within-cluster spread is 1 in every dimension, so noise columns dominate
#: the total variance while carrying no cluster structure.
DEFAULT_NOISE_SD = 5.0


def _check_simplex(weights: np.ndarray, name: str) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or weights.size < 1:
        raise ValueError(f"{name} must be a non-empty vector")
    if (weights < 0).any() or abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError(f"{name} must be nonnegative and sum to 1")
    weights.flags.writeable = False
    return weights


@dataclass(frozen=True)
class MixturePopulation:
    """Gaussian mixture whose cluster means differ only in the leading
    ``informative_dims`` coordinates.

    ``within_sd`` is the within-cluster standard deviation in the informative
    dimensions and ``noise_sd`` the standard deviation of the trailing noise
    dimensions (which are pure noise, identical across clusters).
    """

    weights: np.ndarray
    means: np.ndarray
    noise_sd: float
    informative_dims: int
    within_sd: float = 1.0

    def __post_init__(self):
        weights = _check_simplex(self.weights, "mixture weights")
        means = np.array(self.means, dtype=float)
        if means.ndim != 2 or means.shape[0] != weights.size:
            raise ValueError("means must be a k x p matrix matching the weights")
        if not np.all(np.isfinite(means)):
            raise ValueError("means contain non-finite entries")
        if not 0 <= self.informative_dims <= means.shape[1]:
            raise ValueError("informative_dims out of range")
        if np.ptp(means[:, self.informative_dims:], axis=0).max(initial=0.0) > 0:
            raise ValueError("cluster means may differ only in the informative dims")
        if not self.noise_sd > 0 or not self.within_sd > 0:
            raise ValueError("standard deviations must be positive")
        means.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def p(self) -> int:
        return self.means.shape[1]

    @property
    def noise_dims(self) -> int:
        return self.p - self.informative_dims

    def column_sds(self) -> np.ndarray:
        return np.concatenate([
            np.full(self.informative_dims, self.within_sd),
            np.full(self.noise_dims, self.noise_sd),
        ])


@dataclass(frozen=True)
class DiscretePopulation:
    """Finite-support distribution: ``m`` atoms with probabilities ``probs``."""

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        probs = _check_simplex(self.probs, "atom probabilities")
        atoms = np.array(self.atoms, dtype=float)
        if atoms.ndim != 2 or atoms.shape[0] != probs.size:
            raise ValueError("atoms must be an m x p matrix matching the probabilities")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms contain non-finite entries")
        atoms.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @property
    def m(self) -> int:
        return self.atoms.shape[0]

    @property
    def p(self) -> int:
        return self.atoms.shape[1]


def _circle_means(k: int, separation: float, noise_dims: int) -> np.ndarray:
    """k cluster means on a circle of radius ``separation`` in the first two
    coordinates, zero elsewhere.  The circle placement keeps the means
    non-collinear for k >= 3, so the informative plane is genuinely 2-d."""
    angles = 2.0 * np.pi * np.arange(k) / max(k, 1)
    means = np.zeros((k, 2 + noise_dims))
    means[:, 0] = separation * np.cos(angles)
    means[:, 1] = separation * np.sin(angles)
    return means


def paper_scenario_population(k: int = 3, separation: float = 6.0,
                              noise_dims: int = 10,
                              noise_sd: float = DEFAULT_NOISE_SD,
                              within_sd: float = 1.0) -> MixturePopulation:
    """The benchmark mixture: equal weights, circle means, noisy tail columns."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if noise_dims < 0:
        raise ValueError("noise_dims must be >= 0")
    return MixturePopulation(weights=np.full(k, 1.0 / k),
                             means=_circle_means(k, separation, noise_dims),
                             noise_sd=noise_sd if noise_dims else within_sd,
                             informative_dims=2,
                             within_sd=within_sd)


def sample(pop, n: int, seed: int) -> tuple[DataMatrix, Membership]:
    """Draw ``n`` i.i.d. observations; returns the data and the true labels.

    For a mixture the labels are the component indices; for a discrete
    population they are the atom indices.  Bit-identical per seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(pop, MixturePopulation):
        idx = rng.choice(pop.k, size=n, p=pop.weights)
        noise = rng.standard_normal((n, pop.p))
        values = pop.means[idx] + noise * pop.column_sds()
    elif isinstance(pop, DiscretePopulation):
        idx = rng.choice(pop.m, size=n, p=pop.probs)
        values = pop.atoms[idx]
    else:
        raise TypeError(f"unsupported population type: {type(pop).__name__}")
    return DataMatrix(values), Membership(idx + 1)


def generate_paper_scenario(n: int, k: int = 3, separation: float = 6.0,
                            noise_dims: int = 10, seed: int = 0,
                            noise_sd: float = DEFAULT_NOISE_SD,
                            ) -> tuple[DataMatrix, Membership]:
    """Sample the benchmark scenario (defaults: k=3 clusters on a circle of
    radius 6 in 2 informative dims, 10 noise columns, 12 variables total)."""
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    pop = paper_scenario_population(k=k, separation=separation,
                                    noise_dims=noise_dims, noise_sd=noise_sd)
    return sample(pop, n, seed)
