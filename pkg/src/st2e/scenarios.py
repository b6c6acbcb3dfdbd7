"""Deterministic generators for the built-in simulation scenarios.

Each scenario is a linear model ``y = X beta + sigma * eps`` with rows of
``X`` drawn iid from N(0, Sigma) and known signal/noise labels, so that a
benchmark run can score selections against the truth.  Four designs are
built in:

``motivating``
    p=20, n=100, sigma=3; beta = (alpha, 2, 3, 0, ...) with pairwise
    correlation 0.7 among the first three variables.  ``alpha`` scales the
    weakest signal and is the knob the benchmark varies.
``benchmark8``
    p=8, beta = (3, 1.5, 0, 0, 2, 0, 0, 0), Sigma_ij = 0.5**|i-j|.
``corr40``
    p=40, sigma=6, beta = (3, 3, -2, 3, 3, -2, 0, ...); two tight blocks
    {x1,x2,x3} and {x4,x5,x6} with within-block correlation 0.9, one
    member of each block carrying the opposite sign.
``largep120``
    p=120, n=50, sigma=50; four 30-variable blocks with within-block
    correlation 0.7 and a constant 0.2 coupling between the second and
    third blocks.  The first 60 coefficients were drawn once from
    N(3, variance 0.5) and are frozen in a file shipped with the package;
    the rest are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .linear_model import Dataset, SignalPartition

_COEFFICIENT_RESOURCE = "largep120_coefficients.txt"


class NotPositiveDefinite(Exception):
    """Raised when a correlation matrix has no Cholesky factor."""


class UnknownScenario(Exception):
    """Raised for a scenario name that is not built in."""


@dataclass(frozen=True)
class ScenarioSpec:
    """Complete description of one simulated design."""

    name: str
    n: int
    p: int
    beta: np.ndarray
    sigma: float
    correlation: np.ndarray

    def __post_init__(self) -> None:
        beta = np.ascontiguousarray(np.asarray(self.beta, dtype=np.float64))
        corr = np.ascontiguousarray(np.asarray(self.correlation, dtype=np.float64))
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "correlation", corr)
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if beta.shape != (self.p,):
            raise ValueError("beta must have length p")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if corr.shape != (self.p, self.p):
            raise ValueError("correlation must be p x p")
        if not np.array_equal(corr, corr.T):
            raise ValueError("correlation must be symmetric")
        if not np.array_equal(np.diag(corr), np.ones(self.p)):
            raise ValueError("correlation must have a unit diagonal")
        cholesky_factor(corr)

    @property
    def signal_set(self) -> frozenset[int]:
        """0-based indices of the variables with nonzero coefficients."""
        return frozenset(np.flatnonzero(self.beta).tolist())

    @property
    def partition(self) -> SignalPartition:
        signal = self.signal_set
        noise = frozenset(range(self.p)) - signal
        return SignalPartition(signal=signal, noise=noise)


def cholesky_factor(correlation: np.ndarray) -> np.ndarray:
    """Lower-triangular Cholesky factor, or NotPositiveDefinite."""
    try:
        return np.linalg.cholesky(correlation)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None


def correlated_normal(
    n: int, sigma_matrix: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """n iid rows from N(0, Sigma) via the Cholesky factor.

    The underlying standard-normal draws fill row by row with columns in
    ascending order, so a fixed seed gives a bit-identical matrix.
    """
    factor = cholesky_factor(np.asarray(sigma_matrix, dtype=np.float64))
    z = rng.standard_normal((n, factor.shape[0]))
    return z @ factor.T


def generate(spec: ScenarioSpec, rng: np.random.Generator) -> Dataset:
    """Draw one dataset from the scenario, truth labels attached.

    The predictors are drawn first and the noise vector second, so the
    stream position after a call is well defined.
    """
    x = correlated_normal(spec.n, spec.correlation, rng)
    eps = rng.standard_normal(spec.n)
    y = x @ spec.beta + spec.sigma * eps
    names = tuple(f"x{j + 1}" for j in range(spec.p))
    return Dataset(predictors=x, response=y, names=names, truth=spec.partition)


def _block_correlation(p: int, blocks: list[tuple[range, float]]) -> np.ndarray:
    corr = np.eye(p)
    for members, rho in blocks:
        idx = np.fromiter(members, dtype=np.intp)
        corr[np.ix_(idx, idx)] = rho
    np.fill_diagonal(corr, 1.0)
    return corr


def largep120_coefficients() -> np.ndarray:
    """The frozen length-120 coefficient vector shipped with the package."""
    text = resources.files("st2e.data").joinpath(_COEFFICIENT_RESOURCE).read_text()
    beta = np.array([float(line) for line in text.split()])
    if beta.shape != (120,):
        raise ValueError("coefficient file must contain exactly 120 values")
    return beta


def _motivating(n: int, sigma: float, alpha: float) -> ScenarioSpec:
    p = 20
    beta = np.zeros(p)
    beta[:3] = (alpha, 2.0, 3.0)
    corr = _block_correlation(p, [(range(0, 3), 0.7)])
    return ScenarioSpec("motivating", n, p, beta, sigma, corr)


def _benchmark8(n: int, sigma: float) -> ScenarioSpec:
    p = 8
    beta = np.array([3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0])
    idx = np.arange(p)
    corr = 0.5 ** np.abs(idx[:, None] - idx[None, :])
    return ScenarioSpec("benchmark8", n, p, beta, sigma, corr)


def _corr40(n: int, sigma: float) -> ScenarioSpec:
    p = 40
    beta = np.zeros(p)
    beta[:6] = (3.0, 3.0, -2.0, 3.0, 3.0, -2.0)
    corr = _block_correlation(p, [(range(0, 3), 0.9), (range(3, 6), 0.9)])
    return ScenarioSpec("corr40", n, p, beta, sigma, corr)


def _largep120(n: int, sigma: float) -> ScenarioSpec:
    p = 120
    beta = largep120_coefficients()
    corr = _block_correlation(
        p, [(range(k, k + 30), 0.7) for k in (0, 30, 60, 90)]
    )
    corr[30:60, 60:90] = 0.2
    corr[60:90, 30:60] = 0.2
    return ScenarioSpec("largep120", n, p, beta, sigma, corr)


#: name -> (builder taking (n, sigma), default n, default sigma)
_BUILTINS = {
    "motivating": (None, 100, 3.0),
    "benchmark8": (_benchmark8, 50, 3.0),
    "corr40": (_corr40, 100, 6.0),
    "largep120": (_largep120, 50, 50.0),
}


def builtin_scenario(
    name: str,
    n: int | None = None,
    sigma: float | None = None,
    alpha: float | None = None,
) -> ScenarioSpec:
    """Look up a built-in scenario, optionally overriding n, sigma or alpha.

    ``alpha`` only applies to the motivating scenario (it is the weak
    signal's coefficient, default 1).
    """
    if name not in _BUILTINS:
        known = ", ".join(sorted(_BUILTINS))
        raise UnknownScenario(f"unknown scenario {name!r}; choose one of: {known}")
    builder, default_n, default_sigma = _BUILTINS[name]
    n = default_n if n is None else n
    sigma = default_sigma if sigma is None else sigma
    if name == "motivating":
        return _motivating(n, sigma, 1.0 if alpha is None else alpha)
    if alpha is not None:
        raise ValueError(f"alpha only applies to the motivating scenario, not {name!r}")
    return builder(n, sigma)
