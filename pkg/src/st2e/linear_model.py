"""Linear-model fitting and the AIC objective that every search path optimizes.

A candidate model is a subset of predictor columns; the intercept is always
included and is never itself selectable.  The objective is the Gaussian AIC
with additive constants dropped::

    aic = n * ln(rss / n) + 2 * (|subset| + 1)

Only AIC differences (and the relative improvement over the null model) are
ever consumed downstream, so the dropped constants are immaterial.  Exact
fits are clamped to a relative RSS floor before the logarithm so that the
objective stays finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Relative cutoff below which a singular value makes the design rank deficient.
SINGULARITY_RTOL = 1e-10

#: Relative RSS floor (times ||y||^2) applied before taking the logarithm.
RSS_FLOOR_RTOL = 1e-12


class RankDeficient(Exception):
    """The augmented design matrix of a candidate model is numerically singular."""


class TooManyVariables(ValueError):
    """The candidate model has more coefficients (incl. intercept) than rows."""


@dataclass(frozen=True)
class SignalPartition:
    """Ground-truth split of the column indices into signal and noise.

    Only meaningful for simulated data; used by scoring utilities, never by
    the selection machinery itself.
    """

    signal: frozenset[int]
    noise: frozenset[int]

    def validate(self, p: int) -> None:
        """Check that signal and noise partition ``{0, ..., p-1}`` exactly."""
        if self.signal & self.noise:
            raise ValueError("signal and noise sets overlap")
        if self.signal | self.noise != frozenset(range(p)):
            raise ValueError("signal and noise sets do not cover all columns")


@dataclass
class Dataset:
    """A predictor matrix, response vector, column names, and optional truth.

    Parameters
    ----------
    predictors : (n, p) ndarray
        One column per candidate variable.
    response : (n,) ndarray
        The response vector.
    names : tuple of str
        Exactly ``p`` distinct column names.
    truth : SignalPartition, optional
        Ground-truth signal/noise labels (simulation only).
    """

    predictors: np.ndarray
    response: np.ndarray
    names: tuple[str, ...]
    truth: SignalPartition | None = None

    def __post_init__(self) -> None:
        self.predictors = np.ascontiguousarray(self.predictors, dtype=np.float64)
        self.response = np.ascontiguousarray(self.response, dtype=np.float64)
        if self.predictors.ndim != 2:
            raise ValueError("predictors must be a 2-D matrix")
        n, p = self.predictors.shape
        if n < 2 or p < 1:
            raise ValueError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if self.response.shape != (n,):
            raise ValueError("response length does not match predictor rows")
        if not np.isfinite(self.predictors).all() or not np.isfinite(self.response).all():
            raise ValueError("non-finite entries in dataset")
        self.names = tuple(self.names)
        if len(self.names) != p:
            raise ValueError(f"expected {p} names, got {len(self.names)}")
        if len(set(self.names)) != p:
            raise ValueError("names must be distinct")
        if self.truth is not None:
            self.truth.validate(p)

    @property
    def n(self) -> int:
        return self.predictors.shape[0]

    @property
    def p(self) -> int:
        return self.predictors.shape[1]

    @classmethod
    def from_xy(
        cls,
        predictors: np.ndarray,
        response: np.ndarray,
        names: tuple[str, ...] | None = None,
        truth: SignalPartition | None = None,
    ) -> "Dataset":
        """Build a dataset, generating names ``x1..xp`` when none are given."""
        predictors = np.asarray(predictors, dtype=np.float64)
        if names is None:
            names = tuple(f"x{j + 1}" for j in range(predictors.shape[1]))
        return cls(predictors, np.asarray(response, dtype=np.float64), names, truth)

    def select_columns(self, columns: np.ndarray) -> "Dataset":
        """Restrict to the given columns (truth labels are dropped)."""
        columns = as_subset(columns, self.p)
        return Dataset(
            self.predictors[:, columns],
            self.response,
            tuple(self.names[int(j)] for j in columns),
        )


@dataclass
class FitResult:
    """Least-squares fit of one candidate model."""

    coefficients: np.ndarray = field(repr=False)
    rss: float
    objective: float


def as_subset(indices, p: int) -> np.ndarray:
    """Validate a variable subset and return it as a sorted index array.

    The empty subset is legal and denotes the intercept-only (null) model.
    Raises ``ValueError`` on duplicates or out-of-range indices.
    """
    subset = np.asarray(indices, dtype=np.intp).ravel()
    if subset.size == 0:
        return np.empty(0, dtype=np.intp)
    subset = np.sort(subset)
    if subset[0] < 0 or subset[-1] >= p:
        raise ValueError(f"subset indices out of range for p={p}")
    if np.any(np.diff(subset) == 0):
        raise ValueError("subset contains duplicate indices")
    return subset


def design_matrix(dataset: Dataset, subset: np.ndarray) -> np.ndarray:
    """Intercept column followed by the subset's predictor columns."""
    ones = np.ones((dataset.n, 1))
    if subset.size == 0:
        return ones
    return np.hstack([ones, dataset.predictors[:, subset]])


def rss_floor(response: np.ndarray) -> float:
    """Clamp level for exact fits: a relative fraction of ``||y||^2``."""
    floor = RSS_FLOOR_RTOL * float(response @ response)
    # guards the degenerate all-zero response
    return floor if floor > 0.0 else 1e-300


def aic_from_rss(n: int, n_vars: int, rss: float, floor: float) -> float:
    """AIC value for a model with ``n_vars`` predictors attaining ``rss``."""
    return n * math.log(max(rss, floor) / n) + 2.0 * (n_vars + 1)


def fit_ols(dataset: Dataset, subset) -> FitResult:
    """Least-squares fit of ``response`` on the subset's columns plus intercept.

    Parameters
    ----------
    dataset : Dataset
    subset : sequence of int
        Column indices of the candidate model (may be empty).

    Returns
    -------
    FitResult
        Coefficients (intercept first), the attained residual sum of squares,
        and the AIC objective value.

    Raises
    ------
    TooManyVariables
        If ``|subset| + 1 > n``.
    RankDeficient
        If the augmented design is numerically singular (smallest singular
        value below ``SINGULARITY_RTOL`` times the largest).
    """
    subset = as_subset(subset, dataset.p)
    n_coef = subset.size + 1
    if n_coef > dataset.n:
        raise TooManyVariables(
            f"model with {subset.size} variables plus intercept needs more than "
            f"n={dataset.n} rows"
        )
    design = design_matrix(dataset, subset)
    coefficients, _, rank, _ = np.linalg.lstsq(design, dataset.response, rcond=SINGULARITY_RTOL)
    if rank < n_coef:
        raise RankDeficient(f"design for subset {subset.tolist()} is rank deficient")
    residuals = dataset.response - design @ coefficients
    rss = float(residuals @ residuals)
    objective = aic_from_rss(dataset.n, subset.size, rss, rss_floor(dataset.response))
    return FitResult(coefficients=coefficients, rss=rss, objective=objective)


def aic(dataset: Dataset, subset) -> float:
    """AIC of the candidate model; propagates ``fit_ols`` errors."""
    return fit_ols(dataset, subset).objective


def null_objective(dataset: Dataset) -> float:
    """AIC of the intercept-only model (the strength baseline)."""
    return aic(dataset, ())
