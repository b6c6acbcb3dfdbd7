"""Bootstrap + marginal-correlation screening for p > n problems.

A stepwise search cannot operate on more variables than observations, so
each ensemble path first reduces the problem: it draws a bootstrap sample,
ranks variables on that sample by absolute Pearson correlation with the
response (sure independence screening), keeps the top ``q`` (default
``n - 1``), and then searches over only those columns.  Screening on a
fresh bootstrap sample per path randomizes which variables survive, which
adds ensemble diversity; the cap applies per path, so the ensemble as a
whole can still select more than ``q`` distinct variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linear_model import Dataset, aic
from .search import PathResult, ST2Config, run_st2_path


class ZeroVarianceResponse(Exception):
    """Raised when the response is constant, so correlations are undefined."""


@dataclass(frozen=True)
class ScreeningConfig:
    """Per-path screening: keep the top ``q`` variables each path.

    ``fit_on_bootstrap`` switches the subsequent search to the bootstrap
    sample itself; the default searches the original rows and uses the
    bootstrap only to diversify the screen.
    """

    q: int
    enabled: bool = True
    fit_on_bootstrap: bool = False

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError("q must be a positive integer")

    def validate(self, n: int, p: int) -> None:
        if self.q > p:
            raise ValueError(f"q={self.q} exceeds the variable count p={p}")
        if p >= n and self.q >= n:
            raise ValueError(f"with p >= n, q must be below n; got q={self.q}, n={n}")


def bootstrap_sample(dataset: Dataset, rng: np.random.Generator) -> Dataset:
    """Resample the rows with replacement (names and truth carry over)."""
    rows = rng.integers(0, dataset.n, size=dataset.n)
    return Dataset(
        predictors=dataset.predictors[rows],
        response=dataset.response[rows],
        names=dataset.names,
        truth=dataset.truth,
    )


def sis_screen(dataset: Dataset, q: int) -> np.ndarray:
    """Top ``q`` variables by absolute Pearson correlation with the response.

    Returns a sorted index array.  Rank ties break toward the lower index;
    constant columns get correlation 0 and therefore rank last.  A constant
    response is an error.
    """
    if not 1 <= q <= dataset.p:
        raise ValueError(f"q must lie in [1, p]; got q={q}, p={dataset.p}")
    x = dataset.predictors - dataset.predictors.mean(axis=0)
    y = dataset.response - dataset.response.mean()
    sy = float(np.sqrt(y @ y))
    if sy == 0.0:
        raise ZeroVarianceResponse("response has zero variance on this sample")
    sx = np.sqrt(np.einsum("ij,ij->j", x, x))
    score = np.zeros(dataset.p)
    live = sx > 0.0
    score[live] = np.abs(x[:, live].T @ y) / (sx[live] * sy)
    order = np.argsort(-score, kind="stable")
    return np.sort(order[:q]).astype(np.intp)


def run_screened_path(
    dataset: Dataset,
    st2: ST2Config,
    screening: ScreeningConfig,
    rng: np.random.Generator,
) -> PathResult:
    """One search path behind a bootstrap screen.

    Draws a bootstrap sample, screens on it, then runs the stepwise search
    on the screened columns (of the original rows by default).  The result
    has its indices mapped back to the full dataset's numbering and its
    objective always refers to the original rows, so ensemble diagnostics
    stay comparable across paths.
    """
    if not screening.enabled:
        raise ValueError("screening config is disabled")
    screening.validate(dataset.n, dataset.p)
    boot = bootstrap_sample(dataset, rng)
    screened = sis_screen(boot, screening.q)
    source = boot if screening.fit_on_bootstrap else dataset
    result = run_st2_path(source.select_columns(screened), st2, rng)
    subset = screened[result.subset]
    objective = result.objective
    if screening.fit_on_bootstrap:
        objective = aic(dataset, subset)
    return PathResult(
        subset=subset,
        objective=objective,
        sweeps=result.sweeps,
        terminated_by=result.terminated_by,
    )
