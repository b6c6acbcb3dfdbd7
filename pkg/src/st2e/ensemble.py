"""Ensembles of stochastic stepwise paths.

Running B independent search paths on the same dataset yields a B x p
binary matrix E whose row b flags the variables in path b's final model.
Column means of E give an importance score R(j) in [0, 1] for each
variable, and the ensemble selects every variable scoring strictly above
the average importance.

Two diagnostics summarize an ensemble and drive the choice of the
greediness parameter ``kappa``:

* diversity D(E): average across columns of the unbiased within-ensemble
  variance of the selection indicators (how much the paths disagree);
* strength S(E): average relative improvement ``|F_b - F0| / |F0|`` of a
  path's final objective over the intercept-only baseline F0.

Greedy searches (small kappa) are strong but uniform; lax searches (large
kappa) are diverse but weak.  ``tune_kappa`` sweeps a grid and picks the
kappa where diversity peaks, which in practice sits just past the point
where strength starts to fall.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linear_model import Dataset, SignalPartition, null_objective
from .rng import substream
from .screening import ScreeningConfig, run_screened_path
from .search import ModelEvaluator, ST2Config, run_st2_path

#: |F0| below this is treated as zero and strength is undefined.
_NULL_OBJECTIVE_TINY = 1e-12


class DegenerateEnsemble(Exception):
    """Raised when a diagnostic needs at least two ensemble members."""


class NullObjectiveZero(Exception):
    """Raised when the baseline objective is too close to zero to divide by."""


@dataclass
class EnsembleMatrix:
    """Selection indicators and final objectives of B search paths.

    ``entries[b, j]`` is 1 exactly when path b's final model contains
    variable ``j``; ``path_objectives[b]`` is that model's AIC and
    ``null_objective`` the intercept-only AIC of the same dataset.
    """

    entries: np.ndarray
    path_objectives: np.ndarray
    null_objective: float

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries)
        self.path_objectives = np.asarray(self.path_objectives, dtype=np.float64)
        if self.entries.ndim != 2 or self.entries.shape[0] < 1:
            raise ValueError("entries must be a B x p matrix with B >= 1")
        if not np.isin(self.entries, (0, 1)).all():
            raise ValueError("entries must be 0/1 valued")
        self.entries = self.entries.astype(np.int8, copy=False)
        if self.path_objectives.shape != (self.entries.shape[0],):
            raise ValueError("path_objectives must have one value per row")

    @property
    def b(self) -> int:
        return self.entries.shape[0]

    @property
    def p(self) -> int:
        return self.entries.shape[1]


@dataclass
class TuningCurve:
    """Grid of (kappa, diversity, strength) triples and the chosen kappa."""

    entries: tuple[tuple[float, float, float], ...]
    chosen_kappa: float

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("tuning curve must contain at least one grid point")
        if not any(row[0] == self.chosen_kappa for row in self.entries):
            raise ValueError("chosen_kappa must be a grid element")

    @property
    def kappas(self) -> np.ndarray:
        return np.array([row[0] for row in self.entries])

    @property
    def diversities(self) -> np.ndarray:
        return np.array([row[1] for row in self.entries])

    @property
    def strengths(self) -> np.ndarray:
        return np.array([row[2] for row in self.entries])


def resolve_workers(requested: int | None = None, limit: int | None = None) -> int:
    """Worker-thread count after applying the ST2E_THREADS cap."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("ST2E_THREADS")
    if cap is not None:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise ValueError(f"ST2E_THREADS must be an integer, got {cap!r}") from None
    if limit is not None:
        n = min(n, limit)
    return max(1, n)


def build_ensemble(
    dataset: Dataset,
    config: ST2Config,
    b: int,
    master_seed: int,
    screening: ScreeningConfig | None = None,
    workers: int | None = None,
) -> EnsembleMatrix:
    """Run ``b`` independent search paths and stack their selections.

    Path ``i`` always draws from the substream keyed by ``(master_seed, i)``,
    so the result is bit-identical for any worker count.  When ``screening``
    is supplied and enabled, each path first screens variables on its own
    bootstrap sample; otherwise all paths share one precomputed evaluator.
    """
    if b < 1:
        raise ValueError("ensemble size must be at least 1")
    if screening is not None and screening.enabled:
        screening.validate(dataset.n, dataset.p)

        def run_path(index: int):
            return run_screened_path(
                dataset, config, screening, substream(master_seed, index)
            )

    else:
        evaluator = ModelEvaluator(dataset)

        def run_path(index: int):
            return run_st2_path(
                dataset, config, substream(master_seed, index), evaluator
            )

    entries = np.zeros((b, dataset.p), dtype=np.int8)
    objectives = np.empty(b)
    n_workers = resolve_workers(workers, limit=b)
    if n_workers == 1:
        results = map(run_path, range(b))
    else:
        pool = ThreadPoolExecutor(max_workers=n_workers)
        results = pool.map(run_path, range(b))
    for i, path in enumerate(results):
        entries[i, path.subset] = 1
        objectives[i] = path.objective
    if n_workers > 1:
        pool.shutdown()
    return EnsembleMatrix(entries, objectives, null_objective(dataset))


def importance(ensemble: EnsembleMatrix) -> np.ndarray:
    """Importance score per variable: the column means of the 0/1 matrix."""
    return ensemble.entries.mean(axis=0)


def threshold_mean(r: np.ndarray) -> np.ndarray:
    """Indices whose importance strictly exceeds the average importance."""
    r = np.asarray(r, dtype=np.float64)
    if r.ndim != 1 or r.size < 1:
        raise ValueError("importance must be a nonempty vector")
    # exact ties must not select; tolerance absorbs the mean's rounding
    # (real importance gaps are multiples of 1/B, many orders larger)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(r))))
    return np.flatnonzero(r > r.mean() + tol).astype(np.intp)


def diversity(ensemble: EnsembleMatrix) -> float:
    """Average across variables of the unbiased column variance of E."""
    if ensemble.b < 2:
        raise DegenerateEnsemble("diversity needs at least two ensemble members")
    return float(np.var(ensemble.entries, axis=0, ddof=1, dtype=np.float64).mean())


def strength(ensemble: EnsembleMatrix) -> float:
    """Average relative objective improvement over the intercept-only model."""
    f0 = ensemble.null_objective
    if abs(f0) < _NULL_OBJECTIVE_TINY:
        raise NullObjectiveZero("baseline objective is zero; strength undefined")
    return float(np.mean(np.abs(ensemble.path_objectives - f0)) / abs(f0))


def default_kappa_grid(points: int = 12) -> np.ndarray:
    """Log-spaced kappa grid, ln(kappa) equally spaced on [0.25, 3]."""
    return np.exp(np.linspace(0.25, 3.0, points))


def tune_kappa(
    dataset: Dataset,
    kappa_grid: Sequence[float] | None = None,
    b_tune: int = 100,
    master_seed: int = 0,
    lam: float = 0.5,
    screening: ScreeningConfig | None = None,
    workers: int | None = None,
) -> TuningCurve:
    """Sweep the kappa grid and pick the diversity peak.

    Builds one ensemble of size ``b_tune`` per grid value (all from the
    same master seed, so neighboring grid points share random numbers) and
    records (kappa, D, S).  The chosen kappa maximizes diversity; exact
    ties go to the larger kappa, whose search is cheaper and less greedy.
    """
    grid = default_kappa_grid() if kappa_grid is None else np.asarray(kappa_grid, float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("kappa grid must be a nonempty vector")
    if not (grid > 1.0).all():
        raise ValueError("every kappa in the grid must exceed 1")
    if b_tune < 2:
        raise ValueError("b_tune must be at least 2 to measure diversity")
    rows: list[tuple[float, float, float]] = []
    for kappa in grid:
        config = ST2Config(kappa=float(kappa), lam=lam)
        ensemble = build_ensemble(
            dataset, config, b_tune, master_seed, screening, workers
        )
        rows.append((float(kappa), diversity(ensemble), strength(ensemble)))
    best = max(range(len(rows)), key=lambda i: (rows[i][1], rows[i][0]))
    return TuningCurve(entries=tuple(rows), chosen_kappa=rows[best][0])


def perf(selection_runs: Sequence[np.ndarray], truth: SignalPartition) -> float:
    """Average selection frequency of signal minus that of noise.

    Each run contributes one 0/1 indicator per variable; the average
    selection frequency of a group pools those indicators over runs and
    over the group's variables.  An empty group contributes frequency 0.
    """
    if len(selection_runs) == 0:
        raise ValueError("perf needs at least one selection run")

    def asf(group: frozenset[int]) -> float:
        if not group:
            return 0.0
        hits = sum(len(group.intersection(np.asarray(run).tolist())) for run in selection_runs)
        return hits / (len(selection_runs) * len(group))

    return asf(truth.signal) - asf(truth.noise)
