"""One stochastic stepwise (ST2) search path.

Instead of moving one variable at a time, each step adds or deletes a
randomly sized *group* of variables.  With ``m`` variables available to the
step, the group size ``g`` is uniform on ``{1, ..., floor(lam*m + 0.5)}``,
and the number of candidate groups assessed is

    k = floor(C(m, g) ** (1 / kappa) + 0.5),     kappa > 1,

clamped to ``[1, C(m, g)]``.  Small ``kappa`` evaluates many groups per step
(a greedy search); large ``kappa`` evaluates few.  The best candidate group
is accepted only when it strictly improves the AIC.  A path starts at the
intercept-only model, alternates forward then backward steps, and stops the
first time a full sweep accepts neither move (or when a sweep guard trips).

Candidate groups within a step are scored in batches against precomputed
cross-products (one Gram matrix per dataset, shared by all paths); the
final reported objective is recomputed with :func:`st2e.linear_model.aic`
so that it matches the contract-stable solver bit for bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .linear_model import Dataset, aic, aic_from_rss, as_subset, rss_floor

#: Upper bound on scratch floats per scoring chunk (keeps peak memory modest).
_CHUNK_BUDGET = 4_000_000

#: Candidate groups sampled per block inside a step; greedy settings can ask
#: for millions of groups, so steps stream them instead of materializing all.
_GROUP_BLOCK = 65_536


@dataclass
class ST2Config:
    """Parameters of one stochastic stepwise search path.

    ``kappa`` controls greediness (must exceed 1); ``lam`` caps the group
    size at ``floor(lam * m + 0.5)`` of the ``m`` available variables.
    """

    kappa: float
    lam: float = 0.5
    objective: str = "aic"
    max_sweeps: int = 50
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not self.kappa > 1.0:
            raise ValueError(f"kappa must exceed 1, got {self.kappa}")
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lam must lie in (0, 1), got {self.lam}")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.objective != "aic":
            raise ValueError(f"unsupported objective kind: {self.objective!r}")


@dataclass(frozen=True)
class StepPlan:
    """Randomized sizing of one forward or backward step."""

    direction: Literal["forward", "backward"]
    pool_size: int
    group_size: int
    group_count: int

    def __post_init__(self) -> None:
        if not 1 <= self.group_size <= self.pool_size:
            raise ValueError("group size must lie in [1, pool size]")
        if self.group_count < 1:
            raise ValueError("group count must be positive")


@dataclass
class PathResult:
    """Final model of one search path."""

    subset: np.ndarray
    objective: float
    sweeps: int
    terminated_by: Literal["converged", "guard"]


def sample_group_size(m: int, lam: float, rng: np.random.Generator) -> int:
    """Draw the step's group size, uniform on ``{1, ..., floor(lam*m + 0.5)}``."""
    if m < 1:
        raise ValueError("pool must contain at least one variable")
    hi = max(1, int(math.floor(lam * m + 0.5)))
    return int(rng.integers(1, hi + 1))


def num_candidate_groups(m: int, g: int, kappa: float) -> int:
    """Number of candidate groups to assess: ``floor(C(m,g)**(1/kappa) + 0.5)``.

    The binomial coefficient enters through its logarithm (via ``lgamma``)
    so the formula never overflows for large ``m``; the result is clamped
    to ``[1, C(m, g)]``.
    """
    if not 1 <= g <= m:
        raise ValueError("need 1 <= g <= m")
    if not kappa > 1.0:
        raise ValueError("kappa must exceed 1")
    log_comb = (
        math.lgamma(m + 1) - math.lgamma(g + 1) - math.lgamma(m - g + 1)
    )
    k = int(math.floor(math.exp(log_comb / kappa) + 0.5))
    return int(min(max(1, k), math.comb(m, g)))


def plan_step(
    direction: Literal["forward", "backward"],
    pool_size: int,
    config: ST2Config,
    rng: np.random.Generator,
) -> StepPlan:
    """Draw the group size, then derive the candidate-group count."""
    g = sample_group_size(pool_size, config.lam, rng)
    k = num_candidate_groups(pool_size, g, config.kappa)
    return StepPlan(direction=direction, pool_size=pool_size, group_size=g, group_count=k)


def sample_candidate_groups(
    pool: np.ndarray, g: int, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``k`` independent simple random samples of size ``g`` from ``pool``.

    Returns a ``(k, g)`` array whose rows are sorted index groups.  Draws are
    independent across rows, so duplicate groups may occur.
    """
    pool = np.asarray(pool, dtype=np.intp)
    m = pool.size
    if not 1 <= g <= m:
        raise ValueError("need 1 <= g <= pool size")
    if k < 1:
        raise ValueError("need k >= 1")
    if g == m:
        return np.broadcast_to(np.sort(pool), (k, g)).copy()
    # row-wise g smallest of iid uniform keys = uniform g-subset
    keys = rng.random((k, m))
    picks = np.argpartition(keys, g - 1, axis=1)[:, :g]
    return np.sort(pool[picks], axis=1)


class ModelEvaluator:
    """Batch AIC scorer backed by precomputed cross-products.

    For a design ``A = [1 X]`` the evaluator stores ``A'A``, ``A'y`` and
    ``y'y`` once; the RSS of any column subset then follows from a small
    symmetric solve, which vectorizes over whole batches of candidate
    groups.  Instances are read-only after construction and safe to share
    across threads.
    """

    def __init__(self, dataset: Dataset):
        n = dataset.n
        augmented = np.hstack([np.ones((n, 1)), dataset.predictors])
        self.n = n
        self.p = dataset.p
        self.gram = augmented.T @ augmented
        self.xty = augmented.T @ dataset.response
        self.yty = float(dataset.response @ dataset.response)
        self.floor = rss_floor(dataset.response)

    def restrict(self, columns: np.ndarray) -> "ModelEvaluator":
        """Evaluator for the dataset restricted to ``columns`` (0-based)."""
        columns = as_subset(columns, self.p)
        keep = np.concatenate(([0], columns + 1))
        clone = object.__new__(ModelEvaluator)
        clone.n = self.n
        clone.p = columns.size
        clone.gram = np.ascontiguousarray(self.gram[np.ix_(keep, keep)])
        clone.xty = self.xty[keep]
        clone.yty = self.yty
        clone.floor = self.floor
        return clone

    def _score_index_batch(self, index: np.ndarray) -> np.ndarray:
        """AIC for each row of ``index`` (augmented-design column indices)."""
        k, s = index.shape
        n_vars = s - 1
        if s > self.n:
            return np.full(k, np.inf)
        out = np.empty(k)
        chunk = max(1, _CHUNK_BUDGET // (s * s))
        for start in range(0, k, chunk):
            idx = index[start : start + chunk]
            grams = self.gram[idx[:, :, None], idx[:, None, :]]
            rhs = self.xty[idx]
            try:
                beta = np.linalg.solve(grams, rhs[:, :, None])[:, :, 0]
                rss = self.yty - np.einsum("ij,ij->i", rhs, beta)
            except np.linalg.LinAlgError:
                rss = np.array([self._rss_single(row) for row in idx])
            with np.errstate(invalid="ignore", divide="ignore"):
                bad = ~np.isfinite(rss) | (rss < -1e-6 * max(self.yty, 1.0))
                vals = self.n * np.log(np.maximum(rss, self.floor) / self.n) + 2.0 * (
                    n_vars + 1
                )
            vals[bad] = np.inf
            out[start : start + idx.shape[0]] = vals
        return out

    def _rss_single(self, index_row: np.ndarray) -> float:
        try:
            beta = np.linalg.solve(
                self.gram[np.ix_(index_row, index_row)], self.xty[index_row]
            )
        except np.linalg.LinAlgError:
            return np.inf
        return self.yty - float(self.xty[index_row] @ beta)

    def aic_of(self, subset: np.ndarray) -> float:
        """AIC of a single model (``+inf`` when rank deficient)."""
        subset = np.asarray(subset, dtype=np.intp)
        if subset.size + 1 > self.n:
            return np.inf
        index = np.concatenate(([0], subset + 1))
        rss = self._rss_single(index)
        if not np.isfinite(rss) or rss < -1e-6 * max(self.yty, 1.0):
            return np.inf
        return aic_from_rss(self.n, subset.size, rss, self.floor)

    def aic_forward(self, current: np.ndarray, groups: np.ndarray) -> np.ndarray:
        """AIC of ``current + group`` for every row of ``groups``."""
        k = groups.shape[0]
        base = np.concatenate(([0], np.asarray(current, dtype=np.intp) + 1))
        index = np.empty((k, base.size + groups.shape[1]), dtype=np.intp)
        index[:, : base.size] = base
        index[:, base.size :] = groups + 1
        return self._score_index_batch(index)

    def aic_backward(self, current: np.ndarray, groups: np.ndarray) -> np.ndarray:
        """AIC of ``current - group`` for every row of ``groups``."""
        current = np.asarray(current, dtype=np.intp)
        k, g = groups.shape
        h = current.size
        keep = np.ones((k, h), dtype=bool)
        pos = np.searchsorted(current, groups)
        keep[np.arange(k)[:, None], pos] = False
        remaining = np.broadcast_to(current, (k, h))[keep].reshape(k, h - g)
        index = np.empty((k, h - g + 1), dtype=np.intp)
        index[:, 0] = 0
        index[:, 1:] = remaining + 1
        return self._score_index_batch(index)


def _group_blocks(pool: np.ndarray, g: int, k: int, rng: np.random.Generator):
    """Candidate groups for one step, yielded in blocks of bounded size.

    When the budget ``k`` saturates at C(|pool|, g) the step is meant to be
    exhaustive (the greedy limit), so every group is enumerated exactly
    once and no random draws are consumed.  Below saturation the groups
    are independent uniform samples; consecutive blocks read the same
    stream positions as one bulk draw would, so chunking never changes
    the outcome.
    """
    pool = np.asarray(pool, dtype=np.intp)
    if k == math.comb(pool.size, g):
        combos = itertools.combinations(np.sort(pool).tolist(), g)
        while True:
            block = list(itertools.islice(combos, _GROUP_BLOCK))
            if not block:
                return
            yield np.array(block, dtype=np.intp)
    else:
        for start in range(0, k, _GROUP_BLOCK):
            yield sample_candidate_groups(pool, g, min(_GROUP_BLOCK, k - start), rng)


def _best_candidate(
    score_groups,
    pool: np.ndarray,
    g: int,
    k: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float]:
    """Best candidate group of one step; strict ``<`` keeps the earliest."""
    best_group: np.ndarray | None = None
    best_score = np.inf
    for groups in _group_blocks(pool, g, k, rng):
        scores = score_groups(groups)
        pick = int(np.argmin(scores))
        if best_group is None or scores[pick] < best_score:
            best_group = groups[pick]
            best_score = float(scores[pick])
    assert best_group is not None
    return best_group, best_score


def forward_step(
    dataset: Dataset,
    current,
    config: ST2Config,
    rng: np.random.Generator,
    evaluator: ModelEvaluator | None = None,
) -> tuple[np.ndarray, bool]:
    """Try to add one randomly sized group of excluded variables.

    Draws the step plan, samples the candidate groups, scores each
    augmented model, and accepts the best group only if it strictly lowers
    the AIC (ties among candidates go to the earliest draw).  Returns the
    possibly updated subset and whether the move was accepted.  Candidates
    whose fit is rank deficient score ``+inf`` and are never chosen.
    """
    current = as_subset(current, dataset.p)
    pool = np.setdiff1d(np.arange(dataset.p, dtype=np.intp), current, assume_unique=True)
    if pool.size == 0:
        raise ValueError("forward step requires at least one excluded variable")
    if evaluator is None:
        evaluator = ModelEvaluator(dataset)
    plan = plan_step("forward", pool.size, config, rng)
    group, score = _best_candidate(
        lambda groups: evaluator.aic_forward(current, groups),
        pool,
        plan.group_size,
        plan.group_count,
        rng,
    )
    if score < evaluator.aic_of(current):
        return np.sort(np.concatenate([current, group])), True
    return current, False


def backward_step(
    dataset: Dataset,
    current,
    config: ST2Config,
    rng: np.random.Generator,
    evaluator: ModelEvaluator | None = None,
) -> tuple[np.ndarray, bool]:
    """Mirror of :func:`forward_step`: delete a group of included variables."""
    current = as_subset(current, dataset.p)
    if current.size == 0:
        raise ValueError("backward step requires a non-empty model")
    if evaluator is None:
        evaluator = ModelEvaluator(dataset)
    plan = plan_step("backward", current.size, config, rng)
    group, score = _best_candidate(
        lambda groups: evaluator.aic_backward(current, groups),
        current,
        plan.group_size,
        plan.group_count,
        rng,
    )
    if score < evaluator.aic_of(current):
        return np.setdiff1d(current, group, assume_unique=True), True
    return current, False


def run_st2_path(
    dataset: Dataset,
    config: ST2Config,
    rng: np.random.Generator | None = None,
    evaluator: ModelEvaluator | None = None,
) -> PathResult:
    """Run one full search path from the intercept-only model.

    Alternates a forward then a backward step; each step is skipped when its
    pool is empty.  Terminates the first time a full sweep accepts neither
    move (``converged``) or after ``config.max_sweeps`` sweeps (``guard``).
    The returned objective is recomputed with the contract solver so it
    equals ``aic(dataset, subset)`` exactly.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    if evaluator is None:
        evaluator = ModelEvaluator(dataset)
    current = np.empty(0, dtype=np.intp)
    sweeps = 0
    terminated_by: Literal["converged", "guard"] = "guard"
    while sweeps < config.max_sweeps:
        sweeps += 1
        accepted_any = False
        if current.size < dataset.p:
            current, accepted = forward_step(dataset, current, config, rng, evaluator)
            accepted_any |= accepted
        if current.size > 0:
            current, accepted = backward_step(dataset, current, config, rng, evaluator)
            accepted_any |= accepted
        if not accepted_any:
            terminated_by = "converged"
            break
    return PathResult(
        subset=current,
        objective=aic(dataset, current),
        sweeps=sweeps,
        terminated_by=terminated_by,
    )
