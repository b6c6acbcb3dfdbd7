"""Shared fixtures: random datasets and the diabetes CSV."""

from __future__ import annotations

import hashlib
import pathlib

import numpy as np
import pytest

from st2e import Dataset

DIABETES_CSV_SHA256 = "11c024c62abee49c81cbdf24b7dce85fd2d01e61d6c0cbea408369a721a96aff"
DIABETES_NAMES = ["age", "sex", "bmi", "map", "tc", "ldl", "hdl", "tch", "ltg", "glu"]


def random_dataset(
    rng: np.random.Generator, n: int = 30, p: int = 5, signal: int = 2, sigma: float = 1.0
) -> Dataset:
    """Small dense regression problem with the first ``signal`` betas nonzero."""
    x = rng.standard_normal((n, p))
    beta = np.zeros(p)
    signal = min(signal, p)
    beta[:signal] = rng.uniform(1.0, 3.0, size=signal)
    y = x @ beta + sigma * rng.standard_normal(n)
    return Dataset.from_xy(x, y)


def build_diabetes_csv(path: pathlib.Path) -> pathlib.Path:
    """Write the canonical diabetes CSV from scikit-learn's copy of the data."""
    from sklearn.datasets import load_diabetes

    bunch = load_diabetes(scaled=False)
    lines = [",".join(DIABETES_NAMES + ["prog"])]
    for row, target in zip(bunch.data, bunch.target):
        lines.append(",".join("%.10g" % value for value in list(row) + [target]))
    text = "\n".join(lines) + "\n"
    digest = hashlib.sha256(text.encode()).hexdigest()
    assert digest == DIABETES_CSV_SHA256, f"unexpected diabetes data: sha256 {digest}"
    path.write_text(text)
    return path


@pytest.fixture(scope="session")
def diabetes_csv(tmp_path_factory: pytest.TempPathFactory) -> pathlib.Path:
    repo_copy = pathlib.Path(__file__).parent / "data" / "diabetes.csv"
    if repo_copy.exists():
        return repo_copy
    return build_diabetes_csv(tmp_path_factory.mktemp("diabetes") / "diabetes.csv")


@pytest.fixture(scope="session")
def motivating_tuning_curves():
    """Five default-grid kappa sweeps on the alpha=1 scenario.

    Seeded exactly like ``st2e tune --scenario motivating --alpha 1 --seed s``
    for s = 0..4, with 50 paths per grid point.  Shared session-wide because
    two test modules assert different aspects of the same curves.
    """
    from st2e.ensemble import tune_kappa
    from st2e.rng import mix64, substream
    from st2e.scenarios import builtin_scenario, generate

    spec = builtin_scenario("motivating", alpha=1.0)
    curves = []
    for seed in range(5):
        data = generate(spec, substream(seed, 0))
        curves.append(tune_kappa(data, b_tune=50, master_seed=mix64(seed, 1)))
    return curves


ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter) -> None:
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, label, ok, detail in sorted(ACCEPTANCE_RESULTS):
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num} ({label}): {verdict}  [{detail}]")
