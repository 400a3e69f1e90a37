"""Parameter-grid experiment harness: alpha sweeps, beta sweeps, joint
alpha-beta surfaces, and discretization sweeps, with per-cell repeats,
deterministic seed derivation, and long-format CSV export.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from .dataset import Dataset
from .dynamics import LoopConfig, NoiseParams, OrderMetrics, order_metrics, run_sonfis, run_sorst_as

CSV_HEADER = ["alpha", "beta", "gamma", "extra", "repeat", "mean_NG", "std_NG", "mean_E", "regime"]


@dataclass(frozen=True)
class SweepSpec:
    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    gammas: tuple[float, ...]
    extras: tuple[int, ...]  # n_rules (sonfis) or bin counts (sorst)
    repeats: int
    base_config: LoopConfig
    system: str = "sonfis"  # "sonfis" | "sorst"
    burn_in: int = 0

    def __post_init__(self):
        for name in ("alphas", "betas", "gammas", "extras"):
            vals = getattr(self, name)
            object.__setattr__(self, name, tuple(vals))
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.system not in ("sonfis", "sorst"):
            raise ValueError(f"unknown system {self.system!r}")

    @property
    def grid(self) -> list[tuple[float, float, float, int]]:
        return list(product(self.alphas, self.betas, self.gammas, self.extras))


@dataclass
class CellResult:
    alpha: float
    beta: float
    gamma: float
    extra: int
    metrics: list[OrderMetrics]  # one per repeat
    error: str | None = None
    trajectories: list | None = None

    @property
    def mean_NG_values(self) -> np.ndarray:
        return np.array([m.mean_NG for m in self.metrics])

    @property
    def std_NG_values(self) -> np.ndarray:
        return np.array([m.std_NG for m in self.metrics])

    def aggregate(self) -> dict:
        ngs = self.mean_NG_values
        es = np.array([m.mean_E for m in self.metrics])
        return {
            "mean_NG": float(ngs.mean()),
            "std_of_mean_NG": float(ngs.std()),
            "mean_E": float(es.mean()),
            "std_of_mean_E": float(es.std()),
        }


@dataclass
class SweepResult:
    spec: SweepSpec
    cells: list[CellResult]


def _cell_seed(base: int, cell_index: int, repeat: int) -> int:
    """Pure function of the indices so cells can run in any order."""
    return int(np.random.SeedSequence([base, cell_index, repeat]).generate_state(1)[0])


def run_sweep(spec: SweepSpec, train: Dataset, test: Dataset,
              keep_trajectories: bool = False, error_fn=None) -> SweepResult:
    """Execute every grid cell x repeat. Per-cell failures are recorded in
    the cell, never raised; result ordering follows the grid regardless of
    execution order. `error_fn` is the constant-error stub hook passed down
    to the dynamics loop."""
    cells: list[CellResult] = []
    for cell_index, (alpha, beta, gamma, extra) in enumerate(spec.grid):
        p = NoiseParams(alpha, beta, gamma)
        metrics: list[OrderMetrics] = []
        trajs = [] if keep_trajectories else None
        error = None
        try:
            for rep in range(spec.repeats):
                seed = _cell_seed(spec.base_config.seed, cell_index, rep)
                if spec.system == "sonfis":
                    cfg = replace(spec.base_config, n_rules=extra, seed=seed)
                    traj = run_sonfis(train, test, cfg, p, error_fn=error_fn)
                else:
                    cfg = replace(spec.base_config, bins=extra, seed=seed)
                    traj = run_sorst_as(train, test, cfg, p, extra, error_fn=error_fn)
                metrics.append(order_metrics(traj, burn_in=spec.burn_in))
                if trajs is not None:
                    trajs.append(traj)
        except Exception as exc:  # degenerate corners stay local to the cell
            error = f"{type(exc).__name__}: {exc}"
        cells.append(CellResult(alpha, beta, gamma, extra, metrics, error, trajs))
    return SweepResult(spec, cells)


def transition_profile(result: SweepResult, axis: str) -> dict:
    """Marginal mean_NG / std_NG along one swept parameter, plus the axis
    value with the largest increase in std_NG between consecutive grid
    points (the transition locus). The locus is flagged weak when the jump
    is under 10% of the mean std."""
    key = {"alpha": "alphas", "beta": "betas", "gamma": "gammas", "extra": "extras"}.get(axis)
    if key is None:
        raise ValueError(f"unknown axis {axis!r}")
    values = list(getattr(result.spec, key))
    by_value: dict[float, list[OrderMetrics]] = {v: [] for v in values}
    for cell in result.cells:
        if cell.error is not None:
            continue
        by_value[getattr(cell, axis)].extend(cell.metrics)
    profile = []
    for v in values:
        ms = by_value[v]
        ngs = np.array([m.mean_NG for m in ms]) if ms else np.array([np.nan])
        stds = np.array([m.std_NG for m in ms]) if ms else np.array([np.nan])
        profile.append({"value": v, "mean_NG": float(ngs.mean()), "std_NG": float(stds.mean())})
    stds = np.array([row["std_NG"] for row in profile])
    if len(stds) > 1:
        jumps = np.diff(stds)
        j = int(np.argmax(jumps))
        locus = values[j + 1]
        mean_std = float(np.nanmean(stds))
        weak = bool(jumps[j] < 0.1 * mean_std)
    else:
        locus, weak = values[0], True
    return {"axis": axis, "profile": profile, "transition_locus": locus, "weak": weak}


def export_csv(result: SweepResult, path) -> None:
    """Long format: one row per (cell, repeat)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for cell in result.cells:
            for rep, m in enumerate(cell.metrics):
                w.writerow(
                    [
                        repr(cell.alpha),
                        repr(cell.beta),
                        repr(cell.gamma),
                        cell.extra,
                        rep,
                        repr(m.mean_NG),
                        repr(m.std_NG),
                        repr(m.mean_E),
                        m.regime,
                    ]
                )


def load_csv_rows(path) -> list[dict]:
    """Parse an exported sweep CSV back into typed row dicts."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected sweep CSV header: {reader.fieldnames}")
        rows = []
        for row in reader:
            rows.append(
                {
                    "alpha": float(row["alpha"]),
                    "beta": float(row["beta"]),
                    "gamma": float(row["gamma"]),
                    "extra": int(row["extra"]),
                    "repeat": int(row["repeat"]),
                    "mean_NG": float(row["mean_NG"]),
                    "std_NG": float(row["std_NG"]),
                    "mean_E": float(row["mean_E"]),
                    "regime": row["regime"],
                }
            )
    return rows


def profile_from_rows(rows: list[dict], axis: str) -> dict:
    """Recompute a transition profile from exported CSV rows."""
    if axis not in ("alpha", "beta", "gamma", "extra"):
        raise ValueError(f"unknown axis {axis!r}")
    values = sorted({row[axis] for row in rows})
    profile = []
    for v in values:
        sel = [row for row in rows if row[axis] == v]
        profile.append(
            {
                "value": v,
                "mean_NG": float(np.mean([r["mean_NG"] for r in sel])),
                "std_NG": float(np.mean([r["std_NG"] for r in sel])),
            }
        )
    stds = np.array([row["std_NG"] for row in profile])
    if len(stds) > 1:
        jumps = np.diff(stds)
        j = int(np.argmax(jumps))
        locus = values[j + 1]
        weak = bool(jumps[j] < 0.1 * float(np.nanmean(stds)))
    else:
        locus, weak = values[0], True
    return {"axis": axis, "profile": profile, "transition_locus": locus, "weak": weak}
