"""The coupled two-layer loop: the neuron-growth feedback law
N_{t+1} = alpha*N_t + beta*E_t + gamma drives the SOM granularity, while the
second layer (fuzzy system or rough rule set) supplies the error E_t measured
on the test data at each close-open iteration.

Rounding note: the raw update is floored to an integer before clamping.
Floor is the one rounding whose fixed band stays within one unit of the
affine map's fixed point (beta*E + gamma) / (1 - alpha); half-up rounding
widens the band to ~1/(1 - alpha) and would park the trajectory far above it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import nfis, rst
from .dataset import Dataset
from .som import SomParams, extract_granules, grid_dims, train_som


@dataclass(frozen=True)
class NoiseParams:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")


@dataclass(frozen=True)
class LoopConfig:
    iterations: int = 30
    n_rules: int = 2
    bins: int = 3
    n_min: int = 4
    n_max: int = 400
    initial_N: int = 100
    som_params: SomParams = field(default_factory=SomParams)
    nfis_params: nfis.NfisTrainParams = field(default_factory=nfis.NfisTrainParams)
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.n_min < 2:
            raise ValueError("n_min must be >= 2")
        if self.n_max < self.n_min:
            raise ValueError("n_max must be >= n_min")
        if not (self.n_min <= self.initial_N <= self.n_max):
            raise ValueError("initial_N must lie within [n_min, n_max]")
        if self.n_rules < 1:
            raise ValueError("n_rules must be >= 1")


@dataclass(frozen=True)
class TrajectoryPoint:
    t: int
    N: int
    dims: tuple[int, int]
    live_granules: int
    E: float
    extra: int  # rule count (SONFIS) or bin count (SORST-AS) used at t


@dataclass
class Trajectory:
    points: list[TrajectoryPoint]
    config: LoopConfig
    params: NoiseParams

    def __len__(self) -> int:
        return len(self.points)

    CSV_HEADER = ["t", "N", "n1", "n2", "live_granules", "E", "extra"]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.CSV_HEADER)
            for p in self.points:
                w.writerow([p.t, p.N, p.dims[0], p.dims[1], p.live_granules, repr(p.E), p.extra])

    def N_series(self) -> np.ndarray:
        return np.array([p.N for p in self.points], dtype=np.float64)

    def E_series(self) -> np.ndarray:
        return np.array([p.E for p in self.points], dtype=np.float64)


@dataclass(frozen=True)
class OrderMetrics:
    mean_NG: float
    std_NG: float
    min_NG: float
    max_NG: float
    mean_E: float
    regime: str

    def as_dict(self) -> dict:
        return {
            "mean_NG": self.mean_NG,
            "std_NG": self.std_NG,
            "min_NG": self.min_NG,
            "max_NG": self.max_NG,
            "mean_E": self.mean_E,
            "regime": self.regime,
        }


def update_neuron_count(N_t: int, E_t: float, p: NoiseParams, n_min: int, n_max: int) -> int:
    """One step of the neuron-growth law, floored and clamped."""
    raw = p.alpha * N_t + p.beta * E_t + p.gamma
    return int(min(max(math.floor(raw), n_min), n_max))


def _iter_seed(master: int, t: int, stream: int = 0) -> int:
    """Per-iteration seed: a pure function of (master seed, iteration,
    stream). Stream 0 is the SOM, stream 1 the second layer."""
    return int(np.random.SeedSequence([master, stream, t]).generate_state(1)[0])


def run_sonfis(train: Dataset, test: Dataset, cfg: LoopConfig, p: NoiseParams,
               error_fn=None) -> Trajectory:
    """Close-open loop with the fuzzy second layer. `error_fn(t, granules)`
    is a test hook replacing the second layer (e.g. a constant-error stub).
    Returns the trajectory; the final rule base is attached as
    `trajectory.final_model` (None when the hook is active)."""
    points: list[TrajectoryPoint] = []
    N = cfg.initial_N
    prev_E: float | None = None
    final_model = None
    for t in range(1, cfg.iterations + 1):
        dims = grid_dims(N)
        params = replace(cfg.som_params, seed=_iter_seed(cfg.seed, t))
        grid = train_som(train, dims, params)
        granules = extract_granules(grid, train)
        if error_fn is not None:
            E = float(error_fn(t, granules))
        elif len(granules) < cfg.n_rules:
            E = prev_E if prev_E is not None else float(np.std(test.y))
        else:
            fis = nfis.init_rulebase(granules, cfg.n_rules, seed=_iter_seed(cfg.seed, t, stream=1))
            fis = nfis.train_hybrid(fis, granules, cfg.nfis_params)
            E = nfis.rmse(fis, test)
            final_model = fis
        points.append(TrajectoryPoint(t, N, dims, len(granules), E, cfg.n_rules))
        prev_E = E
        N = update_neuron_count(N, E, p, cfg.n_min, cfg.n_max)
    traj = Trajectory(points, cfg, p)
    traj.final_model = final_model
    return traj


def run_sorst_as(train: Dataset, test: Dataset, cfg: LoopConfig, p: NoiseParams,
                 bin_schedule, error_fn=None) -> Trajectory:
    """Close-open loop with the rough second layer: granules are discretized
    by per-attribute 1-D SOM scaling with the step's bin count, rules are
    induced, and E_t is the classifier MSE on the test data. `bin_schedule`
    is one count reused each step or a list of length `iterations`."""
    if isinstance(bin_schedule, int):
        schedule = [bin_schedule] * cfg.iterations
    else:
        schedule = [int(b) for b in bin_schedule]
        if len(schedule) != cfg.iterations:
            raise ValueError(f"bin_schedule length {len(schedule)} != iterations {cfg.iterations}")
    points: list[TrajectoryPoint] = []
    N = cfg.initial_N
    prev_E: float | None = None
    final_model = None
    for t, bins_t in zip(range(1, cfg.iterations + 1), schedule):
        dims = grid_dims(N)
        params = replace(cfg.som_params, seed=_iter_seed(cfg.seed, t))
        grid = train_som(train, dims, params)
        granules = extract_granules(grid, train)
        if error_fn is not None:
            E = float(error_fn(t, granules))
        else:
            gran_ds = None
            try:
                gran_ds = Dataset(granules.inputs, granules.decisions, list(train.attribute_names))
                scaling = rst.fit_scaling(gran_ds, bins_t, seed=_iter_seed(cfg.seed, t, stream=1))
                table = rst.apply_scaling(scaling, gran_ds)
                rules = rst.induce_rules(table, scaling)
                E = rst.mse(rules, test)
                final_model = rules
            except rst.ScalingError:
                # Degenerate granules (constant attribute or collapsed
                # codebook): carry the previous error forward.
                E = prev_E if prev_E is not None else float(np.std(test.y))
        points.append(TrajectoryPoint(t, N, dims, len(granules), E, bins_t))
        prev_E = E
        N = update_neuron_count(N, E, p, cfg.n_min, cfg.n_max)
    traj = Trajectory(points, cfg, p)
    traj.final_model = final_model
    return traj


def order_metrics(traj: Trajectory, burn_in: int = 0,
                  laminar_cv: float = 0.05, disordered_cv: float = 0.25) -> OrderMetrics:
    """Fluctuation statistics of the neuron-growth series after `burn_in`
    points, with a coefficient-of-variation regime label."""
    if burn_in >= len(traj):
        raise ValueError("burn_in must be smaller than the trajectory length")
    NG = traj.N_series()[burn_in:]
    E = traj.E_series()[burn_in:]
    mean = float(NG.mean())
    std = float(NG.std())  # population std
    cv = std / mean if mean > 0 else 0.0
    if cv < laminar_cv:
        regime = "laminar"
    elif cv > disordered_cv:
        regime = "disordered"
    else:
        regime = "transition"
    return OrderMetrics(mean, std, float(NG.min()), float(NG.max()), float(E.mean()), regime)


def trajectory_report(traj: Trajectory) -> str:
    """JSON run report: config echo, noise parameters, order metrics, and
    the final second-layer model when one was fitted."""
    model = getattr(traj, "final_model", None)
    if model is None:
        model_doc = None
    elif isinstance(model, nfis.FuzzyRuleBase):
        model_doc = json.loads(model.to_json())
    else:
        model_doc = json.loads(model.to_json())
    cfg = traj.config
    doc = {
        "config": {
            "iterations": cfg.iterations,
            "n_rules": cfg.n_rules,
            "bins": cfg.bins,
            "n_min": cfg.n_min,
            "n_max": cfg.n_max,
            "initial_N": cfg.initial_N,
            "seed": cfg.seed,
            "som": {
                "epochs": cfg.som_params.epochs,
                "initial_radius": cfg.som_params.initial_radius,
                "final_radius": cfg.som_params.final_radius,
            },
            "nfis": {
                "epochs": cfg.nfis_params.epochs,
                "premise_learning_rate": cfg.nfis_params.premise_learning_rate,
            },
        },
        "noise": {"alpha": traj.params.alpha, "beta": traj.params.beta, "gamma": traj.params.gamma},
        "order_metrics": order_metrics(traj).as_dict(),
        "final_model": model_doc,
        "points": [
            {
                "t": pt.t,
                "N": pt.N,
                "n1": pt.dims[0],
                "n2": pt.dims[1],
                "live_granules": pt.live_granules,
                "E": pt.E,
                "extra": pt.extra,
            }
            for pt in traj.points
        ],
    }
    return json.dumps(doc, indent=2)
