"""Second granulation, fuzzy branch: first-order Takagi-Sugeno system with
Gaussian premises and linear consequents, trained by the classic hybrid
scheme (exact least squares for the consequents, gradient descent for the
premises) on the crisp granules.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .som import GranuleSet

WIDTH_FLOOR_INIT = 0.1
WIDTH_FLOOR_TRAIN = 0.01


@dataclass(frozen=True)
class NfisTrainParams:
    epochs: int = 10
    premise_learning_rate: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.premise_learning_rate <= 0:
            raise ValueError("premise_learning_rate must be > 0")


@dataclass
class FuzzyRuleBase:
    centers: np.ndarray  # (R, d)
    widths: np.ndarray  # (R, d), strictly positive
    coeffs: np.ndarray  # (R, d + 1): linear part then intercept

    @property
    def n_rules(self) -> int:
        return len(self.centers)

    @property
    def n_inputs(self) -> int:
        return self.centers.shape[1]

    def to_json(self) -> str:
        rules = [
            {
                "centers": list(map(float, c)),
                "widths": list(map(float, s)),
                "consequent": list(map(float, a)),
            }
            for c, s, a in zip(self.centers, self.widths, self.coeffs)
        ]
        return json.dumps({"n_rules": self.n_rules, "rules": rules}, indent=2)


def _kmeans(points: np.ndarray, k: int, seed: int, iters: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Plain Lloyd iterations; empty clusters are reseeded from the point
    farthest from its current center. Returns (centers, labels)."""
    rng = np.random.default_rng(seed)
    centers = points[rng.choice(len(points), size=k, replace=False)].copy()
    labels = np.zeros(len(points), dtype=np.int64)
    for _ in range(iters):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        for j in range(k):
            mask = new_labels == j
            if mask.any():
                centers[j] = points[mask].mean(axis=0)
            else:
                far = int(np.argmax(d2[np.arange(len(points)), new_labels]))
                centers[j] = points[far]
                new_labels[far] = j
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return centers, labels


def init_rulebase(granules: GranuleSet, n_rules: int, seed: int) -> FuzzyRuleBase:
    """Place rule centers by seeded k-means over the granule inputs; widths
    are the per-dimension std of each cluster, floored at 0.1; consequents
    start at zero."""
    if len(granules) < n_rules:
        raise ValueError(f"{len(granules)} granules cannot seed {n_rules} rules")
    centers, labels = _kmeans(granules.inputs, n_rules, seed)
    d = granules.inputs.shape[1]
    widths = np.full((n_rules, d), WIDTH_FLOOR_INIT)
    for j in range(n_rules):
        members = granules.inputs[labels == j]
        if len(members) > 1:
            widths[j] = np.maximum(members.std(axis=0), WIDTH_FLOOR_INIT)
    return FuzzyRuleBase(centers, widths, np.zeros((n_rules, d + 1)))


def _firing(fis: FuzzyRuleBase, X: np.ndarray) -> np.ndarray:
    """Rule firing strengths, (n, R); product of Gaussian memberships."""
    z = (X[:, None, :] - fis.centers[None, :, :]) / fis.widths[None, :, :]
    return np.exp(-0.5 * (z**2).sum(axis=2))


def _consequent_values(fis: FuzzyRuleBase, X: np.ndarray) -> np.ndarray:
    """Per-rule linear consequent outputs, (n, R)."""
    return X @ fis.coeffs[:, :-1].T + fis.coeffs[:, -1]


def predict(fis: FuzzyRuleBase, X: np.ndarray) -> np.ndarray:
    """Weighted-average defuzzification over all rules; rows whose total
    firing strength underflows to zero fall back to the nearest-center
    rule's consequent."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    w = _firing(fis, X)
    f = _consequent_values(fis, X)
    sw = w.sum(axis=1)
    out = np.empty(len(X))
    ok = sw > 0
    out[ok] = (w[ok] * f[ok]).sum(axis=1) / sw[ok]
    if (~ok).any():
        d2 = ((X[~ok, None, :] - fis.centers[None, :, :]) ** 2).sum(axis=2)
        out[~ok] = f[~ok, np.argmin(d2, axis=1)]
    return out


def infer(fis: FuzzyRuleBase, x) -> float:
    return float(predict(fis, np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def _solve_consequents(fis: FuzzyRuleBase, X: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Least-squares consequents on the weight-normalized design. Rows with
    underflowed firing use a one-hot weight on the nearest rule, matching
    the inference fallback. Minimum-norm solution when rank-deficient."""
    n, d = X.shape
    R = fis.n_rules
    w = _firing(fis, X)
    sw = w.sum(axis=1)
    wn = np.zeros_like(w)
    ok = sw > 0
    wn[ok] = w[ok] / sw[ok, None]
    if (~ok).any():
        d2 = ((X[~ok, None, :] - fis.centers[None, :, :]) ** 2).sum(axis=2)
        wn[np.nonzero(~ok)[0], np.argmin(d2, axis=1)] = 1.0
    X1 = np.column_stack([X, np.ones(n)])
    design = (wn[:, :, None] * X1[:, None, :]).reshape(n, R * (d + 1))
    sol, *_ = np.linalg.lstsq(design, t, rcond=None)
    return sol.reshape(R, d + 1)


def _premise_gradients(fis: FuzzyRuleBase, X: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of mean squared error w.r.t. centers and widths.
    Rows with underflowed total firing contribute nothing."""
    w = _firing(fis, X)
    f = _consequent_values(fis, X)
    sw = w.sum(axis=1)
    ok = sw > 0
    gc = np.zeros_like(fis.centers)
    gs = np.zeros_like(fis.widths)
    if not ok.any():
        return gc, gs
    Xo, wo, fo, swo = X[ok], w[ok], f[ok], sw[ok]
    y = (wo * fo).sum(axis=1) / swo
    r = y - t[ok]
    # dE/dw_i = (2/n) * r * (f_i - y) / sw  (n = full sample count)
    dE_dw = (2.0 / len(X)) * r[:, None] * (fo - y[:, None]) / swo[:, None]
    diff = Xo[:, None, :] - fis.centers[None, :, :]
    common = (dE_dw * wo)[:, :, None]
    gc = (common * diff / fis.widths[None, :, :] ** 2).sum(axis=0)
    gs = (common * diff**2 / fis.widths[None, :, :] ** 3).sum(axis=0)
    return gc, gs


def train_hybrid(fis: FuzzyRuleBase, granules: GranuleSet, params: NfisTrainParams) -> FuzzyRuleBase:
    """Per epoch: exact least squares for the consequents, then one gradient
    step on the premise centers and widths (widths re-floored at 0.01).
    Returns a new rule base; the input is untouched."""
    if len(granules) == 0:
        raise ValueError("empty granule set")
    X = np.asarray(granules.inputs, dtype=np.float64)
    t = np.asarray(granules.decisions, dtype=np.float64)
    out = FuzzyRuleBase(fis.centers.copy(), fis.widths.copy(), fis.coeffs.copy())
    lr = params.premise_learning_rate
    for _ in range(params.epochs):
        out.coeffs = _solve_consequents(out, X, t)
        gc, gs = _premise_gradients(out, X, t)
        out.centers = out.centers - lr * gc
        out.widths = np.maximum(out.widths - lr * gs, WIDTH_FLOOR_TRAIN)
    return out


def rmse(fis: FuzzyRuleBase, test: Dataset) -> float:
    """Root mean square error of the system output over the test set."""
    if len(test) == 0:
        raise ValueError("empty test set")
    pred = predict(fis, test.X)
    return float(np.sqrt(np.mean((pred - test.y) ** 2)))
