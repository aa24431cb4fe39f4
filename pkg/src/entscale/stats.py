"""Ensemble aggregation, scaling-law fits and reference curves."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

Z95 = 1.96
MODELS = ("linear", "inverse-n", "inverse-n-cubed", "loglog", "power")


@dataclass(frozen=True)
class EnsembleStats:
    n_qubits: int
    count: int
    mean_max_entropy: float
    worst_max_entropy: float
    mean_min_gap: float
    worst_min_gap: float
    ci95_entropy: float
    ci95_gap: float
    mean_s_min_gap: float
    mean_s_max_entropy: float
    ci95_s_min_gap: float = 0.0
    ci95_s_max_entropy: float = 0.0


@dataclass(frozen=True)
class FitResult:
    model: str
    slope: float
    intercept: float
    residual: float
    correlation: float

    def predict(self, x):
        return self.slope * _transform_x(self.model, np.asarray(x, dtype=float)) + self.intercept


def _mean(values) -> float:
    # fsum is exactly rounded, so the result does not depend on input order
    return math.fsum(values) / len(values)


def mean_ci(values) -> tuple[float, float]:
    """Mean and normal-approximation 95% half-width (sample std, ddof=1)."""
    values = [float(v) for v in values]
    if not values:
        raise InvalidArgument("no values")
    m = _mean(values)
    if len(values) < 2:
        return m, 0.0
    var = math.fsum((v - m) ** 2 for v in values) / (len(values) - 1)
    return m, Z95 * math.sqrt(var) / math.sqrt(len(values))


def aggregate(profiles) -> EnsembleStats:
    """Mean, worst case and 95% intervals over sweep profiles of one size.

    Worst case is the hardest instance: largest peak entropy, smallest gap.
    """
    profiles = list(profiles)
    if not profiles:
        raise InvalidArgument("cannot aggregate an empty ensemble")
    sizes = {p.n_qubits for p in profiles}
    if len(sizes) != 1:
        raise InvalidArgument(f"mixed system sizes in ensemble: {sorted(sizes)}")
    ent = [p.max_entropy for p in profiles]
    gap = [p.min_gap for p in profiles]
    s_gap = [p.s_min_gap for p in profiles]
    s_ent = [p.s_max_entropy for p in profiles]
    me, ce = mean_ci(ent)
    mg, cg = mean_ci(gap)
    msg, csg = mean_ci(s_gap)
    mse, cse = mean_ci(s_ent)
    return EnsembleStats(sizes.pop(), len(profiles), me, max(ent), mg, min(gap), ce, cg,
                         msg, mse, csg, cse)


def mean_curve(profiles, quantity: str = "entropy") -> np.ndarray:
    """Pointwise instance average of the entropy or gap curve."""
    profiles = list(profiles)
    if not profiles:
        raise InvalidArgument("no profiles")
    grids = {tuple(np.round(p.s_grid, 9)) for p in profiles}
    if len(grids) != 1:
        raise InvalidArgument("profiles use different s grids")
    if quantity == "entropy":
        rows = [p.entropies for p in profiles]
    elif quantity == "gap":
        rows = [p.gaps for p in profiles]
    else:
        raise InvalidArgument(f"unknown quantity {quantity!r}")
    return np.array([math.fsum(col) / len(col) for col in zip(*rows)])


def _transform_x(model: str, x: np.ndarray) -> np.ndarray:
    if model == "linear":
        return x
    if model == "inverse-n":
        return 1.0 / x
    if model == "inverse-n-cubed":
        return 1.0 / x ** 3
    if model == "power":
        return np.log(x)
    if model == "loglog":
        return np.log(np.abs(np.log(x)))
    raise InvalidArgument(f"unknown model {model!r}; choose from {MODELS}")


def fit(xs, ys, model: str = "linear") -> FitResult:
    """Least-squares line through the model-transformed points.

    ``power`` fits log y against log x, so its slope is the exponent;
    ``loglog`` fits y against log|log x|.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise InvalidArgument("xs and ys must be 1-d and the same length")
    if len(xs) < 3:
        raise InvalidArgument("need at least three points")
    u = _transform_x(model, xs)
    if model == "power" and np.any(ys <= 0):
        raise InvalidArgument("power model needs positive y values")
    v = np.log(ys) if model == "power" else ys
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise InvalidArgument("transformed data contains non-finite values")
    du = u - u.mean()
    if np.sqrt(np.mean(du * du)) <= 1e-12 * max(1.0, np.abs(u).max()):
        raise InvalidArgument("x values have no spread after transform")
    slope = float(np.dot(du, v - v.mean()) / np.dot(du, du))
    intercept = float(v.mean() - slope * u.mean())
    resid = float(np.linalg.norm(v - (slope * u + intercept)))
    dv = v - v.mean()
    denom = math.sqrt(float(np.dot(du, du)) * float(np.dot(dv, dv)))
    corr = 1.0 if denom == 0 else float(np.clip(np.dot(du, dv) / denom, -1.0, 1.0))
    return FitResult(model, slope, intercept, resid, corr)


@dataclass(frozen=True)
class CriticalFit:
    growth: FitResult
    falling: FitResult

    @property
    def alpha(self) -> float:
        """Critical exponent of E ~ |s - s_c|^(-alpha) on the falling side."""
        return -self.falling.slope


def fit_critical_region(s, values, s_c: float, window_lo=None, window_hi=None) -> CriticalFit:
    """Fit both flanks of an entropy peak at ``s_c``.

    Growth side (s < s_c): ``E = a log|log|s - s_c|| + c``.
    Falling side (s > s_c): ``log E = -alpha log|s - s_c| + c``.
    Windows are (near, far) distances from s_c; defaults (0.02, 0.15).
    """
    s = np.asarray(s, dtype=float)
    values = np.asarray(values, dtype=float)
    if s.shape != values.shape:
        raise InvalidArgument("s and values differ in length")
    if not s.min() < s_c < s.max():
        raise InvalidArgument(f"s_c={s_c} is not strictly inside the grid")
    lo_near, lo_far = window_lo or (0.02, 0.15)
    hi_near, hi_far = window_hi or (0.02, 0.15)
    dist = np.abs(s - s_c)
    tol = 1e-9
    left = (s < s_c) & (dist >= lo_near - tol) & (dist <= lo_far + tol) & (dist > 0) & (dist < 1)
    right = (s > s_c) & (dist >= hi_near - tol) & (dist <= hi_far + tol) & (dist > 0)
    if left.sum() < 4 or right.sum() < 4:
        raise InvalidArgument(
            f"fit windows hold {int(left.sum())} and {int(right.sum())} points; need at least 4 each")
    growth = fit(dist[left], values[left], "loglog")
    falling = fit(dist[right], values[right], "power")
    return CriticalFit(growth, falling)


def page_entropy(n: int) -> float:
    """Mean half-cut entropy of a random n-qubit pure state, large-n form."""
    if n < 2 or n % 2:
        raise InvalidArgument(f"need even n >= 2, got {n}")
    return n / 2 - 1 / (2 * math.log(2))


def page_entropy_exact(n_a: int, n_b: int) -> float:
    """Exact mean entropy (bits) of an n_a-qubit subsystem of a random state on n_a + n_b qubits."""
    m, nn = sorted((1 << n_a, 1 << n_b))
    total = math.fsum(1.0 / k for k in range(nn + 1, m * nn + 1))
    return (total - (m - 1) / (2 * nn)) / math.log(2)


AGGREGATE_HEADER = ("n,count,mean_max_entropy,ci_entropy,worst_max_entropy,"
                    "mean_min_gap,ci_gap,worst_min_gap,mean_s_gap,mean_s_entropy")


def aggregate_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(AGGREGATE_HEADER + "\n")
    for st in rows:
        vals = (st.mean_max_entropy, st.ci95_entropy, st.worst_max_entropy, st.mean_min_gap,
                st.ci95_gap, st.worst_min_gap, st.mean_s_min_gap, st.mean_s_max_entropy)
        buf.write(f"{st.n_qubits},{st.count}," + ",".join(f"{x:.12g}" for x in vals) + "\n")
    return buf.getvalue()


def read_aggregate_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != AGGREGATE_HEADER:
        raise InvalidArgument("not an aggregate table")
    keys = AGGREGATE_HEADER.split(",")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        row = {k: float(v) for k, v in zip(keys, parts)}
        row["n"] = int(row["n"])
        row["count"] = int(row["count"])
        out.append(row)
    return out
