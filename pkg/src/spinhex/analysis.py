"""Statistical post-processing: per-round rates, intervals, threshold, fits.

The figure of merit is the logical error probability per stabilizer
extraction round.  A run of R rounds fails with probability
P = 1/2 (1 - (1 - 2 p_round)^R) under independent identically distributed
rounds; `per_round_rate` inverts that exactly.  Confidence intervals are
binomial likelihood-ratio intervals (all p whose likelihood is within a
fixed factor of the maximum), the threshold is estimated from pairwise
crossings of log-log-interpolated curves for consecutive distances, and
sub-threshold scaling is a least-squares line on (d, ln p_L).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CSV_COLUMNS = (
    "variant",
    "basis",
    "nx",
    "ny",
    "d",
    "p",
    "eta",
    "rounds",
    "shots",
    "failures",
    "pl_round",
    "ci_low",
    "ci_high",
)


@dataclass(frozen=True)
class CurvePoint:
    """One simulated memory point, converted to a per-round rate."""

    p: float
    d: int
    shots: int
    failures: int
    p_L_round: float
    ci_low: float
    ci_high: float

    def __post_init__(self) -> None:
        if not 0 <= self.failures <= self.shots:
            raise ValueError(f"failures {self.failures} outside [0, {self.shots}]")
        if not self.ci_low <= self.p_L_round <= self.ci_high:
            raise ValueError("interval does not bracket the estimate")

    @classmethod
    def from_counts(
        cls, p: float, d: int, rounds: int, shots: int, failures: int,
        factor: float = 1000.0,
    ) -> "CurvePoint":
        lo, hi = binomial_interval(failures, shots, factor)
        return cls(
            p=p,
            d=d,
            shots=shots,
            failures=failures,
            p_L_round=per_round_rate(failures / shots, rounds),
            ci_low=per_round_rate(min(lo, 0.5), rounds),
            ci_high=per_round_rate(min(hi, 0.5), rounds),
        )


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    residuals: tuple[float, ...]

    def predict(self, d: float) -> float:
        """Predicted p_L at distance d."""
        return math.exp(self.intercept + self.slope * d)


@dataclass(frozen=True)
class ThresholdEstimate:
    value: float
    uncertainty: float
    crossings: tuple[float, ...]


def per_round_rate(p_shot: float, rounds: int) -> float:
    """Invert R independent rounds: 1/2 (1 - (1 - 2 p_shot)^(1/R))."""
    if not 0.0 <= p_shot <= 0.5:
        raise ValueError(f"need 0 <= p_shot <= 1/2, got {p_shot}")
    if rounds < 1:
        raise ValueError(f"need rounds >= 1, got {rounds}")
    return 0.5 * (1.0 - (1.0 - 2.0 * p_shot) ** (1.0 / rounds))


def binomial_interval(
    failures: int, shots: int, factor: float = 1000.0
) -> tuple[float, float]:
    """All p with binomial likelihood within `factor` of the maximum."""
    if not 0 <= failures <= shots:
        raise ValueError(f"failures {failures} outside [0, {shots}]")
    if factor <= 1.0:
        raise ValueError(f"need factor > 1, got {factor}")
    k, n = failures, shots
    drop = math.log(factor)

    def loglik(p: float) -> float:
        if p <= 0.0:
            return 0.0 if k == 0 else -math.inf
        if p >= 1.0:
            return 0.0 if k == n else -math.inf
        return k * math.log(p) + (n - k) * math.log(1.0 - p)

    phat = k / n
    floor = loglik(phat) - drop

    def bisect(lo: float, hi: float, want_ge_at_lo: bool) -> float:
        # Invariant: loglik >= floor on exactly one side of the root.
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if (loglik(mid) >= floor) == want_ge_at_lo:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    low = 0.0 if k == 0 else bisect(0.0, phat, want_ge_at_lo=False)
    high = 1.0 if k == n else bisect(phat, 1.0, want_ge_at_lo=True)
    return low, high


def _interp_log(curve: list[CurvePoint], ln_p: float) -> float:
    """ln p_L at ln p by piecewise-linear interpolation in log-log space."""
    pts = sorted(curve, key=lambda c: c.p)
    xs = [math.log(c.p) for c in pts]
    ys = [math.log(c.p_L_round) for c in pts]
    if not xs[0] <= ln_p <= xs[-1]:
        raise ValueError("interpolation point outside curve range")
    return float(np.interp(ln_p, xs, ys))


def _crossing(curve_a: list[CurvePoint], curve_b: list[CurvePoint]) -> float:
    """Physical rate where the two interpolated curves cross."""
    lo = max(min(math.log(c.p) for c in cur) for cur in (curve_a, curve_b))
    hi = min(max(math.log(c.p) for c in cur) for cur in (curve_a, curve_b))
    if lo >= hi:
        raise ValueError("curves do not overlap in p")

    def diff(x: float) -> float:
        return _interp_log(curve_a, x) - _interp_log(curve_b, x)

    grid = np.linspace(lo, hi, 256)
    vals = [diff(x) for x in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return math.exp(grid[i])
        if vals[i] * vals[i + 1] < 0.0:
            a, b = grid[i], grid[i + 1]
            fa = vals[i]
            for _ in range(100):
                m = 0.5 * (a + b)
                fm = diff(m)
                if fa * fm <= 0.0:
                    b = m
                else:
                    a, fa = m, fm
            return math.exp(0.5 * (a + b))
    if vals[-1] == 0.0:
        return math.exp(grid[-1])
    raise ValueError("no bracketing crossing between curves")


def threshold_estimate(points: list[CurvePoint]) -> ThresholdEstimate:
    """Crossing estimate from curves of consecutive code distances."""
    by_d: dict[int, list[CurvePoint]] = {}
    for pt in points:
        by_d.setdefault(pt.d, []).append(pt)
    if len(by_d) < 2:
        raise ValueError("need at least two distances")
    for d, curve in by_d.items():
        if len(curve) < 3:
            raise ValueError(f"need >= 3 points per distance, d={d} has {len(curve)}")

    ds = sorted(by_d)
    crossings = [
        _crossing(by_d[d1], by_d[d2]) for d1, d2 in zip(ds, ds[1:])
    ]
    mean = sum(crossings) / len(crossings)
    spread = max(crossings) - min(crossings)

    # Propagate the binomial interval: re-cross with each curve shifted to
    # its interval edges and take the worst excursion.
    def shifted(curve: list[CurvePoint], attr: str) -> list[CurvePoint]:
        return [
            CurvePoint(
                p=c.p,
                d=c.d,
                shots=c.shots,
                failures=c.failures,
                p_L_round=max(getattr(c, attr), 1e-300),
                ci_low=0.0,
                ci_high=1.0,
            )
            for c in curve
        ]

    ci_excursion = 0.0
    for d1, d2 in zip(ds, ds[1:]):
        for a_attr, b_attr in (("ci_high", "ci_low"), ("ci_low", "ci_high")):
            try:
                c = _crossing(shifted(by_d[d1], a_attr), shifted(by_d[d2], b_attr))
            except ValueError:
                continue
            ci_excursion = max(ci_excursion, abs(c - mean))
    return ThresholdEstimate(mean, max(spread, ci_excursion), tuple(crossings))


def fit_scaling(points: list[tuple[int, float]]) -> ScalingFit:
    """Least-squares line on (d, ln p_L)."""
    if len({d for d, _ in points}) < 2:
        raise ValueError("need >= 2 distinct distances")
    if any(pl <= 0.0 for _, pl in points):
        raise ValueError("p_L must be positive to fit in log space")
    ds = np.array([d for d, _ in points], dtype=float)
    ys = np.log([pl for _, pl in points])
    slope, intercept = np.polyfit(ds, ys, 1)
    resid = ys - (intercept + slope * ds)
    if slope >= 0.0:
        raise ValueError("p_L does not decrease with d (above threshold?); refusing to extrapolate")
    return ScalingFit(float(slope), float(intercept), tuple(float(r) for r in resid))


DEFAULT_TARGETS = (1e-6, 1e-9, 1e-12)


def fit_and_project(
    points: list[tuple[int, float]],
    targets: tuple[float, ...] = DEFAULT_TARGETS,
) -> dict[float, int]:
    """Smallest odd distance whose predicted p_L meets each target."""
    fit = fit_scaling(points)
    out = {}
    for target in targets:
        need = (math.log(target) - fit.intercept) / fit.slope
        d = max(3, math.ceil(need - 1e-9))
        if d % 2 == 0:
            d += 1
        while fit.predict(d) > target * (1.0 + 1e-12):
            d += 2
        out[target] = d
    return out


def write_csv(path: str, rows: list[dict], header_comment: str = "") -> None:
    """Rows keyed by CSV_COLUMNS; comment lines start with '#'."""
    lines = []
    for comment_line in header_comment.splitlines():
        lines.append(f"# {comment_line}")
    lines.append(",".join(CSV_COLUMNS))
    for row in rows:
        lines.append(",".join(_fmt_cell(row[c]) for c in CSV_COLUMNS))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def _fmt_cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def read_csv(path: str) -> list[dict]:
    rows = []
    with open(path) as f:
        header = None
        for raw in f:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if tuple(header) != CSV_COLUMNS:
                    raise ValueError(f"unexpected CSV columns {header}")
                continue
            cells = line.split(",")
            row: dict = dict(zip(header, cells))
            for key in ("nx", "ny", "d", "rounds", "shots", "failures"):
                row[key] = int(row[key])
            for key in ("p", "eta", "pl_round", "ci_low", "ci_high"):
                row[key] = float(row[key])
            rows.append(row)
    if header is None:
        raise ValueError("empty CSV")
    return rows


def aggregate_curve(rows: list[dict]) -> list[CurvePoint]:
    """Pool rows sharing (d, p, rounds) by summing shots and failures.

    Memory sweeps record one row per basis; threshold crossings use the
    basis-pooled curve, so counts are combined before the per-round
    conversion.
    """
    acc: dict[tuple[int, float, int], list[int]] = {}
    for r in rows:
        key = (r["d"], r["p"], r["rounds"])
        cell = acc.setdefault(key, [0, 0])
        cell[0] += r["shots"]
        cell[1] += r["failures"]
    return [
        CurvePoint.from_counts(p=p, d=d, rounds=rounds, shots=s, failures=f)
        for (d, p, rounds), (s, f) in sorted(acc.items())
    ]


def curve_points(rows: list[dict]) -> list[CurvePoint]:
    """CSV rows -> CurvePoints (pl_round and interval taken as stored)."""
    return [
        CurvePoint(
            p=r["p"],
            d=r["d"],
            shots=r["shots"],
            failures=r["failures"],
            p_L_round=r["pl_round"],
            ci_low=r["ci_low"],
            ci_high=r["ci_high"],
        )
        for r in rows
    ]
