"""Metrics and experiment protocols for comparing curve estimators.

Covers yield-space accuracy (RMSE against per-bond flat yields), curve-space
distances on a fixed tenor grid (RMSE and maximum absolute difference),
single-bond price perturbation, random bond-drop Monte Carlo, day-over-day
stability with hit rates, and leave-one-out accuracy by maturity bucket.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import CurveKitError, ValidationError
from .market import Bond, MarketSnapshot
from .pricing import YieldCurve, yield_to_maturity

# Standard tenor grid: 1D, 1W, 2W, then months to 21M, years to 10Y, and
# 12/15/20/25/30Y. Days convert at 1/365, months at 1/12.
TENOR_LABELS = (
    "1D", "1W", "2W", "1M", "2M", "3M", "6M", "9M", "12M", "15M", "18M", "21M",
    "2Y", "3Y", "4Y", "5Y", "6Y", "7Y", "8Y", "9Y", "10Y", "12Y", "15Y", "20Y", "25Y", "30Y",
)
DEFAULT_TENORS = (
    1 / 365, 7 / 365, 14 / 365, 1 / 12, 2 / 12, 3 / 12, 6 / 12, 9 / 12, 12 / 12,
    15 / 12, 18 / 12, 21 / 12, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0,
    12.0, 15.0, 20.0, 25.0, 30.0,
)

BUCKET_LABELS = ("Full", "<2Y", "2Y-10Y", ">10Y")
DEFAULT_HIT_RATE_THRESHOLD = 0.0010  # 10 bps
FIXED_SERIES_TENORS = {"6M": 0.5, "2Y": 2.0, "10Y": 10.0}


@dataclass(frozen=True)
class TenorGrid:
    """Ordered maturity grid used by curve-space metrics."""

    tenors: tuple[float, ...] = DEFAULT_TENORS

    def __post_init__(self):
        object.__setattr__(self, "tenors", tuple(float(t) for t in self.tenors))
        if len(self.tenors) < 2:
            raise ValidationError("grid needs at least 2 tenors")
        if self.tenors[0] <= 0 or any(b <= a for a, b in zip(self.tenors, self.tenors[1:])):
            raise ValidationError("grid tenors must be strictly increasing and > 0")

    def __iter__(self):
        return iter(self.tenors)

    def __len__(self):
        return len(self.tenors)


def _tenor_array(grid) -> np.ndarray:
    tenors = grid.tenors if isinstance(grid, TenorGrid) else grid
    return np.asarray(tenors, dtype=float)


def bucket_of(t: float) -> str:
    """Maturity bucket: strictly below 2Y, 2Y-10Y inclusive, strictly above 10Y."""
    if t < 2.0:
        return "<2Y"
    if t <= 10.0:
        return "2Y-10Y"
    return ">10Y"


def bucket_grid(grid, bucket: str) -> np.ndarray:
    """Grid tenors falling in ``bucket`` ('Full' returns the whole grid)."""
    tenors = _tenor_array(grid)
    if bucket == "Full":
        return tenors
    keep = np.array([bucket_of(t) == bucket for t in tenors])
    return tenors[keep]


def curve_yields(curve: YieldCurve, grid) -> np.ndarray:
    return np.array([curve.yield_at(float(t)) for t in _tenor_array(grid)])


@dataclass(frozen=True)
class Estimator:
    """A named curve estimator: ``fit`` maps a snapshot to a yield curve."""

    name: str
    fit: Callable[[MarketSnapshot], YieldCurve]


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def rmse_ytm(curve: YieldCurve, snapshot: MarketSnapshot) -> float:
    """RMSE between each bond's flat yield and the curve at its maturity."""
    errs = [curve.yield_at(b.maturity) - yield_to_maturity(b) for b in snapshot.bonds]
    return float(np.sqrt(np.mean(np.square(errs))))


def rmse_curve(curve_a: YieldCurve, curve_b: YieldCurve, grid=TenorGrid()) -> float:
    """Root-mean-square yield gap between two curves over the grid."""
    ya = curve_yields(curve_a, grid)
    yb = curve_yields(curve_b, grid)
    return float(np.sqrt(np.mean((ya - yb) ** 2)))


def mad_curve(curve_a: YieldCurve, curve_b: YieldCurve, grid=TenorGrid()) -> float:
    """Maximum absolute yield gap between two curves over the grid."""
    ya = curve_yields(curve_a, grid)
    yb = curve_yields(curve_b, grid)
    return float(np.max(np.abs(ya - yb)))


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbRow:
    bump: float
    rmse_curve: float | None
    mad: float | None
    error: str | None = None


def perturb_price_experiment(
    snapshot: MarketSnapshot,
    estimator: Estimator,
    bond_id: str,
    bumps,
    grid=TenorGrid(),
) -> list[PerturbRow]:
    """Refit after bumping one bond's price and measure the curve movement.

    For each bump fraction the named bond's price is multiplied by (1 + bump)
    and the estimator refit; rows report RMSE and MAD against the unperturbed
    fit. Fit failures are recorded in the row and the experiment continues.
    """
    snapshot.bond(bond_id)  # raises KeyError for unknown ids
    base_curve = estimator.fit(snapshot)
    rows = []
    for bump in bumps:
        bumped_bonds = tuple(
            Bond(b.id, b.cashflows, b.face_value, b.maturity, b.market_price * (1.0 + bump))
            if b.id == bond_id else b
            for b in snapshot.bonds
        )
        bumped = MarketSnapshot(snapshot.date, bumped_bonds, snapshot.benchmark)
        try:
            curve = estimator.fit(bumped)
        except CurveKitError as exc:
            rows.append(PerturbRow(bump=float(bump), rmse_curve=None, mad=None, error=str(exc)))
            continue
        rows.append(
            PerturbRow(
                bump=float(bump),
                rmse_curve=rmse_curve(base_curve, curve, grid),
                mad=mad_curve(base_curve, curve, grid),
            )
        )
    return rows


@dataclass(frozen=True)
class DropReplication:
    dropped_ids: tuple[str, ...]
    rmse_curve: float | None
    mad: float | None
    error: str | None = None


@dataclass(frozen=True)
class DropRow:
    count: int
    rmse_curve: float | None
    mad: float | None
    n_failed: int
    replications: tuple[DropReplication, ...]


def drop_bonds_experiment(
    snapshot: MarketSnapshot,
    estimator: Estimator,
    drop_counts,
    n_mc: int,
    seed: int = 0,
    grid=TenorGrid(),
) -> list[DropRow]:
    """Random bond removal, averaged over Monte Carlo replications.

    The drop sets depend only on (seed, count, replication), so two estimators
    evaluated with the same seed see identical removals. Failed replications
    are excluded from the averages and counted.
    """
    n = len(snapshot.bonds)
    if any(c >= n for c in drop_counts):
        raise ValidationError(f"drop counts must be < number of bonds ({n})")
    base_curve = estimator.fit(snapshot)
    ids = [b.id for b in snapshot.bonds]
    rows = []
    for count in drop_counts:
        reps = []
        for rep in range(n_mc):
            if count == 0:
                dropped: tuple[str, ...] = ()
            else:
                rng = np.random.default_rng([seed, int(count), rep])
                dropped = tuple(sorted(str(ids[i]) for i in rng.choice(n, size=int(count), replace=False)))
            kept = tuple(b for b in snapshot.bonds if b.id not in dropped)
            reduced = MarketSnapshot(snapshot.date, kept, snapshot.benchmark)
            try:
                curve = estimator.fit(reduced)
            except CurveKitError as exc:
                reps.append(DropReplication(dropped, None, None, str(exc)))
                continue
            reps.append(
                DropReplication(dropped, rmse_curve(base_curve, curve, grid), mad_curve(base_curve, curve, grid))
            )
        ok = [r for r in reps if r.error is None]
        rows.append(
            DropRow(
                count=int(count),
                rmse_curve=float(np.mean([r.rmse_curve for r in ok])) if ok else None,
                mad=float(np.mean([r.mad for r in ok])) if ok else None,
                n_failed=len(reps) - len(ok),
                replications=tuple(reps),
            )
        )
    return rows


@dataclass(frozen=True)
class StabilityResult:
    dates: tuple[str, ...]
    day_rmse: tuple[dict, ...]          # one dict per consecutive-day pair, bucket -> rmse
    hit_rate: dict                       # bucket -> fraction of pairs with rmse < threshold
    fixed_tenor_series: tuple[dict, ...]  # per fitted day: date + curve/benchmark at 6M/2Y/10Y
    curves: tuple                        # fitted curve per day (None where the fit failed)
    skipped: tuple[str, ...]


def stability_experiment(
    snapshots,
    estimator: Estimator,
    grid=TenorGrid(),
    threshold: float = DEFAULT_HIT_RATE_THRESHOLD,
) -> StabilityResult:
    """Day-over-day curve stability across an ordered snapshot sequence.

    Each day is fit independently; consecutive fitted days are compared with
    bucket-restricted curve RMSE, and the hit rate per bucket is the fraction
    of pairs strictly below ``threshold``. Also records the fitted yield and
    benchmark rate at 6M, 2Y and 10Y for each day.
    """
    snapshots = list(snapshots)
    if len(snapshots) < 2:
        raise ValidationError("stability needs at least 2 snapshots")
    curves: list[YieldCurve | None] = []
    skipped = []
    series = []
    for snap in snapshots:
        try:
            curve = estimator.fit(snap)
        except CurveKitError as exc:
            curves.append(None)
            skipped.append(f"{snap.date}: {exc}")
            continue
        curves.append(curve)
        row = {"date": snap.date}
        for label, tenor in FIXED_SERIES_TENORS.items():
            row[label] = curve.yield_at(tenor)
            row[f"benchmark_{label}"] = snap.benchmark.yield_at(tenor)
        series.append(row)

    day_rmse = []
    for prev, cur in zip(range(len(snapshots) - 1), range(1, len(snapshots))):
        if curves[prev] is None or curves[cur] is None:
            continue
        entry = {"date": snapshots[cur].date}
        for bucket in BUCKET_LABELS:
            sub = bucket_grid(grid, bucket)
            entry[bucket] = rmse_curve(curves[cur], curves[prev], sub) if len(sub) else None
        day_rmse.append(entry)

    hit_rate = {}
    for bucket in BUCKET_LABELS:
        vals = [d[bucket] for d in day_rmse if d[bucket] is not None]
        hit_rate[bucket] = float(np.mean([v < threshold for v in vals])) if vals else None
    return StabilityResult(
        dates=tuple(s.date for s in snapshots),
        day_rmse=tuple(day_rmse),
        hit_rate=hit_rate,
        fixed_tenor_series=tuple(series),
        curves=tuple(curves),
        skipped=tuple(skipped),
    )


@dataclass(frozen=True)
class LooReplication:
    bond_id: str
    bucket: str
    sq_err: float | None
    error: str | None = None


@dataclass(frozen=True)
class LooResult:
    per_bucket: dict                     # bucket -> LOO yield RMSE (None if no draws)
    counts: dict                         # bucket -> number of successful replications
    replications: tuple[LooReplication, ...]
    n_failed: int


def loo_experiment(
    snapshot: MarketSnapshot,
    estimator: Estimator,
    n_mc: int,
    bucket_filter: str | None = None,
    seed: int = 0,
) -> LooResult:
    """Leave-one-out yield accuracy, averaged over random held-out bonds.

    Each replication uniformly picks a held-out bond (from ``bucket_filter``
    when given), fits on the rest, and records the squared gap between the
    fitted yield at the held-out maturity and that bond's flat yield. Results
    aggregate per maturity bucket of the held-out bond plus a Full column.
    """
    if bucket_filter is not None and bucket_filter not in BUCKET_LABELS[1:]:
        raise ValidationError(f"bucket_filter must be one of {BUCKET_LABELS[1:]}, got {bucket_filter!r}")
    eligible = [
        b for b in snapshot.bonds
        if bucket_filter is None or bucket_of(b.maturity) == bucket_filter
    ]
    if len(eligible) < 2:
        where = f"bucket {bucket_filter}" if bucket_filter else "snapshot"
        raise ValidationError(f"leave-one-out needs >= 2 bonds in the {where}, got {len(eligible)}")

    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(eligible), size=n_mc)
    reps = []
    for rep, pick in enumerate(picks):
        held = eligible[int(pick)]
        kept = tuple(b for b in snapshot.bonds if b.id != held.id)
        reduced = MarketSnapshot(snapshot.date, kept, snapshot.benchmark)
        bucket = bucket_of(held.maturity)
        try:
            curve = estimator.fit(reduced)
            err = curve.yield_at(held.maturity) - yield_to_maturity(held)
        except CurveKitError as exc:
            reps.append(LooReplication(held.id, bucket, None, str(exc)))
            continue
        reps.append(LooReplication(held.id, bucket, float(err**2)))

    per_bucket = {}
    counts = {}
    for bucket in BUCKET_LABELS:
        sq = [
            r.sq_err for r in reps
            if r.sq_err is not None and (bucket == "Full" or r.bucket == bucket)
        ]
        counts[bucket] = len(sq)
        per_bucket[bucket] = float(np.sqrt(np.mean(sq))) if sq else None
    return LooResult(
        per_bucket=per_bucket,
        counts=counts,
        replications=tuple(reps),
        n_failed=sum(1 for r in reps if r.error is not None),
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class EvaluationReport:
    """Metric bundle for one (experiment, estimator) pair.

    ``metrics`` holds snapshot-level values, ``per_bucket`` optional
    bucket-resolved values, ``provenance`` echoes configuration and seeds
    (timestamps, when present, live only here), and ``details`` carries the
    raw experiment records for replay.
    """

    estimator: str
    experiment: str
    metrics: dict
    per_bucket: dict | None = None
    provenance: dict = field(default_factory=dict)
    details: list = field(default_factory=list)

    def __post_init__(self):
        for name, value in self.metrics.items():
            if value is not None and value < 0:
                raise ValidationError(f"metric {name} must be >= 0, got {value}")
        hr = self.metrics.get("hit_rate")
        if hr is not None and not (0.0 <= hr <= 1.0):
            raise ValidationError(f"hit_rate must lie in [0, 1], got {hr}")

    def to_json_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "experiment": self.experiment,
            "metrics": self.metrics,
            "per_bucket": self.per_bucket,
            "provenance": self.provenance,
            "details": self.details,
        }

    def to_csv_rows(self) -> list[tuple]:
        seed = self.provenance.get("seed", "")
        rows = [
            (self.experiment, self.estimator, "Full", name, value, seed)
            for name, value in self.metrics.items()
        ]
        if self.per_bucket:
            for bucket, metrics in self.per_bucket.items():
                for name, value in metrics.items():
                    rows.append((self.experiment, self.estimator, bucket, name, value, seed))
        return rows


def write_report(report: EvaluationReport, path, format: str = "json") -> None:
    """Serialize a report as JSON, or as flat CSV with one metric per row."""
    path = Path(path)
    if format == "json":
        with open(path, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["experiment", "estimator", "bucket", "metric", "value", "seed"])
            for row in report.to_csv_rows():
                writer.writerow(row)
    else:
        raise ValidationError(f"format must be 'json' or 'csv', got {format!r}")
