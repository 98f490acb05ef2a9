"""Test inversion over parameter lattices and confidence-set export."""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .inference import TestResult


@dataclass(frozen=True)
class AxisSpec:
    """One lattice axis; excluded endpoints are offset inward by one step."""

    name: str
    lower: float
    upper: float
    points: int
    include_lower: bool = True
    include_upper: bool = True

    def __post_init__(self):
        if self.points < 2:
            raise ValueError(f"axis {self.name!r} needs >= 2 points, got {self.points}")
        if self.upper <= self.lower:
            raise ValueError(
                f"axis {self.name!r} upper bound must exceed lower "
                f"({self.lower} .. {self.upper})"
            )

    def values(self) -> np.ndarray:
        n = self.points
        excluded = (not self.include_lower) + (not self.include_upper)
        step = (self.upper - self.lower) / (n - 1 + excluded)
        lo = self.lower + (0.0 if self.include_lower else step)
        return lo + step * np.arange(n)


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[AxisSpec, ...]
    extra_points: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        for p in self.extra_points:
            if len(p) != len(self.axes):
                raise ValueError(
                    f"extra point {p} has {len(p)} coordinates, expected {len(self.axes)}"
                )

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.axes]


def make_grid(spec: GridSpec) -> np.ndarray:
    """Row-major lattice (last axis fastest), extra points appended at the end."""
    values = [a.values() for a in spec.axes]
    mesh = np.meshgrid(*values, indexing="ij")
    lattice = np.column_stack([m.ravel() for m in mesh])
    if spec.extra_points:
        lattice = np.vstack([lattice, np.array(spec.extra_points, dtype=float)])
    return lattice


#: Default (rho, kappa, zeta) lattice respecting the parameter box.
def default_structural_grid(extra_points: tuple = ()) -> GridSpec:
    return GridSpec(
        axes=(
            AxisSpec("rho", 0.0, 1.0, 20, include_upper=False),
            AxisSpec("kappa", 0.0, 20.0, 40, include_lower=False),
            AxisSpec("zeta", 0.0, 10.0, 20, include_lower=False),
        ),
        extra_points=tuple(extra_points),
    )


#: Default (varphi, phi) lattice at fixed rho.
def default_semi_grid(extra_points: tuple = ()) -> GridSpec:
    return GridSpec(
        axes=(
            AxisSpec("varphi", 0.0, 10.0, 50),
            AxisSpec("phi", 0.0, 20.0, 50),
        ),
        extra_points=tuple(extra_points),
    )


@dataclass
class ConfidenceGrid:
    """Evaluated lattice: the inverted-test confidence set at `level`."""

    spec: GridSpec
    level: float
    points: np.ndarray
    stats: np.ndarray
    dfs: np.ndarray
    crits: np.ndarray
    accepts: np.ndarray
    errors: np.ndarray
    variant: str = "S"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.points.shape[0]
        for name in ("stats", "dfs", "crits", "accepts", "errors"):
            arr = getattr(self, name)
            if arr.shape[0] != n:
                raise ValueError(f"{name} has length {arr.shape[0]}, expected {n}")


def invert_test(
    evaluator: Callable[[np.ndarray], TestResult],
    spec: GridSpec,
    level: float,
    threads: int = 1,
    variant: str = "S",
    metadata: Optional[dict] = None,
) -> ConfidenceGrid:
    """Evaluate the test at every lattice point and collect acceptance flags.

    A point where the evaluator raises is recorded as rejected with its error
    flag set; more than 50% failing points aborts the run. Output is merged by
    lattice index, so it is identical for serial and threaded evaluation.
    """
    points = make_grid(spec)
    n = points.shape[0]
    stats = np.full(n, np.nan)
    dfs = np.zeros(n, dtype=int)
    crits = np.full(n, np.nan)
    accepts = np.zeros(n, dtype=int)
    errors = np.zeros(n, dtype=int)
    messages: list[str] = []

    def run_one(i: int) -> None:
        try:
            r = evaluator(points[i])
        except Exception as exc:  # recorded, not fatal (unless >50% fail)
            errors[i] = 1
            if len(messages) < 10:
                messages.append(f"point {points[i].tolist()}: {exc}")
            return
        stats[i] = r.statistic
        dfs[i] = r.df
        crits[i] = r.critical_value
        accepts[i] = int(r.accept)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_one, range(n)))
    else:
        for i in range(n):
            run_one(i)

    if errors.sum() > 0.5 * n:
        raise RuntimeError(
            f"evaluator failed on {int(errors.sum())}/{n} lattice points; "
            "first failures: " + "; ".join(messages)
        )
    return ConfidenceGrid(
        spec=spec,
        level=level,
        points=points,
        stats=stats,
        dfs=dfs,
        crits=crits,
        accepts=accepts,
        errors=errors,
        variant=variant,
        metadata=dict(metadata or {}),
    )


def set_summary(g: ConfidenceGrid) -> dict:
    """Accepted fraction, per-axis projection bounds, and marginal profiles."""
    accepted = g.accepts.astype(bool)
    n = g.points.shape[0]
    summary: dict = {
        "level": g.level,
        "variant": g.variant,
        "total_points": int(n),
        "accepted_points": int(accepted.sum()),
        "accepted_fraction": float(accepted.mean()),
        "error_points": int(g.errors.sum()),
        "projections": {},
        "marginals": {},
    }
    for j, name in enumerate(g.spec.names):
        coords = g.points[:, j]
        if accepted.any():
            summary["projections"][name] = [
                float(coords[accepted].min()),
                float(coords[accepted].max()),
            ]
        else:
            summary["projections"][name] = None
        profile = []
        for v in np.unique(coords):
            mask = coords == v
            profile.append([float(v), float(accepted[mask].mean())])
        summary["marginals"][name] = profile
    return summary


def _fmt(x: float) -> str:
    return "nan" if not np.isfinite(x) else f"{x:.6g}"


def export_grid(g: ConfidenceGrid, path: str | os.PathLike) -> tuple[str, str]:
    """Write `<path>.csv` (one row per lattice point, 6 significant digits)
    and `<path>.json` (metadata sidecar); returns both file paths."""
    base = os.fspath(path)
    if base.endswith(".csv"):
        base = base[:-4]
    csv_path, json_path = base + ".csv", base + ".json"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(g.spec.names + ["stat", "df", "crit", "accept", "error"])
        for i in range(g.points.shape[0]):
            writer.writerow(
                [_fmt(x) for x in g.points[i]]
                + [_fmt(g.stats[i]), str(int(g.dfs[i])), _fmt(g.crits[i]),
                   str(int(g.accepts[i])), str(int(g.errors[i]))]
            )
    sidecar = {
        "level": g.level,
        "variant": g.variant,
        "axes": [
            {
                "name": a.name,
                "lower": a.lower,
                "upper": a.upper,
                "points": a.points,
                "include_lower": a.include_lower,
                "include_upper": a.include_upper,
            }
            for a in g.spec.axes
        ],
        "extra_points": [list(p) for p in g.spec.extra_points],
        "metadata": g.metadata,
        "summary": set_summary(g),
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def read_grid_csv(path: str | os.PathLike) -> dict:
    """Read an exported grid CSV back into column arrays keyed by header name."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    data = np.array([[float(x) for x in row] for row in rows])
    return {name: data[:, j] for j, name in enumerate(header)}
