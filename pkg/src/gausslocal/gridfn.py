"""Grid functions and the norms used by every experiment.

Functions are nonnegative and piecewise constant on the cells of a
uniform grid over [-L, L]^d, sampled at cell midpoints.  That choice
makes the singular-kernel cell integrals in the operator module exactly
computable, and it makes ball averages finite weighted sums.  Quadrature
against the Gaussian measure is the midpoint rule with boundary cells
weighted by their intersected fraction (exact in d = 1, a 4x4 subsample
in d = 2).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BallOutsideDomain
from .geometry import AdmissibleBall, GaussianSpace

__all__ = [
    "GridFunction",
    "LambdaGrid",
    "integrate_gaussian",
    "weighted_norm",
    "weak_quasinorm",
    "interval_cells",
    "disk_cells",
    "ball_quadrature",
    "save_grid_function",
    "load_grid_function",
]

# relative offsets of the 4x4 subsample points inside one cell
_SUB4 = (np.arange(4) + 0.5) / 4.0 - 0.5


@dataclass(eq=False)
class GridFunction:
    """Nonnegative sampled function, one value per grid cell."""

    space: GaussianSpace
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.space.values_shape():
            raise ValueError(
                f"values shape {vals.shape} does not match grid {self.space.values_shape()}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        if np.any(vals < 0.0):
            raise ValueError("grid function values must be nonnegative")
        self.values = vals

    @classmethod
    def from_callable(cls, space: GaussianSpace, fn) -> "GridFunction":
        vals = np.asarray(fn(space.node_points), dtype=float)
        return cls(space, vals.reshape(space.values_shape()))

    @classmethod
    def constant(cls, space: GaussianSpace, level: float = 1.0) -> "GridFunction":
        return cls(space, np.full(space.values_shape(), float(level)))

    @property
    def cell_volume(self) -> float:
        return self.space.cell_volume

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def power(self, exponent: float) -> "GridFunction":
        return GridFunction(self.space, self.values**exponent)

    def scaled(self, factor: float) -> "GridFunction":
        return GridFunction(self.space, self.values * factor)

    def eval_at(self, points: np.ndarray) -> np.ndarray:
        """Piecewise-constant lookup; points outside the box evaluate to 0."""
        space = self.space
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, space.d)
        idx = np.floor((pts + space.L) / space.cell_size).astype(np.int64)
        inside = np.all((idx >= 0) & (idx < space.n), axis=1)
        out = np.zeros(pts.shape[0])
        if np.any(inside):
            ii = idx[inside]
            if space.d == 1:
                out[inside] = self.values[ii[:, 0]]
            else:
                flat = ii[:, 0]
                for axis in range(1, space.d):
                    flat = flat * space.n + ii[:, axis]
                out[inside] = self.flat[flat]
        return out


def interval_cells(space: GaussianSpace, lo: float, hi: float) -> tuple[int, int, np.ndarray]:
    """d=1 cells meeting [lo, hi]: index range [i0, i1) and exact fractions.

    Zero-fraction edge cells are trimmed so the returned range only holds
    cells with positive overlap.
    """
    h = space.cell_size
    lo = max(lo, -space.L)
    hi = min(hi, space.L)
    if hi <= lo:
        return 0, 0, np.zeros(0)
    i0 = int(math.floor((lo + space.L) / h))
    i1 = int(math.ceil((hi + space.L) / h))
    i0 = max(0, min(i0, space.n - 1))
    i1 = max(i0 + 1, min(i1, space.n))
    edges = -space.L + np.arange(i0, i1 + 1) * h
    frac = (np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo)) / h
    frac = np.clip(frac, 0.0, 1.0)
    while len(frac) > 1 and frac[0] <= 0.0:
        i0 += 1
        frac = frac[1:]
    while len(frac) > 1 and frac[-1] <= 0.0:
        i1 -= 1
        frac = frac[:-1]
    return i0, i1, frac


def disk_cells(space: GaussianSpace, center: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    """d=2 cells meeting the disk: flat indices and area fractions.

    Cells strictly inside get fraction 1, cells strictly outside are
    dropped, boundary cells get a 4x4 midpoint subsample of the exact
    indicator (no smoothing).
    """
    h = space.cell_size
    half = 0.5 * h
    cx, cy = float(center[0]), float(center[1])
    nodes = space.axis_nodes
    ix0 = max(0, int(math.floor((cx - r + space.L) / h)))
    ix1 = min(space.n, int(math.ceil((cx + r + space.L) / h)))
    iy0 = max(0, int(math.floor((cy - r + space.L) / h)))
    iy1 = min(space.n, int(math.ceil((cy + r + space.L) / h)))
    if ix1 <= ix0 or iy1 <= iy0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    dx = np.abs(nodes[ix0:ix1] - cx)
    dy = np.abs(nodes[iy0:iy1] - cy)
    DX, DY = np.meshgrid(dx, dy, indexing="ij")
    far = np.hypot(DX + half, DY + half)
    near = np.hypot(np.maximum(DX - half, 0.0), np.maximum(DY - half, 0.0))
    frac = np.zeros_like(DX)
    frac[far <= r] = 1.0
    partial = (far > r) & (near < r)
    if np.any(partial):
        pi_idx = np.nonzero(partial)
        px = nodes[ix0:ix1][pi_idx[0]]
        py = nodes[iy0:iy1][pi_idx[1]]
        sx = px[:, None, None] + (_SUB4 * h)[None, :, None]
        sy = py[:, None, None] + (_SUB4 * h)[None, None, :]
        inside = (sx - cx) ** 2 + (sy - cy) ** 2 < r * r
        frac[partial] = inside.reshape(inside.shape[0], -1).mean(axis=1)
    keep = frac > 0.0
    gx, gy = np.nonzero(keep)
    idx = (gx + ix0) * space.n + (gy + iy0)
    return idx.astype(np.int64), frac[keep]


def ball_quadrature(space: GaussianSpace, center, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Flat cell indices and Gaussian quadrature weights for a ball.

    Weights are the per-cell Gaussian masses times the intersected
    Lebesgue fraction; summing them gives the quadrature measure of the
    ball used consistently by every average in the package.
    """
    c = space.as_point(center)
    gw = space.gaussian_cell_weights
    if space.d == 1:
        i0, i1, frac = interval_cells(space, float(c[0]) - radius, float(c[0]) + radius)
        idx = np.arange(i0, i1, dtype=np.int64)
        return idx, gw[i0:i1] * frac
    if space.d == 2:
        idx, frac = disk_cells(space, c, radius)
        return idx, gw[idx] * frac
    raise NotImplementedError("ball quadrature is only implemented for d <= 2")


def integrate_gaussian(f: GridFunction, region: AdmissibleBall | None = None) -> float:
    """Midpoint-rule integral of f against the Gaussian measure.

    ``region=None`` integrates over the whole box; a ball region must sit
    inside the box.
    """
    space = f.space
    if region is None:
        return float(np.dot(f.flat, space.gaussian_cell_weights))
    if not space.ball_in_domain(region):
        raise BallOutsideDomain("integration region leaves the domain box")
    idx, w = ball_quadrature(space, region.center_array, region.radius)
    return float(np.dot(f.flat[idx], w))


def _weight_values(w) -> np.ndarray:
    # accepts a Weight, a GridFunction, or a raw array
    if hasattr(w, "values") and hasattr(w.values, "values"):
        return w.values.values
    if hasattr(w, "values"):
        return np.asarray(w.values)
    return np.asarray(w)


def weighted_norm(f: GridFunction, w, p: float, region: AdmissibleBall | None = None) -> float:
    """(int f^p w dgamma)^(1/p), optionally restricted to a ball."""
    if not p >= 1.0:
        raise ValueError("exponent p must be >= 1")
    wv = _weight_values(w).reshape(f.space.values_shape())
    integrand = GridFunction(f.space, f.values**p * wv)
    return integrate_gaussian(integrand, region) ** (1.0 / p)


@dataclass(frozen=True)
class LambdaGrid:
    """Decreasing positive levels bracketing the positive range of a function."""

    levels: tuple

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if len(lv) < 16:
            raise ValueError("need at least 16 levels")
        if not np.all(lv > 0.0):
            raise ValueError("levels must be positive")
        if not np.all(np.diff(lv) < 0.0):
            raise ValueError("levels must be strictly decreasing")

    @classmethod
    def from_function(cls, f: GridFunction, count: int = 64) -> "LambdaGrid | None":
        pos = f.flat[f.flat > 0.0]
        if pos.size == 0:
            return None
        hi = float(pos.max())
        lo = float(pos.min())
        if lo >= hi:
            lo = hi / 4.0
        return cls(tuple(float(v) for v in np.geomspace(hi, lo, count)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=float)


def weak_quasinorm(f: GridFunction, w, p: float, grid: LambdaGrid | None = None) -> float:
    """Weak-L^p quasi-norm lower bound max_lambda lambda * w({f >= lambda})^(1/p).

    Levels are evaluated as left limits of the distribution function
    ({f >= lambda} rather than {f > lambda}), so each term is an honest
    lower bound of the supremum and the bound is exact for piecewise
    constant functions once the grid hits every distinct value.
    """
    if not p >= 1.0:
        raise ValueError("exponent p must be >= 1")
    vals = f.flat
    if not np.any(vals > 0.0):
        return 0.0
    if grid is None:
        grid = LambdaGrid.from_function(f)
    wv = _weight_values(w).ravel()
    gwv = f.space.gaussian_cell_weights * wv
    best = 0.0
    for lam in grid.levels:
        tail = float(gwv[vals >= lam].sum())
        cand = lam * tail ** (1.0 / p)
        if cand > best:
            best = cand
    return best


def save_grid_function(f: GridFunction, stem: str | Path) -> tuple[Path, Path]:
    """Write ``stem.csv`` (index, coordinates, value) and ``stem.json`` header."""
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    space = f.space
    header = {"d": space.d, "a": space.a, "L": space.L, "n": space.n}
    json_path.write_text(json.dumps(header, sort_keys=True, indent=2) + "\n")
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        coords = [f"x{axis}" for axis in range(space.d)]
        writer.writerow(["index", *coords, "value"])
        pts = space.node_points
        flat = f.flat
        for i in range(pts.shape[0]):
            writer.writerow([i, *(repr(float(v)) for v in pts[i]), repr(float(flat[i]))])
    return csv_path, json_path


def load_grid_function(stem: str | Path) -> GridFunction:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    space = GaussianSpace(d=int(header["d"]), a=float(header["a"]),
                          L=float(header["L"]), n=int(header["n"]))
    flat = np.full(space.n**space.d, np.nan)
    with stem.with_suffix(".csv").open() as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            i = int(row[0])
            coords = np.array([float(v) for v in row[1:-1]])
            if not np.allclose(coords, space.node_points[i], atol=1e-9):
                raise ValueError(f"row {i} coordinates do not match the declared grid")
            flat[i] = float(row[-1])
    if np.any(np.isnan(flat)):
        raise ValueError("grid function file is missing rows")
    return GridFunction(space, flat.reshape(space.values_shape()))
