"""Local maximal operators and fractional integrals over admissible balls.

Suprema are searched over a shared finite candidate family: ball centers
on grid nodes, radii snapped in d = 1 to half-integer cell multiples (so
candidate balls are exactly unions of whole cells, and brute-force
oracles can reproduce every average bit for bit) and on a 32-point log
grid per center in d = 2.  Every pointwise inequality in the package is
asserted on this shared family so that "sup <= sup" comparisons are
finite and exact rather than approximation-confounded.

Fractional integrals use windows centered at the evaluation point.  Two
discretizations are kept, on purpose:

* the measure-kernel form sums f(cell) * gamma(B(x, |x-y|))^(beta-1)
  against the Gaussian cell masses, with the cell containing x handled
  by the locally flat model gamma(B(x,t)) ~ pi^(-d/2) e^(-|x|^2) v_d t^d
  integrated in closed form;
* the radial form sums f against exact per-cell integrals of
  |y|^(d beta - d) on a lattice centered at the origin, with a window
  rescaling that keeps change-of-variables identities exact discretely.

Their ratio is provably pinned inside an explicit band derived from the
halo estimate; see ``fractional_integral_equivalence_band``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import (
    GaussianSpace,
    admissibility_m,
    halo_bounds,
    radial_profile,
    unit_ball_volume,
)
from .gridfn import GridFunction, disk_cells, interval_cells

__all__ = [
    "SphereKernel",
    "ShiftVector",
    "unit_kernel",
    "sphere_norm",
    "local_maximal",
    "fractional_maximal",
    "measure_maximal",
    "multilinear_maximal",
    "order_s_maximal",
    "rough_fractional_maximal",
    "fractional_integral_gaussian",
    "fractional_integral_radial",
    "multilinear_fractional_integral",
    "rough_fractional_integral",
    "fractional_integral_equivalence_band",
    "rough_maximal_chain_constant",
    "candidate_count",
    "maximal_field",
]

_MAX_RADII_PER_CENTER = 32


@dataclass(frozen=True, eq=False)
class SphereKernel:
    """Direction-homogeneous kernel data on the unit sphere.

    d = 1: the two signed values (value on +1, value on -1), the sphere
    carrying counting measure.  d = 2: a table on a uniform angular grid,
    looked up by nearest node.  ``s`` is the integrability exponent used
    in norms and chain constants.
    """

    d: int
    values: tuple | np.ndarray
    s: float = 2.0

    def __post_init__(self):
        if self.d == 1:
            if len(self.values) != 2:
                raise ValueError("d=1 kernel needs the pair (value(+1), value(-1))")
        elif self.d == 2:
            vals = np.asarray(self.values, dtype=float)
            if vals.ndim != 1 or vals.size < 8:
                raise ValueError("d=2 kernel needs a 1-d angular table (>= 8 nodes)")
            object.__setattr__(self, "values", vals)
        else:
            raise ValueError("sphere kernels are implemented for d in {1, 2}")
        if not self.s >= 1.0:
            raise ValueError("integrability exponent s must be >= 1")

    @classmethod
    def constant(cls, d: int, value: float = 1.0, s: float = 2.0,
                 n_angles: int = 720) -> "SphereKernel":
        if d == 1:
            return cls(1, (float(value), float(value)), s)
        return cls(2, np.full(n_angles, float(value)), s)

    @classmethod
    def from_angle_function(cls, fn, n_angles: int = 720, s: float = 2.0) -> "SphereKernel":
        phi = np.arange(n_angles) * (2.0 * math.pi / n_angles)
        return cls(2, np.asarray(fn(phi), dtype=float), s)

    def direction_values(self, delta: np.ndarray) -> np.ndarray:
        """Kernel values at the directions of the rows of delta.

        The zero vector (evaluation point on a node) is assigned the
        first-axis direction; it carries a single midpoint weight and the
        choice is fixed so runs are deterministic.
        """
        delta = np.asarray(delta, dtype=float)
        if delta.ndim == 1:
            delta = delta.reshape(-1, self.d)
        if self.d == 1:
            vp, vm = self.values
            return np.where(delta[:, 0] >= 0.0, vp, vm)
        table = self.values
        ang = np.arctan2(delta[:, 1], delta[:, 0]) % (2.0 * math.pi)
        idx = np.rint(ang / (2.0 * math.pi / table.size)).astype(np.int64) % table.size
        return table[idx]

    def angular_mean(self) -> float:
        if self.d == 1:
            return (self.values[0] + self.values[1]) / 2.0
        return float(np.mean(self.values))

    def abs_kernel(self) -> "SphereKernel":
        if self.d == 1:
            return SphereKernel(1, (abs(self.values[0]), abs(self.values[1])), self.s)
        return SphereKernel(2, np.abs(self.values), self.s)


@lru_cache(maxsize=8)
def unit_kernel(d: int) -> SphereKernel:
    return SphereKernel.constant(d, 1.0)


def sphere_norm(kernel: SphereKernel) -> float:
    """L^s norm of the kernel on the sphere.

    d = 1 uses counting measure on the two directions; d = 2 the periodic
    trapezoid rule on the uniform angular table (equal weights).
    """
    s = kernel.s
    if kernel.d == 1:
        vp, vm = kernel.values
        return (abs(vp) ** s + abs(vm) ** s) ** (1.0 / s)
    table = np.abs(np.asarray(kernel.values)) ** s
    return (float(np.mean(table)) * 2.0 * math.pi) ** (1.0 / s)


@dataclass(frozen=True)
class ShiftVector:
    """Nonzero pairwise-distinct shifts for the multilinear integrals."""

    thetas: tuple

    def __post_init__(self):
        th = tuple(float(t) for t in self.thetas)
        if len(th) < 1:
            raise ValueError("need at least one shift")
        if any(t == 0.0 for t in th):
            raise ValueError("shifts must be nonzero")
        if len(set(th)) != len(th):
            raise ValueError("shifts must be pairwise distinct")
        object.__setattr__(self, "thetas", th)

    @property
    def m(self) -> int:
        return len(self.thetas)


# ---------------------------------------------------------------------------
# shared sup-search family


def _radius_steps_1d(space: GaussianSpace, ic: int, cap: float) -> list:
    """Half-cell radius indices j (radius (j+1/2)h) admissible at center ic.

    x-independent per center, so inequality checks at different sites
    range over one consistent family; log-subsampled only past 32 radii.
    """
    key = ("js1", ic, cap)
    memo = space._memo
    if key in memo:
        return memo[key]
    h = space.cell_size
    jmax = int(math.floor(cap / h - 0.5))
    while jmax >= 0 and (jmax + 0.5) * h >= cap:
        jmax -= 1
    if jmax < 0:
        js: list[int] = []
    elif jmax + 1 <= _MAX_RADII_PER_CENTER:
        js = list(range(jmax + 1))
    else:
        picks = np.unique(np.rint(np.geomspace(1.0, jmax + 1.0,
                                               _MAX_RADII_PER_CENTER)).astype(int)) - 1
        js = [int(j) for j in picks]
    memo[key] = js
    return js


def _interval_stats(space: GaussianSpace, ic: int, j: int):
    key = ("iv1", ic, j)
    memo = space._memo
    if key in memo:
        return memo[key]
    i0 = max(0, ic - j)
    i1 = min(space.n, ic + j + 1)
    w = space.gaussian_cell_weights[i0:i1]
    stats = (slice(i0, i1), w, float(w.sum()))
    memo[key] = stats
    return stats


def _radius_grid_2d(space: GaussianSpace, ic_flat: int, cap: float) -> np.ndarray:
    key = ("js2", ic_flat, cap)
    memo = space._memo
    if key in memo:
        return memo[key]
    r_lo = 0.51 * space.cell_size
    hi = cap * (1.0 - 1e-9)
    grid = np.geomspace(r_lo, hi, _MAX_RADII_PER_CENTER) if hi > r_lo else np.zeros(0)
    memo[key] = grid
    return grid


def _disk_stats(space: GaussianSpace, ic_flat: int, ridx: int, center: np.ndarray, r: float):
    key = ("dk2", ic_flat, ridx)
    memo = space._memo
    if key in memo:
        return memo[key]
    idx, frac = disk_cells(space, center, r)
    w = space.gaussian_cell_weights[idx] * frac
    stats = (idx, w, float(w.sum()))
    memo[key] = stats
    return stats


def _family_stats(space: GaussianSpace, x: np.ndarray, k: float):
    """Yield (cell index view, quadrature weights, quadrature mass) per candidate.

    Candidates are admissible balls at scale k containing x: centers on
    grid nodes c with |x - c| < r < k a m(c).  Balls may overhang the
    domain box, in which case they are clipped (the quadrature mass is
    the mass of the clipped ball, used consistently on both sides of any
    inequality).
    """
    nodes = space.axis_nodes
    reach = k * space.a
    if space.d == 1:
        xv = float(x[0])
        lo = np.searchsorted(nodes, xv - reach)
        hi = np.searchsorted(nodes, xv + reach, side="right")
        h = space.cell_size
        for ic in range(lo, hi):
            c = nodes[ic]
            cap = reach * admissibility_m((c,))
            dist = abs(xv - c)
            if dist >= cap:
                continue
            for j in _radius_steps_1d(space, ic, cap):
                if (j + 0.5) * h > dist:
                    yield _interval_stats(space, ic, j)
        return
    if space.d != 2:
        raise NotImplementedError("the ball family is implemented for d <= 2")
    lox = np.searchsorted(nodes, x[0] - reach)
    hix = np.searchsorted(nodes, x[0] + reach, side="right")
    loy = np.searchsorted(nodes, x[1] - reach)
    hiy = np.searchsorted(nodes, x[1] + reach, side="right")
    for ix in range(lox, hix):
        for iy in range(loy, hiy):
            c = np.array([nodes[ix], nodes[iy]])
            cap = reach * admissibility_m(c)
            dist = float(np.hypot(x[0] - c[0], x[1] - c[1]))
            if dist >= cap:
                continue
            flat = ix * space.n + iy
            grid = _radius_grid_2d(space, flat, cap)
            for ridx in range(grid.size):
                r = float(grid[ridx])
                if r > dist:
                    yield _disk_stats(space, flat, ridx, c, r)


def candidate_count(space: GaussianSpace, x, k: float = 1.0) -> int:
    """Size of the sup-search family at x (diagnostics and tests)."""
    return sum(1 for _ in _family_stats(space, space.as_point(x), k))


# ---------------------------------------------------------------------------
# maximal operators


def fractional_maximal(f: GridFunction, x, beta: float, k: float = 1.0) -> float:
    """max over the family of gamma(B)^(beta-1) * int_B f dgamma.

    beta = 0 is the plain local maximal average; the full sup over all
    admissible balls is approached from below under grid refinement.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    space = f.space
    fv = f.flat
    px = space.as_point(x)
    best = 0.0
    expo = 1.0 - beta
    for sl, w, den in _family_stats(space, px, k):
        num = float(np.dot(fv[sl], w))
        val = num / den**expo
        if val > best:
            best = val
    return best


def local_maximal(f: GridFunction, x, k: float = 1.0) -> float:
    """Local Hardy-Littlewood maximal average over admissible balls containing x."""
    return fractional_maximal(f, x, 0.0, k)


def measure_maximal(f: GridFunction, nu, x, k: float = 1.0) -> float:
    """Maximal operator of the measure nu dgamma: max (1/nu(B)) int_B f nu dgamma."""
    space = f.space
    fv = f.flat
    nf = nu.flat if hasattr(nu, "flat") else np.asarray(nu).ravel()
    px = space.as_point(x)
    best = 0.0
    for sl, w, _den in _family_stats(space, px, k):
        wn = w * nf[sl]
        dnu = float(wn.sum())
        if dnu <= 0.0:
            continue
        val = float(np.dot(fv[sl], wn)) / dnu
        if val > best:
            best = val
    return best


def multilinear_maximal(fs, x, k: float = 1.0) -> float:
    """max over the shared family of the product of gamma-averages of the f_j."""
    if len(fs) < 1:
        raise ValueError("need at least one function")
    space = fs[0].space
    flats = [f.flat for f in fs]
    px = space.as_point(x)
    best = 0.0
    for sl, w, den in _family_stats(space, px, k):
        val = 1.0
        for fv in flats:
            val *= float(np.dot(fv[sl], w)) / den
        if val > best:
            best = val
    return best


def order_s_maximal(f: GridFunction, x, beta: float, s_prime: float, k: float = 1.0) -> float:
    """max over the family of (gamma(B)^(beta-1) int_B f^(s') dgamma)^(1/s')."""
    if not s_prime >= 1.0:
        raise ValueError("order s' must be >= 1")
    space = f.space
    fv = f.flat**s_prime
    px = space.as_point(x)
    best = 0.0
    expo = 1.0 - beta
    inv = 1.0 / s_prime
    for sl, w, den in _family_stats(space, px, k):
        val = (float(np.dot(fv[sl], w)) / den**expo) ** inv
        if val > best:
            best = val
    return best


def rough_fractional_maximal(f: GridFunction, kernel: SphereKernel, x, beta: float,
                             k: float = 1.0) -> float:
    """max over the family of gamma(B)^(beta-1) int_B |Omega(x-y)| f dgamma.

    beta = 0 is allowed (plain rough maximal), which the interpolation
    checks need for their lower endpoint.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    space = f.space
    px = space.as_point(x)
    omega = np.abs(kernel.direction_values(px[None, :] - space.node_points))
    arr = omega * f.flat
    best = 0.0
    expo = 1.0 - beta
    for sl, w, den in _family_stats(space, px, k):
        val = float(np.dot(arr[sl], w)) / den**expo
        if val > best:
            best = val
    return best


def maximal_field(fs, k: float = 1.0, nu=None, beta: float = 0.0) -> GridFunction:
    """Evaluate a maximal operator at every grid node, as a GridFunction.

    With ``nu`` set this is the measure maximal of fs[0]; otherwise the
    multilinear maximal of the list (beta only meaningful for a single
    function).
    """
    space = fs[0].space
    pts = space.node_points
    out = np.empty(pts.shape[0])
    for i in range(pts.shape[0]):
        if nu is not None:
            out[i] = measure_maximal(fs[0], nu, pts[i], k)
        elif len(fs) == 1 and beta != 0.0:
            out[i] = fractional_maximal(fs[0], pts[i], beta, k)
        else:
            out[i] = multilinear_maximal(fs, pts[i], k)
    return GridFunction(space, out.reshape(space.values_shape()))


# ---------------------------------------------------------------------------
# fractional integrals (window form and radial form)


def rough_fractional_integral(f: GridFunction, kernel: SphereKernel, x, beta: float,
                              k: float = 1.0) -> float:
    """int over B(x, k a m(x)) of Omega(x-y) f(y) gamma(B(x,|x-y|))^(beta-1) dgamma(y).

    Signed kernels are allowed, so the output may be negative.  The cell
    containing x uses the locally flat measure model with the power
    kernel integrated exactly; other cells use their midpoint distance
    and the monotone radial profile of gamma(B(x, .)).
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    space = f.space
    px = space.as_point(x)
    h = space.cell_size
    R = k * space.a * admissibility_m(px)
    x2 = float(np.dot(px, px))
    dens = math.pi ** (-space.d / 2.0) * math.exp(-x2)
    # local flat model gamma(B(x,t)) = A t^d on the singular cell only
    A = dens * unit_ball_volume(space.d)

    profile = radial_profile(space, px, k, t_min=min(h / 8.0, R / 16.0),
                             t_max=R + h * math.sqrt(space.d))

    if space.d == 1:
        xv = float(px[0])
        i0, i1, frac = interval_cells(space, xv - R, xv + R)
        if i1 <= i0:
            return 0.0
        nodes = space.axis_nodes[i0:i1]
        fv = f.values[i0:i1]
        gw = space.gaussian_cell_weights[i0:i1] * frac
        isg = int(math.floor((xv + space.L) / h))
        # cells whose closure contains x carry the singularity (two of
        # them when x sits exactly on a cell edge)
        sing_local = []
        for i in (isg - 1, isg, isg + 1):
            if i0 <= i < i1:
                e0 = -space.L + i * h
                if e0 <= xv <= e0 + h:
                    sing_local.append(i - i0)
        total = 0.0
        mask = np.ones(nodes.size, dtype=bool)
        mask[sing_local] = False
        if np.any(mask):
            t = np.abs(xv - nodes[mask])
            gy = profile.measure_at(t)
            omega = kernel.direction_values((xv - nodes[mask]).reshape(-1, 1))
            total += float(np.dot(fv[mask] * omega * gy ** (beta - 1.0), gw[mask]))
        vp, vm = kernel.values  # value(+1) weights y < x, value(-1) weights y > x
        for loc in sing_local:
            e0 = -space.L + (loc + i0) * h
            e1 = e0 + h
            left = max(xv - max(e0, xv - R), 0.0)
            right = max(min(e1, xv + R) - xv, 0.0)
            pterm = (vp * left**beta + vm * right**beta) / beta
            total += float(fv[loc]) * A ** (beta - 1.0) * dens * pterm
        return total

    if space.d != 2:
        raise NotImplementedError("fractional integrals are implemented for d <= 2")
    idx, frac = disk_cells(space, px, R)
    if idx.size == 0:
        return 0.0
    pts = space.node_points[idx]
    fv = f.flat[idx]
    gw = space.gaussian_cell_weights[idx] * frac
    ixs = int(math.floor((px[0] + space.L) / h))
    iys = int(math.floor((px[1] + space.L) / h))
    sing_flat = ixs * space.n + iys if 0 <= ixs < space.n and 0 <= iys < space.n else -1
    mask = idx != sing_flat
    total = 0.0
    if np.any(mask):
        delta = px[None, :] - pts[mask]
        t = np.linalg.norm(delta, axis=1)
        gy = profile.measure_at(t)
        omega = kernel.direction_values(delta)
        total += float(np.dot(fv[mask] * omega * gy ** (beta - 1.0), gw[mask]))
    if np.any(~mask):
        area = float(frac[~mask][0]) * h * h
        r_eq = min(math.sqrt(area / math.pi), R)
        # exact angular x radial integral of the model kernel over the
        # equal-area disk: mean(Omega) * 2 pi * r^(2 beta) / (2 beta)
        pterm = kernel.angular_mean() * math.pi * r_eq ** (2.0 * beta) / beta
        total += float(fv[~mask][0]) * A ** (beta - 1.0) * dens * pterm
    return total


def fractional_integral_gaussian(f: GridFunction, x, beta: float, k: float = 1.0) -> float:
    """Window fractional integral with the measure kernel (unit sphere kernel)."""
    return rough_fractional_integral(f, unit_kernel(f.space.d), x, beta, k)


def _radial_atoms_1d(space: GaussianSpace, x: float, R: float, beta: float, scales):
    """Exact atoms for int over [-R, R] of prod_j f_j(x - theta_j y) |y|^(beta-1) dy.

    Breakpoints collect the y-lattice edges, 0 and +-R, and for every
    requested scale theta the preimages (x - edge)/theta of the function
    lattice, so each atom carries constant f values for all factors and a
    closed-form kernel mass.  With the atoms shared between the
    multilinear integral and its scaled single-factor majorants, the
    Holder/change-of-variables chain is exact at the discrete level.
    """
    h = space.cell_size
    edges = -space.L + np.arange(space.n + 1) * h
    pts = [-R, 0.0, R]
    inner = edges[(edges > -R) & (edges < R)]
    pts.extend(float(e) for e in inner)
    for th in scales:
        pre = (x - edges) / th
        pre = pre[(pre > -R) & (pre < R)]
        pts.extend(float(v) for v in pre)
    arr = np.unique(np.asarray(pts, dtype=float))
    lo, hi = arr[:-1], arr[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    mids = 0.5 * (lo + hi)
    K = np.empty(lo.size)
    pos = lo >= 0.0
    neg = ~pos
    K[pos] = (hi[pos] ** beta - lo[pos] ** beta) / beta
    K[neg] = ((-lo[neg]) ** beta - (-hi[neg]) ** beta) / beta
    return mids.reshape(-1, 1), K


def _radial_kernel_cells_2d(space: GaussianSpace, R: float, beta: float):
    """Per-cell integrals of |y|^(2 beta - 2) over the disk B(0, R).

    Far cells use their midpoint value, near-origin cells an 8x8
    subsample, and the four corner cells at the origin the exact radial
    integral over an equal-area quarter disk.
    """
    h = space.cell_size
    c0 = np.zeros(2)
    idx, frac = disk_cells(space, c0, R)
    pts = space.node_points[idx]
    t = np.linalg.norm(pts, axis=1)
    K = t ** (2.0 * beta - 2.0) * (h * h) * frac
    near = t < 2.5 * h
    sub = (np.arange(8) + 0.5) / 8.0 - 0.5
    for pos in np.nonzero(near)[0]:
        cx, cy = pts[pos]
        corner = max(abs(cx), abs(cy)) <= 0.51 * h and min(abs(cx), abs(cy)) <= 0.51 * h
        if corner:
            area = float(frac[pos]) * h * h
            r_eq = min(2.0 * math.sqrt(area / math.pi), R)
            K[pos] = math.pi * r_eq ** (2.0 * beta) / (4.0 * beta)
            continue
        sx = cx + sub * h
        sy = cy + sub * h
        SX, SY = np.meshgrid(sx, sy, indexing="ij")
        tt = np.hypot(SX, SY)
        inside = tt < R
        K[pos] = float(np.sum(tt[inside] ** (2.0 * beta - 2.0))) * (h / 8.0) ** 2
    return pts, K


def _radial_window(space: GaussianSpace, x: np.ndarray, beta: float, scales):
    R = space.a * admissibility_m(x)
    if space.d == 1:
        return _radial_atoms_1d(space, float(x[0]), R, beta, scales)
    if space.d == 2:
        return _radial_kernel_cells_2d(space, R, beta)
    raise NotImplementedError("radial windows are implemented for d <= 2")


def fractional_integral_radial(f: GridFunction, x, beta: float, k: float = 1.0) -> float:
    """Radial form pi^(-d/2) e^(-beta |x|^2) int_{B(0, k a m(x))} f(x-y) |y|^(d beta - d) dy.

    The window scale k is applied by the exact change of variables
    y -> k y on the base window B(0, a m(x)), which multiplies the kernel
    mass by k^(d beta); keeping one base lattice for every k makes the
    scaling identities (and the multilinear Holder chain built on them)
    exact at the discrete level.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    if not k > 0.0:
        raise ValueError("window scale k must be positive")
    space = f.space
    px = space.as_point(x)
    Y, K = _radial_window(space, px, beta, (k,))
    vals = f.eval_at(px[None, :] - k * Y)
    pref = math.pi ** (-space.d / 2.0) * math.exp(-beta * float(np.dot(px, px)))
    return pref * (k ** (space.d * beta)) * float(np.dot(vals, K))


def multilinear_fractional_integral(fs, thetas: ShiftVector, x, beta: float) -> float:
    """pi^(-d/2) e^(-beta |x|^2) int_{B(0, a m(x))} prod_j f_j(x - theta_j y) |y|^(d beta - d) dy."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    if len(fs) != thetas.m:
        raise ValueError("one function per shift")
    space = fs[0].space
    px = space.as_point(x)
    Y, K = _radial_window(space, px, beta, thetas.thetas)
    prod = np.ones(K.size)
    for fj, th in zip(fs, thetas.thetas):
        prod = prod * fj.eval_at(px[None, :] - th * Y)
    pref = math.pi ** (-space.d / 2.0) * math.exp(-beta * float(np.dot(px, px)))
    return pref * float(np.dot(prod, K))


# ---------------------------------------------------------------------------
# derived explicit bands


def fractional_integral_equivalence_band(space: GaussianSpace, beta: float,
                                         k: float = 1.0) -> tuple[float, float]:
    """Band [c_lo, c_hi] pinning (measure-kernel form) / (radial form).

    Pointwise, the ratio of the two integrands at the same y equals
    pi^(d(1-beta)/2) v_d^(beta-1) * E^(beta-1) * H with E and H both in
    the halo band at scale k (E compares gamma(B(x,t)) with the flattened
    volume, H compares the density at y with the density at x).  Both
    integrals average the same nonnegative f against those integrands, so
    the ratio of the integrals lands in the same band.
    """
    lo_h, hi_h = halo_bounds(space, k)
    v_d = unit_ball_volume(space.d)
    k0 = math.pi ** (space.d * (1.0 - beta) / 2.0) * v_d ** (beta - 1.0)
    c_lo = k0 * hi_h ** (beta - 1.0) * lo_h
    c_hi = k0 * lo_h ** (beta - 1.0) * hi_h
    return c_lo, c_hi


def rough_maximal_chain_constant(space: GaussianSpace, kernel: SphereKernel,
                                 k: float = 1.0) -> float:
    """Explicit constant C with M_rough(beta) <= C * N(beta s', s') on the family.

    Holder with exponent s on one ball, the halo band for the density,
    and the polar-coordinate bound int_{B(0,2r)} |Omega|^s <= (2r)^d/d *
    |Omega|_s^s give C = |Omega|_s * (2^d hi / (d v_d lo))^(1/s) with
    (lo, hi) the halo band at scale k.
    """
    lo_h, hi_h = halo_bounds(space, k)
    s = kernel.s
    v_d = unit_ball_volume(space.d)
    return sphere_norm(kernel) * (2.0**space.d * hi_h / (space.d * v_d * lo_h)) ** (1.0 / s)
