"""Numerical verification of the pointwise inequalities and norm bounds.

Two kinds of evidence are produced and kept apart:

* ``InequalityReport`` for pointwise inequalities whose constants are
  explicit (either from the scaling chain or from a frozen calibration);
  these must pass at tight tolerances because on the shared discrete
  family they are exact algebra.
* ``NormExperiment`` for norm-ratio experiments standing in for theorem
  statements with implicit constants; these are recorded, and the only
  gate is empirical boundedness under grid refinement.  Degenerate 0/0
  ratios are reported as skipped, never as passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ExponentMismatch, TestingConditionFailed
from .geometry import GaussianSpace
from .gridfn import GridFunction, LambdaGrid, weak_quasinorm, weighted_norm
from .operators import (
    ShiftVector,
    SphereKernel,
    _family_stats,
    fractional_integral_radial,
    maximal_field,
    measure_maximal,
    multilinear_fractional_integral,
    multilinear_maximal,
    order_s_maximal,
    rough_fractional_integral,
    rough_fractional_maximal,
)
from .weights import Weight, WeightVector, apqa_constant

__all__ = [
    "InequalityReport",
    "NormExperiment",
    "sample_sites",
    "check_shift_family_holder",
    "check_rough_integral_interpolation",
    "check_multilinear_maximal_domination",
    "check_testing_condition",
    "weak_type_experiment",
    "strong_type_experiment",
    "shift_family_norm_experiment",
    "rough_norm_experiment",
]

_MIN_POINTWISE_SITES = 100


@dataclass
class InequalityReport:
    """Outcome of a pointwise inequality swept over sites or balls."""

    name: str
    sites_checked: int
    max_ratio: float
    constant_used: float
    constant_provenance: str
    tol: float
    passed: bool
    pointwise: bool = True
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.pointwise and self.sites_checked < _MIN_POINTWISE_SITES:
            raise ValueError(
                f"pointwise report {self.name!r} needs >= {_MIN_POINTWISE_SITES} sites, "
                f"got {self.sites_checked}"
            )


@dataclass
class NormExperiment:
    """One norm-ratio measurement for a theorem-style bound."""

    theorem_id: str
    fixtures: dict
    lhs_norm: float
    rhs_norm: float
    ratio: float | None
    skipped: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.skipped and not self.rhs_norm > 0.0:
            raise ValueError("non-degenerate experiments need rhs_norm > 0")


def sample_sites(space: GaussianSpace, count: int, seed: int = 0,
                 margin: float = 0.75) -> np.ndarray:
    """Deterministic evaluation sites, uniform over the shrunken box."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-margin * space.L, margin * space.L, size=(count, space.d))


def _ratio(lhs: float, rhs: float) -> float | None:
    if rhs == 0.0:
        return None if lhs == 0.0 else math.inf
    return lhs / rhs


def check_shift_family_holder(space: GaussianSpace, fs, thetas: ShiftVector, beta: float,
                              p_vec, s: float, n_sites: int = 150, seed: int = 0,
                              tol: float = 1e-6) -> InequalityReport:
    """Pointwise domination of the shifted multilinear integral by its factors.

    At every site x the multilinear integral is compared against
    C * prod_j [radial integral at window scale |theta_j| of f_j^(p_j/s)]^(s/p_j)
    with the explicit scaling constant C = prod_j |theta_j|^(-d beta s / p_j).
    On the shared base-window lattice this is Holder plus an exact change
    of variables, so the ratio must not exceed 1 beyond rounding.
    """
    p_vec = tuple(float(p) for p in p_vec)
    if abs(sum(1.0 / p for p in p_vec) - 1.0 / s) > 1e-9:
        raise ExponentMismatch("need 1/s = sum_j 1/p_j")
    if any(p <= 1.0 for p in p_vec):
        raise ValueError("all p_j must exceed 1")
    if len(fs) != thetas.m or len(p_vec) != thetas.m:
        raise ValueError("one function and one exponent per shift")
    d = space.d
    const = 1.0
    for th, p in zip(thetas.thetas, p_vec):
        const *= abs(th) ** (-d * beta * s / p)
    powered = [GridFunction(space, f.values ** (p / s)) for f, p in zip(fs, p_vec)]
    sites = sample_sites(space, n_sites, seed)
    max_ratio = 0.0
    degenerate = 0
    for x in sites:
        lhs = abs(multilinear_fractional_integral(fs, thetas, x, beta))
        rhs = const
        for g, th, p in zip(powered, thetas.thetas, p_vec):
            rhs *= fractional_integral_radial(g, x, beta, k=abs(th)) ** (s / p)
        r = _ratio(lhs, rhs)
        if r is None:
            degenerate += 1
            continue
        max_ratio = max(max_ratio, r)
    return InequalityReport(
        name="shift-family-holder-domination",
        sites_checked=len(sites),
        max_ratio=max_ratio,
        constant_used=const,
        constant_provenance="explicit scaling constant prod |theta_j|^(-d beta s/p_j)",
        tol=tol,
        passed=max_ratio <= 1.0 + tol,
        details={"degenerate_sites": degenerate, "beta": beta, "s": s,
                 "p_vec": list(p_vec), "thetas": list(thetas.thetas), "seed": seed},
    )


def _interpolation_calibration_sites(space: GaussianSpace) -> np.ndarray:
    """Deterministic dense site sweep used to fit frozen constants.

    Thinned grid nodes shrunk into the sampling box, repeated at several
    fixed sub-cell offsets: the ratio statistic spikes where a site and a
    fixture edge meet at particular sub-cell fractions, so the fit has to
    explore that joint geometry at least as densely as the random
    holdout sites will.
    """
    stride = max(1, space.n**space.d // 96)
    base = space.node_points[::stride] * 0.9
    offsets = np.array([0.0, 0.13, -0.21, 0.29, -0.37, 0.45, -0.45]) * space.cell_size
    return np.concatenate([base + off for off in offsets], axis=0)


def check_rough_integral_interpolation(space: GaussianSpace, kernel: SphereKernel,
                                       beta: float, beta1: float, beta2: float,
                                       calibration_fs: dict, holdout_fs: dict,
                                       n_sites: int = 120, seed: int = 0,
                                       headroom: float = 0.10) -> InequalityReport:
    """Frozen-constant transfer test of the two-endpoint interpolation bound.

    |I_rough(beta)| <= C * M_rough(beta1, 2a)^e1 * M_rough(beta2, 2a)^e2
    with e1 = (beta2-beta)/(beta2-beta1), e2 = (beta-beta1)/(beta2-beta1).

    The constant is fitted as the max ratio over the calibration fixtures
    on a deterministic dense site sweep, inflated by the declared
    ``headroom``, and frozen; the assertion then runs the disjoint
    holdout fixtures at fresh random sites against the frozen envelope.
    The headroom is part of the frozen protocol (declared before any
    holdout data is seen), covering finite-sample near-ties of the site
    maximum; holdout parameters are expected to lie inside the calibrated
    feature-scale range.
    """
    if not (0.0 <= beta1 < beta < beta2 <= 1.0):
        raise ValueError("need 0 <= beta1 < beta < beta2 <= 1")
    e1 = (beta2 - beta) / (beta2 - beta1)
    e2 = (beta - beta1) / (beta2 - beta1)
    sites = sample_sites(space, n_sites, seed)
    cal_sites = _interpolation_calibration_sites(space)

    def max_ratio_over(fixtures: dict, pts) -> float:
        worst = 0.0
        for f in fixtures.values():
            for x in pts:
                lhs = abs(rough_fractional_integral(f, kernel, x, beta))
                m1 = rough_fractional_maximal(f, kernel, x, beta1, k=2.0)
                m2 = rough_fractional_maximal(f, kernel, x, beta2, k=2.0)
                rhs = m1**e1 * m2**e2
                r = _ratio(lhs, rhs)
                if r is not None:
                    worst = max(worst, r)
        return worst

    fitted = max_ratio_over(calibration_fs, cal_sites)
    frozen = (1.0 + headroom) * fitted
    held = max_ratio_over(holdout_fs, sites)
    ratio = held / frozen if frozen > 0.0 else math.inf
    return InequalityReport(
        name="rough-integral-interpolation",
        sites_checked=len(sites) * len(holdout_fs),
        max_ratio=ratio,
        constant_used=frozen,
        constant_provenance=(f"calibration max {fitted:.6g} on {sorted(calibration_fs)} "
                             f"with declared headroom {headroom:g}"),
        tol=0.0,
        passed=ratio <= 1.0,
        details={"beta": beta, "beta1": beta1, "beta2": beta2,
                 "calibration_max": fitted, "holdout_max_ratio": held,
                 "margin": frozen - held, "seed": seed},
    )


def _holder_chain_constant(space: GaussianSpace, sl, w, den, wv: WeightVector,
                           nu_flat: np.ndarray, dual_flats) -> float:
    """Per-ball constant (avg nu)^(1/p) prod_j (avg w_j^(1-p_j'))^(1/p_j')."""
    val = (float(np.dot(nu_flat[sl], w)) / den) ** (1.0 / wv.p)
    for dual, extra in dual_flats:
        if dual is None:
            val /= float(extra[sl].min())
        else:
            val *= (float(np.dot(dual[sl], w)) / den) ** (1.0 / extra)
    return val


def _dual_flats(wv: WeightVector):
    out = []
    for wj, pj in zip(wv.components, wv.exponents):
        if pj == 1.0:
            out.append((None, wj.flat))
        else:
            ppj = pj / (pj - 1.0)
            out.append((wj.flat ** (1.0 - ppj), ppj))
    return out


def check_multilinear_maximal_domination(space: GaussianSpace, fs, wv: WeightVector,
                                         nu: Weight, n_sites: int = 150, seed: int = 0,
                                         k: float = 1.0, tol: float = 1e-8) -> InequalityReport:
    """Family-restricted pointwise domination of the multilinear maximal.

    At each site, max_B prod_j avg_B f_j is compared against
    K * prod_j [measure-maximal of f_j^(p_j) w_j / nu at x]^(1/p_j) where
    K is the largest per-ball Holder-chain constant met at that site.
    Restricted to the shared family this is exact algebra, so the ratio
    must stay within rounding of 1.  A guard re-checks the per-ball
    testing inequality and raises if it ever exceeds its own bound.
    """
    if len(fs) != wv.m:
        raise ValueError("one function per weight component")
    flats = [f.flat for f in fs]
    nu_flat = nu.flat
    duals = _dual_flats(wv)
    p = wv.p
    gs = [GridFunction(space, f.values**pj * wj.values.values / nu.values.values)
          for f, wj, pj in zip(fs, wv.components, wv.exponents)]
    fw_flats = [f.flat**pj * wj.flat for f, wj, pj in zip(fs, wv.components, wv.exponents)]
    sites = sample_sites(space, n_sites, seed)
    max_ratio = 0.0
    degenerate = 0
    for x in sites:
        px = space.as_point(x)
        lhs = 0.0
        k_sup = 0.0
        for sl, w, den in _family_stats(space, px, k):
            prod = 1.0
            for fv in flats:
                prod *= float(np.dot(fv[sl], w)) / den
            kb = _holder_chain_constant(space, sl, w, den, wv, nu_flat, duals)
            nu_mass = float(np.dot(nu_flat[sl], w))
            lhs_ball = prod * nu_mass ** (1.0 / p)
            rhs_ball = kb
            for fw, pj in zip(fw_flats, wv.exponents):
                rhs_ball *= float(np.dot(fw[sl], w)) ** (1.0 / pj)
            if lhs_ball > rhs_ball * (1.0 + 1e-9):
                raise TestingConditionFailed(
                    f"per-ball testing inequality violated at x={tuple(px)}"
                )
            lhs = max(lhs, prod)
            k_sup = max(k_sup, kb)
        rhs = k_sup
        for g, pj in zip(gs, wv.exponents):
            rhs *= measure_maximal(g, nu, px, k) ** (1.0 / pj)
        r = _ratio(lhs, rhs)
        if r is None:
            degenerate += 1
            continue
        max_ratio = max(max_ratio, r)
    return InequalityReport(
        name="multilinear-maximal-domination",
        sites_checked=len(sites),
        max_ratio=max_ratio,
        constant_used=1.0,
        constant_provenance="per-site Holder-chain constant, family-restricted",
        tol=tol,
        passed=max_ratio <= 1.0 + tol,
        details={"degenerate_sites": degenerate, "p": p, "seed": seed},
    )


def check_testing_condition(space: GaussianSpace, fs, wv: WeightVector, nu: Weight,
                            balls, tol: float = 1e-6) -> InequalityReport:
    """Per-ball testing inequality with its explicit Holder-chain constant.

    prod_j avg_B f_j * nu(B)^(1/p) <= K_B * prod_j ||f_j||_{L^{p_j}(B, w_j dgamma)}
    where K_B is the joint-condition quantity evaluated on the same ball.
    Exact by Holder on the shared quadrature, so it must pass at ``tol``.
    """
    from .gridfn import ball_quadrature

    flats = [f.flat for f in fs]
    nu_flat = nu.flat
    duals = _dual_flats(wv)
    fw_flats = [f.flat**pj * wj.flat for f, wj, pj in zip(fs, wv.components, wv.exponents)]
    p = wv.p
    max_ratio = 0.0
    degenerate = 0
    for ball in balls:
        idx, w = ball_quadrature(space, ball.center_array, ball.radius)
        den = float(w.sum())
        prod = 1.0
        for fv in flats:
            prod *= float(np.dot(fv[idx], w)) / den
        lhs = prod * float(np.dot(nu_flat[idx], w)) ** (1.0 / p)
        kb = _holder_chain_constant(space, idx, w, den, wv, nu_flat, duals)
        rhs = kb
        for fw, pj in zip(fw_flats, wv.exponents):
            rhs *= float(np.dot(fw[idx], w)) ** (1.0 / pj)
        r = _ratio(lhs, rhs)
        if r is None:
            degenerate += 1
            continue
        max_ratio = max(max_ratio, r)
    return InequalityReport(
        name="testing-condition",
        sites_checked=len(balls),
        max_ratio=max_ratio,
        constant_used=1.0,
        constant_provenance="Holder chain with the per-ball joint-condition factor",
        tol=tol,
        passed=max_ratio <= 1.0 + tol,
        details={"degenerate_balls": degenerate},
    )


def weak_type_experiment(space: GaussianSpace, fs, wv: WeightVector, nu: Weight,
                         k: float = 1.0, lambda_count: int = 64,
                         metadata: dict | None = None) -> NormExperiment:
    """Weak-norm ratio || M(f_vec) ||_{L^{p,inf}(nu)} / prod_j ||f_j||_{L^{p_j}(w_j)}."""
    p = wv.p
    field_fn = maximal_field(fs, k)
    grid = LambdaGrid.from_function(field_fn, lambda_count)
    lhs = weak_quasinorm(field_fn, nu, p, grid) if grid is not None else 0.0
    rhs = 1.0
    for f, wj, pj in zip(fs, wv.components, wv.exponents):
        rhs *= weighted_norm(f, wj, pj)
    ratio = _ratio(lhs, rhs)
    skipped = ratio is None
    return NormExperiment(
        theorem_id="two-weight-weak-type",
        fixtures=dict(metadata or {}),
        lhs_norm=lhs,
        rhs_norm=rhs,
        ratio=None if skipped else ratio,
        skipped=skipped,
        metadata={"n": space.n, "p": p, "lambda_count": lambda_count},
    )


def strong_type_experiment(space: GaussianSpace, fs, wv: WeightVector, k: float = 1.0,
                           metadata: dict | None = None) -> NormExperiment:
    """Strong-norm ratio with the composite weight on the left side."""
    if any(pj <= 1.0 for pj in wv.exponents):
        raise ValueError("strong-type experiments need all p_j > 1")
    p = wv.p
    nu = wv.composite()
    field_fn = maximal_field(fs, k)
    lhs = weighted_norm(field_fn, nu, p)
    rhs = 1.0
    for f, wj, pj in zip(fs, wv.components, wv.exponents):
        rhs *= weighted_norm(f, wj, pj)
    ratio = _ratio(lhs, rhs)
    skipped = ratio is None
    return NormExperiment(
        theorem_id="one-weight-strong-type",
        fixtures=dict(metadata or {}),
        lhs_norm=lhs,
        rhs_norm=rhs,
        ratio=None if skipped else ratio,
        skipped=skipped,
        metadata={"n": space.n, "p": p},
    )


def shift_family_norm_experiment(space: GaussianSpace, fs, thetas: ShiftVector, beta: float,
                                 p_vec, s: float, weights, balls=None,
                                 metadata: dict | None = None) -> NormExperiment:
    """Strong bound for the shifted multilinear integral with product weight.

    lhs = || I(f_vec) ||_{L^p(omega^p)} with omega = prod_j omega_j and
    1/p = 1/s - beta; rhs = prod_j ||f_j||_{L^{p_j}(omega_j^{p_j})}.
    Sampled class constants of omega_j^(p_j/s) at (s, p) are attached as
    metadata when a ball sample is supplied.
    """
    p_vec = tuple(float(v) for v in p_vec)
    if abs(sum(1.0 / v for v in p_vec) - 1.0 / s) > 1e-9:
        raise ExponentMismatch("need 1/s = sum_j 1/p_j")
    if not (1.0 < s < 1.0 / beta):
        raise ExponentMismatch("need 1 < s < 1/beta")
    p = 1.0 / (1.0 / s - beta)
    omega = np.ones(space.values_shape())
    for wj in weights:
        omega = omega * wj.values.values
    pts = space.node_points
    vals = np.empty(pts.shape[0])
    for i in range(pts.shape[0]):
        vals[i] = abs(multilinear_fractional_integral(fs, thetas, pts[i], beta))
    field_fn = GridFunction(space, vals.reshape(space.values_shape()))
    lhs = weighted_norm(field_fn, omega**p, p)
    rhs = 1.0
    for f, wj, pj in zip(fs, weights, p_vec):
        rhs *= weighted_norm(f, wj.values.values**pj, pj)
    constants = {}
    if balls is not None:
        for j, (wj, pj) in enumerate(zip(weights, p_vec), start=1):
            constants[f"class_constant_{j}"] = apqa_constant(wj.power(pj / s), s, p, balls)
    ratio = _ratio(lhs, rhs)
    skipped = ratio is None
    return NormExperiment(
        theorem_id="shift-family-strong-type",
        fixtures=dict(metadata or {}),
        lhs_norm=lhs,
        rhs_norm=rhs,
        ratio=None if skipped else ratio,
        skipped=skipped,
        metadata={"n": space.n, "p": p, "s": s, "beta": beta,
                  "thetas": list(thetas.thetas), **constants},
    )


def rough_norm_experiment(space: GaussianSpace, f: GridFunction, kernel: SphereKernel,
                          beta: float, p: float, q: float, w: Weight, s_prime: float,
                          balls=None, metadata: dict | None = None) -> NormExperiment:
    """Strong bound for the rough fractional integral, plus its proof chain.

    Main ratio ||I_rough f||_{L^q(w^q)} / ||f||_{L^p(w^p)}; the metadata
    carries the companion ratios for the order-s' maximal (at order
    beta*s') and the rough fractional maximal on the same fixture, and
    the sampled class constant of w^(s') at (p/s', q/s').
    """
    if not (s_prime < p < 1.0 / beta):
        raise ExponentMismatch("need s' < p < 1/beta")
    if abs(1.0 / q - (1.0 / p - beta)) > 1e-9:
        raise ExponentMismatch("need 1/q = 1/p - beta")
    pts = space.node_points
    vals_i = np.empty(pts.shape[0])
    vals_n = np.empty(pts.shape[0])
    vals_m = np.empty(pts.shape[0])
    for i in range(pts.shape[0]):
        vals_i[i] = abs(rough_fractional_integral(f, kernel, pts[i], beta))
        vals_n[i] = order_s_maximal(f, pts[i], beta * s_prime, s_prime)
        vals_m[i] = rough_fractional_maximal(f, kernel, pts[i], beta)
    shape = space.values_shape()
    wq = w.values.values**q
    wp = w.values.values**p
    rhs = weighted_norm(f, wp, p)
    lhs = weighted_norm(GridFunction(space, vals_i.reshape(shape)), wq, q)
    lhs_n = weighted_norm(GridFunction(space, vals_n.reshape(shape)), wq, q)
    lhs_m = weighted_norm(GridFunction(space, vals_m.reshape(shape)), wq, q)
    constants = {}
    if balls is not None:
        wsp = w.power(s_prime) if s_prime != 1.0 else w
        constants["class_constant"] = apqa_constant(wsp, p / s_prime, q / s_prime, balls)
    ratio = _ratio(lhs, rhs)
    skipped = ratio is None
    return NormExperiment(
        theorem_id="rough-strong-type",
        fixtures=dict(metadata or {}),
        lhs_norm=lhs,
        rhs_norm=rhs,
        ratio=None if skipped else ratio,
        skipped=skipped,
        metadata={"n": space.n, "p": p, "q": q, "beta": beta, "s_prime": s_prime,
                  "order_maximal_ratio": _ratio(lhs_n, rhs),
                  "rough_maximal_ratio": _ratio(lhs_m, rhs), **constants},
    )
