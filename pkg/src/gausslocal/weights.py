"""Local Muckenhoupt-type weight classes, estimated over sampled ball families.

Every "sup over all admissible balls" quantity here is reported as the
max over a finite deterministic sample (value, sample size, seed), i.e.
an honest lower bound of the true supremum.  Essential inf/sup on a ball
are exact min/max over the grid nodes carrying positive quadrature
weight, which is what "essential" means for piecewise-constant data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BallOutsideDomain, ExponentMismatch, NoEpsilonFound, NonPositiveWeight
from .geometry import AdmissibleBall, GaussianSpace, admissibility_m
from .gridfn import GridFunction, ball_quadrature

__all__ = [
    "Weight",
    "WeightVector",
    "FractionalParams",
    "WeightClassCrosscheck",
    "power_weight",
    "constant_weight",
    "lebesgue_flattening_weight",
    "ball_sampler",
    "apa_constant",
    "apqa_constant",
    "multi_apa_constant",
    "five_condition_ratio",
    "reverse_holder_check",
    "epsilon_finder",
    "theorem_crosscheck",
    "joint_two_weight_constant",
]


@dataclass(eq=False)
class Weight:
    """Strictly positive grid weight with a label and optional power exponent."""

    values: GridFunction
    label: str = ""
    alpha: float | None = None

    def __post_init__(self):
        if np.any(self.values.values <= 0.0) or not np.all(np.isfinite(self.values.values)):
            raise NonPositiveWeight(f"weight {self.label!r} must be positive and finite")

    @property
    def space(self) -> GaussianSpace:
        return self.values.space

    @property
    def flat(self) -> np.ndarray:
        return self.values.flat

    def power(self, exponent: float, label: str | None = None) -> "Weight":
        lab = label if label is not None else f"{self.label}^{exponent:g}"
        return Weight(GridFunction(self.space, self.values.values**exponent), lab)


def power_weight(space: GaussianSpace, alpha: float, delta: float = 0.01,
                 label: str | None = None) -> Weight:
    """w(x) = (|x| + delta)^alpha; delta > 0 keeps nodes near the origin finite."""
    if delta < 0.0:
        raise ValueError("delta must be >= 0")
    r = np.linalg.norm(space.node_points, axis=1)
    vals = (r + delta) ** alpha
    lab = label if label is not None else f"power(alpha={alpha:g},delta={delta:g})"
    return Weight(GridFunction(space, vals.reshape(space.values_shape())), lab, alpha=alpha)


def constant_weight(space: GaussianSpace, level: float = 1.0, label: str = "const") -> Weight:
    return Weight(GridFunction.constant(space, level), label)


def lebesgue_flattening_weight(space: GaussianSpace, label: str = "exp(|x|^2)") -> Weight:
    """w(x) = exp(|x|^2), which turns gamma-averages into Lebesgue averages."""
    sq = np.sum(space.node_points**2, axis=1)
    return Weight(GridFunction(space, np.exp(sq).reshape(space.values_shape())), label)


@dataclass(eq=False)
class WeightVector:
    """m weights coupled with exponents p_1..p_m; 1/p = sum(1/p_j)."""

    components: list
    exponents: tuple

    def __post_init__(self):
        if len(self.components) < 1:
            raise ValueError("need at least one weight component")
        if len(self.components) != len(self.exponents):
            raise ValueError("one exponent per component")
        if any(pj < 1.0 for pj in self.exponents):
            raise ValueError("all exponents must be >= 1")
        self.exponents = tuple(float(pj) for pj in self.exponents)

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def p(self) -> float:
        return 1.0 / sum(1.0 / pj for pj in self.exponents)

    @property
    def space(self) -> GaussianSpace:
        return self.components[0].space

    def composite(self) -> Weight:
        """nu = prod_j w_j^(p/p_j), the natural one-weight companion."""
        p = self.p
        vals = np.ones(self.space.values_shape())
        for wj, pj in zip(self.components, self.exponents):
            vals = vals * wj.values.values ** (p / pj)
        return Weight(GridFunction(self.space, vals), label="composite")


@dataclass(frozen=True)
class FractionalParams:
    """Exponent bookkeeping for the fractional operators.

    Relations enforced when the fields are set: 1/q = 1/p - beta,
    s_prime = s / (s - 1), and for the epsilon-shifted exponents
    1/q_eps = 1/p - beta - eps,  1/q_eps_tilde = 1/p - beta + eps.
    """

    beta: float
    p: float
    q: float | None = None
    s: float | None = None
    s_prime: float | None = None
    epsilon: float | None = None
    q_eps: float | None = None
    q_eps_tilde: float | None = None

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if not self.p >= 1.0:
            raise ValueError("p must be >= 1")
        if self.q is None and 1.0 / self.p - self.beta > 0.0:
            object.__setattr__(self, "q", 1.0 / (1.0 / self.p - self.beta))
        if self.q is not None:
            if abs(1.0 / self.q - (1.0 / self.p - self.beta)) > 1e-9:
                raise ExponentMismatch("1/q must equal 1/p - beta")
        if self.s is not None and self.s_prime is None:
            if not self.s > 1.0:
                raise ValueError("s must be > 1 to have a conjugate")
            object.__setattr__(self, "s_prime", self.s / (self.s - 1.0))
        if self.s is not None and self.s_prime is not None:
            if abs(1.0 / self.s + 1.0 / self.s_prime - 1.0) > 1e-9:
                raise ExponentMismatch("s and s_prime must be conjugate")
        if self.epsilon is not None:
            eps = self.epsilon
            if not (eps < self.beta < self.beta + eps < 1.0):
                raise ValueError("epsilon must satisfy eps < beta < beta + eps < 1")
            object.__setattr__(self, "q_eps", 1.0 / (1.0 / self.p - self.beta - eps))
            object.__setattr__(self, "q_eps_tilde", 1.0 / (1.0 / self.p - self.beta + eps))

    def with_epsilon(self, eps: float) -> "FractionalParams":
        return replace(self, epsilon=eps, q_eps=None, q_eps_tilde=None)


def ball_sampler(space: GaussianSpace, k: float = 1.0, count: int = 64, seed: int = 0,
                 r_min: float | None = None, fit_scale: float = 1.0) -> list:
    """Deterministic sample of admissible balls at scale k.

    Centers are uniform over the region where the admissibility cap (and
    the requirement that ``fit_scale * ball`` stays inside the box) leaves
    room above ``r_min``; radii are log-uniform up to the cap.  A fixed
    stratum of extreme balls sits near |x| = 0.9 L with radii near the
    cap, pulled inward only as far as feasibility requires.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    if r_min is None:
        r_min = 1.5 * space.cell_size
    n_extreme = max(1, count // 8) if count >= 4 else 0
    balls: list[AdmissibleBall] = []

    def cap_at(c: np.ndarray) -> float:
        cap_adm = k * space.a * admissibility_m(c)
        cap_fit = (space.L - float(np.max(np.abs(c)))) / fit_scale
        return 0.999 * min(cap_adm, cap_fit)

    tries = 0
    while len(balls) < count - n_extreme:
        tries += 1
        if tries > 200 * count:
            raise ValueError("ball sampler cannot satisfy the constraints; lower r_min")
        c = rng.uniform(-space.L, space.L, size=space.d)
        cap = cap_at(c)
        if cap <= r_min * 1.05:
            continue
        r = math.exp(rng.uniform(math.log(r_min), math.log(cap)))
        balls.append(space.admissible_ball(c, r, scale=k))

    mag = 0.9 * space.L
    while n_extreme > 0:
        direction = rng.standard_normal(space.d)
        direction /= np.linalg.norm(direction)
        c = mag * direction
        cap = cap_at(c)
        if cap <= r_min * 1.1:
            # infeasible that far out; pull the stratum inward and retry
            mag *= 0.95
            if mag < 0.1 * space.L:
                raise ValueError("extreme stratum infeasible for these constraints")
            continue
        r = math.exp(rng.uniform(math.log(0.93 * cap), math.log(cap)))
        balls.append(space.admissible_ball(c, r, scale=k))
        n_extreme -= 1
    return balls


def _ball_stats(space: GaussianSpace, balls) -> list:
    stats = []
    for ball in balls:
        idx, w = ball_quadrature(space, ball.center_array, ball.radius)
        if idx.size == 0:
            raise ValueError(f"ball {ball} contains no grid cells; refine the grid")
        stats.append((idx, w, float(w.sum())))
    return stats


def _avg(flat: np.ndarray, idx, w, den) -> float:
    return float(np.dot(flat[idx], w)) / den


def apa_constant(w: Weight, p: float, balls) -> float:
    """Sampled A_{p,a}-type constant max_B avg(w) * avg(w^(1-p'))^(p-1).

    For p = 1 the dual factor is 1 / min(w) over the ball's nodes.  Always
    >= 1 by the discrete Jensen inequality; a lower bound of the true sup.
    """
    if not p >= 1.0:
        raise ValueError("p must be >= 1")
    space = w.space
    wf = w.flat
    stats = _ball_stats(space, balls)
    best = 0.0
    with np.errstate(over="ignore"):
        if p == 1.0:
            for idx, wq, den in stats:
                val = _avg(wf, idx, wq, den) / float(wf[idx].min())
                best = max(best, val)
        else:
            pp = p / (p - 1.0)
            dual = wf ** (1.0 - pp)
            for idx, wq, den in stats:
                val = _avg(wf, idx, wq, den) * _avg(dual, idx, wq, den) ** (p - 1.0)
                best = max(best, val)
    return best


def apqa_constant(w: Weight, p: float, q: float, balls) -> float:
    """Sampled two-exponent constant max_B (avg w^q)^(1/q) * (avg w^(-p'))^(1/p').

    p = 1 uses the essential-sup convention (avg w^q)^(1/q) / min(w).
    """
    if not p >= 1.0:
        raise ValueError("p must be >= 1")
    if not q > 1.0:
        raise ValueError("q must be > 1")
    space = w.space
    wf = w.flat
    stats = _ball_stats(space, balls)
    best = 0.0
    with np.errstate(over="ignore"):
        wq_pow = wf**q
        if p == 1.0:
            for idx, wq, den in stats:
                val = _avg(wq_pow, idx, wq, den) ** (1.0 / q) / float(wf[idx].min())
                best = max(best, val)
        else:
            pp = p / (p - 1.0)
            dual = wf ** (-pp)
            for idx, wq, den in stats:
                val = (_avg(wq_pow, idx, wq, den) ** (1.0 / q)
                       * _avg(dual, idx, wq, den) ** (1.0 / pp))
                best = max(best, val)
    return best


def multi_apa_constant(wv: WeightVector, balls) -> float:
    """Sampled multilinear weight constant, in the A_{p,a}-compatible scale.

    The defining per-ball product
    (avg prod w_j^(p/p_j))^(1/p) * prod_j (avg w_j^(1-p_j'))^(1/p_j')
    is reported raised to the p-th power, so that m = 1 collapses to
    ``apa_constant`` exactly (and the m = 1 case delegates to it so the
    two agree bit for bit on a shared sample).
    """
    if wv.m == 1:
        return apa_constant(wv.components[0], wv.exponents[0], balls)
    space = wv.space
    p = wv.p
    joint = wv.composite().flat
    stats = _ball_stats(space, balls)
    comps = []
    with np.errstate(over="ignore"):
        for wj, pj in zip(wv.components, wv.exponents):
            if pj == 1.0:
                comps.append((None, wj.flat))
            else:
                ppj = pj / (pj - 1.0)
                comps.append((wj.flat ** (1.0 - ppj), ppj))
        best = 0.0
        for idx, wq, den in stats:
            val = _avg(joint, idx, wq, den) ** (1.0 / p)
            for dual, extra in comps:
                if dual is None:
                    val /= float(extra[idx].min())
                else:
                    val *= _avg(dual, idx, wq, den) ** (1.0 / extra)
            best = max(best, val**p)
    return best


def joint_two_weight_constant(wv: WeightVector, nu: Weight, balls) -> float:
    """Sampled joint condition max_B (avg nu)^(1/p) prod_j (avg w_j^(1-p_j'))^(1/p_j').

    This is the two-weight hypothesis coupling nu with the vector; with
    nu equal to the composite weight it is the per-ball quantity behind
    the multilinear constant.
    """
    space = wv.space
    p = wv.p
    nf = nu.flat
    stats = _ball_stats(space, balls)
    best = 0.0
    with np.errstate(over="ignore"):
        duals = []
        for wj, pj in zip(wv.components, wv.exponents):
            if pj == 1.0:
                duals.append((None, wj.flat))
            else:
                ppj = pj / (pj - 1.0)
                duals.append((wj.flat ** (1.0 - ppj), ppj))
        for idx, wq, den in stats:
            val = _avg(nf, idx, wq, den) ** (1.0 / p)
            for dual, extra in duals:
                if dual is None:
                    val /= float(extra[idx].min())
                else:
                    val *= _avg(dual, idx, wq, den) ** (1.0 / extra)
            best = max(best, val)
    return best


def five_condition_ratio(nu: Weight, balls) -> float:
    """max over the sample of nu(5B) / nu(B) (the local doubling surrogate)."""
    space = nu.space
    nf = nu.flat
    best = 0.0
    for ball in balls:
        big = ball.dilate(5.0)
        if not space.ball_in_domain(big):
            raise BallOutsideDomain("5B leaves the domain; sample with fit_scale=5")
        idx, w = ball_quadrature(space, ball.center_array, ball.radius)
        idx5, w5 = ball_quadrature(space, big.center_array, big.radius)
        best = max(best, float(np.dot(nf[idx5], w5)) / float(np.dot(nf[idx], w)))
    return best


def reverse_holder_check(w: Weight, p_j: float, r: float, balls) -> float:
    """max over the sample of (avg w^(-r/(p_j-1)))^(1/r) / avg w^(-1/(p_j-1)).

    Finiteness (stability under sample growth) of this max is the
    empirical reverse-Holder certificate for the dual weight.
    """
    if not p_j > 1.0:
        raise ValueError("p_j must be > 1")
    if not r >= 1.0:
        raise ValueError("r must be >= 1")
    space = w.space
    wf = w.flat
    with np.errstate(over="ignore"):
        lhs_pow = wf ** (-r / (p_j - 1.0))
        rhs_pow = wf ** (-1.0 / (p_j - 1.0))
        best = 0.0
        for idx, wq, den in _ball_stats(space, balls):
            lhs = _avg(lhs_pow, idx, wq, den) ** (1.0 / r)
            rhs = _avg(rhs_pow, idx, wq, den)
            best = max(best, lhs / rhs)
    return best


_EPS_GRID_DEPTH = 10


def epsilon_finder(params: FractionalParams, w: Weight, balls,
                   cap_factor: float = 10.0) -> FractionalParams:
    """Largest dyadic epsilon in {beta/2, ..., beta/2^10} passing all conditions.

    Conditions: (i) eps < beta < beta + eps < 1, (ii) 1/p > beta + eps and
    1/q < 1 - eps, (iii) the shifted two-exponent constants of w^(s') at
    (p/s', q_eps/s') and (p/s', q_eps_tilde/s') stay below
    ``cap_factor`` times the unshifted constant on the same sample.
    Raises NoEpsilonFound when the grid is exhausted, which numerically
    signals that the sample contradicts the finiteness hypotheses.
    """
    beta, p = params.beta, params.p
    if params.q is None:
        raise ExponentMismatch("params must determine q (need 1/p > beta)")
    q = params.q
    sp = params.s_prime if params.s_prime is not None else 1.0
    if not (1.0 < p / sp < 1.0 / beta):
        raise ValueError("need 1 < p/s' < 1/beta for the epsilon scan")
    wsp = w.power(sp) if sp != 1.0 else w
    base = apqa_constant(wsp, p / sp, q / sp, balls) if q / sp > 1.0 else math.inf
    cap = cap_factor * base
    for depth in range(1, _EPS_GRID_DEPTH + 1):
        eps = beta / (2.0**depth)
        if not (eps < beta < beta + eps < 1.0):
            continue
        if not (1.0 / p > beta + eps and 1.0 / q < 1.0 - eps):
            continue
        q_eps = 1.0 / (1.0 / p - beta - eps)
        q_til = 1.0 / (1.0 / p - beta + eps)
        if q_eps / sp <= 1.0 or q_til / sp <= 1.0:
            continue
        if not np.isfinite(base):
            continue
        c1 = apqa_constant(wsp, p / sp, q_eps / sp, balls)
        c2 = apqa_constant(wsp, p / sp, q_til / sp, balls)
        if np.isfinite(c1) and np.isfinite(c2) and c1 <= cap and c2 <= cap:
            return params.with_epsilon(eps)
    raise NoEpsilonFound(
        f"no epsilon in beta/2..beta/2^{_EPS_GRID_DEPTH} satisfies the class conditions"
    )


@dataclass
class WeightClassCrosscheck:
    """Joint report of the multilinear constant and its m+1 linear companions."""

    multilinear_constant: float
    linear_constants: dict
    cap: float
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.flags:
            self.flags = {
                name: ("FINITE" if np.isfinite(v) and v <= self.cap else "LARGE")
                for name, v in {"joint": self.multilinear_constant,
                                **self.linear_constants}.items()
            }

    @property
    def all_finite(self) -> bool:
        return all(flag == "FINITE" for flag in self.flags.values())


def theorem_crosscheck(wv: WeightVector, balls, cap: float = 100.0) -> WeightClassCrosscheck:
    """Evidence check: the multilinear constant against its linear factorization.

    Computes the joint constant plus apa_constant(w_j^(1-p_j'), m p_j')
    for each component (with w_j^(1/m) in the p_j = 1 convention) and
    apa_constant(composite, m p), flagging each FINITE/LARGE at the cap.
    Co-finiteness (or co-blow-up) across the shared sample is the
    numerical shadow of the classical factorization theorem.
    """
    m = wv.m
    joint = multi_apa_constant(wv, balls)
    linear: dict[str, float] = {}
    for j, (wj, pj) in enumerate(zip(wv.components, wv.exponents), start=1):
        if pj == 1.0:
            linear[f"component_{j}"] = apa_constant(wj.power(1.0 / m), 1.0, balls)
        else:
            ppj = pj / (pj - 1.0)
            linear[f"component_{j}"] = apa_constant(wj.power(1.0 - ppj), m * ppj, balls)
    linear["composite"] = apa_constant(wv.composite(), m * wv.p, balls)
    return WeightClassCrosscheck(joint, linear, cap)
