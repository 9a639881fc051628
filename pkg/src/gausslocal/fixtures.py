"""Named test-function, weight and kernel fixtures used by experiments.

Everything is declared analytically so a fixture can be rebuilt at any
grid resolution; refinement batteries rely on that.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import GaussianSpace
from .gridfn import GridFunction
from .operators import SphereKernel
from .weights import Weight, constant_weight, lebesgue_flattening_weight, power_weight

__all__ = [
    "build_function",
    "build_weight",
    "build_kernel",
    "standard_function_battery",
    "FUNCTION_NAMES",
    "KERNEL_NAMES",
]


def _dist(points: np.ndarray, center) -> np.ndarray:
    c = np.atleast_1d(np.asarray(center, dtype=float))
    return np.linalg.norm(points - c[None, :], axis=1)


def _constant(points, level=1.0):
    return np.full(points.shape[0], float(level))


def _indicator(points, center=0.0, radius=0.25, level=1.0):
    return np.where(_dist(points, center) < radius, float(level), 0.0)


def _bump(points, center=0.0, width=0.5, height=1.0):
    r = _dist(points, center)
    out = height * np.exp(-((r / width) ** 2))
    out[r >= 3.0 * width] = 0.0  # compact support
    return out


def _two_plateau(points, center=0.0, r1=0.3, v1=2.0, r2=0.8, v2=0.5):
    r = _dist(points, center)
    out = np.zeros(points.shape[0])
    out[r < r2] = v2
    out[r < r1] = v1
    return out


def _cusp(points, center=0.5, alpha=0.4, cap=4.0, radius=1.0):
    r = _dist(points, center)
    with np.errstate(divide="ignore"):
        vals = np.where(r > 0.0, r**(-alpha), np.inf)
    out = np.minimum(vals, cap)
    out[r >= radius] = 0.0
    return out


_FUNCTIONS = {
    "constant": _constant,
    "indicator": _indicator,
    "bump": _bump,
    "two_plateau": _two_plateau,
    "cusp": _cusp,
}

FUNCTION_NAMES = tuple(sorted(_FUNCTIONS))


def build_function(space: GaussianSpace, name: str, **params) -> GridFunction:
    if name not in _FUNCTIONS:
        raise KeyError(f"unknown function fixture {name!r}; have {FUNCTION_NAMES}")
    fn = _FUNCTIONS[name]
    return GridFunction.from_callable(space, lambda pts: fn(pts, **params))


def standard_function_battery(space: GaussianSpace) -> dict:
    """The five stock fixtures used by the oracle-agreement suites."""
    return {
        "constant": build_function(space, "constant", level=1.0),
        "indicator_origin": build_function(space, "indicator", center=[0.0] * space.d,
                                           radius=0.25),
        "indicator_offset": build_function(space, "indicator", center=[0.6] + [0.0] * (space.d - 1),
                                           radius=0.2, level=1.5),
        "bump": build_function(space, "bump", center=[-0.4] + [0.0] * (space.d - 1), width=0.5),
        "two_plateau": build_function(space, "two_plateau", center=[0.2] + [0.0] * (space.d - 1)),
    }


def calibration_battery(space: GaussianSpace) -> dict:
    """Fixtures used to fit frozen constants.

    Each family appears at both a wide and a narrow feature scale, so a
    constant frozen here bounds held-out parameter choices that sit
    inside the calibrated scale range.
    """
    d = space.d
    pad = [0.0] * (d - 1)
    return {
        "constant": build_function(space, "constant", level=1.0),
        "indicator_a": build_function(space, "indicator", center=[0.0] + pad, radius=0.25),
        "indicator_b": build_function(space, "indicator", center=[-0.6] + pad,
                                      radius=0.3, level=2.0),
        "indicator_narrow": build_function(space, "indicator", center=[0.45] + pad,
                                           radius=0.18),
        "bump": build_function(space, "bump", center=[-0.4] + pad, width=0.5),
        "bump_narrow": build_function(space, "bump", center=[0.7] + pad, width=0.25),
        "plateau": build_function(space, "two_plateau", center=[0.2] + pad),
        "plateau_narrow": build_function(space, "two_plateau", center=[-0.55] + pad,
                                         r1=0.2, v1=1.8, r2=0.55, v2=0.3),
        "cusp": build_function(space, "cusp", center=[-0.5] + pad, alpha=0.4),
    }


def holdout_battery(space: GaussianSpace) -> dict:
    """Disjoint fixtures for transfer tests: same families, different parameters."""
    d = space.d
    pad = [0.0] * (d - 1)
    return {
        "indicator_c": build_function(space, "indicator", center=[0.6] + pad,
                                      radius=0.2, level=1.5),
        "bump_b": build_function(space, "bump", center=[0.8] + pad, width=0.35),
        "plateau_b": build_function(space, "two_plateau", center=[-0.3] + pad,
                                    r1=0.25, v1=1.6, r2=0.7, v2=0.4),
        "cusp_b": build_function(space, "cusp", center=[0.5] + pad, alpha=0.3, cap=3.0),
    }


def build_weight(space: GaussianSpace, label: str, alpha: float | None = None,
                 delta: float = 0.01, level: float = 1.0) -> Weight:
    """Weight fixture from a config declaration (label plus parameters)."""
    if label == "const":
        return constant_weight(space, level)
    if label == "flatten":
        return lebesgue_flattening_weight(space)
    if alpha is None:
        raise KeyError(f"weight fixture {label!r} needs a power exponent alpha")
    return power_weight(space, alpha, delta=delta, label=label)


def _cos2(phi):
    return np.cos(phi) ** 2


def _two_lobe(phi):
    return 1.0 + 0.5 * np.sin(2.0 * phi)


def build_kernel(d: int, name: str, s: float = 2.0, n_angles: int = 720) -> SphereKernel:
    if d == 1:
        table = {
            "unit": (1.0, 1.0),
            "half": (2.0, 0.0),
            "signed": (1.0, -1.0),
            "skew": (1.5, 0.5),
        }
        if name not in table:
            raise KeyError(f"unknown d=1 kernel {name!r}; have {sorted(table)}")
        return SphereKernel(1, table[name], s)
    if d == 2:
        if name == "unit":
            return SphereKernel.constant(2, 1.0, s, n_angles)
        if name == "cos2":
            return SphereKernel.from_angle_function(_cos2, n_angles, s)
        if name == "two_lobe":
            return SphereKernel.from_angle_function(_two_lobe, n_angles, s)
        raise KeyError(f"unknown d=2 kernel {name!r}; have ['cos2', 'two_lobe', 'unit']")
    raise ValueError("kernels exist for d in {1, 2}")


KERNEL_NAMES = {1: ("unit", "half", "signed", "skew"), 2: ("unit", "cos2", "two_lobe")}
