"""Dimension-dependent constants and the Coulomb kernel in R^d."""

from __future__ import annotations

import enum
import math

import numpy as np


class KernelKind(enum.Enum):
    LOG = "log"
    NEWTONIAN = "newtonian"


def check_dimension(d: int) -> int:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def kernel_kind(d: int) -> KernelKind:
    return KernelKind.LOG if check_dimension(d) == 2 else KernelKind.NEWTONIAN


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^{d-1} in R^d.

    ``sphere_area(1) == 2`` counts the two points of S^0, which is what the
    zonal reduction of surface integrals needs for d = 2.
    """
    if d < 1:
        raise ValueError("sphere_area needs d >= 1")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def sphere_energy(d: int) -> float:
    """Energy W(S^d) of the unit sphere S^d in R^{d+1} for the kernel 1/|x|^{d-2}."""
    check_dimension(d)
    return 4.0 * sphere_area(d) / (d * sphere_area(d + 1))


def sphere_energy_gamma(d: int) -> float:
    """Same quantity as :func:`sphere_energy`, through the Gamma-function ratio."""
    check_dimension(d)
    return 2.0 / math.sqrt(math.pi) * math.exp(
        math.lgamma((d + 1) / 2.0) - math.lgamma(d / 2.0 + 1.0)
    )


def kernel(d: int, r):
    """Coulomb kernel: ``-log r`` for d = 2 and ``r**(2-d)`` for d >= 3.

    Accepts scalars or arrays. Non-positive distances raise ``ValueError``;
    coincident points have to be excluded by the caller.
    """
    d = check_dimension(d)
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("kernel is only defined for r > 0")
    out = -np.log(arr) if d == 2 else arr ** (2.0 - d)
    return float(out) if out.ndim == 0 else out


def kernel_scalar(d: int, r: float) -> float:
    # hot path for quadrature integrands, no validation
    return -math.log(r) if d == 2 else r ** (2.0 - d)
