"""Adaptive Gauss-Kronrod quadrature with explicit handling of infinite ends."""

from __future__ import annotations

import math
import warnings

from scipy import integrate

EPSABS = 1e-14
EPSREL = 1e-12


class QuadratureError(RuntimeError):
    """Quadrature did not converge; ``estimate`` holds the best value found."""

    def __init__(self, msg: str, estimate: float, error: float):
        super().__init__(f"{msg} (estimate={estimate!r}, abserr={error!r})")
        self.estimate = estimate
        self.error = error


def integrate_interval(f, a: float, b: float, *, scale: float = 1.0,
                       epsabs: float = EPSABS, epsrel: float = EPSREL,
                       limit: int = 400, points=None) -> float:
    """Integrate ``f`` over ``[a, b]``; ``b`` may be ``math.inf``.

    A semi-infinite range is mapped to ``[0, 1)`` by
    ``r = a + scale * t / (1 - t)``.
    """
    if b <= a:
        return 0.0
    if math.isinf(b):
        def g(t):
            if t >= 1.0:
                return 0.0
            u = 1.0 - t
            return f(a + scale * t / u) * scale / (u * u)

        lo, hi = 0.0, 1.0
        func = g
        if points is not None:
            points = [(p - a) / (scale + p - a) for p in points if a < p]
    else:
        lo, hi, func = a, b, f
        if points is not None:
            points = [p for p in points if a < p < b]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, _info, *msg = integrate.quad(
            func, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit,
            full_output=1, points=points or None,
        )
    # a message is only returned when QUADPACK flags a problem
    if msg and err > 1e3 * max(epsabs, epsrel * abs(val)):
        raise QuadratureError(msg[0].strip().splitlines()[0], val, err)
    return val
