"""Adaptive Dormand-Prince 5(4) integrator for scalar ODEs with dense output."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import IntegrationFailure

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
# continuous extension (Shampine)
D1, D3, D4 = -12715105075 / 11282082432, 87487479700 / 32700410799, -10690763975 / 1880347072
D5, D6, D7 = 701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423


class OutOfDomain(Exception):
    """Raised by a right-hand side evaluated outside its domain; the step is retried smaller."""


@dataclass
class _Segment:
    t: float
    h: float
    r: tuple[float, float, float, float, float]

    def __call__(self, t: float) -> float:
        th = (t - self.t) / self.h
        r1, r2, r3, r4, r5 = self.r
        return r1 + th * (r2 + (1 - th) * (r3 + th * (r4 + (1 - th) * r5)))


@dataclass
class Solution:
    t: float
    y: float
    steps: int
    rejected: int
    max_error: float
    segments: list[_Segment] = field(default_factory=list, repr=False)

    def __call__(self, t: float) -> float:
        """Dense-output value at t within the integrated range."""
        if not self.segments:
            return self.y
        starts = [s.t for s in self.segments]
        k = max(0, bisect.bisect_right(starts, t) - 1)
        return self.segments[k](t)


def dopri5(
    f: Callable[[float, float], float],
    t0: float,
    y0: float,
    t1: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    h0: float | None = None,
    max_steps: int = 100_000,
    dense: bool = False,
) -> Solution:
    """Integrate y' = f(t, y) from t0 to t1 > t0.

    f may raise OutOfDomain; the offending step is rejected and retried with
    a quarter of the step size.  IntegrationFailure carries the last accepted
    state when the step size underflows.
    """
    t, y = float(t0), float(y0)
    span = t1 - t0
    if span < 0:
        raise ValueError("dopri5 integrates forward only")
    sol = Solution(t, y, 0, 0, 0.0)
    if span == 0:
        return sol
    k1 = f(t, y)
    h = h0 if h0 is not None else span * 1e-3
    h_min = 1e-14 * max(abs(t0), abs(t1))
    while t < t1:
        if sol.steps + sol.rejected >= max_steps:
            raise IntegrationFailure(f"step budget exhausted at t={t}", t, y)
        h = min(h, t1 - t)
        if h <= h_min and t1 - t > h_min:
            raise IntegrationFailure(f"step size underflow at t={t}, y={y}", t, y)
        try:
            k2 = f(t + C2 * h, y + h * A21 * k1)
            k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2))
            k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))
            k5 = f(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
            k6 = f(t + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
            y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
            k7 = f(t + h, y_new)
        except OutOfDomain:
            sol.rejected += 1
            h *= 0.25
            continue
        err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        scale = atol + rtol * max(abs(y), abs(y_new))
        ratio = abs(err) / scale
        if not math.isfinite(ratio):
            sol.rejected += 1
            h *= 0.25
            continue
        if ratio <= 1.0:
            if dense:
                dy = y_new - y
                bspl = h * k1 - dy
                r5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7)
                sol.segments.append(_Segment(t, h, (y, dy, bspl, dy - h * k7 - bspl, r5)))
            t = t1 if t1 - (t + h) <= h_min else t + h
            y = y_new
            k1 = k7
            sol.steps += 1
            sol.max_error = max(sol.max_error, abs(err))
            factor = 5.0 if ratio == 0 else min(5.0, max(0.2, 0.9 * ratio ** -0.2))
        else:
            sol.rejected += 1
            factor = max(0.2, 0.9 * ratio ** -0.2)
        h *= factor
    sol.t, sol.y = t, y
    return sol
