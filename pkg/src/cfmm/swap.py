"""Fee-less swaps by utility indifference, round trips, and price-preserving pooling."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import AxiomViolation, DomainError, InfeasiblePooling
from .models import AmmModel, Reserves, utility
from .oracle import price

MAX_BISECTIONS = 200
REL_TOL = 1e-12


@dataclass(frozen=True)
class SwapQuote:
    input_amount: float
    output_amount: float
    post_reserves: Reserves
    avg_price: float | None
    exhausts_reserve: bool = False
    direction: str = "AtoB"


@dataclass(frozen=True)
class PoolingPlan:
    delta_a: float
    delta_b: float
    price_before: float
    price_after: float
    rule: str = "proportional"


def _amount(v, name="amount") -> float:
    v = float(v)
    if math.isnan(v):
        raise DomainError(f"{name} must not be NaN")
    if v < 0:
        raise DomainError(f"{name} must be >= 0, got {v}")
    if math.isinf(v):
        raise DomainError(f"{name} must be finite")
    return v


def _indifference(f, cap: float) -> tuple[float, bool]:
    """Largest t in [0, cap] with f(t) >= 0 for f decreasing in t, f(0) >= 0.

    Returns (t, hit_cap).
    """
    f0 = f(0.0)
    fc = f(cap)
    if f0 < 0:
        raise AxiomViolation("utility decreased after adding to the pool", "SM", witness=(0.0, f0))
    if fc == f0:
        raise AxiomViolation("utility is flat along the swap path", "SM", witness=(cap, fc))
    if fc >= 0:
        return cap, True
    if f0 == 0:
        return 0.0, False
    lo, hi = 0.0, cap
    flo, fhi = f0, fc
    tol = REL_TOL * cap
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm >= 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    # secant polish inside the final bracket
    if math.isfinite(fhi) and flo - fhi > 0:
        t = lo + (hi - lo) * flo / (flo - fhi)
        if lo <= t <= hi:
            ft = f(t)
            if ft >= 0 or abs(ft) <= abs(flo):
                return t, False
    return lo, False


def _swap_y_raw(model: AmmModel, x: float, a: float, b: float) -> tuple[float, bool]:
    u0 = utility(model, (a, b))
    return _indifference(lambda y: utility(model, (a + x, max(b - y, 0.0))) - u0, b)


def _swap_x_raw(model: AmmModel, y: float, a: float, b: float) -> tuple[float, bool]:
    u0 = utility(model, (a, b))
    return _indifference(lambda x: utility(model, (max(a - x, 0.0), b + y)) - u0, a)


def swap_y(model: AmmModel, x: float, r) -> SwapQuote:
    """Sell x units of A to the pool; the quote's output is the B paid out."""
    x = _amount(x)
    a, b = Reserves.of(r)
    y, exhausted = _swap_y_raw(model, x, a, b)
    return SwapQuote(
        input_amount=x,
        output_amount=y,
        post_reserves=Reserves(a + x, b - y),
        avg_price=y / x if x > 0 else None,
        exhausts_reserve=exhausted,
        direction="AtoB",
    )


def swap_x(model: AmmModel, y: float, r) -> SwapQuote:
    """Sell y units of B to the pool; the quote's output is the A paid out."""
    y = _amount(y)
    a, b = Reserves.of(r)
    x, exhausted = _swap_x_raw(model, y, a, b)
    return SwapQuote(
        input_amount=y,
        output_amount=x,
        post_reserves=Reserves(a - x, b + y),
        avg_price=x / y if y > 0 else None,
        exhausts_reserve=exhausted,
        direction="BtoA",
    )


def round_trip(model: AmmModel, x: float, r) -> float:
    """A recovered after selling x of A for B and immediately selling that B back."""
    x = _amount(x)
    a, b = Reserves.of(r)
    y, _ = _swap_y_raw(model, x, a, b)
    back, _ = _swap_x_raw(model, y, a + x, b - y)
    return back


def round_trip_b(model: AmmModel, y: float, r) -> float:
    """Mirror of round_trip starting from asset B."""
    y = _amount(y)
    a, b = Reserves.of(r)
    x, _ = _swap_x_raw(model, y, a, b)
    back, _ = _swap_y_raw(model, x, a - x, b + y)
    return back


def _solve_injection(g, scale: float) -> float | None:
    """Root of the nondecreasing gap g on [0, inf), or None if g stays negative."""
    hi = scale
    for _ in range(200):
        if g(hi) >= 0:
            return brentq(g, 0.0, hi, xtol=1e-300, rtol=4 * 2.220446049250313e-16, maxiter=500)
        hi *= 2.0
    return None


def pool_deposit(model: AmmModel, r, delta_a: float) -> PoolingPlan:
    """B to inject alongside delta_a of A so the oracle price is unchanged."""
    alpha = _amount(delta_a, "delta_a")
    a, b = Reserves.of(r)
    p0 = price(model, (a, b))
    if model.satisfies("SI") or alpha == 0:
        beta = b / a * alpha
        rule = "proportional"
    else:
        lo_price = price(model, (a + alpha, b))

        def gap(beta):
            return price(model, (a + alpha, b + beta)) - p0

        beta = 0.0 if lo_price >= p0 else _solve_injection(gap, max(b, alpha * b / a))
        if beta is None:
            hi_price = price(model, (a + alpha, b * 2.0**200))
            raise InfeasiblePooling(
                f"no B injection restores price {p0:.12g}; reachable prices lie in "
                f"[{lo_price:.12g}, {hi_price:.12g}]",
                (lo_price, hi_price),
            )
        rule = "solved"
    return PoolingPlan(alpha, beta, p0, price(model, (a + alpha, b + beta)), rule)


def pool_deposit_b(model: AmmModel, r, delta_b: float) -> PoolingPlan:
    """A to inject alongside delta_b of B so the oracle price is unchanged."""
    beta = _amount(delta_b, "delta_b")
    a, b = Reserves.of(r)
    p0 = price(model, (a, b))
    if model.satisfies("SI") or beta == 0:
        alpha = a / b * beta
        rule = "proportional"
    else:
        hi_price = price(model, (a, b + beta))

        # 1/P is nondecreasing in a, so the mirrored problem has the same shape
        def gap(alpha):
            return 1.0 / price(model, (a + alpha, b + beta)) - 1.0 / p0

        alpha = 0.0 if hi_price <= p0 else _solve_injection(gap, max(a, beta * a / b))
        if alpha is None:
            lo_price = price(model, (a * 2.0**200, b + beta))
            raise InfeasiblePooling(
                f"no A injection restores price {p0:.12g}; reachable prices lie in "
                f"[{lo_price:.12g}, {hi_price:.12g}]",
                (lo_price, hi_price),
            )
        rule = "solved"
    return PoolingPlan(alpha, beta, p0, price(model, (a + alpha, b + beta)), rule)
