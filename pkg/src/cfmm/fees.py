"""Swaps with a fee charged on the marginal price, closed forms, and alternative fee rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, IntegrationFailure
from .models import AmmModel, Reserves, SinhSdamm, UniswapV2
from .ode import OutOfDomain, Solution, dopri5
from .oracle import price, price_jet
from .swap import _amount, _swap_x_raw, _swap_y_raw, swap_y

RTOL = 1e-10
ATOL_REL = 1e-12
# fraction of the counter-reserve the integrator may not cross
EXHAUSTION_MARGIN = 1e-13
# rate (relative to the opening rate) below which the output may saturate at the cap
SATURATION = 1e-6


@dataclass(frozen=True)
class FeeLevel:
    gamma: float

    def __post_init__(self):
        g = float(self.gamma)
        if not (0.0 <= g <= 1.0):
            raise DomainError(f"fee level must lie in [0, 1], got {self.gamma}")
        object.__setattr__(self, "gamma", g)

    @classmethod
    def of(cls, gamma) -> FeeLevel:
        return gamma if isinstance(gamma, FeeLevel) else cls(gamma)


@dataclass(frozen=True)
class FeeSwapResult:
    output: float
    post_reserves: Reserves
    steps: int = 0
    max_err: float = 0.0
    method: str = "ode"
    path: Solution | None = None

    def __call__(self, s: float) -> float:
        """Cumulative output after the first s units of input (dense ODE output)."""
        if self.path is None:
            raise ValueError("no dense path recorded; request dense=True")
        return self.path(s)


def _price_fn(model: AmmModel) -> Callable[[float, float], float]:
    def p(x, y):
        v = model.price_formula(x, y)
        if v is None:
            v = price_jet(model, (x, y)).value
        return float(v)

    return p


def _integrate(rhs, span: float, limit: float, dense: bool) -> Solution:
    """Integrate the cumulative output from 0 over [0, span], capped below limit.

    Past the cap the rate is evaluated at the cap.  If it has collapsed (the
    price drives the counter-reserve to zero only asymptotically) the output
    saturates there; otherwise the step is rejected and, eventually, the step
    size underflows into IntegrationFailure.
    """
    ceiling = limit * (1.0 - EXHAUSTION_MARGIN)
    floor_rate = SATURATION * abs(rhs(0.0, 0.0))

    def f(s, v):
        if v < ceiling:
            d = rhs(s, v)
        else:
            d = rhs(s, ceiling)
            if d > floor_rate:
                raise OutOfDomain
            d = 0.0
        if not math.isfinite(d):
            raise OutOfDomain
        return d

    try:
        sol = dopri5(f, 0.0, 0.0, span, rtol=RTOL, atol=ATOL_REL * limit, dense=dense)
    except IntegrationFailure as exc:
        raise IntegrationFailure(
            f"fee swap exhausts the counter-reserve near input {exc.s:.12g} "
            f"(output {exc.value:.12g} of {limit:.12g})",
            exc.s,
            exc.value,
        ) from None
    sol.y = min(sol.y, ceiling)
    return sol


def _check_method(method: str):
    if method not in ("auto", "ode"):
        raise ValueError(f"method must be 'auto' or 'ode', got {method!r}")


def swap_y_fee(model: AmmModel, gamma, x: float, r, method: str = "auto", dense: bool = False) -> FeeSwapResult:
    """B paid out for x of A when every marginal unit is priced at (1-gamma)P.

    method="ode" forces integration even at the fee-free boundary.
    """
    _check_method(method)
    g = FeeLevel.of(gamma).gamma
    x = _amount(x)
    a, b = Reserves.of(r)
    if g == 1.0 or x == 0.0:
        return FeeSwapResult(0.0, Reserves(a + x, b), method="closed-form")
    if g == 0.0 and method == "auto":
        y, _ = _swap_y_raw(model, x, a, b)
        return FeeSwapResult(y, Reserves(a + x, b - y), method="closed-form")
    p = _price_fn(model)
    sol = _integrate(lambda s, v: (1.0 - g) * p(a + s, b - v), x, b, dense)
    return FeeSwapResult(sol.y, Reserves(a + x, b - sol.y), sol.steps, sol.max_error, "ode", sol if dense else None)


def swap_x_fee(model: AmmModel, gamma, y: float, r, method: str = "auto", dense: bool = False) -> FeeSwapResult:
    """A paid out for y of B when every marginal unit is priced at P/(1-gamma)."""
    _check_method(method)
    g = FeeLevel.of(gamma).gamma
    y = _amount(y)
    a, b = Reserves.of(r)
    if g == 1.0 or y == 0.0:
        return FeeSwapResult(0.0, Reserves(a, b + y), method="closed-form")
    if g == 0.0 and method == "auto":
        x, _ = _swap_x_raw(model, y, a, b)
        return FeeSwapResult(x, Reserves(a - x, b + y), method="closed-form")
    p = _price_fn(model)
    sol = _integrate(lambda s, v: (1.0 - g) / p(a - v, b + s), y, a, dense)
    return FeeSwapResult(sol.y, Reserves(a - sol.y, b + y), sol.steps, sol.max_error, "ode", sol if dense else None)


def _logsinh(t: float) -> float:
    return t + math.log1p(-math.exp(-2.0 * t)) - math.log(2.0)


def _asinh_exp(L: float) -> float:
    """asinh(e^L) without overflow."""
    if L > 0:
        return L + math.log1p(math.sqrt(1.0 + math.exp(-2.0 * L)))
    return math.asinh(math.exp(L))


def _has_closed_form(model: AmmModel) -> bool:
    return isinstance(model, UniswapV2) or (isinstance(model, SinhSdamm) and model.q == 1.0)


def swap_y_fee_closed(model: AmmModel, gamma, x: float, r) -> FeeSwapResult | None:
    """Exact fee swap for constant product and the sinh SDAMM with q=1; None otherwise."""
    if not _has_closed_form(model):
        return None
    g = FeeLevel.of(gamma).gamma
    x = _amount(x)
    a, b = Reserves.of(r)
    e = 1.0 - g
    if isinstance(model, UniswapV2):
        y = -b * math.expm1(e * math.log(a / (a + x)))
    else:
        c = model.C
        L = e * (_logsinh(c * a) - _logsinh(c * (a + x))) + _logsinh(c * b)
        left = min(_asinh_exp(L) / c, b)
        return FeeSwapResult(b - left, Reserves(a + x, left), method="closed-form")
    y = min(max(y, 0.0), b)
    return FeeSwapResult(y, Reserves(a + x, b - y), method="closed-form")


def swap_x_fee_closed(model: AmmModel, gamma, y: float, r) -> FeeSwapResult | None:
    if not _has_closed_form(model):
        return None
    g = FeeLevel.of(gamma).gamma
    y = _amount(y)
    a, b = Reserves.of(r)
    e = 1.0 - g
    if isinstance(model, UniswapV2):
        x = -a * math.expm1(e * math.log(b / (b + y)))
    else:
        c = model.C
        L = _logsinh(c * a) + e * (_logsinh(c * b) - _logsinh(c * (b + y)))
        left = min(_asinh_exp(L) / c, a)
        return FeeSwapResult(a - left, Reserves(left, b + y), method="closed-form")
    x = min(max(x, 0.0), a)
    return FeeSwapResult(x, Reserves(a - x, b + y), method="closed-form")


def round_trip_fee(model: AmmModel, gamma, x: float, r, method: str = "auto") -> float:
    """A recovered after selling x of A and selling the proceeds straight back, both with fees."""
    first = swap_y_fee(model, gamma, x, r, method=method)
    if first.output == 0.0:
        return 0.0
    return swap_x_fee(model, gamma, first.output, first.post_reserves, method=method).output


def swap_fee_on_sold(model: AmmModel, gamma, x: float, r) -> float:
    """Fee withheld from the A sold: the pool swaps only (1-gamma)x and keeps the rest."""
    g = FeeLevel.of(gamma).gamma
    x = _amount(x)
    return swap_y(model, (1.0 - g) * x, r).output_amount


def swap_fee_on_bought(model: AmmModel, gamma, x: float, r) -> float:
    """Fee withheld from the B bought: the trader receives (1-gamma)Y(x)."""
    g = FeeLevel.of(gamma).gamma
    return (1.0 - g) * swap_y(model, x, r).output_amount


def split_sold(model: AmmModel, gamma, x1: float, x2: float, r) -> float:
    """Two consecutive sold-asset-fee trades; the fee stays in the pool as A."""
    a, b = Reserves.of(r)
    y1 = swap_fee_on_sold(model, gamma, x1, (a, b))
    return y1 + swap_fee_on_sold(model, gamma, x2, (a + x1, b - y1))


def split_bought(model: AmmModel, gamma, x1: float, x2: float, r) -> float:
    """Two consecutive bought-asset-fee trades; the withheld B stays in the pool."""
    g = FeeLevel.of(gamma).gamma
    a, b = Reserves.of(r)
    y1 = swap_fee_on_bought(model, g, x1, (a, b))
    return y1 + swap_fee_on_bought(model, g, x2, (a + x1, b - y1))


def bid_ask(model: AmmModel, gamma, r) -> tuple[float, float]:
    """(bid, ask) = ((1-gamma)P, P/(1-gamma)) for gamma strictly inside (0, 1)."""
    g = float(gamma.gamma if isinstance(gamma, FeeLevel) else gamma)
    if not (0.0 < g < 1.0):
        raise DomainError(f"bid/ask needs a fee level in (0, 1), got {gamma}")
    p = price(model, r)
    return (1.0 - g) * p, p / (1.0 - g)
