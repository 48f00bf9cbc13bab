"""Divergence (impermanent) loss after a single price-moving trade, and the fee-driven gain interval."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, IntegrationFailure, UnreachablePrice
from .fees import FeeLevel, swap_x_fee, swap_y_fee
from .models import AmmModel, Reserves, UniswapV2
from .oracle import price
from .swap import pool_deposit, pool_deposit_b

PRICE_PRESERVATION_TOL = 1e-9
PRICE_RTOL = 1e-10
# the generic gain-interval search stops once the post-trade price has moved by this factor
SEARCH_PRICE_FACTOR = 1e3
SEARCH_SAMPLES = 400


@dataclass(frozen=True)
class DivergenceSetup:
    model: AmmModel
    gamma: float
    base: Reserves
    alpha: float
    beta: float
    delta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "gamma", FeeLevel.of(self.gamma).gamma)
        object.__setattr__(self, "base", Reserves.of(self.base))
        if self.alpha < 0 or self.beta < 0 or (self.alpha == 0 and self.beta == 0):
            raise DomainError("injection must be nonnegative and not both zero")
        p0 = price(self.model, self.base)
        p1 = price(self.model, self.pooled)
        if abs(p1 - p0) > PRICE_PRESERVATION_TOL * p0:
            raise DomainError(
                f"injection ({self.alpha:.12g}, {self.beta:.12g}) moves the price from {p0:.12g} to {p1:.12g}"
            )

    @classmethod
    def from_delta(cls, model: AmmModel, gamma, r, delta: float) -> DivergenceSetup:
        """Proportional injection (delta*a, delta*b); price-preserving for scale-invariant models."""
        a, b = Reserves.of(r)
        if not delta > 0:
            raise DomainError(f"delta must be > 0, got {delta}")
        return cls(model, gamma, Reserves(a, b), delta * a, delta * b, delta)

    @classmethod
    def from_deposit_a(cls, model: AmmModel, gamma, r, alpha: float) -> DivergenceSetup:
        plan = pool_deposit(model, r, alpha)
        return cls(model, gamma, r, plan.delta_a, plan.delta_b, _ratio(r, plan.delta_a, plan.delta_b))

    @classmethod
    def from_deposit_b(cls, model: AmmModel, gamma, r, beta: float) -> DivergenceSetup:
        plan = pool_deposit_b(model, r, beta)
        return cls(model, gamma, r, plan.delta_a, plan.delta_b, _ratio(r, plan.delta_a, plan.delta_b))

    @property
    def pooled(self) -> Reserves:
        return Reserves(self.base.a + self.alpha, self.base.b + self.beta)

    @property
    def initial_price(self) -> float:
        return price(self.model, self.base)

    @property
    def holder_share(self) -> float:
        """Fraction of the pooled portfolio, at the initial price, owned by the injector."""
        p0 = self.initial_price
        A, B = self.pooled
        return (p0 * self.alpha + self.beta) / (p0 * A + B)


def _ratio(r, alpha, beta) -> float | None:
    a, b = Reserves.of(r)
    if a > 0 and abs(alpha / a - beta / b) <= 1e-12 * max(alpha / a, beta / b):
        return alpha / a
    return None


@dataclass(frozen=True)
class TradeOutcome:
    z: float
    price: float
    post_reserves: Reserves
    swap_output: float


def trade(setup: DivergenceSetup, z: float) -> TradeOutcome:
    """Apply the signed trade z to the pooled reserves: z > 0 sells z of A, z < 0 sells -z of B."""
    A, B = setup.pooled
    if z > 0:
        res = swap_y_fee(setup.model, setup.gamma, z, (A, B))
    elif z < 0:
        res = swap_x_fee(setup.model, setup.gamma, -z, (A, B))
    else:
        return TradeOutcome(0.0, setup.initial_price, Reserves(A, B), 0.0)
    post = res.post_reserves
    if post.a <= 0 or post.b <= 0:
        raise DomainError(f"trade z={z:.12g} drains the pool")
    return TradeOutcome(z, price(setup.model, post), post, res.output)


def _loss(setup: DivergenceSetup, p: float, post: Reserves) -> float:
    held = p * setup.alpha + setup.beta
    return held - setup.holder_share * (p * post.a + post.b)


def divergence_at_trade(setup: DivergenceSetup, z: float) -> float:
    """Held-minus-pooled value after the trade z, marked at the post-trade price."""
    if z == 0:
        return 0.0
    t = trade(setup, z)
    return _loss(setup, t.price, t.post_reserves)


def simplified_divergence(setup: DivergenceSetup, z: float) -> float:
    """delta/(1+delta) times the trader's surplus at the post-trade price (proportional injections only)."""
    if setup.delta is None:
        raise DomainError("the simplified form needs a proportional injection")
    if z == 0:
        return 0.0
    t = trade(setup, z)
    k = setup.delta / (1.0 + setup.delta)
    if z > 0:
        return k * (t.swap_output - t.price * z)
    return k * (t.price * t.swap_output + z)


def _post_price(setup: DivergenceSetup, z: float) -> float:
    try:
        return trade(setup, z).price
    except (DomainError, IntegrationFailure):
        return 0.0 if z > 0 else math.inf


def _bracket(setup: DivergenceSetup, sign: int, reached) -> float | None:
    """Smallest |z| in a doubling sequence, signed, for which reached(price) holds."""
    A, B = setup.pooled
    step = 1e-3 * (A if sign > 0 else B)
    for _ in range(200):
        z = sign * step
        if reached(_post_price(setup, z)):
            return z
        step *= 2.0
    return None


def solve_trade_for_price(setup: DivergenceSetup, p: float) -> float:
    """Signed trade whose post-trade oracle price is p (z > 0 for p below the initial price)."""
    p = float(p)
    if not (p > 0 and math.isfinite(p)):
        raise DomainError(f"target price must be positive and finite, got {p}")
    p0 = setup.initial_price
    if abs(p - p0) <= PRICE_RTOL * p0:
        return 0.0
    sign = 1 if p < p0 else -1
    edge = _bracket(setup, sign, (lambda q: q <= p) if sign > 0 else (lambda q: q >= p))
    if edge is None:
        limit = _post_price(setup, sign * 2.0**150 * max(setup.pooled))
        raise UnreachablePrice(
            f"price {p:.12g} is not reachable from {p0:.12g}; the oracle only reaches "
            f"{'down' if sign > 0 else 'up'} to about {limit:.12g}"
        )

    def gap(z):
        return math.log(_post_price(setup, z) / p) if z != 0 else math.log(p0 / p)

    lo, hi = sorted((0.0, edge))
    z = brentq(gap, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=300)
    reached = _post_price(setup, z)
    if not abs(reached - p) <= PRICE_PRESERVATION_TOL * p:
        # the sign change came from draining the pool, not from the oracle
        raise UnreachablePrice(f"price {p:.12g} is not reachable from {p0:.12g} before the pool drains")
    return z


def divergence_at_price(setup: DivergenceSetup, p: float) -> float:
    return divergence_at_trade(setup, solve_trade_for_price(setup, p))


# constant-product closed forms


def constant_product_divergence(setup: DivergenceSetup, z: float) -> float:
    """Closed-form divergence for constant product with a proportional injection."""
    if not isinstance(setup.model, UniswapV2) or setup.delta is None:
        raise DomainError("closed form needs constant product and a proportional injection")
    g, d = setup.gamma, setup.delta
    A, B = setup.pooled
    b = setup.base.b
    if z >= 0:
        t = A / (A + z)
        return d * b * (1.0 - 2.0 * t ** (1.0 - g) + t ** (2.0 - g))
    s = (B - z) / B
    return d * b * (1.0 - 2.0 * s + s ** (2.0 - g))


def constant_product_thresholds(gamma: float) -> tuple[float, float]:
    """Scalar roots (t_low, t_high) bounding the constant-product gain region.

    t_low in (0, 1-gamma) solves 1 - 2t^(1-gamma) + t^(2-gamma) = 0 and
    t_high > 1 solves 1 - 2t + t^(2-gamma) = 0.
    """
    g = float(gamma)
    if not (0.0 < g < 1.0):
        raise DomainError(f"thresholds need a fee level in (0, 1), got {gamma}")
    e = 1.0 - g

    def low(t):
        return 1.0 - 2.0 * t**e + t ** (2.0 - g)

    def high(t):
        return 1.0 - 2.0 * t + t ** (2.0 - g)

    t_low = brentq(low, 0.0, e, xtol=1e-300, rtol=1e-15, maxiter=500)
    lo = (1.0 + g) ** (1.0 / e)
    hi = lo - high(lo) / (g * e)
    while high(hi) < 0:
        hi *= 2.0
    if high(lo) >= 0:
        lo = 1.0 + 1e-12
    t_high = brentq(high, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    return t_low, t_high


# gain interval


def _search_edges(setup: DivergenceSetup) -> tuple[float, float]:
    p0 = setup.initial_price
    z_hi = _bracket(setup, 1, lambda q: q <= p0 / SEARCH_PRICE_FACTOR)
    z_lo = _bracket(setup, -1, lambda q: q >= p0 * SEARCH_PRICE_FACTOR)
    A, B = setup.pooled
    if z_hi is None:
        z_hi = 1e6 * A
    if z_lo is None:
        z_lo = -1e6 * B
    return z_lo, z_hi


def _outer_crossing(setup: DivergenceSetup, sign: int, reach: float) -> float | None:
    """Outermost z on one side of 0 where the divergence turns from negative to nonnegative."""
    scale = abs(reach)
    grid = sign * np.geomspace(scale * 1e-9, scale, SEARCH_SAMPLES)
    values = []
    for z in grid:
        try:
            values.append(divergence_at_trade(setup, float(z)))
        except (DomainError, IntegrationFailure):
            break  # the trade drains the pool; the side ends here
    if not values:
        return None
    grid = grid[: len(values)]
    last = None
    for k in range(len(grid) - 1):
        if values[k] < 0 <= values[k + 1]:
            last = k
    if last is None:
        if all(v < 0 for v in values):
            return None
        # negative only at the innermost samples or nowhere: side ends at the origin
        return 0.0 if values[0] >= 0 else None
    return brentq(
        lambda z: divergence_at_trade(setup, z),
        float(grid[last]),
        float(grid[last + 1]),
        xtol=1e-300,
        rtol=1e-14,
        maxiter=300,
    )


@dataclass(frozen=True)
class GainInterval:
    p_low: float
    p_high: float
    z_at_p_low: float  # sells A, so positive
    z_at_p_high: float  # buys A, so negative
    method: str


def gain_interval(setup: DivergenceSetup, generic: bool = False) -> GainInterval | None:
    """Price interval around the initial price on which pooling beats holding.

    Constant product with a proportional injection uses the scalar-root
    construction unless generic=True; other models bracket the sign changes
    of the trade-parameterised divergence.
    """
    p0 = setup.initial_price
    if not generic and isinstance(setup.model, UniswapV2) and setup.delta is not None and 0 < setup.gamma < 1:
        g = setup.gamma
        t_low, t_high = constant_product_thresholds(g)
        A, B = setup.pooled
        return GainInterval(
            p0 * t_low ** (2.0 - g),
            p0 * t_high ** (2.0 - g),
            A * (1.0 - t_low) / t_low,
            -B * (t_high - 1.0),
            "closed-form",
        )
    z_lo, z_hi = _search_edges(setup)
    right = _outer_crossing(setup, 1, z_hi)
    left = _outer_crossing(setup, -1, z_lo)
    if right is None or left is None or (right == 0.0 and left == 0.0):
        return None
    p_low = trade(setup, right).price if right else p0
    p_high = trade(setup, left).price if left else p0
    return GainInterval(p_low, p_high, right, left, "bracketed")


# sampled curves


@dataclass
class DivergenceCurve:
    coordinate_kind: str
    samples: list[tuple[float, float]] = field(default_factory=list)
    gain: GainInterval | None = None

    def branch(self, coordinate: float, p0: float | None = None) -> str:
        if self.coordinate_kind == "trade":
            return "origin" if coordinate == 0 else ("sellA" if coordinate > 0 else "buyA")
        if coordinate == p0:
            return "origin"
        return "sellA" if coordinate < p0 else "buyA"

    def to_csv(self, p0: float | None = None, digits: int = 12) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["coordinate", "delta", "branch"])
        for c, d in self.samples:
            w.writerow([f"{c:.{digits}g}", f"{d:.{digits}g}", self.branch(c, p0)])
        return buf.getvalue()


def divergence_curve(setup: DivergenceSetup, zs, with_gain: bool = False) -> DivergenceCurve:
    zs = sorted(set(float(z) for z in zs) | {0.0})
    curve = DivergenceCurve("trade", [(z, divergence_at_trade(setup, z)) for z in zs])
    if with_gain and setup.gamma > 0:
        curve.gain = gain_interval(setup)
    return curve


def divergence_curve_prices(setup: DivergenceSetup, ps) -> DivergenceCurve:
    p0 = setup.initial_price
    ps = sorted(set(float(p) for p in ps) | {p0})
    return DivergenceCurve("price", [(p, divergence_at_price(setup, p) if p != p0 else 0.0) for p in ps])
