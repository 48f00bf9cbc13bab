"""Pricing oracle P = u_A / u_B, its partial derivatives, and the pooling condition."""

from __future__ import annotations

from dataclasses import dataclass

from ._jet import Jet
from .models import AmmModel, Reserves


@dataclass(frozen=True)
class OraclePoint:
    price: float
    p_a: float
    p_b: float
    p_aa: float
    p_ab: float
    p_bb: float
    source: str = "analytic"

    def sign_scale(self) -> float:
        return max(1.0, abs(self.price), abs(self.p_a), abs(self.p_b))


def price_jet(model: AmmModel, r) -> Jet:
    """Jet of P around r, exact through second order."""
    a, b = Reserves.of(r)
    uj = model.jet(a, b)
    return uj.d_dx() / uj.d_dy()


def price(model: AmmModel, r) -> float:
    """Units of B per marginal unit of A at reserves r."""
    a, b = Reserves.of(r)
    p = model.price_formula(a, b)
    if p is None:
        return price_jet(model, (a, b)).value
    return float(p)


def price_partials(model: AmmModel, r) -> tuple[float, float]:
    pj = price_jet(model, r)
    return pj.partial(1, 0), pj.partial(0, 1)


def price_second_partials(model: AmmModel, r) -> tuple[float, float, float]:
    pj = price_jet(model, r)
    return pj.partial(2, 0), pj.partial(1, 1), pj.partial(0, 2)


def oracle_point(model: AmmModel, r) -> OraclePoint:
    pj = price_jet(model, r)
    return OraclePoint(
        price=price(model, r),
        p_a=pj.partial(1, 0),
        p_b=pj.partial(0, 1),
        p_aa=pj.partial(2, 0),
        p_ab=pj.partial(1, 1),
        p_bb=pj.partial(0, 2),
        source=model.derivative_source,
    )


def _condition_terms(pt: OraclePoint) -> tuple[float, float, float]:
    return (
        pt.p_b * pt.p_aa,
        -(pt.price * pt.p_b + pt.p_a) * pt.p_ab,
        pt.price * pt.p_a * pt.p_bb,
    )


def liquidity_condition(model: AmmModel, r) -> float:
    """P_B P_AA - (P P_B + P_A) P_AB + P P_A P_BB.

    Nonnegative everywhere is sufficient for price-preserving pooling to
    deepen the pool in both directions.
    """
    return sum(_condition_terms(oracle_point(model, r)))


def liquidity_condition_scale(model: AmmModel, r) -> float:
    """Rounding scale of liquidity_condition.

    The summed magnitude of its terms, floored by their dimensional size
    P^2/(a^2 b) + P^3/(a b^2) so that a constant price (all partials pure
    roundoff) is not read as a sign.
    """
    a, b = Reserves.of(r)
    pt = oracle_point(model, (a, b))
    p = abs(pt.price)
    natural = p * p / (a * a * b) + p**3 / (a * b * b)
    return max(1e-300, natural, sum(abs(t) for t in _condition_terms(pt)))
