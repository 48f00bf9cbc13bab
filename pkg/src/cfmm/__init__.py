"""Axiomatic constant-function market makers: models, swaps, oracles, fees, divergence loss, axiom checks."""

from .axioms import AxiomReport, GridConfig, Verdict, check_all, check_axiom, reproduce_witness
from .divergence import (
    DivergenceCurve,
    DivergenceSetup,
    GainInterval,
    constant_product_divergence,
    constant_product_thresholds,
    divergence_at_price,
    divergence_at_trade,
    divergence_curve,
    divergence_curve_prices,
    gain_interval,
    simplified_divergence,
    solve_trade_for_price,
)
from .errors import AxiomViolation, CfmmError, DomainError, InfeasiblePooling, IntegrationFailure, ModelError, UnreachablePrice
from .fees import (
    FeeLevel,
    FeeSwapResult,
    bid_ask,
    round_trip_fee,
    swap_fee_on_bought,
    swap_fee_on_sold,
    swap_x_fee,
    swap_x_fee_closed,
    swap_y_fee,
    swap_y_fee_closed,
)
from .models import AXIOMS, AmmModel, Reserves, Sdamm, SinhSdamm, catalog, parse_model, utility
from .oracle import OraclePoint, liquidity_condition, oracle_point, price
from .swap import PoolingPlan, SwapQuote, pool_deposit, pool_deposit_b, round_trip, round_trip_b, swap_x, swap_y
from .theorems import check_theorem_suite

__version__ = "0.1.0"

__all__ = [
    "AXIOMS",
    "AmmModel",
    "AxiomReport",
    "AxiomViolation",
    "CfmmError",
    "DivergenceCurve",
    "DivergenceSetup",
    "DomainError",
    "FeeLevel",
    "FeeSwapResult",
    "GainInterval",
    "GridConfig",
    "InfeasiblePooling",
    "IntegrationFailure",
    "ModelError",
    "OraclePoint",
    "PoolingPlan",
    "Reserves",
    "Sdamm",
    "SinhSdamm",
    "SwapQuote",
    "UnreachablePrice",
    "Verdict",
    "bid_ask",
    "catalog",
    "check_all",
    "check_axiom",
    "check_theorem_suite",
    "constant_product_divergence",
    "constant_product_thresholds",
    "divergence_at_price",
    "divergence_at_trade",
    "divergence_curve",
    "divergence_curve_prices",
    "gain_interval",
    "liquidity_condition",
    "oracle_point",
    "parse_model",
    "pool_deposit",
    "pool_deposit_b",
    "price",
    "reproduce_witness",
    "round_trip",
    "round_trip_b",
    "round_trip_fee",
    "simplified_divergence",
    "solve_trade_for_price",
    "swap_fee_on_bought",
    "swap_fee_on_sold",
    "swap_x",
    "swap_x_fee",
    "swap_x_fee_closed",
    "swap_y",
    "swap_y_fee",
    "swap_y_fee_closed",
    "utility",
]
