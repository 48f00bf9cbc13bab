import math

import pytest

from cfmm import (
    DomainError,
    InfeasiblePooling,
    SinhSdamm,
    pool_deposit,
    pool_deposit_b,
    price,
    round_trip,
    round_trip_b,
    swap_x,
    swap_y,
    utility,
)
from cfmm.models import Balancer, MStable, StableSwap, UniswapV2, UniswapV3


@pytest.mark.parametrize("a, b, x", [(100, 100, 100), (1, 1, 0.01), (5, 2000, 50), (100, 7, 1000)])
def test_constant_product_swaps(a, b, x):
    q = swap_y(UniswapV2(), x, (a, b))
    assert q.output_amount == pytest.approx(b * x / (a + x), rel=1e-12)
    assert q.post_reserves.a == a + x
    assert q.avg_price == pytest.approx(q.output_amount / x)
    assert not q.exhausts_reserve
    back = swap_x(UniswapV2(), x, (a, b))
    assert back.output_amount == pytest.approx(a * x / (b + x), rel=1e-12)
    assert back.direction == "BtoA"


def test_balancer_closed_form():
    a, b, x = 2.0, 5.0, 3.0
    y = swap_y(Balancer(0.3), x, (a, b)).output_amount
    assert y == pytest.approx(b * (1 - (a / (a + x)) ** (0.3 / 0.7)), rel=1e-12)


def test_stableswap_closed_form():
    c, a, b, x = 1.5, 3.0, 4.0, 2.0
    k = c * (a + b) + a * b
    y_left = (k - c * (a + x)) / (c + a + x)
    assert swap_y(StableSwap(c), x, (a, b)).output_amount == pytest.approx(b - y_left, rel=1e-12)


def test_linear_invariant_pays_one_for_one():
    assert swap_y(MStable(), 5, (10, 10)).output_amount == pytest.approx(5, rel=1e-14)


def test_finite_boundary_models_exhaust():
    q = swap_y(MStable(), 15, (10, 10))
    assert q.output_amount == 10 and q.exhausts_reserve
    # virtual reserves: the pool runs dry after a finite trade
    q = swap_y(UniswapV3(1.0, 2.0), 100.0, (1.0, 1.0))
    assert q.output_amount == 1.0 and q.exhausts_reserve


def test_zero_input_pays_nothing(model):
    assert swap_y(model, 0.0, (3.0, 4.0)).output_amount == 0.0
    assert swap_y(model, 0.0, (3.0, 4.0)).avg_price is None


def test_swap_preserves_utility(model):
    r = (3.0, 4.0)
    q = swap_y(model, 1.0, r)
    if not q.exhausts_reserve:
        assert utility(model, q.post_reserves) == pytest.approx(utility(model, r), rel=1e-10, abs=1e-10)


def test_negative_amount_rejected():
    with pytest.raises(DomainError):
        swap_y(UniswapV2(), -1.0, (1, 1))
    with pytest.raises(DomainError):
        swap_y(UniswapV2(), 1.0, (0, 1))


@pytest.mark.parametrize("m", [UniswapV2(), SinhSdamm(q=0.8), StableSwap(1.0)], ids=str)
def test_round_trips_recover_input(m):
    assert round_trip(m, 0.3, (2.0, 5.0)) == pytest.approx(0.3, rel=1e-10)
    assert round_trip_b(m, 0.3, (2.0, 5.0)) == pytest.approx(0.3, rel=1e-10)


def test_proportional_pooling_under_scale_invariance():
    plan = pool_deposit(UniswapV2(), (100, 50), 10)
    assert (plan.delta_a, plan.delta_b) == (10, 5)
    assert plan.rule == "proportional"
    plan = pool_deposit_b(UniswapV2(), (100, 50), 5)
    assert plan.delta_a == pytest.approx(10)


@pytest.mark.parametrize("m", [SinhSdamm(q=0.8), StableSwap(1.0), UniswapV3(1.0, 2.0)], ids=str)
def test_solved_pooling_preserves_price(m):
    for r, amt in [((10.0, 1.0), 1.0), ((1.0, 10.0), 0.3)]:
        plan = pool_deposit(m, r, amt)
        assert plan.rule == "solved"
        assert plan.price_after == pytest.approx(plan.price_before, rel=1e-12)
        assert price(m, (r[0] + plan.delta_a, r[1] + plan.delta_b)) == pytest.approx(price(m, r), rel=1e-12)
        plan = pool_deposit_b(m, r, amt)
        assert plan.price_after == pytest.approx(plan.price_before, rel=1e-12)


def test_pooling_infeasible_without_inada():
    # at q = 1 the price only falls to 1/coth(b + beta) as A is added, which stays above P(10, 1)
    m = SinhSdamm(q=1.0)
    with pytest.raises(InfeasiblePooling) as info:
        pool_deposit_b(m, (10.0, 1.0), 1.0)
    lo, hi = info.value.price_range
    assert lo > price(m, (10.0, 1.0))
    assert lo == pytest.approx(1 / math.cosh(2.0) * math.sinh(2.0), rel=1e-9)
    plan = pool_deposit(m, (10.0, 1.0), 1.0)
    assert plan.price_after == pytest.approx(plan.price_before, rel=1e-12)


def test_stableswap_pools_at_ratio_including_offset():
    # (C + b + beta) / (C + a + alpha) stays at (C + b) / (C + a)
    c, a, b = 1.0, 3.0, 7.0
    plan = pool_deposit(StableSwap(c), (a, b), 2.0)
    assert plan.delta_b == pytest.approx(2.0 * (c + b) / (c + a), rel=1e-12)
