import math

import numpy as np
import pytest

from cfmm import (
    DomainError,
    FeeLevel,
    IntegrationFailure,
    SinhSdamm,
    bid_ask,
    price,
    round_trip_fee,
    swap_x_fee,
    swap_x_fee_closed,
    swap_y,
    swap_y_fee,
    swap_y_fee_closed,
)
from cfmm.fees import split_bought, split_sold, swap_fee_on_bought, swap_fee_on_sold
from cfmm.models import Balancer, Curve, MStable, UniswapV2


def test_fee_level_bounds():
    assert FeeLevel(0.3).gamma == 0.3
    assert FeeLevel.of(FeeLevel(0.1)).gamma == 0.1
    for bad in (-0.1, 1.5, float("nan")):
        with pytest.raises(DomainError):
            FeeLevel(bad)


def test_worked_constant_product_value():
    # b(1 - (a/(a+x))^(1-gamma)) with a = b = x = 100, gamma = 0.01
    res = swap_y_fee(UniswapV2(), 0.01, 100.0, (100.0, 100.0))
    assert res.method == "ode"
    assert res.output == pytest.approx(100 * (1 - 2 ** (-0.99)), rel=1e-9)
    assert res.post_reserves == (200.0, 100.0 - res.output)


def test_full_fee_and_zero_input_pay_nothing(model):
    assert swap_y_fee(model, 1.0, 3.0, (1.0, 1.0)).output == 0.0
    assert swap_x_fee(model, 0.2, 0.0, (1.0, 1.0)).output == 0.0


def test_fee_free_boundary_matches_plain_swap(model):
    r, x = (2.0, 3.0), 0.7
    plain = swap_y(model, x, r).output_amount
    assert swap_y_fee(model, 0.0, x, r).output == plain
    assert swap_y_fee(model, 0.0, x, r, method="ode").output == pytest.approx(plain, rel=1e-8)


def test_method_validation():
    with pytest.raises(ValueError):
        swap_y_fee(UniswapV2(), 0.1, 1.0, (1, 1), method="euler")


@pytest.mark.parametrize("q", [1.0])
def test_sinh_closed_forms_match_ode(q):
    m = SinhSdamm(C=1.3, q=q)
    for g in (0.0, 0.02, 0.4):
        for r, amt in [((1.0, 2.0), 0.5), ((0.2, 8.0), 3.0), ((6.0, 0.5), 60.0)]:
            ode = swap_y_fee(m, g, amt, r, method="ode").output
            assert swap_y_fee_closed(m, g, amt, r).output == pytest.approx(ode, rel=1e-8)
            ode = swap_x_fee(m, g, amt, r, method="ode").output
            assert swap_x_fee_closed(m, g, amt, r).output == pytest.approx(ode, rel=1e-8)


def test_closed_form_only_where_known():
    assert swap_y_fee_closed(Balancer(0.3), 0.1, 1.0, (1, 1)) is None
    assert swap_x_fee_closed(SinhSdamm(q=0.8), 0.1, 1.0, (1, 1)) is None


def test_closed_form_sinh_in_log_space():
    m = SinhSdamm(C=1.0, q=1.0)
    res = swap_y_fee_closed(m, 0.05, 120.0, (8.0, 9.0))
    # the payout rounds to the whole reserve while the remainder stays resolved
    left = math.exp(0.95 * (math.log(math.sinh(8.0)) - 128.0 + math.log(2.0)) + math.log(math.sinh(9.0)))
    assert res.output == 9.0
    assert res.post_reserves.b == pytest.approx(left, rel=1e-9)
    huge = swap_y_fee_closed(m, 0.05, 1e4, (800.0, 900.0))
    assert huge.output == 900.0 and huge.post_reserves.b >= 0.0


def test_output_decreasing_in_fee(model):
    r, x = (2.0, 3.0), 1.5
    outs = [swap_y_fee(model, g, x, r).output for g in (0.0, 0.003, 0.05, 0.3, 0.9)]
    assert all(u > v for u, v in zip(outs, outs[1:]))


def test_split_identity_holds_for_marginal_fee(model):
    r, g = (2.0, 3.0), 0.05
    bulk = swap_y_fee(model, g, 1.0, r)
    first = swap_y_fee(model, g, 0.4, r)
    second = swap_y_fee(model, g, 0.6, first.post_reserves)
    assert first.output + second.output == pytest.approx(bulk.output, rel=1e-8)


def test_dense_path_gives_partial_trades():
    m, r, g = UniswapV2(), (10.0, 10.0), 0.1
    res = swap_y_fee(m, g, 8.0, r, dense=True)
    for s in (1.0, 3.5, 8.0):
        assert res(s) == pytest.approx(swap_y_fee_closed(m, g, s, r).output, rel=1e-8)
    with pytest.raises(ValueError):
        swap_y_fee(m, g, 8.0, r)(1.0)


def test_round_trip_with_fee_loses(model):
    x = 0.3
    assert round_trip_fee(model, 0.01, x, (2.0, 3.0)) < x


def test_saturation_at_collapsed_rate():
    # the rate collapses before the output can reach the reserve, so the ODE saturates instead of failing
    m = SinhSdamm(C=1.0, q=1.0)
    res = swap_x_fee(m, 0.01, 20000.0, (5.0, 2000.0))
    assert res.output <= 5.0
    assert res.output == pytest.approx(swap_x_fee_closed(m, 0.01, 20000.0, (5.0, 2000.0)).output, rel=1e-9)


def test_finite_exhaustion_is_reported():
    # the linear invariant pays out at a constant rate and hits the reserve after b / (1 - gamma)
    with pytest.raises(IntegrationFailure) as info:
        swap_y_fee(MStable(), 0.05, 20.0, (10.0, 10.0))
    assert info.value.s == pytest.approx(10.0 / 0.95, rel=1e-6)
    assert swap_y_fee(MStable(), 0.05, 10.0, (10.0, 10.0)).output == pytest.approx(9.5, rel=1e-12)


def test_bid_ask_bracket_price(model):
    r = (1.7, 0.4)
    p = price(model, r)
    bid, ask = bid_ask(model, 0.1, r)
    assert bid == 0.9 * p and ask == p / 0.9
    for g in (0.0, 1.0):
        with pytest.raises(DomainError):
            bid_ask(model, g, r)


def test_initial_rate_is_bid():
    m, r, g = Curve(2.0), (3.0, 5.0), 0.2
    h = 1e-7
    assert swap_y_fee(m, g, h, r).output / h == pytest.approx(bid_ask(m, g, r)[0], rel=1e-5)


def test_alternate_structures_order_against_splitting():
    m, r, g = UniswapV2(), (100.0, 100.0), 0.1
    assert swap_fee_on_sold(m, g, 100.0, r) == pytest.approx(100 * 90 / 190)
    assert swap_fee_on_bought(m, g, 100.0, r) == pytest.approx(45.0)
    assert swap_fee_on_sold(m, g, 100.0, r) >= split_sold(m, g, 50.0, 50.0, r)
    assert swap_fee_on_bought(m, g, 100.0, r) <= split_bought(m, g, 50.0, 50.0, r)


def test_marginal_fee_between_alternates_at_samples():
    m, r, g = UniswapV2(), (100.0, 100.0), 0.1
    for x in np.linspace(5, 200, 9):
        y = swap_y_fee(m, g, float(x), r).output
        assert swap_fee_on_bought(m, g, x, r) <= y <= swap_fee_on_sold(m, g, x, r)
