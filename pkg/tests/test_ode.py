import math

import pytest

from cfmm.errors import IntegrationFailure
from cfmm.ode import OutOfDomain, dopri5


def test_exponential_growth():
    sol = dopri5(lambda t, y: y, 0.0, 1.0, 2.0)
    assert sol.y == pytest.approx(math.exp(2.0), rel=1e-9)
    assert sol.t == 2.0
    assert sol.steps > 0


def test_dense_output_interpolates():
    sol = dopri5(lambda t, y: math.cos(t), 0.0, 0.0, 6.0, dense=True)
    for t in (0.0, 0.37, 1.9, 4.4, 6.0):
        assert sol(t) == pytest.approx(math.sin(t), abs=1e-9)


def test_zero_span_returns_start():
    sol = dopri5(lambda t, y: 1.0, 1.0, 3.0, 1.0)
    assert sol.y == 3.0


def test_backward_integration_rejected():
    with pytest.raises(ValueError):
        dopri5(lambda t, y: y, 1.0, 1.0, 0.0)


def test_out_of_domain_steps_are_retried():
    # trial stages that overshoot past 10 are refused; the exact path ends at 9
    def f(t, y):
        if y > 10.0:
            raise OutOfDomain
        return 1.0

    sol = dopri5(f, 0.0, 0.0, 9.0)
    assert sol.y == pytest.approx(9.0, rel=1e-12)


def test_blow_up_raises_with_last_state():
    # y' = y^2 from y(0) = 1 blows up at t = 1
    with pytest.raises(IntegrationFailure) as info:
        dopri5(lambda t, y: y * y, 0.0, 1.0, 2.0)
    assert 0.9 < info.value.s <= 1.0
    assert info.value.value > 1e3
