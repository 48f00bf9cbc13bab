import json
import math

import pytest

from cfmm import GridConfig, Sdamm, SinhSdamm, check_all, check_axiom, reproduce_witness
from cfmm.axioms import NOT_APPLICABLE, SATISFIED, VIOLATED
from cfmm.models import AXIOMS, Curve, Dodo, LStableSwap, MStable, StableSwap, UniswapV2, UniswapV3

SMALL = GridConfig(points=10)


def violated(report):
    return {ax for ax, s in report.pattern().items() if s == VIOLATED}


def test_constant_product_satisfies_everything():
    rep = check_all(UniswapV2())
    assert all(s == SATISFIED for s in rep.pattern().values())
    assert rep.mismatches(UniswapV2()) == []


def test_lstableswap_satisfies_everything():
    assert not violated(check_all(LStableSwap(1.0)))


def test_virtual_reserves_break_normalisation_and_scaling():
    m = UniswapV3(1.0, 2.0)
    rep = check_all(m)
    # the finite derivative at the boundary also breaks the literal Inada+ limit
    assert violated(rep) == {"UfB", "SI", "I+"}
    for ax in ("UfB", "SI", "I+"):
        assert reproduce_witness(m, rep.verdicts[ax])
    w = rep.verdicts["UfB"].witness
    assert 0.0 in w["point"] and math.isfinite(w["u"])


def test_stableswap_pattern():
    assert violated(check_all(StableSwap(1.0))) == {"UfB", "SI", "I+"}


def test_linear_invariant_pattern():
    assert violated(check_all(MStable())) == {"UfB", "I+"}


def test_curve_flags_numerical_verification():
    rep = check_all(Curve(2.0), SMALL)
    assert not violated(rep)
    flagged = {ax for ax, v in rep.verdicts.items() if v.numerically_verified}
    assert flagged == {"QC", "SC", "P-cond"}


def test_dodo_condition_not_applicable():
    rep = check_all(Dodo(), SMALL)
    assert rep.verdicts["P-cond"].status == NOT_APPLICABLE
    assert not violated(rep)


@pytest.mark.parametrize("q, expect", [(0.8, {"SI"}), (1.0, {"SI", "I+"})])
def test_sinh_patterns(q, expect):
    m = SinhSdamm(C=1.0, q=q)
    rep = check_all(m, SMALL)
    assert violated(rep) == expect
    assert rep.mismatches(m) == []


def test_continuity_reported_by_construction():
    v = check_axiom(UniswapV2(), "C")
    assert v.status == SATISFIED and "continuous" in v.detail and v.witness is None


def test_constant_utility_fails_with_witnesses():
    flat = Sdamm(U=lambda z: 0.0, claims=frozenset(AXIOMS))
    rep = check_all(flat, SMALL)
    assert {"UfB", "UfA", "SM", "I+", "SC"} <= violated(rep)
    assert set(rep.mismatches(flat)) >= {"UfB", "SM"}
    assert reproduce_witness(flat, rep.verdicts["SM"], SMALL)


def test_satisfied_verdict_has_no_witness_to_reproduce():
    assert not reproduce_witness(UniswapV2(), check_axiom(UniswapV2(), "QC"))


def test_unknown_axiom():
    with pytest.raises(KeyError):
        check_axiom(UniswapV2(), "XYZ")


@pytest.mark.parametrize("kw", [{"lo": 0.0}, {"lo": 2.0, "hi": 1.0}, {"points": 3}, {"probe_decades": 1}])
def test_grid_validation(kw):
    with pytest.raises(ValueError):
        GridConfig(**kw)


def test_report_json_is_deterministic():
    a = check_all(UniswapV3(1.0, 2.0), SMALL).to_json()
    b = check_all(UniswapV3(1.0, 2.0), SMALL).to_json()
    assert a == b
    data = json.loads(a)
    assert list(data["verdicts"]) == sorted(data["verdicts"])
    assert data["grid"]["points"] == 10
    assert data["verdicts"]["SI"]["witness"]["t"] > 0
