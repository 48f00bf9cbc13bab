import pytest

from cfmm import Sdamm, SinhSdamm, check_theorem_suite
from cfmm.models import AXIOMS, UniswapV3
from cfmm.theorems import FAIL, PASS, SKIP, SUITE


def test_suite_passes_on_catalog(model):
    rep = check_theorem_suite(model)
    assert rep.ok, [(c.name, c.detail, c.witness) for c in rep.failures()]
    assert len(rep.checks) == len(SUITE)


@pytest.mark.parametrize("q", [0.8, 1.0])
def test_suite_passes_on_sinh(q):
    rep = check_theorem_suite(SinhSdamm(C=1.0, q=q))
    assert rep.ok, [(c.name, c.detail) for c in rep.failures()]


def test_skips_name_missing_axioms():
    rep = check_theorem_suite(UniswapV3(1.0, 2.0)).by_name()
    homog = rep["swap.9 positive homogeneity"]
    assert homog.status == SKIP and "SI" in homog.detail
    assert rep["swap.1 utility weakly improves"].status == PASS


def test_only_filter():
    rep = check_theorem_suite(SinhSdamm(), only={"swap.11 split identity"})
    assert [c.name for c in rep.checks] == ["swap.11 split identity"]


def test_broken_model_fails_with_witness():
    flat = Sdamm(U=lambda z: 0.0, claims=frozenset(AXIOMS))
    rep = check_theorem_suite(flat)
    assert not rep.ok
    assert all(c.witness for c in rep.failures())
    assert any(c.status == FAIL for c in rep.checks)
