import csv
import io
import json

import pytest

from cfmm.cli import EXIT_DOMAIN, EXIT_MISMATCH, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_quote_constant_product(capsys):
    code, out, _ = run(capsys, "quote", "--model", "uniswap-v2", "--dir", "AtoB", "--amount", "100", "--reserves", "100,100", "--fee", "0", "--format", "csv")
    assert code == EXIT_OK
    (r,) = rows(out)
    assert float(r["output"]) == 50.0
    assert (r["post_a"], r["post_b"]) == ("200", "50")
    assert "bid" not in r


def test_quote_zero_and_linear(capsys):
    _, out, _ = run(capsys, "quote", "--amount", "0", "--reserves", "100,100", "--format", "csv")
    assert float(rows(out)[0]["output"]) == 0.0
    _, out, _ = run(capsys, "quote", "--model", "mstable", "--amount", "5", "--reserves", "10,10", "--format", "json")
    assert json.loads(out)[0]["output"] == 5.0


def test_quote_with_fee_shows_bid_ask(capsys):
    _, out, _ = run(capsys, "quote", "--amount", "1", "--reserves", "2,2", "--fee", "0.1", "--dir", "BtoA", "--format", "csv")
    r = rows(out)[0]
    assert float(r["bid"]) == pytest.approx(0.9)
    assert float(r["ask"]) == pytest.approx(1 / 0.9)


@pytest.mark.parametrize(
    "argv",
    [
        ("quote", "--amount", "-1", "--reserves", "1,1"),
        ("quote", "--amount", "1", "--reserves", "1"),
        ("quote", "--amount", "1", "--reserves", "1,1", "--fee", "2"),
        ("quote", "--model", "nope", "--amount", "1", "--reserves", "1,1"),
        ("quote", "--model", "curve", "--param", "C=0.2", "--amount", "1", "--reserves", "1,1"),
        ("divergence", "--reserves", "10,1", "--model", "sdamm-sinh", "--delta", "0.1"),
        ("pool", "--reserves", "10,1", "--model", "sdamm-sinh", "--param", "q=1", "--deposit-b", "1"),
        ("feecurve", "--reserves", "1,1", "--gammas", "0,1.5", "--x", "1"),
    ],
)
def test_domain_errors_exit_two(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_DOMAIN
    assert err.startswith("error: ") and err.count("\n") == 1
    assert out == ""


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["quote", "--reserves", "1,1"])
    assert info.value.code == 2


def test_pool_plans(capsys):
    _, out, _ = run(capsys, "pool", "--reserves", "100,50", "--deposit-a", "10", "--format", "csv")
    r = rows(out)[0]
    assert float(r["delta_b"]) == 5.0 and r["liquidity_increased"] == "true"
    _, out, _ = run(capsys, "pool", "--model", "sdamm-sinh", "--param", "q=0.8", "--reserves", "10,1", "--deposit-a", "1", "--format", "csv")
    r = rows(out)[0]
    assert r["rule"] == "solved"
    assert float(r["price_after"]) == pytest.approx(float(r["price_before"]), rel=1e-11)
    _, out, _ = run(capsys, "pool", "--model", "mstable", "--reserves", "10,20", "--deposit-a", "1", "--format", "csv")
    r = rows(out)[0]
    assert float(r["delta_b"]) == 2.0 and "constant" in r["note"]


def test_oracle_command(capsys):
    _, out, _ = run(capsys, "oracle", "--reserves", "2,3", "--format", "json")
    pt = json.loads(out)[0]
    assert pt["price"] == 1.5 and pt["liquidity_condition"] == pytest.approx(0.375)


def test_feecurve_rows(capsys):
    _, out, _ = run(capsys, "feecurve", "--reserves", "100,100", "--gammas", "0,0.01,1", "--x", "100", "--format", "csv")
    ys = [float(r["Y"]) for r in rows(out)]
    assert ys[0] == 50.0
    assert ys[1] == pytest.approx(100 * (1 - 2 ** (-0.99)), rel=1e-10)
    assert ys[2] == 0.0


def test_feecurve_compare_structures(capsys):
    _, out, _ = run(capsys, "feecurve", "--reserves", "100,100", "--gammas", "0.1", "--x", "10:100:4", "--compare-structures", "--format", "csv")
    for r in rows(out):
        assert float(r["Y_fee_on_bought"]) <= float(r["Y"]) <= float(r["Y_fee_on_sold"])


def test_divergence_csv(capsys):
    code, out, _ = run(capsys, "divergence", "--model", "sdamm-sinh", "--param", "q=0.8", "--reserves", "10,1", "--deposit-a", "1", "--z=-5:5:11", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "coordinate,delta,branch"
    data = rows(out)
    assert any(float(r["delta"]) < 0 for r in data)
    origin = [r for r in data if r["branch"] == "origin"]
    assert origin == [{"coordinate": "0", "delta": "0", "branch": "origin"}]


def test_divergence_constant_product_nonnegative(capsys):
    _, out, _ = run(capsys, "divergence", "--reserves", "100,100", "--delta", "0.1", "--format", "csv")
    assert all(float(r["delta"]) >= 0 for r in rows(out))


def test_divergence_json_has_gain_interval(capsys):
    _, out, err = run(capsys, "divergence", "--reserves", "100,100", "--delta", "0.1", "--fee", "0.05", "--format", "json")
    data = json.loads(out)
    gi = data["gain_interval"]
    assert gi["p_low"] < data["initial_price"] < gi["p_high"]
    assert gi["z_at_p_low"] > 0 > gi["z_at_p_high"]
    _, _, err = run(capsys, "divergence", "--reserves", "100,100", "--delta", "0.1", "--fee", "0.05", "--format", "csv")
    assert "gain interval" in err


def test_output_is_deterministic_and_written_to_file(capsys, tmp_path):
    target = tmp_path / "curve.csv"
    argv = ["divergence", "--reserves", "100,7", "--delta", "0.2", "--fee", "0.01", "--samples", "9", "--format", "csv"]
    run(capsys, *argv, "--out", str(target))
    _, out, _ = run(capsys, *argv)
    assert target.read_text() == out


def test_model_from_json_file(capsys, tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"kind": "uniswap-v3", "params": {"alpha": 1, "beta": 2}}))
    _, out, _ = run(capsys, "oracle", "--model", str(f), "--reserves", "3,4", "--format", "csv")
    assert float(rows(out)[0]["price"]) == 1.5
    _, out, _ = run(capsys, "oracle", "--model", '{"kind": "uniswap-v2"}', "--reserves", "3,4", "--format", "csv")
    assert float(rows(out)[0]["price"]) == pytest.approx(4 / 3)


def test_axioms_single_model(capsys):
    code, out, _ = run(capsys, "axioms", "--model", "uniswap-v2", "--format", "csv")
    assert code == EXIT_OK
    r = rows(out)[0]
    assert all(r[ax] == "X" for ax in ("UfB", "UfA", "SM", "C", "QC", "SI", "I+", "SC", "P-cond"))


def test_axioms_virtual_reserves(capsys):
    code, out, _ = run(capsys, "axioms", "--model", "uniswap-v3", "--format", "csv")
    r = rows(out)[0]
    assert r["UfB"] == "-" and r["SI"] == "-"
    # the literal Inada+ limit fails, which disagrees with the declared claims
    assert r["mismatch"] == "I+" and code == EXIT_MISMATCH


def test_axioms_catalog(capsys):
    code, out, _ = run(capsys, "axioms", "--all-catalog", "--format", "csv", "--grid-points", "10")
    data = rows(out)
    assert len(data) == 8
    assert [r["model"] for r in data][0] == "Uniswap V2"
    curve = next(r for r in data if r["model"].startswith("Curve"))
    assert (curve["QC"], curve["SC"], curve["P-cond"]) == ("X*", "X*", "X*")
    dodo = next(r for r in data if r["model"].startswith("Dodo"))
    assert dodo["P-cond"] == "n/a"
    assert code == (EXIT_MISMATCH if any(r["mismatch"] for r in data) else EXIT_OK)


def test_table_format(capsys):
    _, out, _ = run(capsys, "oracle", "--reserves", "2,3")
    lines = out.splitlines()
    assert lines[0].split()[0] == "price" and set(lines[1]) <= {"-", " "}
