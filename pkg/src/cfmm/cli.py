"""Command-line front end: quotes, pooling plans, oracle points, fee curves, divergence sweeps, axiom reports."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .axioms import NOT_APPLICABLE, SATISFIED, GridConfig, check_all
from .divergence import DivergenceSetup, divergence_curve
from .errors import CfmmError
from .fees import bid_ask, swap_fee_on_bought, swap_fee_on_sold, swap_x_fee, swap_y_fee
from .models import AXIOMS, catalog, parse_model
from .oracle import liquidity_condition, oracle_point
from .swap import pool_deposit, pool_deposit_b, swap_y

EXIT_OK, EXIT_DOMAIN, EXIT_MISMATCH = 0, 2, 3
DIGITS = 12


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{DIGITS}g}"
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    f = float(v)
    return float(f"{f:.{DIGITS}g}") if math.isfinite(f) else str(f)


def render(rows: list[dict], fmt_name: str, extra: dict | None = None) -> str:
    """Render rows as csv, json, or an aligned table."""
    cols = list(rows[0]) if rows else []
    if fmt_name == "json":
        payload = [_json_value(r) for r in rows]
        if extra is not None:
            payload = {"rows": payload, **_json_value(extra)}
        return json.dumps(payload, indent=2) + "\n"
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(r[c]) for c in cols])
        return buf.getvalue()
    cells = [[fmt(r[c]) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _pair(text: str, name: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"{name} must be given as a,b; got '{text}'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"{name} must be numeric; got '{text}'") from None


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{name} must be a comma-separated list of numbers; got '{text}'") from None


def _range(text: str, name: str) -> list[float]:
    """start:stop:count (inclusive, evenly spaced) or a comma list."""
    if ":" not in text:
        return _floats(text, name)
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{name} range must be start:stop:count")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"{name} range must be start:stop:count") from None
    if n < 1:
        raise UsageError(f"{name} range needs a positive count")
    return [float(v) for v in np.linspace(lo, hi, n)]


def load_model(source: str, params: list[str]):
    if source.lstrip().startswith("{"):
        desc = json.loads(source)
    elif source.endswith(".json") or Path(source).is_file():
        desc = json.loads(Path(source).read_text())
    else:
        desc = {"kind": source, "params": {}}
    if isinstance(desc, dict):
        desc = dict(desc)
        merged = dict(desc.get("params") or {})
        for item in params or []:
            if "=" not in item:
                raise UsageError(f"--param expects name=value, got '{item}'")
            k, v = item.split("=", 1)
            try:
                merged[k.strip()] = float(v)
            except ValueError:
                raise UsageError(f"--param {k} must be numeric") from None
        desc["params"] = merged
    return parse_model(desc)


# commands ---------------------------------------------------------------------------


def cmd_quote(args, model):
    r = _pair(args.reserves, "--reserves")
    g = args.fee
    if args.dir == "AtoB":
        res = swap_y_fee(model, g, args.amount, r)
    else:
        res = swap_x_fee(model, g, args.amount, r)
    row = {
        "direction": args.dir,
        "input": args.amount,
        "output": res.output,
        "post_a": res.post_reserves.a,
        "post_b": res.post_reserves.b,
        "avg_price": res.output / args.amount if args.amount > 0 else None,
        "fee": g,
        "method": res.method,
    }
    if 0 < g < 1:
        row["bid"], row["ask"] = bid_ask(model, g, r)
    return [row], None, EXIT_OK


def cmd_pool(args, model):
    r = _pair(args.reserves, "--reserves")
    if (args.deposit_a is None) == (args.deposit_b is None):
        raise UsageError("give exactly one of --deposit-a or --deposit-b")
    plan = pool_deposit(model, r, args.deposit_a) if args.deposit_a is not None else pool_deposit_b(model, r, args.deposit_b)
    x = args.probe if args.probe is not None else 0.1 * r[0]
    before = swap_y(model, x, r).output_amount
    after = swap_y(model, x, (r[0] + plan.delta_a, r[1] + plan.delta_b)).output_amount
    row = {
        "delta_a": plan.delta_a,
        "delta_b": plan.delta_b,
        "price_before": plan.price_before,
        "price_after": plan.price_after,
        "rule": plan.rule,
        "probe_x": x,
        "Y_before": before,
        "Y_after": after,
        "liquidity_increased": after >= before - 1e-9 * r[1],
    }
    if model.kind == "mstable":
        row["note"] = "price is constant; deposit taken at the current reserve ratio"
    return [row], None, EXIT_OK


def cmd_oracle(args, model):
    r = _pair(args.reserves, "--reserves")
    pt = oracle_point(model, r)
    row = {
        "price": pt.price,
        "p_a": pt.p_a,
        "p_b": pt.p_b,
        "p_aa": pt.p_aa,
        "p_ab": pt.p_ab,
        "p_bb": pt.p_bb,
        "liquidity_condition": liquidity_condition(model, r),
        "source": pt.source,
    }
    return [row], None, EXIT_OK


def cmd_feecurve(args, model):
    r = _pair(args.reserves, "--reserves")
    gammas = _floats(args.gammas, "--gammas")
    xs = _range(args.x, "--x")
    rows = []
    for g in gammas:
        for x in xs:
            row = {"gamma": g, "x": x, "Y": swap_y_fee(model, g, x, r).output}
            if args.compare_structures:
                row["Y_fee_on_sold"] = swap_fee_on_sold(model, g, x, r)
                row["Y_fee_on_bought"] = swap_fee_on_bought(model, g, x, r)
            rows.append(row)
    return rows, None, EXIT_OK


def cmd_divergence(args, model):
    r = _pair(args.reserves, "--reserves")
    chosen = [v is not None for v in (args.delta, args.deposit_a, args.deposit_b)]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --delta, --deposit-a, --deposit-b")
    if args.delta is not None:
        setup = DivergenceSetup.from_delta(model, args.fee, r, args.delta)
    elif args.deposit_a is not None:
        setup = DivergenceSetup.from_deposit_a(model, args.fee, r, args.deposit_a)
    else:
        setup = DivergenceSetup.from_deposit_b(model, args.fee, r, args.deposit_b)
    if args.z is not None:
        zs = _range(args.z, "--z")
    else:
        A, B = setup.pooled
        zs = [float(v) for v in np.linspace(-B, A, args.samples)]
    curve = divergence_curve(setup, zs, with_gain=setup.gamma > 0)
    rows = [{"coordinate": c, "delta": d, "branch": curve.branch(c)} for c, d in curve.samples]
    gain = None
    if curve.gain is not None:
        gi = curve.gain
        gain = {"p_low": gi.p_low, "p_high": gi.p_high, "z_at_p_low": gi.z_at_p_low, "z_at_p_high": gi.z_at_p_high}
    extra = {
        "injection": {"alpha": setup.alpha, "beta": setup.beta},
        "initial_price": setup.initial_price,
        "gain_interval": gain,
    }
    return rows, extra, EXIT_OK


def _axiom_cell(v) -> str:
    if v.status == SATISFIED:
        return "X*" if v.numerically_verified else "X"
    if v.status == NOT_APPLICABLE:
        return "n/a"
    return "-"


def cmd_axioms(args, model):
    grid = GridConfig(lo=args.grid_lo, hi=args.grid_hi, points=args.grid_points)
    models = catalog() if args.all_catalog else [model]
    rows, status = [], EXIT_OK
    reports = {}
    for m in models:
        rep = check_all(m, grid)
        bad = rep.mismatches(m)
        if bad:
            status = EXIT_MISMATCH
        row = {"model": str(m)}
        row.update({ax: _axiom_cell(rep.verdicts[ax]) for ax in AXIOMS})
        row["mismatch"] = ";".join(bad)
        rows.append(row)
        reports[str(m)] = rep.to_dict()
    extra = {"reports": reports} if args.format == "json" else None
    return rows, extra, status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="uniswap-v2", help="model kind, inline JSON, or path to a JSON descriptor")
    common.add_argument("--param", action="append", default=[], metavar="NAME=VALUE", help="model parameter override")
    common.add_argument("--format", choices=("csv", "json", "table"), default="table")
    common.add_argument("--out", help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="cfmm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quote", parents=[common], help="swap quote with optional fee")
    q.add_argument("--dir", choices=("AtoB", "BtoA"), default="AtoB")
    q.add_argument("--amount", type=float, required=True)
    q.add_argument("--reserves", required=True)
    q.add_argument("--fee", type=float, default=0.0)
    q.set_defaults(func=cmd_quote)

    pl = sub.add_parser("pool", parents=[common], help="price-preserving deposit")
    pl.add_argument("--reserves", required=True)
    pl.add_argument("--deposit-a", type=float)
    pl.add_argument("--deposit-b", type=float)
    pl.add_argument("--probe", type=float, help="trade size for the liquidity check (default a/10)")
    pl.set_defaults(func=cmd_pool)

    o = sub.add_parser("oracle", parents=[common], help="price and its partial derivatives")
    o.add_argument("--reserves", required=True)
    o.set_defaults(func=cmd_oracle)

    f = sub.add_parser("feecurve", parents=[common], help="fee swaps across fee levels and sizes")
    f.add_argument("--reserves", required=True)
    f.add_argument("--gammas", default="0,0.003,0.01,0.05")
    f.add_argument("--x", required=True, help="comma list or start:stop:count")
    f.add_argument("--compare-structures", action="store_true")
    f.set_defaults(func=cmd_feecurve)

    d = sub.add_parser("divergence", parents=[common], help="divergence loss along signed trades")
    d.add_argument("--reserves", required=True)
    d.add_argument("--fee", type=float, default=0.0)
    d.add_argument("--delta", type=float)
    d.add_argument("--deposit-a", type=float)
    d.add_argument("--deposit-b", type=float)
    d.add_argument("--z", help="comma list or start:stop:count of signed trades")
    d.add_argument("--samples", type=int, default=41)
    d.set_defaults(func=cmd_divergence)

    a = sub.add_parser("axioms", parents=[common], help="axiom verdicts")
    a.add_argument("--all-catalog", action="store_true")
    a.add_argument("--grid-points", type=int, default=16)
    a.add_argument("--grid-lo", type=float, default=1e-3)
    a.add_argument("--grid-hi", type=float, default=1e3)
    a.set_defaults(func=cmd_axioms)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        model = None if getattr(args, "all_catalog", False) else load_model(args.model, args.param)
        rows, extra, status = args.func(args, model)
    except (CfmmError, UsageError, ValueError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = render(rows, args.format, extra)
    if args.format != "json" and extra and extra.get("gain_interval"):
        gi = extra["gain_interval"]
        print(f"gain interval: p in ({fmt(gi['p_low'])}, {fmt(gi['p_high'])})", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
