"""Executable property suite for swaps, round trips, the oracle, and pooling.

Each property runs only when the model claims the axioms it depends on;
otherwise it is reported as skipped with the missing axioms named.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CfmmError
from .models import AmmModel, utility
from .oracle import price, price_partials
from .swap import _swap_x_raw, _swap_y_raw, pool_deposit

PASS, FAIL, SKIP = "pass", "fail", "skipped"

DEFAULT_RESERVES = ((1.0, 1.0), (100.0, 7.0), (5.0, 2000.0), (0.3, 40.0), (20.0, 0.5))
X_FRACTIONS = (0.01, 0.1, 1.0, 10.0)
REL = 1e-8
SATURATION = 1e-10


@dataclass
class PropertyCheck:
    name: str
    status: str
    requires: tuple = ()
    witness: dict | None = None
    detail: str = ""


@dataclass
class SuiteReport:
    model: str
    checks: list[PropertyCheck] = field(default_factory=list)

    def by_name(self) -> dict[str, PropertyCheck]:
        return {c.name: c for c in self.checks}

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def failures(self) -> list[PropertyCheck]:
        return [c for c in self.checks if c.status == FAIL]


class _Fail(Exception):
    def __init__(self, witness: dict, detail: str = ""):
        super().__init__(detail)
        self.witness = witness
        self.detail = detail


def _expect(cond: bool, witness: dict, detail: str = ""):
    if not cond:
        raise _Fail(witness, detail)


def _Y(model, x, a, b) -> float:
    return _swap_y_raw(model, x, a, b)[0]


def _X(model, y, a, b) -> float:
    return _swap_x_raw(model, y, a, b)[0]


def _urel(u: float) -> float:
    return REL * max(1.0, abs(u))


def _saturated(y: float, b: float) -> bool:
    """Payout within float resolution of the whole reserve; equalities are not observable there."""
    return b - y <= SATURATION * b


# properties of x -> Y(x; a, b) ---------------------------------------------------


def _weak_improvement(model, reserves):
    for a, b in reserves:
        u0 = utility(model, (a, b))
        for f in X_FRACTIONS:
            x = f * a
            y = _Y(model, x, a, b)
            u1 = utility(model, (a + x, b - y))
            _expect(u1 >= u0 - _urel(u0), {"a": a, "b": b, "x": x, "Y": y, "u_after": u1, "u_before": u0})


def _indifference(model, reserves):
    for a, b in reserves:
        u0 = utility(model, (a, b))
        for f in X_FRACTIONS:
            x = f * a
            y, hit = _swap_y_raw(model, x, a, b)
            if hit or _saturated(y, b):
                continue
            u1 = utility(model, (a + x, b - y))
            _expect(abs(u1 - u0) <= _urel(u0), {"a": a, "b": b, "x": x, "Y": y, "u_after": u1, "u_before": u0})


def _below_reserve(model, reserves):
    for a, b in reserves:
        for f in X_FRACTIONS + (1e3, 1e6):
            x = f * a
            y = _Y(model, x, a, b)
            _expect(y < b, {"a": a, "b": b, "x": x, "Y": y})


def _zero_in_zero_out(model, reserves):
    for a, b in reserves:
        y = _Y(model, 0.0, a, b)
        _expect(y == 0.0, {"a": a, "b": b, "Y(0)": y})


def _monotone(model, reserves):
    strict = model.satisfies("UfB") and model.satisfies("C")
    for a, b in reserves:
        xs = [a * 0.05 * k for k in range(41)]
        ys = [_Y(model, x, a, b) for x in xs]
        for k in range(1, len(xs)):
            if strict and _saturated(ys[k], b):
                break
            ok = ys[k] > ys[k - 1] if strict else ys[k] >= ys[k - 1]
            _expect(ok, {"a": a, "b": b, "x_prev": xs[k - 1], "x": xs[k], "Y_prev": ys[k - 1], "Y": ys[k], "strict": strict})


def _drains(model, reserves):
    for a, b in reserves:
        y = _Y(model, 1e9 * a, a, b)
        _expect(y >= 0.999 * b, {"a": a, "b": b, "x": 1e9 * a, "Y": y})


def _usc(model, reserves):
    for a, b in reserves:
        for f in X_FRACTIONS:
            x = f * a
            y = _Y(model, x, a, b)
            y_eps = _Y(model, x + 1e-9 * a, a, b)
            _expect(y_eps - y <= 1e-6 * b and y_eps >= y - REL * b, {"a": a, "b": b, "x": x, "Y": y, "Y_right": y_eps})


def _concave(model, reserves):
    for a, b in reserves:
        h = 0.25 * a
        ys = [_Y(model, k * h, a, b) for k in range(17)]
        for k in range(1, 16):
            d2 = ys[k + 1] - 2 * ys[k] + ys[k - 1]
            _expect(d2 <= REL * b, {"a": a, "b": b, "x": k * h, "h": h, "second_difference": d2})


def _homogeneous(model, reserves):
    for a, b in reserves:
        for f in X_FRACTIONS:
            x = f * a
            y = _Y(model, x, a, b)
            for t in (0.5, 2.0, 10.0):
                yt = _Y(model, t * x, t * a, t * b)
                _expect(abs(yt - t * y) <= REL * max(t * y, 1e-300), {"a": a, "b": b, "x": x, "t": t, "Y": y, "Y_scaled": yt})


def _subadditive(model, reserves):
    for a, b in reserves:
        for f1 in X_FRACTIONS:
            for f2 in X_FRACTIONS:
                x1, x2 = f1 * a, f2 * a
                lhs = _Y(model, x1 + x2, a, b)
                rhs = _Y(model, x1, a, b) + _Y(model, x2, a, b)
                _expect(lhs <= rhs + REL * b, {"a": a, "b": b, "x1": x1, "x2": x2, "Y_bulk": lhs, "Y_sum": rhs})


def _split(model, reserves):
    for a, b in reserves:
        for f1 in X_FRACTIONS:
            for f2 in X_FRACTIONS:
                x1, x2 = f1 * a, f2 * a
                bulk = _Y(model, x1 + x2, a, b)
                y1 = _Y(model, x1, a, b)
                if _saturated(bulk, b):
                    continue
                split = y1 + _Y(model, x2, a + x1, b - y1)
                _expect(abs(bulk - split) <= REL * bulk, {"a": a, "b": b, "x1": x1, "x2": x2, "Y_bulk": bulk, "Y_split": split})


# reserve dependence -----------------------------------------------------------------


def _reserve_monotone(model, reserves):
    for a, b in reserves:
        for f in X_FRACTIONS:
            x = f * a
            y = _Y(model, x, a, b)
            ea, eb = 1e-3 * a, 1e-3 * b
            ya = _Y(model, x, a + ea, b)
            yb = _Y(model, x, a, b + eb)
            w = {"a": a, "b": b, "x": x, "Y": y, "Y_a_plus": ya, "Y_b_plus": yb}
            _expect(ya <= y + REL * b, w, "more A in the pool must not pay more B")
            _expect(-REL * b <= yb - y < eb, w, "extra B passes through by less than the increment")


def _thin_limits(model, reserves):
    from .axioms import _to_zero

    for a, b in reserves:
        x = a
        left = [(a * 10.0**-k, b - _Y(model, x, a * 10.0**-k, b)) for k in range(9)]
        y_thin_b = _Y(model, x, a, 1e-8 * b)
        w = {"a": a, "b": b, "x": x, "unpaid_B_as_a_shrinks": left, "Y_thin_b": y_thin_b}
        _expect(_to_zero(left) or left[-1][1] <= SATURATION * b, w, "an almost empty A side pays nearly all of B")
        _expect(y_thin_b <= 1e-8 * b, w, "an almost empty B side pays nearly nothing")


def _deep_limits(model, reserves):
    from .axioms import _grows_unbounded, _to_zero

    for a, b in reserves:
        x = a
        deep_a = [(a * 10.0**k, _Y(model, x, a * 10.0**k, b)) for k in range(9)]
        deep_b = [(b * 10.0**k, _Y(model, x, a, b * 10.0**k)) for k in range(9)]
        w = {"a": a, "b": b, "x": x, "deep_a": deep_a, "deep_b": deep_b}
        _expect(_to_zero(deep_a), w, "payout should vanish as the A reserve grows")
        _expect(_grows_unbounded(deep_b), w, "payout should grow without bound with the B reserve")


def _round_trips(model, reserves):
    equal = model.satisfies("UfB")
    for a, b in reserves:
        for f in X_FRACTIONS:
            x = f * a
            y = _Y(model, x, a, b)
            back = _X(model, y, a + x, b - y)
            w = {"a": a, "b": b, "x": x, "returned": back, "equality": equal}
            _expect(back <= x * (1 + REL), w)
            if equal and not _saturated(y, b):
                _expect(abs(back - x) <= REL * x, w)
            yy = f * b
            xx = _X(model, yy, a, b)
            back_b = _Y(model, xx, a - xx, b + yy)
            w = {"a": a, "b": b, "y": yy, "returned": back_b, "equality": equal}
            _expect(back_b <= yy * (1 + REL), w)
            if equal and not _saturated(xx, a):
                _expect(abs(back_b - yy) <= REL * yy, w)


def _marginal_x(model, a, b) -> float:
    """X'(0) by Richardson extrapolation of one-sided quotients."""
    h = 1e-3 * min(b, price(model, (a, b)) * a)
    d = [_X(model, h / 2**k, a, b) / (h / 2**k) for k in range(3)]
    r1 = 2 * d[1] - d[0]
    r2 = 2 * d[2] - d[1]
    return (4 * r2 - r1) / 3


def _no_spread(model, reserves):
    for a, b in reserves:
        p = price(model, (a, b))
        mx = _marginal_x(model, a, b)
        _expect(abs(p * mx - 1.0) <= REL, {"a": a, "b": b, "P": p, "X_prime_0": mx, "product": p * mx})


def _oracle_signs(model, reserves):
    for a, b in reserves:
        p = price(model, (a, b))
        pa, pb = price_partials(model, (a, b))
        s = max(1.0, abs(p), abs(pa), abs(pb))
        _expect(pa <= 1e-9 * s and pb >= -1e-9 * s, {"a": a, "b": b, "P": p, "P_A": pa, "P_B": pb})


def _oracle_scale_invariant(model, reserves):
    for a, b in reserves:
        p = price(model, (a, b))
        for t in (0.1, 3.0, 100.0):
            pt = price(model, (t * a, t * b))
            _expect(abs(pt - p) <= 1e-10 * p, {"a": a, "b": b, "t": t, "P": p, "P_scaled": pt})


def _oracle_surjective(model, reserves):
    for a, b in reserves:
        hi = lo = None
        for k in range(1, 41):
            if hi is None and price(model, (a, b * 10.0**k)) > 1e3 * price(model, (a, b)):
                hi = k
            if lo is None and price(model, (a, b * 10.0**-k)) < 1e-3 * price(model, (a, b)):
                lo = k
        _expect(hi is not None and lo is not None, {"a": a, "b": b, "decades_up": hi, "decades_down": lo})


def _pooling_deepens(model, reserves):
    for a, b in reserves:
        plan = pool_deposit(model, (a, b), 0.5 * a)
        A, B = a + plan.delta_a, b + plan.delta_b
        for f in X_FRACTIONS:
            x, y = f * a, f * b
            before, after = _Y(model, x, a, b), _Y(model, x, A, B)
            _expect(after >= before - 1e-9 * b, {"a": a, "b": b, "x": x, "Y_before": before, "Y_after": after})
            before, after = _X(model, y, a, b), _X(model, y, A, B)
            _expect(after >= before - 1e-9 * a, {"a": a, "b": b, "y": y, "X_before": before, "X_after": after})


def _qc_or_sc(model) -> bool:
    return model.satisfies("QC") or model.satisfies("SC")


# (name, required axioms, extra gate, runner)
SUITE = (
    ("swap.1 utility weakly improves", ("C",), None, _weak_improvement),
    ("swap.2 indifference below exhaustion", ("C",), None, _indifference),
    ("swap.3 payout below counter-reserve", ("UfB", "C"), None, _below_reserve),
    ("swap.4 zero input pays zero", ("SM",), None, _zero_in_zero_out),
    ("swap.5 payout increasing in input", ("SM",), None, _monotone),
    ("swap.6 payout tends to the reserve", ("UfA", "SM", "C"), None, _drains),
    ("swap.7 upper semicontinuity", ("C",), None, _usc),
    ("swap.8 concavity", ("C",), _qc_or_sc, _concave),
    ("swap.9 positive homogeneity", ("C", "SI"), None, _homogeneous),
    ("swap.10 subadditivity", ("SM", "C"), _qc_or_sc, _subadditive),
    ("swap.11 split identity", ("UfB", "SM", "C"), None, _split),
    ("reserves.1 monotone in reserves", ("UfB", "SC"), None, _reserve_monotone),
    ("reserves.2 thin-reserve limits", ("UfB", "SC"), None, _thin_limits),
    ("reserves.3 deep-reserve limits", ("UfB", "SC", "QC", "I+"), None, _deep_limits),
    ("roundtrip no arbitrage", ("SM", "C"), None, _round_trips),
    ("oracle no spread", ("SM", "SC"), None, _no_spread),
    ("oracle partial signs", ("SC",), None, _oracle_signs),
    ("oracle scale invariance", ("SC", "SI"), None, _oracle_scale_invariant),
    ("oracle surjective", ("SC", "UfB", "QC", "I+"), None, _oracle_surjective),
    ("pooling deepens liquidity", ("UfB", "QC", "I+", "SC", "P-cond"), None, _pooling_deepens),
)


def check_theorem_suite(model: AmmModel, reserves=DEFAULT_RESERVES, only=None) -> SuiteReport:
    report = SuiteReport(str(model))
    for name, req, gate, run in SUITE:
        if only is not None and name not in only:
            continue
        missing = tuple(ax for ax in req if not model.satisfies(ax))
        if missing or (gate is not None and not gate(model)):
            why = missing if missing else ("QC or SC",)
            report.checks.append(PropertyCheck(name, SKIP, req, detail=f"needs {', '.join(why)}"))
            continue
        try:
            run(model, reserves)
        except _Fail as exc:
            report.checks.append(PropertyCheck(name, FAIL, req, exc.witness, exc.detail))
            continue
        except (CfmmError, ArithmeticError, ValueError) as exc:
            witness = {"error": type(exc).__name__, "message": str(exc)}
            if getattr(exc, "witness", None) is not None:
                witness["witness"] = exc.witness
            report.checks.append(PropertyCheck(name, FAIL, req, witness, str(exc)))
            continue
        report.checks.append(PropertyCheck(name, PASS, req))
    return report
