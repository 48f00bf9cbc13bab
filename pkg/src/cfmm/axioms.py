"""Numerical certification of the utility axioms and the pooling-liquidity condition."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .models import AXIOMS, AmmModel, utility, utility_gradient, utility_hessian, utility_values
from .oracle import liquidity_condition, liquidity_condition_scale

SATISFIED = "satisfied"
VIOLATED = "violated"
NOT_APPLICABLE = "not-applicable"

# log-log slope below which a probed quantity is read as decaying (or above which, bounded)
TREND_SLOPE = 0.05
# growth per decade must not shrink faster than this ratio for u to be read as unbounded
GROWTH_RATIO = 0.5


@dataclass(frozen=True)
class GridConfig:
    lo: float = 1e-3
    hi: float = 1e3
    points: int = 16
    probe_decades: int = 8
    lambdas: tuple = (0.25, 0.5, 0.75)
    scales: tuple = (0.01, 0.5, 2.0, 100.0)
    probe_bases: tuple = (1e-2, 1.0, 1e2)
    tol: float = 1e-9

    def __post_init__(self):
        if not (0 < self.lo < self.hi and math.isfinite(self.hi)):
            raise ValueError("grid range must satisfy 0 < lo < hi < inf")
        if self.points < 8:
            raise ValueError("grid needs at least 8 points per axis")
        if self.probe_decades < 2:
            raise ValueError("limit probes need at least 2 decades")

    def axis(self) -> np.ndarray:
        return np.geomspace(self.lo, self.hi, self.points)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        xs = self.axis()
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        return X.ravel(), Y.ravel()

    def describe(self) -> dict:
        d = asdict(self)
        d["lambdas"] = list(self.lambdas)
        d["scales"] = list(self.scales)
        d["probe_bases"] = list(self.probe_bases)
        return d


@dataclass
class Verdict:
    axiom: str
    status: str
    witness: dict | None = None
    numerically_verified: bool = False
    detail: str = ""

    def __post_init__(self):
        if self.witness is not None:
            self.witness = _plain(self.witness)

    @property
    def ok(self) -> bool:
        return self.status == SATISFIED


def _plain(obj):
    """Replace numpy scalars and tuples with plain Python values."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class AxiomReport:
    model: str
    descriptor: dict
    verdicts: dict[str, Verdict]
    grid: dict
    tolerances: dict = field(default_factory=dict)

    def pattern(self) -> dict[str, str]:
        return {ax: self.verdicts[ax].status for ax in AXIOMS}

    def mismatches(self, model: AmmModel) -> list[str]:
        """Axioms whose verdict disagrees with the model's documented claims."""
        out = []
        for ax in AXIOMS:
            v = self.verdicts[ax].status
            if ax in model.not_applicable():
                expected = NOT_APPLICABLE
            else:
                expected = SATISFIED if model.satisfies(ax) else VIOLATED
            if v != expected:
                out.append(ax)
        return out

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "descriptor": self.descriptor,
            "verdicts": {ax: _clean(asdict(self.verdicts[ax])) for ax in AXIOMS},
            "grid": self.grid,
            "tolerances": self.tolerances,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isfinite(v):
            return float(f"{v:.12g}")
        return str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


# pointwise predicates (True means the point witnesses a violation) ---------------


def _sm_violation(model, z, zbar) -> bool:
    return not utility(model, z) > utility(model, zbar)


def _qc_tol(m: float, tol: float) -> float:
    return tol * max(1.0, abs(m)) if math.isfinite(m) else 0.0


def _qc_violation(model, z, zbar, lam, tol) -> bool:
    mid = (lam * z[0] + (1 - lam) * zbar[0], lam * z[1] + (1 - lam) * zbar[1])
    m = min(utility(model, z), utility(model, zbar))
    return utility(model, mid) < m - _qc_tol(m, tol)


def _si_violation(model, z, zbar, t, tol) -> bool:
    if not utility(model, z) >= utility(model, zbar):
        return False
    hi = utility(model, (t * z[0], t * z[1]))
    lo = utility(model, (t * zbar[0], t * zbar[1]))
    return hi < lo - tol * max(1.0, abs(hi), abs(lo))


def _sc_terms(model, z):
    ua, ub = utility_gradient(model, z)
    uaa, uab, ubb = utility_hessian(model, z)
    first = ub * uaa - ua * uab
    second = ua * ubb - ub * uab
    scale = max(abs(ub * uaa), abs(ua * uab), abs(ua * ubb), abs(ub * uab), 1e-300)
    return ua, ub, first, second, scale


def _sc_violation(model, z, tol) -> bool:
    ua, ub, first, second, scale = _sc_terms(model, z)
    return not (ua > 0 and ub > 0 and first <= tol * scale and second <= tol * scale)


def _pcond_value(model, z) -> tuple[float, float]:
    try:
        return liquidity_condition(model, z), liquidity_condition_scale(model, z)
    except (ZeroDivisionError, OverflowError, ValueError):
        # the oracle itself is undefined here
        return math.nan, math.nan


def _pcond_violation(model, z, tol) -> bool:
    value, scale = _pcond_value(model, z)
    return not value >= -tol * scale


# individual checks ---------------------------------------------------------------


def _grid_values(model, grid: GridConfig):
    X, Y = grid.mesh()
    with np.errstate(all="ignore"):
        U = utility_values(model, X, Y)
    return X, Y, U


def _check_ufb(model: AmmModel, grid: GridConfig) -> Verdict:
    for v in grid.axis():
        for z in ((float(v), 0.0), (0.0, float(v))):
            u = utility(model, z)
            if u != -math.inf:
                return Verdict("UfB", VIOLATED, {"point": list(z), "u": u}, detail="finite on the boundary")
    X, Y, U = _grid_values(model, grid)
    bad = np.flatnonzero(~np.isfinite(U))
    if bad.size:
        k = int(bad[0])
        return Verdict("UfB", VIOLATED, {"point": [X[k], Y[k]], "u": float(U[k])}, detail="not finite inside")
    return Verdict("UfB", SATISFIED, detail="-inf on both axes, finite on the grid")


def _decade_probe(f, base: float, decades: int, upward: bool) -> list[tuple[float, float]]:
    out = []
    for k in range(decades + 1):
        s = base * (10.0**k if upward else 10.0**-k)
        out.append((s, f(s)))
    return out


def _grows_unbounded(seq) -> bool:
    vals = [v for _, v in seq]
    if vals[-1] == math.inf:
        return True
    if not all(math.isfinite(v) for v in vals):
        return False
    d = np.diff(vals)
    if np.any(d <= 0):
        return False
    return d[-1] >= GROWTH_RATIO * d[-2]


def _check_ufa(model: AmmModel, grid: GridConfig) -> Verdict:
    for base in grid.probe_bases:
        for side in ("A", "B"):
            if side == "A":
                seq = _decade_probe(lambda s: utility(model, (s, base)), base, grid.probe_decades, True)
            else:
                seq = _decade_probe(lambda s: utility(model, (base, s)), base, grid.probe_decades, True)
            if not _grows_unbounded(seq):
                return Verdict(
                    "UfA",
                    VIOLATED,
                    {"side": side, "fixed": base, "probe": [list(p) for p in seq]},
                    detail="utility growth stalls along the probe",
                )
    return Verdict("UfA", SATISFIED, detail="per-decade growth persists to the last probe")


def _slope(seq) -> float:
    """d log v / d log s over the last probe step."""
    (s0, v0), (s1, v1) = seq[-2], seq[-1]
    if v1 <= 0 or v0 <= 0:
        return -math.inf if v1 <= 0 < v0 else math.nan
    return math.log(v1 / v0) / math.log(s1 / s0)


def _to_zero(seq) -> bool:
    """Decay to zero: tiny last value, a power-law slope, or decrements that do not die out."""
    vals = [v for _, v in seq]
    v = vals[-1]
    if not math.isfinite(v) or v < 0:
        return False
    if v < 1e-6 * max(1.0, vals[0]) or (v < vals[-2] and abs(_slope(seq)) >= TREND_SLOPE):
        return True
    d = -np.diff(vals)
    return bool(np.all(d > 0) and d[-1] >= GROWTH_RATIO * d[-2])


def _to_infinity(seq) -> bool:
    v = seq[-1][1]
    if v == math.inf:
        return True
    if not math.isfinite(v):
        return False
    return v > 1e6 * max(1.0, abs(seq[0][1])) or (v > seq[-2][1] and abs(_slope(seq)) >= TREND_SLOPE)


def _to_positive_finite(seq) -> bool:
    v = seq[-1][1]
    return math.isfinite(v) and v > 0 and abs(_slope(seq)) <= TREND_SLOPE


def _to_finite(seq) -> bool:
    v = seq[-1][1]
    return math.isfinite(v) and (v <= seq[-2][1] or abs(_slope(seq)) <= TREND_SLOPE)


def _check_inada(model: AmmModel, grid: GridConfig) -> Verdict:
    def grad(i, z):
        try:
            return utility_gradient(model, z)[i]
        except (ValueError, ZeroDivisionError, OverflowError):
            return math.nan

    n = grid.probe_decades
    for base in grid.probe_bases:
        # (own partial or cross partial, moving coordinate, direction, requirement)
        cases = [
            ("u_A as a->inf", lambda s: grad(0, (s, base)), True, _to_zero),
            ("u_B as b->inf", lambda s: grad(1, (base, s)), True, _to_zero),
            ("u_B as a->inf", lambda s: grad(1, (s, base)), True, _to_positive_finite),
            ("u_A as b->inf", lambda s: grad(0, (base, s)), True, _to_positive_finite),
            ("u_A as a->0", lambda s: grad(0, (s, base)), False, _to_infinity),
            ("u_B as b->0", lambda s: grad(1, (base, s)), False, _to_infinity),
            ("u_B as a->0", lambda s: grad(1, (s, base)), False, _to_finite),
            ("u_A as b->0", lambda s: grad(0, (base, s)), False, _to_finite),
        ]
        for name, f, upward, ok in cases:
            seq = _decade_probe(f, base, n, upward)
            if not ok(seq):
                return Verdict(
                    "I+",
                    VIOLATED,
                    {"limit": name, "fixed": base, "probe": [list(p) for p in seq], "last_slope": _slope(seq)},
                    detail=f"{name} does not show the required trend",
                )
    return Verdict("I+", SATISFIED, detail="all eight marginal-utility limits trend correctly")


def _check_sm(model: AmmModel, grid: GridConfig) -> Verdict:
    n = grid.points
    X, Y, U = _grid_values(model, grid)
    U = U.reshape(n, n)
    X = X.reshape(n, n)
    Y = Y.reshape(n, n)
    for axis in (0, 1):
        lo = U[:-1, :] if axis == 0 else U[:, :-1]
        hi = U[1:, :] if axis == 0 else U[:, 1:]
        bad = np.argwhere(~(hi > lo))
        for i, j in bad:
            ii, jj = (i + 1, j) if axis == 0 else (i, j + 1)
            z, zbar = (X[ii, jj], Y[ii, jj]), (X[i, j], Y[i, j])
            if _sm_violation(model, z, zbar):
                return Verdict(
                    "SM",
                    VIOLATED,
                    {"z": list(z), "zbar": list(zbar), "u_z": utility(model, z), "u_zbar": utility(model, zbar)},
                    detail="a componentwise larger point is not strictly preferred",
                )
    return Verdict("SM", SATISFIED, detail="strict increase along both grid directions")


def _pairs(grid: GridConfig):
    X, Y = grid.mesh()
    i, j = np.triu_indices(X.size, k=1)
    return X, Y, i, j


def _check_qc(model: AmmModel, grid: GridConfig) -> Verdict:
    X, Y, i, j = _pairs(grid)
    with np.errstate(all="ignore"):
        U = utility_values(model, X, Y)
        m = np.minimum(U[i], U[j])
        tol = grid.tol * 0.1 * np.maximum(1.0, np.abs(m))
        for lam in grid.lambdas:
            mid = utility_values(model, lam * X[i] + (1 - lam) * X[j], lam * Y[i] + (1 - lam) * Y[j])
            bad = np.flatnonzero(mid < m - tol)
            for k in bad:
                z, zbar = (X[i[k]], Y[i[k]]), (X[j[k]], Y[j[k]])
                if _qc_violation(model, z, zbar, lam, grid.tol * 0.1):
                    return Verdict(
                        "QC",
                        VIOLATED,
                        {"z": list(z), "zbar": list(zbar), "lambda": lam, "u_mid": float(mid[k]), "min_u": float(m[k])},
                        model.satisfies("QC") and "QC" in model.numerically_verified(),
                        detail="a convex combination falls below both endpoints",
                    )
    return Verdict(
        "QC",
        SATISFIED,
        numerically_verified="QC" in model.numerically_verified(),
        detail=f"{i.size} pairs at lambda in {list(grid.lambdas)}",
    )


def _check_si(model: AmmModel, grid: GridConfig) -> Verdict:
    X, Y, i, j = _pairs(grid)
    # both orders of every pair
    i, j = np.concatenate([i, j]), np.concatenate([j, i])
    with np.errstate(all="ignore"):
        U = utility_values(model, X, Y)
        premise = U[i] >= U[j]
        tol = grid.tol * 0.1
        for t in grid.scales:
            Ut = utility_values(model, t * X, t * Y)
            hi, lo = Ut[i], Ut[j]
            bad = np.flatnonzero(premise & (hi < lo - tol * np.maximum(1.0, np.maximum(np.abs(hi), np.abs(lo)))))
            for k in bad:
                z, zbar = (X[i[k]], Y[i[k]]), (X[j[k]], Y[j[k]])
                if _si_violation(model, z, zbar, t, tol):
                    return Verdict(
                        "SI",
                        VIOLATED,
                        {
                            "z": list(z),
                            "zbar": list(zbar),
                            "t": t,
                            "u_z": float(U[i[k]]),
                            "u_zbar": float(U[j[k]]),
                            "u_tz": float(hi[k]),
                            "u_tzbar": float(lo[k]),
                        },
                        detail="scaling reverses the preference between two points",
                    )
    return Verdict("SI", SATISFIED, detail=f"order preserved for t in {list(grid.scales)}")


def _check_sc(model: AmmModel, grid: GridConfig) -> Verdict:
    X, Y = grid.mesh()
    for x, y in zip(X, Y):
        z = (float(x), float(y))
        if _sc_violation(model, z, grid.tol):
            ua, ub, first, second, scale = _sc_terms(model, z)
            return Verdict(
                "SC",
                VIOLATED,
                {"z": list(z), "u_A": ua, "u_B": ub, "uB_uAA_minus_uA_uAB": first, "uA_uBB_minus_uB_uAB": second},
                detail="single-crossing inequality fails",
            )
    return Verdict("SC", SATISFIED, numerically_verified="SC" in model.numerically_verified(), detail="all grid points")


def _check_pcond(model: AmmModel, grid: GridConfig) -> Verdict:
    if "P-cond" in model.not_applicable():
        return Verdict("P-cond", NOT_APPLICABLE, detail="price is set externally; the condition is not studied")
    X, Y = grid.mesh()
    for x, y in zip(X, Y):
        z = (float(x), float(y))
        if _pcond_violation(model, z, grid.tol):
            return Verdict(
                "P-cond",
                VIOLATED,
                dict(zip(("z", "value", "scale"), (list(z), *_pcond_value(model, z)))),
                detail="liquidity condition negative",
            )
    return Verdict(
        "P-cond", SATISFIED, numerically_verified="P-cond" in model.numerically_verified(), detail="all grid points"
    )


def _check_c(model: AmmModel, grid: GridConfig) -> Verdict:
    return Verdict("C", SATISFIED, detail="composition of continuous functions; not probed by sampling")


_CHECKS = {
    "UfB": _check_ufb,
    "UfA": _check_ufa,
    "SM": _check_sm,
    "C": _check_c,
    "QC": _check_qc,
    "SI": _check_si,
    "I+": _check_inada,
    "SC": _check_sc,
    "P-cond": _check_pcond,
}


def check_axiom(model: AmmModel, axiom: str, grid: GridConfig | None = None) -> Verdict:
    if axiom not in _CHECKS:
        raise KeyError(f"unknown axiom '{axiom}'; expected one of {', '.join(AXIOMS)}")
    return _CHECKS[axiom](model, grid or GridConfig())


def check_all(model: AmmModel, grid: GridConfig | None = None) -> AxiomReport:
    grid = grid or GridConfig()
    verdicts = {ax: check_axiom(model, ax, grid) for ax in AXIOMS}
    return AxiomReport(
        model=str(model),
        descriptor=model.describe(),
        verdicts=verdicts,
        grid=grid.describe(),
        tolerances={"relative": grid.tol, "trend_slope": TREND_SLOPE, "growth_ratio": GROWTH_RATIO},
    )


def reproduce_witness(model: AmmModel, verdict: Verdict, grid: GridConfig | None = None) -> bool:
    """Re-evaluate a violation witness; True if it still shows the violation."""
    grid = grid or GridConfig()
    w = verdict.witness
    if verdict.status != VIOLATED or w is None:
        return False
    ax = verdict.axiom
    if ax == "UfB":
        u = utility(model, tuple(w["point"]))
        return (u != -math.inf) if 0.0 in w["point"] else not math.isfinite(u)
    if ax == "SM":
        return _sm_violation(model, tuple(w["z"]), tuple(w["zbar"]))
    if ax == "QC":
        return _qc_violation(model, tuple(w["z"]), tuple(w["zbar"]), w["lambda"], grid.tol * 0.1)
    if ax == "SI":
        return _si_violation(model, tuple(w["z"]), tuple(w["zbar"]), w["t"], grid.tol * 0.1)
    if ax == "SC":
        return _sc_violation(model, tuple(w["z"]), grid.tol)
    if ax == "P-cond":
        return _pcond_violation(model, tuple(w["z"]), grid.tol)
    if ax in ("UfA", "I+"):
        return check_axiom(model, ax, grid).status == VIOLATED
    return False
