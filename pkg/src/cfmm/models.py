"""Catalog of constant-function market makers as bivariate utilities.

Every model writes its utility once, in terms of a small set of elementary
operations.  The same formula is evaluated on floats (swap solving), on numpy
arrays (grid checks) and on Taylor jets (exact derivatives), so the value,
gradient, Hessian and the third derivatives needed by the oracle never drift
apart.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Callable, ClassVar, NamedTuple

import numpy as np

from ._jet import Jet, lift_implicit
from .errors import DomainError, ModelError

AXIOMS = ("UfB", "UfA", "SM", "C", "QC", "SI", "I+", "SC", "P-cond")
_ALL = frozenset(AXIOMS)

EPS = sys.float_info.epsilon


class Reserves(NamedTuple):
    """Pool holdings (a, b) of assets A and B."""

    a: float
    b: float

    @classmethod
    def of(cls, r) -> "Reserves":
        """Validate and coerce a pair into strictly positive reserves."""
        a, b = (float(v) for v in r)
        if math.isnan(a) or math.isnan(b):
            raise DomainError("reserves must not be NaN")
        if not (a > 0 and b > 0):
            raise DomainError(f"reserves must be strictly positive, got ({a}, {b})")
        if math.isinf(a) or math.isinf(b):
            raise DomainError("reserves must be finite")
        return cls(a, b)

    def scaled(self, t: float) -> "Reserves":
        return Reserves(t * self.a, t * self.b)


@dataclass(frozen=True)
class UtilityEval:
    value: float
    grad: tuple[float, float]
    hess: tuple[float, float, float]
    grad_source: str = "analytic"
    hess_source: str = "analytic"


# elementary operations, one namespace per argument type -----------------------


class _MathOps:
    @staticmethod
    def log(v):
        if v > 0:
            return math.log(v)
        if v == 0:
            return -math.inf
        raise DomainError(f"log of negative value {v}")

    @staticmethod
    def sqrt(v):
        return math.sqrt(v)

    @staticmethod
    def logsinh(t):
        if t == 0:
            return -math.inf
        if t > 1.0:
            return t + math.log1p(-math.exp(-2.0 * t)) - math.log(2.0)
        return math.log(math.sinh(t))

    @staticmethod
    def pow(v, q):
        return v if q == 1 else v**q


class _NumpyOps:
    @staticmethod
    def log(v):
        with np.errstate(divide="ignore"):
            return np.log(v)

    @staticmethod
    def sqrt(v):
        return np.sqrt(v)

    @staticmethod
    def logsinh(t):
        t = np.asarray(t, dtype=float)
        big = t > 1.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            large = t + np.log1p(-np.exp(-2.0 * t)) - math.log(2.0)
            small = np.log(np.sinh(np.where(big, 1.0, t)))
        return np.where(big, large, small)

    @staticmethod
    def pow(v, q):
        return v if q == 1 else np.power(v, q)


def _coth(t):
    return 1.0 / math.tanh(t)


class _JetOps:
    @staticmethod
    def log(j: Jet) -> Jet:
        v = j.value
        return j.compose([math.log(v), 1.0 / v, -1.0 / v**2, 2.0 / v**3])

    @staticmethod
    def sqrt(j: Jet) -> Jet:
        s = math.sqrt(j.value)
        return j.compose([s, 0.5 / s, -0.25 / s**3, 0.375 / s**5])

    @staticmethod
    def logsinh(j: Jet) -> Jet:
        t = j.value
        c = _coth(t)
        d2 = 1.0 - c * c
        return j.compose([_MathOps.logsinh(t), c, d2, -2.0 * c * d2])

    @staticmethod
    def pow(j, q):
        return j if q == 1 else j**q


def _ops_for(v):
    if isinstance(v, Jet):
        return _JetOps
    if isinstance(v, np.ndarray):
        return _NumpyOps
    return _MathOps


# Curve's implicit invariant -----------------------------------------------------


def _curve_cubic(d, x, y, C):
    return d**3 + 4.0 * (C - 1.0) * x * y * d - 4.0 * C * (x + y) * x * y


def _curve_scalar(x: float, y: float, C: float) -> float:
    if not (x >= 0 and y >= 0):
        raise DomainError("curve_invariant needs x, y >= 0")
    s = x + y
    if x == 0 or y == 0:
        return 0.0
    u = x / s
    v = y / s
    k = 4.0 * (C - 1.0) * u * v
    m = 4.0 * C * u * v
    d = 1.0
    for _ in range(200):
        d_new = d - (d * d * d + k * d - m) / (3.0 * d * d + k)
        if d_new <= 0:
            d_new = 0.5 * d
        if abs(d_new - d) <= 4 * EPS * d_new:
            d = d_new
            break
        d = d_new
    return d * s


def curve_invariant(x, y, C: float):
    """Unique nonnegative root D of D^3 + 4(C-1)xyD - 4C(x+y)xy = 0.

    Accepts scalars or arrays.  The cubic is increasing and convex on D >= 0
    and nonnegative at D = x + y, so Newton started from that end of the
    bracket [0, x + y] decreases monotonically onto the root.  The problem is
    solved on the unit simplex and rescaled, which makes D exactly degree-1
    homogeneous up to rounding.
    """
    if C < 1:
        raise ModelError(f"Curve requires C >= 1, got {C}", key="C")
    if isinstance(x, (int, float)) and isinstance(y, (int, float)):
        return _curve_scalar(float(x), float(y), C)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(xa < 0) or np.any(ya < 0) or np.any(np.isnan(xa)) or np.any(np.isnan(ya)):
        raise DomainError("curve_invariant needs x, y >= 0")
    s = xa + ya
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(s > 0, xa / np.where(s > 0, s, 1.0), 0.0)
        v = np.where(s > 0, ya / np.where(s > 0, s, 1.0), 0.0)
    k = 4.0 * (C - 1.0) * u * v
    m = 4.0 * C * u * v
    d = np.ones_like(u)
    for _ in range(200):
        f = d**3 + k * d - m
        step = f / (3.0 * d * d + k)
        step = np.where(d > 0, step, 0.0)
        d_new = np.maximum(d - step, 0.0)
        done = np.all(np.abs(d_new - d) <= 4 * EPS * np.maximum(d_new, 1e-300))
        d = d_new
        if done:
            break
    d = np.where(m > 0, d, 0.0)
    out = d * s
    return float(out) if out.ndim == 0 else out


# base class ---------------------------------------------------------------------


@dataclass(frozen=True)
class AmmModel:
    """A two-asset AMM given by a utility u(x, y) on the closed quadrant."""

    kind: ClassVar[str] = "abstract"
    label: ClassVar[str] = "AMM"
    derivative_source: ClassVar[str] = "analytic"

    def formula(self, x, y):
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def claimed_axioms(self) -> frozenset:
        """Axioms (plus P-cond) this model is documented to satisfy."""
        return _ALL

    def numerically_verified(self) -> frozenset:
        """Claims that are only established numerically for this model."""
        return frozenset()

    def not_applicable(self) -> frozenset:
        return frozenset()

    def satisfies(self, axiom: str) -> bool:
        return axiom in self.claimed_axioms()

    def price_formula(self, x: float, y: float) -> float | None:
        """Closed-form marginal price u_A/u_B, or None to use derivatives."""
        return None

    def jet(self, x: float, y: float) -> Jet:
        jx, jy = Jet.variables(x, y)
        return self.formula(jx, jy)

    def describe(self) -> dict:
        return {"kind": self.kind, "params": self.params()}

    def __str__(self):
        p = ", ".join(f"{k}={v:g}" for k, v in self.params().items())
        return f"{self.label}({p})" if p else self.label


def _positive(name, value, allow_zero=False):
    value = float(value)
    if math.isnan(value) or value < 0 or (value == 0 and not allow_zero) or math.isinf(value):
        raise ModelError(f"parameter {name} must be {'>= 0' if allow_zero else '> 0'}, got {value}", key=name)
    return value


@dataclass(frozen=True)
class UniswapV2(AmmModel):
    kind: ClassVar[str] = "uniswap-v2"
    label: ClassVar[str] = "Uniswap V2"

    def formula(self, x, y):
        ops = _ops_for(x)
        return ops.log(x) + ops.log(y)

    def price_formula(self, x, y):
        return y / x


@dataclass(frozen=True)
class Balancer(AmmModel):
    w: float = 0.3
    kind: ClassVar[str] = "balancer"
    label: ClassVar[str] = "Balancer"

    def __post_init__(self):
        w = float(self.w)
        if not 0 < w < 1:
            raise ModelError(f"Balancer weight w must lie in (0, 1), got {w}", key="w")

    def params(self):
        return {"w": self.w}

    def formula(self, x, y):
        ops = _ops_for(x)
        return self.w * ops.log(x) + (1.0 - self.w) * ops.log(y)

    def price_formula(self, x, y):
        return self.w * y / ((1.0 - self.w) * x)


@dataclass(frozen=True)
class UniswapV3(AmmModel):
    """Constant product on virtual reserves (alpha + x, beta + y), static alpha, beta."""

    alpha: float = 1.0
    beta: float = 1.0
    kind: ClassVar[str] = "uniswap-v3"
    label: ClassVar[str] = "Uniswap V3"

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta}

    def claimed_axioms(self):
        return _ALL - {"UfB", "SI"}

    def formula(self, x, y):
        ops = _ops_for(x)
        return ops.log(self.alpha + x) + ops.log(self.beta + y)

    def price_formula(self, x, y):
        return (self.beta + y) / (self.alpha + x)


@dataclass(frozen=True)
class MStable(AmmModel):
    kind: ClassVar[str] = "mstable"
    label: ClassVar[str] = "mStable"

    def claimed_axioms(self):
        return _ALL - {"UfB", "I+"}

    def formula(self, x, y):
        return _ops_for(x).log(x + y)

    def price_formula(self, x, y):
        return 1.0


@dataclass(frozen=True)
class StableSwap(AmmModel):
    C: float = 1.0
    kind: ClassVar[str] = "stableswap"
    label: ClassVar[str] = "StableSwap"

    def __post_init__(self):
        _positive("C", self.C)

    def params(self):
        return {"C": self.C}

    def claimed_axioms(self):
        return _ALL - {"UfB", "SI"}

    def formula(self, x, y):
        return _ops_for(x).log(self.C * (x + y) + x * y)

    def price_formula(self, x, y):
        return (self.C + y) / (self.C + x)


@dataclass(frozen=True)
class LStableSwap(AmmModel):
    C: float = 1.0
    kind: ClassVar[str] = "lstableswap"
    label: ClassVar[str] = "L.StableSwap"

    def __post_init__(self):
        _positive("C", self.C)

    def params(self):
        return {"C": self.C}

    def formula(self, x, y):
        ops = _ops_for(x)
        return self.C * ops.log(x + y) + ops.log(x) + ops.log(y)

    def price_formula(self, x, y):
        c1 = self.C + 1.0
        return y * (c1 * x + y) / (x * (x + c1 * y))


@dataclass(frozen=True)
class Curve(AmmModel):
    """u = log D(x, y) with D the nonnegative root of Curve's cubic invariant."""

    C: float = 2.0
    kind: ClassVar[str] = "curve"
    label: ClassVar[str] = "Curve"

    def __post_init__(self):
        if not float(self.C) >= 1:
            raise ModelError(f"Curve requires C >= 1, got {self.C}", key="C")

    def params(self):
        return {"C": self.C}

    def numerically_verified(self):
        return frozenset({"QC", "SC", "P-cond"})

    def formula(self, x, y):
        ops = _ops_for(x)
        if ops is _JetOps:
            C = self.C
            x0, y0 = x.value, y.value
            d0 = curve_invariant(x0, y0, C)
            slope = 3.0 * d0 * d0 + 4.0 * (C - 1.0) * x0 * y0
            d = lift_implicit(d0, lambda g: _curve_cubic(g, x, y, C), slope)
            return ops.log(d)
        return ops.log(curve_invariant(x, y, self.C))

    def price_formula(self, x, y):
        C = self.C
        d = curve_invariant(x, y, C)
        return y * (C * (2 * x + y) - (C - 1) * d) / (x * (C * (x + 2 * y) - (C - 1) * d))


@dataclass(frozen=True)
class Dodo(AmmModel):
    """Closed-form Dodo utility with exogenous price P and pooling parameter C.

    The formula below is the rationalized version of the textbook expression:
    (sqrt(s^2 + C t) - s) / C == t / (s + sqrt(s^2 + C t)), which stays exact as
    C -> 0 and at C = 1.
    """

    P: float = 1.5
    C: float = 0.5
    kind: ClassVar[str] = "dodo"
    label: ClassVar[str] = "Dodo"

    def __post_init__(self):
        _positive("P", self.P)
        c = float(self.C)
        if math.isnan(c) or not 0 <= c <= 1:
            raise ModelError(f"Dodo requires C in [0, 1], got {self.C}", key="C")

    def params(self):
        return {"P": self.P, "C": self.C}

    def claimed_axioms(self):
        if self.C == 0:
            return _ALL - {"UfB", "I+", "P-cond"}
        return _ALL - {"P-cond"}

    def not_applicable(self):
        return frozenset({"P-cond"})

    def _half_balance(self, lo, hi, ops):
        s = (1.0 - self.C) * lo
        t = lo * (s + hi)
        return t / (s + ops.sqrt(s * s + self.C * t))

    def formula(self, x, y):
        ops = _ops_for(x)
        px = self.P * x
        if self.C == 0:
            return ops.log(px + y)
        if ops is _NumpyOps:
            lo = np.minimum(px, y)
            hi = np.maximum(px, y)
            with np.errstate(invalid="ignore", divide="ignore"):
                g = self._half_balance(lo, hi, ops)
            g = np.where(lo > 0, g, 0.0)
            return ops.log(2.0 * g)
        if ops is _JetOps:
            lo, hi = (px, y) if px.value <= y.value else (y, px)
        else:
            lo, hi = min(px, y), max(px, y)
            if lo == 0:
                return -math.inf
        return ops.log(2.0 * self._half_balance(lo, hi, ops))

    def price_formula(self, x, y):
        px = self.P * x
        if self.C == 0:
            return self.P
        lo, hi = (px, y) if px <= y else (y, px)
        g = self._half_balance(lo, hi, _MathOps)
        k = 2.0 * (1.0 - self.C)
        if px <= y:
            return self.P * (y + k * (px - g)) / px
        return self.P * y / (px + k * (y - g))


# symmetric decomposable AMMs --------------------------------------------------


@dataclass(frozen=True)
class SinhSdamm(AmmModel):
    """u(x, y) = U(x) + U(y) with U(z) = log(sinh(C z^q))."""

    C: float = 1.0
    q: float = 0.8
    kind: ClassVar[str] = "sdamm-sinh"
    label: ClassVar[str] = "SDAMM sinh"

    def __post_init__(self):
        _positive("C", self.C)
        q = float(self.q)
        if not 0 < q <= 1:
            raise ModelError(f"sinh SDAMM requires q in (0, 1], got {self.q}", key="q")

    def params(self):
        return {"C": self.C, "q": self.q}

    def claimed_axioms(self):
        if self.q == 1:
            return _ALL - {"SI", "I+"}
        return _ALL - {"SI"}

    def marginal(self, z: float) -> float:
        """U'(z)."""
        t = self.C * z**self.q
        return self.C * self.q * z ** (self.q - 1.0) * _coth(t)

    def formula(self, x, y):
        ops = _ops_for(x)
        return ops.logsinh(self.C * ops.pow(x, self.q)) + ops.logsinh(self.C * ops.pow(y, self.q))

    def price_formula(self, x, y):
        return self.marginal(x) / self.marginal(y)


@dataclass(frozen=True)
class Sdamm(AmmModel):
    """User-supplied SDAMM u(x, y) = U(x) + U(y).

    Derivatives of U that are not supplied are approximated by central finite
    differences with relative steps.
    """

    U: Callable[[float], float] = field(default=math.log)
    dU: Callable | None = None
    d2U: Callable | None = None
    d3U: Callable | None = None
    claims: frozenset = _ALL - {"SI"}
    kind: ClassVar[str] = "sdamm"
    label: ClassVar[str] = "SDAMM"

    @property
    def derivative_source(self):
        return "analytic" if self.dU is not None and self.d2U is not None else "finite-difference"

    def claimed_axioms(self):
        return frozenset(self.claims)

    def _U(self, z):
        if z == 0:
            try:
                return float(self.U(0.0))
            except (ValueError, ZeroDivisionError):
                return -math.inf
        return float(self.U(z))

    def formula(self, x, y):
        if isinstance(x, Jet):
            return self._ujet(x) + self._ujet(y)
        if isinstance(x, np.ndarray):
            f = np.vectorize(self._U, otypes=[float])
            return f(x) + f(y)
        return self._U(x) + self._U(y)

    def derivatives(self, z: float) -> list[float]:
        """[U, U', U'', U'''] at z > 0."""
        U, d1, d2, d3 = self._U, self.dU, self.d2U, self.d3U
        out = [U(z)]
        if d1 is not None:
            out.append(d1(z))
        else:
            h = EPS ** (1 / 3) * z
            out.append((U(z + h) - U(z - h)) / (2 * h))
        if d2 is not None:
            out.append(d2(z))
        elif d1 is not None:
            h = EPS ** (1 / 3) * z
            out.append((d1(z + h) - d1(z - h)) / (2 * h))
        else:
            h = EPS**0.25 * z
            out.append((U(z + h) - 2 * U(z) + U(z - h)) / h**2)
        if d3 is not None:
            out.append(d3(z))
        elif d2 is not None:
            h = EPS ** (1 / 3) * z
            out.append((d2(z + h) - d2(z - h)) / (2 * h))
        elif d1 is not None:
            h = EPS**0.25 * z
            out.append((d1(z + h) - 2 * d1(z) + d1(z - h)) / h**2)
        else:
            h = EPS**0.2 * z
            out.append((U(z + 2 * h) - 2 * U(z + h) + 2 * U(z - h) - U(z - 2 * h)) / (2 * h**3))
        return out

    def _ujet(self, j: Jet) -> Jet:
        return j.compose(self.derivatives(j.value))

    def price_formula(self, x, y):
        return self.derivatives(x)[1] / self.derivatives(y)[1]


# public operations ---------------------------------------------------------------


def _point(z) -> tuple[float, float]:
    x, y = (float(v) for v in z)
    if math.isnan(x) or math.isnan(y):
        raise DomainError("utility argument must not be NaN")
    if x < 0 or y < 0:
        raise DomainError(f"point ({x}, {y}) lies outside the closed quadrant")
    return x, y


def utility(model: AmmModel, z) -> float:
    """u(z) on the closed quadrant; -inf where the model is unbounded below."""
    x, y = _point(z)
    return float(model.formula(x, y))


def utility_values(model: AmmModel, x, y) -> np.ndarray:
    """Vectorized utility over broadcastable arrays of reserves."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    return np.asarray(model.formula(np.array(x), np.array(y)), dtype=float)


def utility_jet(model: AmmModel, r) -> Jet:
    a, b = Reserves.of(r)
    return model.jet(a, b)


def evaluate(model: AmmModel, r) -> UtilityEval:
    j = utility_jet(model, r)
    src = model.derivative_source
    return UtilityEval(
        value=j.value,
        grad=(j.partial(1, 0), j.partial(0, 1)),
        hess=(j.partial(2, 0), j.partial(1, 1), j.partial(0, 2)),
        grad_source=src,
        hess_source=src,
    )


def utility_gradient(model: AmmModel, r) -> tuple[float, float]:
    j = utility_jet(model, r)
    return j.partial(1, 0), j.partial(0, 1)


def utility_hessian(model: AmmModel, r) -> tuple[float, float, float]:
    j = utility_jet(model, r)
    return j.partial(2, 0), j.partial(1, 1), j.partial(0, 2)


# descriptors ---------------------------------------------------------------------

MODEL_KINDS: dict[str, type[AmmModel]] = {
    cls.kind: cls
    for cls in (UniswapV2, Balancer, UniswapV3, MStable, StableSwap, LStableSwap, Curve, Dodo, SinhSdamm)
}

_ALIASES = {
    "uniswapv2": "uniswap-v2",
    "uniswap_v2": "uniswap-v2",
    "uniswapv3": "uniswap-v3",
    "uniswap_v3": "uniswap-v3",
    "l.stableswap": "lstableswap",
    "l-stableswap": "lstableswap",
    "sdamm": "sdamm-sinh",
    "sinh": "sdamm-sinh",
}

_PARAMS = {
    "uniswap-v2": (),
    "balancer": ("w",),
    "uniswap-v3": ("alpha", "beta"),
    "mstable": (),
    "stableswap": ("C",),
    "lstableswap": ("C",),
    "curve": ("C",),
    "dodo": ("P", "C"),
    "sdamm-sinh": ("C", "q"),
}


def parse_model(desc) -> AmmModel:
    """Build a model from {"kind": str, "params": {name: number}} or a kind string."""
    if isinstance(desc, AmmModel):
        return desc
    if isinstance(desc, str):
        desc = {"kind": desc, "params": {}}
    if not isinstance(desc, dict):
        raise ModelError("model descriptor must be an object", key=None)
    extra = set(desc) - {"kind", "params"}
    if extra:
        key = sorted(extra)[0]
        raise ModelError(f"unknown descriptor field '{key}'", key=key)
    if "kind" not in desc:
        raise ModelError("model descriptor is missing 'kind'", key="kind")
    raw = str(desc["kind"])
    kind = raw.lower().replace(" ", "")
    kind = _ALIASES.get(kind, kind)
    if kind not in MODEL_KINDS:
        raise ModelError(f"unknown model kind '{raw}'", key="kind")
    params = desc.get("params") or {}
    if not isinstance(params, dict):
        raise ModelError("'params' must be an object", key="params")
    allowed = _PARAMS[kind]
    kwargs = {}
    for name, value in params.items():
        if name not in allowed:
            raise ModelError(f"unknown parameter '{name}' for model '{kind}'", key=name)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ModelError(f"parameter '{name}' must be a number", key=name)
        kwargs[name] = float(value)
    return MODEL_KINDS[kind](**kwargs)


def catalog() -> list[AmmModel]:
    """The eight real-world models with the parameters used for axiom reports."""
    return [
        UniswapV2(),
        Balancer(w=0.3),
        UniswapV3(alpha=1.0, beta=2.0),
        MStable(),
        StableSwap(C=1.0),
        LStableSwap(C=1.0),
        Curve(C=2.0),
        Dodo(P=1.5, C=0.5),
    ]
