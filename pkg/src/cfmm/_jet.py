"""Truncated bivariate Taylor polynomials ("jets") for exact partial derivatives.

A jet carries the Taylor coefficients of a function of two variables around a
point up to total order 3.  Arithmetic on jets propagates all partials through a
formula, so writing a utility once gives its value, gradient, Hessian and third
derivatives to machine precision.
"""

from __future__ import annotations

import math

ORDER = 3

# (i, j) -> position in the flat coefficient tuple, i + j <= ORDER
_INDEX = [(i, n - i) for n in range(ORDER + 1) for i in range(n, -1, -1)]
_POS = {ij: k for k, ij in enumerate(_INDEX)}
_SIZE = len(_INDEX)
_PRODUCTS = [
    (_POS[(i1, j1)], _POS[(i2, j2)], _POS[(i1 + i2, j1 + j2)])
    for (i1, j1) in _INDEX
    for (i2, j2) in _INDEX
    if i1 + i2 + j1 + j2 <= ORDER
]


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = list(coeffs)

    @classmethod
    def constant(cls, value: float) -> "Jet":
        c = [0.0] * _SIZE
        c[0] = float(value)
        return cls(c)

    @classmethod
    def variables(cls, x: float, y: float) -> tuple["Jet", "Jet"]:
        jx = cls.constant(x)
        jy = cls.constant(y)
        jx.c[_POS[(1, 0)]] = 1.0
        jy.c[_POS[(0, 1)]] = 1.0
        return jx, jy

    @property
    def value(self) -> float:
        return self.c[0]

    def partial(self, i: int, j: int) -> float:
        """d^(i+j) f / dx^i dy^j at the expansion point."""
        return self.c[_POS[(i, j)]] * math.factorial(i) * math.factorial(j)

    def d_dx(self) -> "Jet":
        """Jet of df/dx; coefficients of the top order are lost (set to zero)."""
        c = [0.0] * _SIZE
        for (i, j), k in _POS.items():
            if i + 1 + j <= ORDER:
                c[k] = (i + 1) * self.c[_POS[(i + 1, j)]]
        return Jet(c)

    def d_dy(self) -> "Jet":
        c = [0.0] * _SIZE
        for (i, j), k in _POS.items():
            if i + j + 1 <= ORDER:
                c[k] = (j + 1) * self.c[_POS[(i, j + 1)]]
        return Jet(c)

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet([p + q for p, q in zip(self.c, other.c)])
        c = list(self.c)
        c[0] += other
        return Jet(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet([-p for p in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            out = [0.0] * _SIZE
            a, b = self.c, other.c
            for p, q, r in _PRODUCTS:
                out[r] += a[p] * b[q]
            return Jet(out)
        return Jet([p * other for p in self.c])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet([p / other for p in self.c])

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if isinstance(k, int) and k >= 0:
            out = Jet.constant(1.0)
            for _ in range(k):
                out = out * self
            return out
        v = self.value
        return self.compose(
            [v**k, k * v ** (k - 1), k * (k - 1) * v ** (k - 2), k * (k - 1) * (k - 2) * v ** (k - 3)]
        )

    def reciprocal(self) -> "Jet":
        v = self.value
        return self.compose([1.0 / v, -1.0 / v**2, 2.0 / v**3, -6.0 / v**4])

    def compose(self, derivs) -> "Jet":
        """Apply a univariate f given [f, f', f'', f'''] at this jet's value."""
        h = Jet(self.c)
        h.c[0] = 0.0
        out = Jet.constant(derivs[0])
        term = Jet.constant(1.0)
        for n in range(1, ORDER + 1):
            term = term * h
            out = out + term * (derivs[n] / math.factorial(n))
        return out

    def __repr__(self):
        return f"Jet({self.c!r})"


def lift_implicit(root: float, residual, slope: float, iterations: int = ORDER + 1) -> Jet:
    """Jet of g solving residual(g) == 0, given the scalar root and dF/dg there.

    Each simplified-Newton sweep in jet arithmetic fixes one more Taylor order.
    """
    g = Jet.constant(root)
    for _ in range(iterations):
        g = g - residual(g) / slope
        g.c[0] = root
    return g
