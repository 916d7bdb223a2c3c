"""Truncated multivariate Taylor arithmetic (higher-order forward-mode AD).

A :class:`Jet` stores the Taylor coefficients of a function of ``nvar``
perturbation variables, truncated per variable at ``orders[i]``.  The
coefficient array has shape ``batch + (S,)`` where ``S = prod(order + 1)``;
the batch axes let one jet carry a whole sample grid.

Elementary functions use the nilpotent expansion

    f(a0 + h) = sum_k f^(k)(a0) / k! * h^k,

which terminates because ``h`` has no constant term.  With a single variable
of order 1 this is the classical dual number.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _mul_table(orders: tuple) -> np.ndarray:
    dims = tuple(o + 1 for o in orders)
    size = int(np.prod(dims))
    idx = list(np.ndindex(*dims))
    table = np.zeros((size * size, size))
    for i, mi in enumerate(idx):
        for j, mj in enumerate(idx):
            mk = tuple(a + b for a, b in zip(mi, mj))
            if all(k < d for k, d in zip(mk, dims)):
                table[i * size + j, np.ravel_multi_index(mk, dims)] = 1.0
    return table


def _size(orders) -> int:
    return int(np.prod([o + 1 for o in orders]))


class Jet:
    __slots__ = ("c", "orders")
    __array_priority__ = 100

    def __init__(self, c, orders):
        self.orders = tuple(int(o) for o in orders)
        self.c = np.asarray(c, dtype=float)
        if self.c.shape[-1] != _size(self.orders):
            raise ValueError("coefficient array does not match orders")

    # construction ------------------------------------------------------
    @classmethod
    def constant(cls, value, orders) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (_size(orders),))
        c[..., 0] = value
        return cls(c, orders)

    @classmethod
    def variable(cls, value, orders, var: int = 0) -> "Jet":
        """``value + e_var`` with the perturbation seeded at unit slope."""
        jet = cls.constant(value, orders)
        if orders[var] >= 1:
            dims = tuple(o + 1 for o in orders)
            unit = [0] * len(orders)
            unit[var] = 1
            jet.c[..., np.ravel_multi_index(tuple(unit), dims)] = 1.0
        return jet

    @classmethod
    def from_derivatives(cls, derivs) -> "Jet":
        """Univariate jet from ``[f, f', f'', ...]`` arrays."""
        derivs = [np.asarray(d, dtype=float) for d in derivs]
        c = np.stack([d / math.factorial(k) for k, d in enumerate(derivs)], axis=-1)
        return cls(c, (len(derivs) - 1,))

    # accessors -----------------------------------------------------------
    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0]

    @property
    def dims(self) -> tuple:
        return tuple(o + 1 for o in self.orders)

    def coef(self, *index) -> np.ndarray:
        return self.c[..., np.ravel_multi_index(tuple(index), self.dims)]

    def derivative(self, k: int) -> np.ndarray:
        """k-th derivative of a univariate jet at the expansion point."""
        if len(self.orders) != 1:
            raise ValueError("derivative(k) is defined for univariate jets")
        return math.factorial(k) * self.c[..., k]

    def _grid(self) -> np.ndarray:
        return self.c.reshape(self.c.shape[:-1] + self.dims)

    def section(self, **fixed) -> "Jet":
        """Coefficient slice: ``section(v1=1)`` keeps terms linear in variable 1.

        Keyword names are ``v<index>``.
        """
        grid = self._grid()
        nb = self.c.ndim - 1
        sl = [slice(None)] * grid.ndim
        keep = []
        for v in range(len(self.orders)):
            key = f"v{v}"
            if key in fixed:
                sl[nb + v] = fixed[key]
            else:
                keep.append(self.orders[v])
        sub = grid[tuple(sl)]
        return Jet(sub.reshape(sub.shape[:nb] + (-1,)), keep)

    def truncate(self, *orders) -> "Jet":
        if len(orders) != len(self.orders) or any(a > b for a, b in zip(orders, self.orders)):
            raise ValueError("can only truncate to lower orders")
        grid = self._grid()
        nb = self.c.ndim - 1
        sl = (slice(None),) * nb + tuple(slice(0, o + 1) for o in orders)
        sub = grid[sl]
        return Jet(sub.reshape(sub.shape[:nb] + (-1,)), orders)

    def diff(self, var: int = 0) -> "Jet":
        """Differentiate with respect to variable ``var``; its order drops by one."""
        if self.orders[var] == 0:
            raise ValueError("jet has no derivative information left")
        grid = self._grid()
        nb = self.c.ndim - 1
        axis = nb + var
        n = self.orders[var]
        k = np.arange(1, n + 1, dtype=float)
        shape = [1] * grid.ndim
        shape[axis] = n
        out = np.take(grid, np.arange(1, n + 1), axis=axis) * k.reshape(shape)
        new_orders = list(self.orders)
        new_orders[var] -= 1
        return Jet(out.reshape(out.shape[:nb] + (-1,)), new_orders)

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.orders != self.orders:
                raise ValueError(f"mismatched jet orders {self.orders} vs {other.orders}")
            return other
        return Jet.constant(other, self.orders)

    def __add__(self, other):
        other = self._coerce(other)
        return Jet(self.c + other.c, self.orders)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Jet(self.c - other.c, self.orders)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Jet(-self.c, self.orders)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other, dtype=float)[..., None], self.orders)
        other = self._coerce(other)
        size = self.c.shape[-1]
        if size == 1:
            return Jet(self.c * other.c, self.orders)
        prod = self.c[..., :, None] * other.c[..., None, :]
        prod = prod.reshape(prod.shape[:-2] + (size * size,))
        return Jet(prod @ _mul_table(self.orders), self.orders)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other, dtype=float)[..., None], self.orders)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        p = float(p)
        if p.is_integer() and abs(p) <= 16:
            n = int(abs(p))
            out = Jet.constant(np.ones_like(self.value), self.orders)
            base = self
            while n:
                if n & 1:
                    out = out * base
                base = base * base
                n >>= 1
            return out if p >= 0 else reciprocal(out)
        return _compose(self, _pow_coeffs(p))

    def __rpow__(self, base):
        return exp(self * math.log(base))

    def __repr__(self):
        return f"Jet(orders={self.orders}, value={self.value!r})"


def _compose(a: Jet, coeffs) -> Jet:
    """Evaluate ``sum_k coeffs[k](a0) * (a - a0)^k`` by Horner's rule."""
    a0 = a.value
    h = a - a0
    deg = sum(a.orders)
    terms = coeffs(a0, deg)
    out = Jet.constant(terms[deg], a.orders)
    for k in range(deg - 1, -1, -1):
        out = out * h + terms[k]
    return out


def _exp_coeffs(a0, deg):
    e = np.exp(a0)
    return [e / math.factorial(k) for k in range(deg + 1)]


def _cyclic(first, second, signs):
    def coeffs(a0, deg):
        f, g = first(a0), second(a0)
        cyc = [s * v for s, v in zip(signs, (f, g, f, g))]
        return [cyc[k % 4] / math.factorial(k) for k in range(deg + 1)]

    return coeffs


_sin_coeffs = _cyclic(np.sin, np.cos, (1, 1, -1, -1))
_cos_coeffs = _cyclic(np.cos, np.sin, (1, -1, -1, 1))
_sinh_coeffs = _cyclic(np.sinh, np.cosh, (1, 1, 1, 1))
_cosh_coeffs = _cyclic(np.cosh, np.sinh, (1, 1, 1, 1))


def _log_coeffs(a0, deg):
    out = [np.log(a0)]
    for k in range(1, deg + 1):
        out.append((-1) ** (k + 1) / (k * a0**k))
    return out


def _pow_coeffs(p):
    def coeffs(a0, deg):
        out = []
        binom = 1.0
        for k in range(deg + 1):
            out.append(binom * a0 ** (p - k))
            binom *= (p - k) / (k + 1)
        return out

    return coeffs


def exp(a: Jet) -> Jet:
    return _compose(a, _exp_coeffs)


def sin(a: Jet) -> Jet:
    return _compose(a, _sin_coeffs)


def cos(a: Jet) -> Jet:
    return _compose(a, _cos_coeffs)


def sinh(a: Jet) -> Jet:
    return _compose(a, _sinh_coeffs)


def cosh(a: Jet) -> Jet:
    return _compose(a, _cosh_coeffs)


def tan(a: Jet) -> Jet:
    return sin(a) / cos(a)


def tanh(a: Jet) -> Jet:
    return sinh(a) / cosh(a)


def log(a: Jet) -> Jet:
    return _compose(a, _log_coeffs)


def sqrt(a: Jet) -> Jet:
    return _compose(a, _pow_coeffs(0.5))


def reciprocal(a: Jet) -> Jet:
    return _compose(a, _pow_coeffs(-1.0))


def sqrt_abs(a: Jet) -> Jet:
    """``sqrt(|a|)`` assuming ``a`` keeps one sign on the batch."""
    sign = np.sign(a.value)
    return sqrt(a * sign)


FUNCTIONS = {
    "sin": (sin, np.sin),
    "cos": (cos, np.cos),
    "tan": (tan, np.tan),
    "sinh": (sinh, np.sinh),
    "cosh": (cosh, np.cosh),
    "tanh": (tanh, np.tanh),
    "exp": (exp, np.exp),
    "log": (log, np.log),
    "sqrt": (sqrt, np.sqrt),
}


def apply(name: str, x):
    jet_fn, np_fn = FUNCTIONS[name]
    if isinstance(x, Jet):
        return jet_fn(x)
    return np_fn(x)
