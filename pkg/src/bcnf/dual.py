"""First-order dual numbers for forward-mode differentiation.

The matrix entries of composed half-maps are polynomial in the perturbation
parameter, so propagating a dual number through the composition gives the
exact first derivative (up to rounding), with no truncation error to tune
away as in finite differencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Dual:
    """a + b*eps with eps^2 = 0."""

    a: float
    b: float = 0.0

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a + other.a, self.b + other.b)
        return Dual(self.a + other, self.b)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a - other.a, self.b - other.b)
        return Dual(self.a - other, self.b)

    def __rsub__(self, other):
        return Dual(other - self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a * other.a, self.a * other.b + self.b * other.a)
        return Dual(self.a * other, self.b * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a / other.a, (self.b * other.a - self.a * other.b) / (other.a * other.a))
        return Dual(self.a / other, self.b / other)

    def __rtruediv__(self, other):
        return Dual(other / self.a, -other * self.b / (self.a * self.a))

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = Dual(1.0, 0.0)
        for _ in range(n):
            out = out * self
        return out

    def __abs__(self):
        return Dual(abs(self.a), self.b if self.a >= 0 else -self.b)

    # comparisons act on the value part; used only for branch selection
    def __lt__(self, other):
        return self.a < value_of(other)

    def __le__(self, other):
        return self.a <= value_of(other)

    def __gt__(self, other):
        return self.a > value_of(other)

    def __ge__(self, other):
        return self.a >= value_of(other)


def value_of(x) -> float:
    return x.a if isinstance(x, Dual) else float(x)


def deriv_of(x) -> float:
    return x.b if isinstance(x, Dual) else 0.0


def dual_sqrt(x):
    if isinstance(x, Dual):
        root = math.sqrt(x.a)
        return Dual(root, x.b / (2.0 * root))
    return math.sqrt(x)
