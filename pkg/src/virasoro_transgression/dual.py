"""First-order dual numbers for forward-mode differentiation.

A ``Dual`` carries a value and one directional derivative (the coefficient
of a nilpotent epsilon).  Components may be floats or numpy arrays, so a
single pass can differentiate a whole grid of evaluations.
"""

from __future__ import annotations

import numpy as np


class Dual:
    """Number of the form a + b*eps with eps**2 = 0."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0.0):
        self.a = a
        self.b = b

    @staticmethod
    def lift(x):
        """Embed a constant (zero derivative part)."""
        return x if isinstance(x, Dual) else Dual(x, 0.0)

    def __add__(self, other):
        other = Dual.lift(other)
        return Dual(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = Dual.lift(other)
        return Dual(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = Dual.lift(other)
        return Dual(other.a - self.a, other.b - self.b)

    def __mul__(self, other):
        other = Dual.lift(other)
        return Dual(self.a * other.a, self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Dual.lift(other)
        inv = 1.0 / other.a
        return Dual(self.a * inv, (self.b - self.a * other.b * inv) * inv)

    def __rtruediv__(self, other):
        return Dual.lift(other) / self

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def log(self):
        return Dual(np.log(self.a), self.b / self.a)

    def exp(self):
        e = np.exp(self.a)
        return Dual(e, e * self.b)

    def __repr__(self):
        return f"Dual({self.a!r}, {self.b!r})"
