"""Degree-2 invariant polynomials on gl_n and the line of lifts of p1.

Inv^2(GL_n^+(R)) is two-dimensional for n >= 2, with basis tr(A^2) and
tr(A)^2, so polynomials are stored in that basis rather than as symmetric
tensors.  The lifts of the first Pontryagin class form the affine line
lam * tr(A)^2 - (1/8 pi^2) tr(A^2); restricting to so_n kills the tr(A)^2
term (antisymmetric matrices are traceless), and demanding additivity
under block direct sums forces lam = 0, singling out the distinguished
lift.  For n = 1 both basis polynomials collapse to A^2 and the lift
restricts to (lam - 1/8 pi^2) A^2.

pi enters the package through the single constant ``P1_COEFFICIENT``
defined here; the transgression pipeline shares it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: 1/(8 pi^2): the magnitude of the tr(A^2) coefficient of the Chern-Weil
#: form of the first Pontryagin class.
P1_COEFFICIENT = 1.0 / (8.0 * math.pi**2)


@dataclass(frozen=True)
class InvPoly2:
    """c_sq * tr(A^2) + c_trsq * tr(A)^2 on n x n matrices."""

    n: int
    c_sq: float
    c_trsq: float

    def evaluate(self, A) -> float:
        A = np.asarray(A, dtype=float)
        if A.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} matrix, got shape {A.shape}")
        tr = float(np.trace(A))
        tr_sq = float(np.trace(A @ A))
        return self.c_sq * tr_sq + self.c_trsq * tr * tr


def evaluate(poly: InvPoly2, A) -> float:
    return poly.evaluate(A)


@dataclass(frozen=True)
class DifferentialLift:
    """Member of the lam-parametrized line of lifts of p1, at matrix size n."""

    lam: float
    n: int = 2

    def polynomial(self) -> InvPoly2:
        if self.n < 1:
            raise ValueError("matrix size must be >= 1")
        return InvPoly2(self.n, c_sq=-P1_COEFFICIENT, c_trsq=self.lam)

    def at_size(self, n: int) -> "DifferentialLift":
        return DifferentialLift(self.lam, n)


def distinguished_lift(n: int = 2) -> DifferentialLift:
    """The lam = 0 lift, the unique one additive under Whitney sums."""
    return DifferentialLift(0.0, n)


def restrict_to_gl1(lift: DifferentialLift) -> InvPoly2:
    """Pull the size-n polynomial back along GL_1^+ -> GL_n^+.

    Both tr(A^2) and tr(A)^2 pull back to A^2, so the result is
    (lam - 1/8 pi^2) A^2, kept in split form so the two contributions
    remain separately visible.
    """
    if lift.n < 2:
        raise ValueError("restriction expects a lift at size n >= 2")
    return InvPoly2(1, c_sq=-P1_COEFFICIENT, c_trsq=lift.lam)


def transgression_scale() -> float:
    """Scale at which the distinguished lift feeds the transgression.

    The 1-form cocycle representing the distinguished lift on the
    classifying object of R is (+1/8 pi^2) x1 dx2; the sign relative to
    the invariant polynomial -(1/8 pi^2) A^2 is produced by the cup-square
    normalization.  Returned as minus the gl_1 restriction coefficient so
    the equality of the two configuration constants is explicit.
    """
    poly = restrict_to_gl1(distinguished_lift())
    return -(poly.c_sq + poly.c_trsq)


@dataclass(frozen=True)
class SORestrictionReport:
    """Outcome of sampling an invariant polynomial on antisymmetric matrices."""

    n: int
    samples: int
    max_deviation: float
    trsq_vanishes: bool

    @property
    def passed(self) -> bool:
        return self.trsq_vanishes


def restrict_to_so(
    poly: InvPoly2, samples: int = 25, rng: np.random.Generator | None = None
) -> SORestrictionReport:
    """Check that on so_n the polynomial reduces to its tr(A^2) part.

    Antisymmetric matrices are traceless, so the tr(A)^2 contribution must
    vanish identically; the report carries the worst sampled deviation
    from c_sq * tr(A^2).
    """
    if poly.n < 2:
        raise ValueError("so_n restriction needs n >= 2")
    rng = rng or np.random.default_rng(0)
    worst = 0.0
    for _ in range(samples):
        raw = rng.standard_normal((poly.n, poly.n))
        A = raw - raw.T
        expected = poly.c_sq * float(np.trace(A @ A))
        worst = max(worst, abs(poly.evaluate(A) - expected))
    return SORestrictionReport(poly.n, samples, worst, worst == 0.0)


def _block_diag(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    n, m = A.shape[0], B.shape[0]
    out = np.zeros((n + m, n + m))
    out[:n, :n] = A
    out[n:, n:] = B
    return out


def whitney_defect(lam: float, A_n, A_m) -> float:
    """p-hat(A_n) + p-hat(A_m) - p-hat(A_n (+) A_m), by direct evaluation.

    Equals -2 lam tr(A_n) tr(A_m): the tr(A^2) parts are exactly additive
    under block sums, so only the cross term of the squared trace remains.
    """
    A_n = np.asarray(A_n, dtype=float)
    A_m = np.asarray(A_m, dtype=float)
    pn = DifferentialLift(lam, A_n.shape[0]).polynomial()
    pm = DifferentialLift(lam, A_m.shape[0]).polynomial()
    psum = DifferentialLift(lam, A_n.shape[0] + A_m.shape[0]).polynomial()
    return pn.evaluate(A_n) + pm.evaluate(A_m) - psum.evaluate(_block_diag(A_n, A_m))


def solve_whitney(
    samples: int = 40,
    sizes: tuple[int, int] = (2, 3),
    rng: np.random.Generator | None = None,
    max_resample: int = 20,
) -> float:
    """Least-squares lam making the Whitney defect vanish on random pairs.

    The defect is affine in lam; its slope and intercept are measured by
    direct evaluation at lam = 0 and lam = 1.  A degenerate draw (all
    sampled traces nearly zero) is resampled.
    """
    rng = rng or np.random.default_rng(0)
    n, m = sizes
    for _ in range(max_resample):
        intercepts = np.empty(samples)
        slopes = np.empty(samples)
        for i in range(samples):
            A = rng.standard_normal((n, n))
            B = rng.standard_normal((m, m))
            d0 = whitney_defect(0.0, A, B)
            d1 = whitney_defect(1.0, A, B)
            intercepts[i] = d0
            slopes[i] = d1 - d0
        if float(np.abs(slopes).max()) < 1e-9:
            continue
        return -float(slopes @ intercepts) / float(slopes @ slopes)
    raise RuntimeError("degenerate sample set: all trace products vanished")
