"""Exact Witt/Virasoro algebra arithmetic and Lie-cocycle extraction.

``ModeElement`` is a finite formal sum of mode generators L_m plus a
central coordinate, with exact rational coefficients; brackets use
[L_m, L_n] = (m - n) L_{m+n} and a central term supplied by a
``LieCocycle``.  The standard diagonal cocycle at scale lam has
beta(m) = lam * m (m^2 - 1) / 12; this is the unique (up to coboundary,
spanned by beta(m) = m) odd solution of the diagonal cocycle identity
together with m itself, and it vanishes on the sl2 modes {-1, 0, 1}.
Note that the superficially similar rule m^2 (m - 1) is not antisymmetric
and fails the cocycle identity; the test suite demonstrates the failure.

Differentiating a group cocycle twice at the identity along flows yields
the infinitesimal cocycle; ``extract_lie_cocycle`` does this with a
4-point central stencil plus one Richardson halving, and
``central_charge`` normalizes the extracted diagonal against the unit
reference so the result is independent of 2 pi bookkeeping conventions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cocycle import GroupCocycle, virasoro_cocycle
from .diffeo import DEFAULT_ORDER, WittField, flow


class ExtractionError(Exception):
    """Finite-difference extraction failed its consistency check."""


Rational = int | Fraction


def _as_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"exact arithmetic requires int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class ModeElement:
    """Finite sum of L_m generators plus a central coordinate, all exact."""

    modes: tuple[tuple[int, Fraction], ...] = ()
    central: Fraction = Fraction(0)

    @staticmethod
    def from_dict(coeffs: dict[int, Rational], central: Rational = 0) -> "ModeElement":
        cleaned = tuple(
            sorted((m, _as_fraction(c)) for m, c in coeffs.items() if c != 0)
        )
        return ModeElement(cleaned, _as_fraction(central))

    def coefficient(self, m: int) -> Fraction:
        for mode, c in self.modes:
            if mode == m:
                return c
        return Fraction(0)

    def __add__(self, other: "ModeElement") -> "ModeElement":
        acc = dict(self.modes)
        for m, c in other.modes:
            acc[m] = acc.get(m, Fraction(0)) + c
        return ModeElement.from_dict(acc, self.central + other.central)

    def __sub__(self, other: "ModeElement") -> "ModeElement":
        return self + (-1) * other

    def __mul__(self, scalar: Rational) -> "ModeElement":
        s = _as_fraction(scalar)
        return ModeElement.from_dict({m: c * s for m, c in self.modes}, self.central * s)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1) * self

    def is_zero(self) -> bool:
        return not self.modes and self.central == 0

    def __repr__(self):
        terms = [f"{c}*L[{m}]" for m, c in self.modes]
        if self.central:
            terms.append(f"{self.central}*c")
        return " + ".join(terms) if terms else "0"


def L(m: int, coefficient: Rational = 1) -> ModeElement:
    """Mode generator L_m (scaled)."""
    return ModeElement.from_dict({m: coefficient})


def central_element(coefficient: Rational = 1) -> ModeElement:
    return ModeElement.from_dict({}, coefficient)


class DiagonalCocycle:
    """Lie cocycle supported on m + n = 0: b(L_m, L_n) = beta(m) delta(m, -n).

    ``beta`` must be odd; construction verifies beta(-m) = -beta(m) on a
    window unless ``check_antisymmetry`` is disabled (useful only for
    demonstrating that a defective rule fails the Jacobi test).
    """

    def __init__(
        self,
        beta: Callable[[int], Rational | float],
        check_antisymmetry: bool = True,
        window: int = 10,
    ):
        self.beta = beta
        if check_antisymmetry:
            for m in range(0, window + 1):
                if beta(m) != -beta(-m):
                    raise ValueError(f"beta is not odd at m = {m}: {beta(m)} vs {beta(-m)}")

    def pair_modes(self, m: int, n: int):
        return self.beta(m) if m + n == 0 else 0


class NumericCocycle:
    """Antisymmetrized bilinear pairing of vector fields."""

    def __init__(self, raw: Callable[[WittField, WittField], float]):
        self.raw = raw

    def __call__(self, u: WittField, w: WittField) -> float:
        return 0.5 * (self.raw(u, w) - self.raw(w, u))


def standard_cocycle(lam: Rational = 1) -> DiagonalCocycle:
    """The diagonal Virasoro cocycle beta(m) = lam * m (m^2 - 1) / 12."""
    lam = _as_fraction(lam)

    def beta(m: int) -> Fraction:
        return lam * m * (m * m - 1) / 12

    return DiagonalCocycle(beta)


def virasoro_bracket(e1: ModeElement, e2: ModeElement, b: DiagonalCocycle) -> ModeElement:
    """Bracket of centrally extended elements.

    Bilinear over the mode parts with [L_m, L_n] = (m - n) L_{m+n} and
    central term b(L_m, L_n); central coordinates never feed back.
    """
    acc: dict[int, Fraction] = {}
    central = Fraction(0)
    for m, cm in e1.modes:
        for n, dn in e2.modes:
            w = cm * dn
            if m != n:
                acc[m + n] = acc.get(m + n, Fraction(0)) + w * (m - n)
            pair = b.pair_modes(m, n)
            if pair:
                central += w * _as_fraction(pair)
    return ModeElement.from_dict(acc, central)


def jacobi_defect(
    e1: ModeElement, e2: ModeElement, e3: ModeElement, b: DiagonalCocycle
) -> ModeElement:
    """[[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2], computed exactly.

    Zero exactly when b satisfies the Lie 2-cocycle identity on the span
    of the inputs (the Witt part vanishes by the Jacobi identity).
    """
    return (
        virasoro_bracket(virasoro_bracket(e1, e2, b), e3, b)
        + virasoro_bracket(virasoro_bracket(e2, e3, b), e1, b)
        + virasoro_bracket(virasoro_bracket(e3, e1, b), e2, b)
    )


def extract_lie_cocycle(
    cocycle: GroupCocycle,
    u: WittField,
    w: WittField,
    step: float = 1e-3,
    richardson_rtol: float = 0.05,
    noise_floor: float = 1e-9,
    order: int = DEFAULT_ORDER,
) -> float:
    """Antisymmetrized mixed second derivative of the group cocycle at id.

    Evaluates (1/2) d_s d_t [C(flow(u,s), flow(w,t)) - C(flow(w,t),
    flow(u,s))] at s = t = 0 with the 4-point central stencil, then
    repeats at half step for one Richardson extrapolation.  Raises
    ``ExtractionError`` when the two stencils disagree by more than
    ``richardson_rtol``, the symptom of a step small enough for
    cancellation noise to dominate; values below ``noise_floor`` are zero
    to extraction accuracy and exempt from the check.
    """

    def stencil(h: float) -> float:
        fu = {s: flow(u, s * h, order) for s in (1, -1)}
        fw = {s: flow(w, s * h, order) for s in (1, -1)}
        mixed = (
            cocycle(fu[1], fw[1])
            - cocycle(fu[1], fw[-1])
            - cocycle(fu[-1], fw[1])
            + cocycle(fu[-1], fw[-1])
        )
        swapped = (
            cocycle(fw[1], fu[1])
            - cocycle(fw[-1], fu[1])
            - cocycle(fw[1], fu[-1])
            + cocycle(fw[-1], fu[-1])
        )
        return (mixed - swapped) / (8.0 * h * h)

    coarse = stencil(step)
    fine = stencil(step / 2.0)
    scale = max(abs(coarse), abs(fine))
    if scale > noise_floor and abs(fine - coarse) > richardson_rtol * scale:
        raise ExtractionError(
            f"Richardson check failed: stencil({step}) = {coarse}, "
            f"stencil({step/2}) = {fine}"
        )
    return (4.0 * fine - coarse) / 3.0


def diagonal_from_group_cocycle(
    cocycle: GroupCocycle, m: int, step: float = 1e-3, order: int = DEFAULT_ORDER
) -> float:
    """Extracted diagonal value beta(m) on the pair (cos m theta, sin m theta)."""
    return extract_lie_cocycle(
        cocycle, WittField.cosine(m), WittField.sine(m), step, order=order
    )


def extracted_diagonal_cocycle(
    cocycle: GroupCocycle, step: float = 1e-3, order: int = DEFAULT_ORDER
) -> DiagonalCocycle:
    """Diagonal cocycle built from numeric extraction, memoized and odd.

    Oddness is imposed structurally (beta(-m) = -beta(m) by definition), so
    only |m| is ever extracted.
    """
    cache: dict[int, float] = {}

    def beta(m: int) -> float:
        if m == 0:
            return 0.0
        k = abs(m)
        if k not in cache:
            cache[k] = diagonal_from_group_cocycle(cocycle, k, step, order)
        return cache[k] if m > 0 else -cache[k]

    return DiagonalCocycle(beta, check_antisymmetry=False)


def cubic_coefficient(beta: Callable[[int], float], modes: tuple[int, int] = (1, 2)) -> float:
    """Coefficient a of the odd-cubic model beta(m) = a m^3 + b m through two modes."""
    m1, m2 = modes
    if m1 == m2 or 0 in modes:
        raise ValueError("need two distinct nonzero modes")
    det = m1**3 * m2 - m2**3 * m1
    return (beta(m1) * m2 - beta(m2) * m1) / det


def central_charge(
    cocycle: GroupCocycle,
    step: float = 1e-3,
    fit_modes: tuple[int, int] = (1, 2),
    order: int = DEFAULT_ORDER,
) -> float:
    """Central charge of the extension defined by ``cocycle``.

    Normalized as the ratio of the extracted cubic coefficient to the one
    of the unit-scale reference cocycle computed along the identical
    numerical path, which cancels every convention-dependent constant.
    """
    beta = lambda m: diagonal_from_group_cocycle(cocycle, m, step, order)
    reference = virasoro_cocycle(1.0, resolution=cocycle.resolution)
    beta_ref = lambda m: diagonal_from_group_cocycle(reference, m, step, order)
    return cubic_coefficient(beta, fit_modes) / cubic_coefficient(beta_ref, fit_modes)


def sl2_class_check(b: DiagonalCocycle, fit_modes: tuple[int, int] = (2, 3)) -> float:
    """Relative size of the sl2 obstruction of a diagonal cocycle class.

    Fits beta(m) = c m^3 + d m on ``fit_modes``, subtracts the coboundary
    direction alpha * m with alpha = -(c + d) (the choice making the fitted
    model vanish at m = 1, hence on all of {-1, 0, 1} by oddness), and
    returns the residual at m = 1, |beta(1) + alpha|, relative to the
    fitted model scale max(|c|, |d|).  Zero for any rule of the form
    a m^3 + b m; below the extraction tolerance for genuine classes.
    """
    m1, m2 = fit_modes
    b1, b2 = b.beta(m1), b.beta(m2)
    det = m1**3 * m2 - m2**3 * m1
    c = (b1 * m2 - b2 * m1) / det
    d = (b2 * m1**3 - b1 * m2**3) / det
    alpha = -(c + d)
    residual = abs(b.beta(1) + alpha)
    scale = max(abs(c), abs(d))
    if scale == 0:
        return float(residual)
    return float(residual / scale)
