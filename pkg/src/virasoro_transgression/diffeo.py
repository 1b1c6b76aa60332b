"""Orientation-preserving diffeomorphisms of the circle.

An element is represented through a lift f: R -> R with
f(theta + 2*pi) = f(theta) + 2*pi, normalized so that f(0) lands in
[0, 2*pi).  Four representations are provided:

* ``FourierLift``      -- theta plus a truncated trigonometric series,
* ``Composition``      -- lazy node evaluating g1(g2(theta)) by the chain rule,
* ``Inverse``          -- lazy node solving f(x) = theta by safeguarded Newton,
* ``Mobius``           -- closed-form fractional linear transformation of RP^1.

Lazy nodes avoid re-projection: the composition of band-limited lifts is
not band-limited, so pointwise chain-rule evaluation is the only way to
keep group laws exact to rounding.  ``project`` is available when a
truncated closed form is genuinely needed.

All values are immutable after construction and all operations are pure,
so instances are safe to share between threads.

Vector fields on the circle (``WittField``) live here as well, together
with their flows, which produce ``FourierLift`` diffeomorphisms by
Runge-Kutta integration of the collocation grid.
"""

from __future__ import annotations

import math

import numpy as np

from .dual import Dual

TAU = 2.0 * math.pi

#: Default Fourier truncation order for projected representations.
DEFAULT_ORDER = 16

#: Minimum allowed value of f' on the construction-time check grid.
ORIENTATION_EPS = 1e-6

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 100

#: Flows are integrated with a classical 4th-order step no longer than this.
FLOW_MAX_STEP = 0.01
FLOW_MAX_STEPS = 10**7


class DiffeoError(Exception):
    """Base class for diffeomorphism construction/evaluation failures."""


class OrientationError(DiffeoError):
    """The candidate lift is not strictly increasing."""


class InversionError(DiffeoError):
    """Newton iteration for an inverse failed to converge."""


class FlowIntegrationError(DiffeoError):
    """A vector-field flow could not be integrated to a diffeomorphism."""


def _normalizing_shift(raw_f0: float) -> float:
    # multiple of 2*pi placing f(0) in [0, 2*pi); the 1e-9 slack keeps
    # values that are 0 up to rounding from being wrapped to 2*pi - eps
    return TAU * math.floor(raw_f0 / TAU + 1e-9)


class CircleDiffeo:
    """Common interface for all representations.

    ``derivatives`` is the workhorse: it returns (f, f', f'') at ``theta``,
    which may be a scalar or a numpy array.
    """

    def derivatives(self, theta):
        raise NotImplementedError

    def __call__(self, theta):
        return self.derivatives(theta)[0]

    def deriv(self, theta):
        return self.derivatives(theta)[1]

    def eval_dual(self, x: Dual) -> Dual:
        """Evaluate on a first-order dual argument."""
        f, f1, _ = self.derivatives(x.a)
        return Dual(f, f1 * x.b)

    def __matmul__(self, other):
        return compose(self, other)


def evaluate(gamma: CircleDiffeo, theta):
    """Lift value with first and second derivatives at ``theta``."""
    return gamma.derivatives(theta)


class FourierLift(CircleDiffeo):
    """f(theta) = theta + a0 + sum_k (a_k cos(k theta) + b_k sin(k theta)).

    The offset a0 is normalized at construction so that f(0) is in
    [0, 2*pi).  Construction rejects lifts whose derivative drops below
    ``ORIENTATION_EPS`` anywhere on a 4N-point grid.
    """

    __slots__ = ("a0", "cos_coeffs", "sin_coeffs", "_k")

    def __init__(self, a0=0.0, cos_coeffs=(), sin_coeffs=()):
        ca = np.atleast_1d(np.asarray(cos_coeffs, dtype=float))
        sa = np.atleast_1d(np.asarray(sin_coeffs, dtype=float))
        n = max(ca.size, sa.size)
        ca = np.pad(ca, (0, n - ca.size))
        sa = np.pad(sa, (0, n - sa.size))
        self.cos_coeffs = ca
        self.sin_coeffs = sa
        self._k = np.arange(1, n + 1, dtype=float)
        raw_f0 = float(a0) + float(ca.sum())
        self.a0 = float(a0) - _normalizing_shift(raw_f0)
        self._check_orientation()

    def _check_orientation(self):
        m = 4 * max(DEFAULT_ORDER, self.cos_coeffs.size)
        grid = np.arange(m) * TAU / m
        fprime = self.derivatives(grid)[1]
        low = float(fprime.min())
        if not np.isfinite(low) or low < ORIENTATION_EPS:
            raise OrientationError(
                f"lift is not orientation-preserving: min f' = {low:.3e} "
                f"< {ORIENTATION_EPS:.0e} on the check grid"
            )

    def derivatives(self, theta):
        th = np.asarray(theta, dtype=float)
        if self._k.size == 0:
            one = np.ones_like(th)
            out = (th + self.a0, one, np.zeros_like(th))
        else:
            ang = np.multiply.outer(th, self._k)
            c = np.cos(ang)
            s = np.sin(ang)
            k = self._k
            f = th + self.a0 + c @ self.cos_coeffs + s @ self.sin_coeffs
            f1 = 1.0 - (s * k) @ self.cos_coeffs + (c * k) @ self.sin_coeffs
            f2 = -(c * k * k) @ self.cos_coeffs - (s * k * k) @ self.sin_coeffs
            out = (f, f1, f2)
        if th.ndim == 0:
            return float(out[0]), float(out[1]), float(out[2])
        return out


class Composition(CircleDiffeo):
    """Lazy node for outer(inner(theta))."""

    __slots__ = ("outer", "inner", "_shift")

    def __init__(self, outer: CircleDiffeo, inner: CircleDiffeo):
        self.outer = outer
        self.inner = inner
        self._shift = _normalizing_shift(outer(inner(0.0)))

    def derivatives(self, theta):
        g, g1, g2 = self.inner.derivatives(theta)
        f, f1, f2 = self.outer.derivatives(g)
        return f - self._shift, f1 * g1, f2 * g1 * g1 + f1 * g2


class Inverse(CircleDiffeo):
    """Lazy node for the group inverse, evaluated by safeguarded Newton.

    The solve targets f(x) = theta on the lift; the first derivative is
    1/f'(x) and the second comes from implicit differentiation.
    """

    __slots__ = ("base", "_bracket_radius", "_shift")

    def __init__(self, base: CircleDiffeo):
        self.base = base
        grid = np.linspace(0.0, TAU, 257)
        dev = base(grid) - grid
        # |f(x) - x| is periodic, so x solving f(x) = y satisfies
        # |x - y| <= sup|f - id|; the extra 2*pi absorbs the grid gap
        self._bracket_radius = float(np.abs(dev).max()) + TAU
        self._shift = 0.0
        self._shift = _normalizing_shift(float(self._solve(np.float64(0.0))))

    def _solve(self, target):
        y = np.asarray(target, dtype=float)
        lo = y - self._bracket_radius
        hi = y + self._bracket_radius
        x = np.array(y, dtype=float)
        for _ in range(NEWTON_MAX_ITER):
            f, f1, _ = self.base.derivatives(x)
            r = np.asarray(f - y)
            if float(np.abs(r).max()) < NEWTON_TOL:
                return x
            lo = np.where(r < 0, x, lo)
            hi = np.where(r > 0, x, hi)
            step = r / np.asarray(f1)
            trial = x - step
            bad = ~np.isfinite(trial) | (trial <= lo) | (trial >= hi)
            x = np.where(bad, 0.5 * (lo + hi), trial)
        worst = float(np.abs(np.asarray(self.base(x)) - y).max())
        raise InversionError(
            f"Newton did not reach {NEWTON_TOL:.0e} in {NEWTON_MAX_ITER} "
            f"iterations (residual {worst:.3e}); f' may be near-degenerate"
        )

    def derivatives(self, theta):
        th = np.asarray(theta, dtype=float)
        x = self._solve(th)
        _, f1, f2 = self.base.derivatives(x)
        d1 = 1.0 / f1
        d2 = -f2 * d1 * d1 * d1
        if th.ndim == 0:
            return float(x) - self._shift, float(d1), float(d2)
        return x - self._shift, d1, d2


class Mobius(CircleDiffeo):
    """Real fractional linear transformation acting on S^1 = RP^1.

    In the tan-half-angle coordinate t = tan(theta/2) the map is
    t -> (a t + b)/(c t + d) with a d - b c > 0.  Conjugating the chart to
    the unit circle turns this into z -> (alpha z + beta)/(conj(beta) z +
    conj(alpha)) with |alpha| > |beta|, which yields the single smooth
    global lift

        f(theta) = theta + 2 arg(alpha) + 2 Arg(1 + (beta/alpha) e^{-i theta}).

    Since |beta/alpha| < 1 the principal branch never jumps, so no
    explicit chart swap is needed.
    """

    __slots__ = ("_w", "_base_angle", "_shift")

    def __init__(self, a, b, c, d):
        det = a * d - b * c
        if not det > 0:
            raise OrientationError(f"ad - bc = {det} must be positive")
        s = 1.0 / math.sqrt(det)
        alpha = complex((a + d) * s / 2.0, (b - c) * s / 2.0)
        beta = complex((d - a) * s / 2.0, (b + c) * s / 2.0)
        self._w = beta / alpha
        self._base_angle = 2.0 * math.atan2(alpha.imag, alpha.real)
        raw_f0 = self._base_angle + 2.0 * np.angle(1.0 + self._w)
        self._shift = _normalizing_shift(float(raw_f0))

    def derivatives(self, theta):
        th = np.asarray(theta, dtype=float)
        z = self._w * np.exp(-1j * th)
        r = z / (1.0 + z)
        f = th + self._base_angle + 2.0 * np.log(1.0 + z).imag - self._shift
        f1 = 1.0 - 2.0 * r.real
        f2 = 2.0 * (r * r - r).imag
        if th.ndim == 0:
            return float(f), float(f1), float(f2)
        return f, f1, f2


def identity() -> CircleDiffeo:
    return FourierLift()


def rotation(angle: float) -> CircleDiffeo:
    """Rigid rotation by ``angle`` (normalized into [0, 2*pi))."""
    return FourierLift(a0=angle)


def compose(outer: CircleDiffeo, inner: CircleDiffeo) -> CircleDiffeo:
    return Composition(outer, inner)


def invert(gamma: CircleDiffeo) -> CircleDiffeo:
    return Inverse(gamma)


def mobius(a: float, b: float, c: float, d: float) -> CircleDiffeo:
    return Mobius(a, b, c, d)


def project(gamma: CircleDiffeo, order: int = DEFAULT_ORDER) -> FourierLift:
    """Closed-form truncation of ``gamma`` onto the Fourier-lift basis.

    Samples the periodic part on a 4*order grid and keeps modes up to
    ``order``; only accurate for effectively band-limited lifts.
    """
    m = 4 * order
    grid = np.arange(m) * TAU / m
    periodic = gamma(grid) - grid
    spec = np.fft.rfft(periodic) / m
    return FourierLift(
        a0=float(spec[0].real),
        cos_coeffs=2.0 * spec[1 : order + 1].real,
        sin_coeffs=-2.0 * spec[1 : order + 1].imag,
    )


class WittField:
    """Trigonometric vector field u(theta) d/dtheta with finite mode span.

    Coefficients are floats, but every operation used by the exact-bracket
    checks (integer inputs, halving product-to-sum identities) stays inside
    dyadic rationals, where float arithmetic is exact.
    """

    __slots__ = ("const", "cos_coeffs", "sin_coeffs", "_k")

    def __init__(self, const=0.0, cos_coeffs=(), sin_coeffs=()):
        ca = np.atleast_1d(np.asarray(cos_coeffs, dtype=float))
        sa = np.atleast_1d(np.asarray(sin_coeffs, dtype=float))
        n = max(ca.size, sa.size)
        self.const = float(const)
        self.cos_coeffs = np.pad(ca, (0, n - ca.size))
        self.sin_coeffs = np.pad(sa, (0, n - sa.size))
        self._k = np.arange(1, n + 1, dtype=float)

    @classmethod
    def constant(cls, c: float) -> "WittField":
        return cls(const=c)

    @classmethod
    def cosine(cls, m: int, amplitude: float = 1.0) -> "WittField":
        if m == 0:
            return cls(const=amplitude)
        coeffs = np.zeros(abs(m))
        coeffs[abs(m) - 1] = amplitude
        return cls(cos_coeffs=coeffs)

    @classmethod
    def sine(cls, m: int, amplitude: float = 1.0) -> "WittField":
        if m == 0:
            return cls()
        coeffs = np.zeros(abs(m))
        coeffs[abs(m) - 1] = amplitude if m > 0 else -amplitude
        return cls(sin_coeffs=coeffs)

    def value(self, theta):
        th = np.asarray(theta, dtype=float)
        if self._k.size == 0:
            out = self.const + 0.0 * th
        else:
            ang = np.multiply.outer(th, self._k)
            out = self.const + np.cos(ang) @ self.cos_coeffs + np.sin(ang) @ self.sin_coeffs
        return float(out) if th.ndim == 0 else out

    def derivative(self, theta):
        th = np.asarray(theta, dtype=float)
        if self._k.size == 0:
            out = 0.0 * th
        else:
            ang = np.multiply.outer(th, self._k)
            k = self._k
            out = -(np.sin(ang) * k) @ self.cos_coeffs + (np.cos(ang) * k) @ self.sin_coeffs
        return float(out) if th.ndim == 0 else out

    def jet(self, theta):
        """(u(theta), u'(theta)) for tangent-field evaluation."""
        return self.value(theta), self.derivative(theta)

    def _exp_coeffs(self):
        # coefficients c_m of sum c_m e^{i m theta}, m = -K .. K
        k = self.cos_coeffs.size
        c = np.zeros(2 * k + 1, dtype=complex)
        c[k] = self.const
        c[k + 1 :] = (self.cos_coeffs - 1j * self.sin_coeffs) / 2.0
        c[:k] = ((self.cos_coeffs + 1j * self.sin_coeffs) / 2.0)[::-1]
        return c

    @staticmethod
    def _from_exp(c):
        k = (c.size - 1) // 2
        pos = c[k + 1 :]
        return WittField(
            const=float(c[k].real),
            cos_coeffs=2.0 * pos.real,
            sin_coeffs=-2.0 * pos.imag,
        )

    def bracket(self, other: "WittField") -> "WittField":
        """Mode bracket with the sign fixed by [L_m, L_n] = (m - n) L_{m+n}.

        In terms of coefficient functions this is (u' w - u w') d/dtheta,
        computed exactly through convolution in the exponential basis.
        """
        cu = self._exp_coeffs()
        cw = other._exp_coeffs()
        mu = 1j * np.arange(-(cu.size // 2), cu.size // 2 + 1)
        mw = 1j * np.arange(-(cw.size // 2), cw.size // 2 + 1)
        prod = np.convolve(mu * cu, cw) - np.convolve(cu, mw * cw)
        return WittField._from_exp(prod)

    def __add__(self, other):
        n = max(self.cos_coeffs.size, other.cos_coeffs.size)
        pad = lambda a: np.pad(a, (0, n - a.size))
        return WittField(
            self.const + other.const,
            pad(self.cos_coeffs) + pad(other.cos_coeffs),
            pad(self.sin_coeffs) + pad(other.sin_coeffs),
        )

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return WittField(self.const * scalar, self.cos_coeffs * scalar, self.sin_coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def __eq__(self, other):
        if not isinstance(other, WittField):
            return NotImplemented
        n = max(self.cos_coeffs.size, other.cos_coeffs.size)
        pad = lambda a: np.pad(a, (0, n - a.size))
        return (
            self.const == other.const
            and np.array_equal(pad(self.cos_coeffs), pad(other.cos_coeffs))
            and np.array_equal(pad(self.sin_coeffs), pad(other.sin_coeffs))
        )

    def __hash__(self):
        return hash((self.const, self.cos_coeffs.tobytes(), self.sin_coeffs.tobytes()))

    def __repr__(self):
        return (
            f"WittField(const={self.const!r}, cos={self.cos_coeffs.tolist()!r}, "
            f"sin={self.sin_coeffs.tolist()!r})"
        )


def witt_generator(m: int) -> tuple[WittField, WittField]:
    """Real and imaginary parts of L_m = -i e^{i m theta} d/dtheta."""
    return WittField.sine(m), -1.0 * WittField.cosine(m)


def complex_bracket(
    x: tuple[WittField, WittField], y: tuple[WittField, WittField]
) -> tuple[WittField, WittField]:
    """Bracket of complexified fields represented as (real, imaginary) pairs."""
    xr, xi = x
    yr, yi = y
    return (
        xr.bracket(yr) - xi.bracket(yi),
        xr.bracket(yi) + xi.bracket(yr),
    )


def flow(field: WittField, t: float, order: int = DEFAULT_ORDER) -> FourierLift:
    """Time-t flow of d theta/ds = u(theta), as a projected Fourier lift.

    Every node of the 4*order collocation grid is advanced with the
    classical 4th-order one-step method at fixed step t/ceil(|t|/0.01),
    then the displacement field is projected onto the truncated basis.
    Satisfies flow(u, 0) = id exactly and the semigroup law to integrator
    tolerance.
    """
    steps = max(1, math.ceil(abs(t) / FLOW_MAX_STEP))
    if steps > FLOW_MAX_STEPS:
        raise FlowIntegrationError(f"flow time {t} requires {steps} steps; refusing")
    h = t / steps
    m = 4 * order
    grid = np.arange(m) * TAU / m
    y = grid.copy()
    for _ in range(steps):
        k1 = field.value(y)
        k2 = field.value(y + 0.5 * h * k1)
        k3 = field.value(y + 0.5 * h * k2)
        k4 = field.value(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(y)):
        raise FlowIntegrationError("flow integration diverged (stiff field?)")
    spec = np.fft.rfft(y - grid) / m
    try:
        return FourierLift(
            a0=float(spec[0].real),
            cos_coeffs=2.0 * spec[1 : order + 1].real,
            sin_coeffs=-2.0 * spec[1 : order + 1].imag,
        )
    except OrientationError as exc:
        raise FlowIntegrationError(f"flow did not produce a diffeomorphism: {exc}") from exc


def random_diffeo(
    rng: np.random.Generator,
    modes: int = 4,
    amplitude: float = 0.05,
    max_tries: int = 100,
) -> FourierLift:
    """Random diffeo theta + sum_{k<=modes} (a_k cos + b_k sin), coefficients
    uniform in [-amplitude, amplitude].  Resamples on the (rare) draw that
    fails the orientation check."""
    for _ in range(max_tries):
        try:
            return FourierLift(
                cos_coeffs=rng.uniform(-amplitude, amplitude, modes),
                sin_coeffs=rng.uniform(-amplitude, amplitude, modes),
            )
        except OrientationError:
            continue
    raise OrientationError(f"no valid diffeomorphism in {max_tries} draws")


def random_field(
    rng: np.random.Generator, modes: int = 4, amplitude: float = 0.05
) -> WittField:
    """Random trigonometric vector field drawn like ``random_diffeo``."""
    return WittField(
        cos_coeffs=rng.uniform(-amplitude, amplitude, modes),
        sin_coeffs=rng.uniform(-amplitude, amplitude, modes),
    )
