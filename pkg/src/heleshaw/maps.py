"""Disk maps and complex-function calculus.

The map classes all represent analytic functions on a neighborhood of the
closed unit disk, normalized by f(0) = 0 and f'(0) > 0:

* :class:`PolynomialMap`      f = sum_j a_j z**(j+1)
* :class:`RationalMap`        f = (sum_j a_j z**(j+1)) / prod_j (1 - wbar_j z)
* :class:`AbcRationalMap`     f = c z (z - a) / (z - b),  0 < |a| < 1 < |b|
* :class:`TaylorMap`          truncated power series (evolution work state)

Every class exposes its exact rational representation, so evaluation,
differentiation, holomorphic reflection f*(z) = conj(f(1/conj z)) and
residues all route through :mod:`heleshaw.rational`.

All operations are pure functions on immutable values; nothing here mutates
shared state, so concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    BranchPointError,
    PoleProximityError,
    ResidueError,
    RootFindingError,
    UnderResolvedError,
)
from .rational import RationalFunction, pmul, pval, trim

__all__ = [
    "CircleGrid",
    "LaurentSlice",
    "laurent_slice",
    "AnalyticMap",
    "PolynomialMap",
    "RationalMap",
    "AbcRationalMap",
    "TaylorMap",
    "eval_map",
    "derivative",
    "reflect",
    "residue_at",
    "polynomial_roots",
    "winding_number",
]


# ----------------------------------------------------------------------
# grids and Laurent slices
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CircleGrid:
    """Uniform grid of N points exp(2*pi*i*k/N) on the unit circle.

    N must be a power of two (>= 4) so FFT projections are exact and cheap.
    Keep N at least 4x the polynomial degree of anything sampled on it;
    the winding-number residual is the runtime check for that.
    """

    size: int = 1024

    def __post_init__(self):
        n = self.size
        if n < 4 or (n & (n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 4, got {n}")

    @cached_property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.size) / self.size

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.exp(1j * self.theta)


@dataclass(frozen=True)
class LaurentSlice:
    """Laurent coefficients c_i for min_exp <= i <= max_exp."""

    min_exp: int
    max_exp: int
    coeffs: np.ndarray

    def __post_init__(self):
        if len(self.coeffs) != self.max_exp - self.min_exp + 1:
            raise ValueError("coefficient array length does not match exponent range")

    def __getitem__(self, i: int) -> complex:
        if not (self.min_exp <= i <= self.max_exp):
            raise IndexError(f"exponent {i} outside [{self.min_exp}, {self.max_exp}]")
        return complex(self.coeffs[i - self.min_exp])


def laurent_slice(samples, min_exp: int, max_exp: int) -> LaurentSlice:
    """Project circle samples onto Laurent coefficients by FFT.

    ``samples[k]`` must be the function value at exp(2*pi*i*k/N).  Exact for
    functions whose spectrum lies within one alias band of the grid.
    """
    samples = np.asarray(samples, dtype=complex)
    n = len(samples)
    if max_exp - min_exp + 1 > n:
        raise ValueError("requested slice wider than the grid resolves")
    hat = np.fft.fft(samples) / n
    coeffs = np.array([hat[i % n] for i in range(min_exp, max_exp + 1)])
    return LaurentSlice(min_exp, max_exp, coeffs)


# ----------------------------------------------------------------------
# map classes
# ----------------------------------------------------------------------

def _coerce_a0(a0, tol=1e-12) -> float:
    a0 = complex(a0)
    if abs(a0.imag) > tol * max(abs(a0), 1.0):
        raise ValueError(f"a0 must be real, got {a0}")
    if a0.real <= 0:
        raise ValueError(f"a0 must be positive, got {a0}")
    return a0.real


class AnalyticMap:
    """Base class; concrete maps provide their rational representation."""

    def rational(self) -> RationalFunction:
        raise NotImplementedError

    def finite_poles(self) -> np.ndarray:
        """Poles of the map in the finite plane (all outside the closed disk)."""
        return np.zeros(0, dtype=complex)

    def __call__(self, z):
        return eval_map(self, z)

    @property
    def a0(self) -> float:
        """The normalization f'(0) = a0 > 0."""
        raise NotImplementedError

    def derivative_rational(self) -> RationalFunction:
        return self.rational().derivative()

    def reflection(self) -> RationalFunction:
        return self.rational().reflect()

    def power_series(self, order: int) -> np.ndarray:
        """Coefficients a_0..a_{order-1} with a_j multiplying z**(j+1)."""
        t = self.rational().taylor(order)
        return t[1:]

    def boundary_values(self, grid: CircleGrid) -> np.ndarray:
        return self.rational()(grid.nodes)


@dataclass(frozen=True)
class PolynomialMap(AnalyticMap):
    """f = sum_{j=0}^{n} coeffs[j] * z**(j+1), coeffs[0] real positive."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coeffs)
        if not c:
            raise ValueError("need at least one coefficient")
        a0 = _coerce_a0(c[0])
        c = (complex(a0),) + c[1:]
        if len(c) > 1 and c[-1] == 0:
            raise ValueError("leading coefficient a_n must be nonzero for n > 0")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree_plus(self) -> int:
        """n: the map is a polynomial of degree n + 1."""
        return len(self.coeffs) - 1

    @property
    def a0(self) -> float:
        return self.coeffs[0].real

    def rational(self) -> RationalFunction:
        return RationalFunction(np.concatenate([[0.0], self.coeffs]))

    def derivative_coeffs(self) -> np.ndarray:
        """b_j = (j+1) a_j, the coefficients of f'."""
        a = np.asarray(self.coeffs, dtype=complex)
        return a * np.arange(1, len(a) + 1)


@dataclass(frozen=True)
class RationalMap(AnalyticMap):
    """f = (sum_j a_j z**(j+1)) / prod_j (1 - pole_reflections[j] * z).

    ``pole_reflections`` stores conj(omega_j): the poles sit at
    1/pole_reflections[j], strictly outside the closed disk, and each
    reflected point omega_j = conj(pole_reflections[j]) must be a zero of f'
    for the map to be in consistent (quadrature) state.
    """

    numer_coeffs: tuple
    pole_reflections: tuple
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        c = tuple(complex(x) for x in self.numer_coeffs)
        w = tuple(complex(x) for x in self.pole_reflections)
        a0 = _coerce_a0(c[0])
        c = (complex(a0),) + c[1:]
        object.__setattr__(self, "numer_coeffs", c)
        object.__setattr__(self, "pole_reflections", w)
        for wb in w:
            if not abs(wb) < 1.0:
                raise ValueError(f"pole reflection {wb} must lie inside the unit disk")
        if self.check:
            self.validate()

    def validate(self, tol: float = 1e-8):
        """Check f'(omega_j) = 0 for every stored pole reflection."""
        fp = self.derivative_rational()
        scale = max(np.max(np.abs(fp.num)), 1.0)
        for wb in self.pole_reflections:
            w = np.conj(wb)
            val = pval(fp.num, w)
            if abs(val) > tol * scale:
                raise ValueError(
                    f"inconsistent rational map: f'({w}) = {val}, not a zero"
                )

    @property
    def a0(self) -> float:
        return self.numer_coeffs[0].real

    def finite_poles(self) -> np.ndarray:
        return np.array([1.0 / np.conj(w) for w in self.pole_reflections])

    def rational(self) -> RationalFunction:
        num = np.concatenate([[0.0], self.numer_coeffs])
        den = np.array([1.0 + 0.0j])
        for wb in self.pole_reflections:
            den = pmul(den, [1.0, -wb])
        return RationalFunction(num, den)


@dataclass(frozen=True)
class AbcRationalMap(AnalyticMap):
    """f = c z (z - a) / (z - b) with 0 < |a| < 1 < |b| and f'(0) = a c / b > 0.

    The image is a two-sheeted domain carrying the two-node quadrature
    identity with nodes f(0) = 0 and f(1/conj(b)).
    """

    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        a, b, c = complex(self.a), complex(self.b), complex(self.c)
        if not (0 < abs(a) < 1 < abs(b)):
            raise ValueError(f"need 0 < |a| < 1 < |b|, got |a|={abs(a)}, |b|={abs(b)}")
        if c == 0:
            raise ValueError("c must be nonzero")
        fp0 = a * c / b
        if abs(fp0.imag) > 1e-12 * abs(fp0) or fp0.real <= 0:
            raise ValueError(f"normalization violated: f'(0) = a c / b = {fp0}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def a0(self) -> float:
        return (self.a * self.c / self.b).real

    def finite_poles(self) -> np.ndarray:
        return np.array([self.b])

    def rational(self) -> RationalFunction:
        # c z (z - a) = -a c z + c z^2
        return RationalFunction([0.0, -self.a * self.c, self.c], [-self.b, 1.0])

    def node(self) -> complex:
        """The second quadrature node f(1/conj(b))."""
        zb = 1.0 / np.conj(self.b)
        return complex(self.rational()(zb))


@dataclass(frozen=True)
class TaylorMap(AnalyticMap):
    """Truncated power series f = sum_{j<order} coeffs[j] z**(j+1).

    The working representation for fixed-branch-point evolution.  Unlike
    :class:`PolynomialMap` there is no nonzero-leading-coefficient invariant;
    trailing coefficients are expected to decay.
    """

    coeffs: tuple

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coeffs)
        a0 = _coerce_a0(c[0])
        object.__setattr__(self, "coeffs", (complex(a0),) + c[1:])

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def a0(self) -> float:
        return self.coeffs[0].real

    def rational(self) -> RationalFunction:
        return RationalFunction(np.concatenate([[0.0], self.coeffs]))

    def derivative_coeffs(self) -> np.ndarray:
        a = np.asarray(self.coeffs, dtype=complex)
        return a * np.arange(1, len(a) + 1)

    def tail_energy(self, tail: int | None = None) -> float:
        """Relative coefficient energy in the last ``tail`` slots."""
        a = np.abs(np.asarray(self.coeffs))
        if tail is None:
            tail = max(len(a) // 8, 2)
        total = float(np.sum(a**2))
        if total == 0.0:
            return 0.0
        return float(np.sum(a[-tail:] ** 2)) / total


# ----------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------

def eval_map(m: AnalyticMap, z, tol: Tolerances = DEFAULT):
    """Evaluate the map; rejects points within tolerance of a pole."""
    z = np.asarray(z, dtype=complex)
    poles = m.finite_poles()
    if poles.size:
        d = np.min(np.abs(z[..., None] - poles[None, :]))
        if d < tol.pole_proximity:
            raise PoleProximityError(
                f"evaluation point within {d:.2e} of a pole"
            )
    return m.rational()(z)


def derivative(m: AnalyticMap) -> RationalFunction:
    """f' in closed form; for polynomials the coefficients are (j+1) a_j."""
    return m.derivative_rational()


def reflect(m: AnalyticMap) -> RationalFunction:
    """The reflected function f*(z) = conj(f(1/conj(z)))."""
    return m.reflection()


def residue_at(
    fn,
    p,
    order: int | None = None,
    radius: float | None = None,
    n_nodes: int | None = None,
    tol: Tolerances = DEFAULT,
) -> complex:
    """Residue of ``fn`` at the pole ``p``.

    Rational functions are handled exactly by Laurent division.  Plain
    callables fall back to contour quadrature on a circle of the given
    ``radius`` (the caller should keep other singularities at distance at
    least 2*radius); convergence is checked by comparing against the
    half-resolution rule.
    """
    p = complex(p)
    if isinstance(fn, AnalyticMap):
        fn = fn.rational()
    if isinstance(fn, RationalFunction):
        return fn.residue(p, order=order)
    if radius is None:
        radius = 0.25
    n = n_nodes or tol.contour_nodes
    full = _contour_residue(fn, p, radius, n)
    half = _contour_residue(fn, p, radius, n // 2)
    scale = max(abs(full), 1.0)
    if abs(full - half) > 1e-8 * scale:
        raise ResidueError(
            f"contour residue did not converge at radius {radius}: "
            f"{full} vs {half} at half resolution"
        )
    return full


def _contour_residue(fn, p, radius, n):
    th = 2.0 * np.pi * np.arange(n) / n
    zs = p + radius * np.exp(1j * th)
    vals = np.asarray([fn(z) for z in zs], dtype=complex)
    # (1/2 pi i) * integral fn dz over the circle, trapezoid in theta
    return complex(np.sum(vals * (zs - p)) / n)


def polynomial_roots(coeffs, near=None, tol: Tolerances = DEFAULT) -> np.ndarray:
    """All roots of the polynomial with ascending ``coeffs``.

    Companion-matrix eigenvalues with one Newton polish step.  Standalone
    calls order roots by modulus then argument; pass the previous root set as
    ``near`` to instead match each old root to its nearest successor
    (continuation mode, keeps root trajectories continuous).
    """
    c = trim(coeffs)
    if len(c) < 2:
        raise RootFindingError("polynomial has degree 0; no roots to find")
    roots = np.atleast_1d(np.roots(c[::-1]))
    dc = np.asarray([j * c[j] for j in range(1, len(c))], dtype=complex)
    pv = np.atleast_1d(pval(c, roots))
    dv = np.atleast_1d(pval(dc, roots))
    ok = np.abs(dv) > 1e-300
    step = np.zeros_like(roots)
    step[ok] = pv[ok] / dv[ok]
    roots = roots - step
    if near is not None:
        near = np.asarray(near, dtype=complex)
        if len(near) == len(roots):
            return _match_previous(roots, near)
    order = np.lexsort((np.angle(roots), np.abs(roots)))
    return roots[order]


def _match_previous(roots, near):
    out = np.zeros_like(near)
    avail = list(range(len(roots)))
    for i, p in enumerate(near):
        k = min(avail, key=lambda j: abs(roots[j] - p))
        out[i] = roots[k]
        avail.remove(k)
    return out


def winding_number(samples, z, tol: Tolerances = DEFAULT):
    """Index of the sampled closed curve about ``z``.

    ``samples[k]`` must be curve values at the uniform circle grid.  The
    contour integral (1/2 pi i) * integral dw/(w - z) is evaluated with a
    spectral derivative of the samples, so the pre-rounding residual is a
    genuine resolution indicator.  Returns ``(index, residual)``.
    """
    w = np.asarray(samples, dtype=complex)
    n = len(w)
    z = complex(z)
    dist = np.min(np.abs(w - z))
    if dist < 1e-9:
        raise PoleProximityError(f"point within {dist:.2e} of the sampled curve")
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = 0.0  # drop the Nyquist mode of the derivative
    dw = np.fft.ifft(1j * k * np.fft.fft(w))
    val = np.sum(dw / (w - z)) / (1j * n)
    idx = int(round(val.real))
    residual = abs(val - idx)
    if residual > tol.winding_residual_max:
        raise UnderResolvedError(
            f"winding residual {residual:.3g} exceeds {tol.winding_residual_max}; "
            "refine the grid"
        )
    return idx, residual


def simple_derivative_zeros_in_disk(
    m: AnalyticMap, near=None, tol: Tolerances = DEFAULT
) -> np.ndarray:
    """Zeros of f' strictly inside the unit disk, required simple.

    Raises :class:`BranchPointError` for multiple zeros or zeros within the
    boundary margin of the unit circle.
    """
    fp = m.derivative_rational()
    num = trim(fp.num)
    if len(num) < 2:
        return np.zeros(0, dtype=complex)
    roots = polynomial_roots(num, tol=tol)
    inside = []
    for r in roots:
        if abs(r) < 1.0 - tol.branch_boundary_margin:
            inside.append(r)
        elif abs(abs(r) - 1.0) <= tol.branch_boundary_margin:
            raise BranchPointError(
                f"zero of f' at {r} lies within {tol.branch_boundary_margin} "
                "of the unit circle"
            )
    inside = np.asarray(inside, dtype=complex)
    if near is not None and len(near) == len(inside) and len(inside) > 1:
        inside = _match_previous(inside, np.asarray(near, dtype=complex))
    if inside.size > 1:
        d = np.abs(inside[:, None] - inside[None, :])
        np.fill_diagonal(d, np.inf)
        if np.min(d) < 1e-8:
            raise BranchPointError("multiple zero of f' detected in the disk")
    fpp = fp.derivative()
    for r in inside:
        if abs(fpp(r)) < tol.branch_simple_min:
            raise BranchPointError(f"zero of f' at {r} is not simple")
    return inside
