"""Almost periodic functions on the strip ``0 <= Im z <= pi``.

Holomorphic exponential sums ``sum b exp(i lambda z)`` and the bounded
harmonic (Poisson) extension of almost periodic data given on the two
boundary lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .ap_core import (EvaluationOracle, SupNormEstimate, TrigPolynomial, VectorValue,
                      vector_norm)
from .errors import NonConverged, OutOfDomain
from .fields import GridField, dbar_fd, holo_residual  # noqa: F401  (re-export)

STRIP_HEIGHT = math.pi
_DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class StripPoint:
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not (-_DOMAIN_TOL <= z.imag <= STRIP_HEIGHT + _DOMAIN_TOL):
            raise OutOfDomain(f"Im z = {z.imag} outside [0, pi]")
        object.__setattr__(self, "z", z)


def _as_z(z):
    return z.z if isinstance(z, StripPoint) else z


def _check_strip(z):
    im = np.imag(z)
    if np.any(im < -_DOMAIN_TOL) or np.any(im > STRIP_HEIGHT + _DOMAIN_TOL):
        raise OutOfDomain("point outside the strip 0 <= Im z <= pi")


class StripExpSum(TrigPolynomial):
    """``z -> sum_l b_l exp(i lambda_l z)`` on the closed strip."""

    def __call__(self, z):
        z = np.asarray(_as_z(z))
        _check_strip(z)
        return np.exp(1j * z[..., None] * self.lambdas) @ self.coeffs

    def bottom(self):
        """Restriction to the real line as a TrigPolynomial."""
        return TrigPolynomial(self.basis, self.frequencies, self.coeffs,
                              norm=self.norm_tag, dim=self.dim)

    def top(self):
        """Restriction to ``R + i pi`` as a TrigPolynomial in ``Re z``."""
        w = np.exp(-self.lambdas * STRIP_HEIGHT)
        return TrigPolynomial(self.basis, self.frequencies, w[:, None] * self.coeffs,
                              norm=self.norm_tag, dim=self.dim)

    def boundary_pair(self):
        return BoundaryPair(self.bottom(), self.top())

    def coefficient_bound(self):
        """sum ||b_l|| max(1, exp(-lambda_l pi)), a bound over the whole strip."""
        if not len(self):
            return 0.0
        grow = np.maximum(1.0, np.exp(-self.lambdas * STRIP_HEIGHT))
        return float(np.sum(self.coefficient_norms() * grow))

    @classmethod
    def from_polynomial(cls, p):
        return cls(p.basis, p.frequencies, p.coeffs, norm=p.norm_tag, dim=p.dim)


@dataclass
class BoundaryPair:
    """Data ``f1`` on ``R`` and ``f2`` on ``R + i pi`` (both as functions of Re z)."""

    f1: object
    f2: object

    def __post_init__(self):
        d1 = getattr(self.f1, "dim", 1)
        d2 = getattr(self.f2, "dim", 1)
        if d1 != d2:
            raise ValueError(f"boundary data dimensions differ ({d1} vs {d2})")

    @property
    def dim(self):
        return getattr(self.f1, "dim", 1)

    @property
    def closed_form(self):
        return isinstance(self.f1, TrigPolynomial) and isinstance(self.f2, TrigPolynomial)


@dataclass(frozen=True)
class QuadraturePlan:
    """Oracle convolution: breakpoints every ``step``, truncation at
    ``|t - x| <= t_trunc``, absolute tolerance ``tol``."""

    step: float = 1.0
    t_trunc: float = 40.0
    tol: float = 1e-8

    def to_dict(self):
        return {"step": self.step, "t_trunc": self.t_trunc, "tol": self.tol}


def eval_strip(p, z):
    """Value of a StripExpSum at one strip point."""
    z = complex(_as_z(z))
    if not (-_DOMAIN_TOL <= z.imag <= STRIP_HEIGHT + _DOMAIN_TOL):
        raise OutOfDomain(f"Im z = {z.imag} outside [0, pi]")
    return VectorValue(p(np.asarray(z)), p.norm_tag)


def strip_sup_norm(p, window, step):
    """Grid max of ``||p||`` on both boundary lines plus the coefficient bound.

    By the maximum principle the sup over the strip is attained on the
    boundary, so two line grids suffice.
    """
    a, b = map(float, window)
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    x = a + step * np.arange(n)
    best, arg = -1.0, complex(a)
    for y in (0.0, STRIP_HEIGHT):
        vals = vector_norm(p(x + 1j * y), p.norm_tag)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, arg = float(vals[i]), complex(x[i], y)
    return SupNormEstimate(best, p.coefficient_bound(), arg)


def _sinh_ratio(lam, u):
    """sinh(lam u) / sinh(lam pi) for u in [0, pi], overflow-free."""
    lam = np.abs(np.asarray(lam, dtype=float))
    u = np.asarray(u, dtype=float)
    small = lam * STRIP_HEIGHT < 1e-8
    a = np.where(small, 1.0, lam)
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.exp(-a * (STRIP_HEIGHT - u)) * np.expm1(-2 * a * u) / np.expm1(-2 * a * STRIP_HEIGHT)
    return np.where(small, u / STRIP_HEIGHT, val)


class StripHarmonic:
    """Bounded harmonic function on the strip with exponential-sum boundary data.

    Each bottom term ``b e^{i lambda t}`` extends as
    ``b e^{i lambda x} sinh(lambda (pi - y)) / sinh(lambda pi)`` and each top
    term as ``c e^{i mu x} sinh(mu y) / sinh(mu pi)`` (linear in ``y`` for a
    zero frequency).
    """

    def __init__(self, bottom, top):
        if bottom.dim != top.dim:
            raise ValueError("boundary data dimensions differ")
        self.bottom = bottom
        self.top = top
        self.dim = bottom.dim
        self.norm_tag = bottom.norm_tag

    def __call__(self, z):
        z = np.asarray(_as_z(z))
        _check_strip(z)
        x, y = z.real[..., None], z.imag[..., None]
        out = np.zeros(z.shape + (self.dim,), dtype=complex)
        if len(self.bottom):
            lam = self.bottom.lambdas
            w = np.exp(1j * lam * x) * _sinh_ratio(lam, STRIP_HEIGHT - y)
            out += w @ self.bottom.coeffs
        if len(self.top):
            mu = self.top.lambdas
            w = np.exp(1j * mu * x) * _sinh_ratio(mu, y)
            out += w @ self.top.coeffs
        return out

    def holomorphic_part(self, rtol=1e-12):
        """The StripExpSum equal to this function, or None if not holomorphic.

        The extension is holomorphic exactly when each top coefficient equals
        the bottom one times ``exp(-lambda pi)``.
        """
        if self.bottom.basis != self.top.basis:
            return None
        cand = StripExpSum.from_polynomial(self.bottom)
        expect = cand.top()
        if tuple(f.coords for f in expect.frequencies) != tuple(f.coords for f in self.top.frequencies):
            return None
        scale = max(1.0, float(np.max(np.abs(expect.coeffs), initial=0.0)))
        if not np.allclose(expect.coeffs, self.top.coeffs, rtol=0, atol=rtol * scale):
            return None
        return cand


def strip_poisson_kernels(x, y):
    """Harmonic-measure densities of the lines ``R`` and ``R + i pi`` at ``x + i y``."""
    s, c = np.sin(y), np.cos(y)
    ch = np.cosh(x)
    return s / (2 * np.pi * (ch - c)), s / (2 * np.pi * (ch + c))


def poisson_extend_strip(bp, z, quad=None, method="auto"):
    """Bounded harmonic extension of ``bp`` evaluated at an interior point.

    Parameters
    ----------
    bp : BoundaryPair
    z : complex or StripPoint, with ``0 < Im z < pi``
    quad : QuadraturePlan, optional
    method : {'auto', 'closed', 'quadrature'}
        'auto' uses the closed form when both sides are TrigPolynomials.
    """
    z = complex(_as_z(z))
    if not (0.0 < z.imag < STRIP_HEIGHT):
        raise OutOfDomain("poisson_extend_strip needs an interior point")
    if method == "closed" or (method == "auto" and bp.closed_form):
        if not bp.closed_form:
            raise ValueError("closed form needs TrigPolynomial data on both lines")
        return VectorValue(StripHarmonic(bp.f1, bp.f2)(np.asarray(z)), bp.f1.norm_tag)
    quad = quad or QuadraturePlan()
    x, y = z.real, z.imag
    f1 = bp.f1 if callable(bp.f1) else EvaluationOracle(bp.f1)
    f2 = bp.f2 if callable(bp.f2) else EvaluationOracle(bp.f2)
    d = bp.dim

    def integrand(s):
        k1, k2 = strip_poisson_kernels(np.asarray(s), y)
        t = np.asarray(x + s)
        return (k1 * np.asarray(f1(t)).reshape(d) + k2 * np.asarray(f2(t)).reshape(d))

    T = quad.t_trunc
    pts = [0.0]
    k = 1
    while k * quad.step < T:
        pts += [k * quad.step, -k * quad.step]
        k += 1
    pts += [y, -y, 0.1 * y, -0.1 * y]
    pts = sorted(p for p in set(pts) if -T < p < T)
    val, err = quad_vec(integrand, -T, T, epsabs=quad.tol / 10, epsrel=0.0,
                        points=pts, limit=20000, norm="max")
    bound = _data_bound(bp.f1, x, T) + _data_bound(bp.f2, x, T)
    # int_{|s|>T} sin y / (cosh s -+ cos y) ds <= 4 sin y e^{-T} / (1 - 2 e^{-T})
    tail = bound * 4 * math.sin(y) * math.exp(-T) / (1 - 2 * math.exp(-T)) / (2 * math.pi)
    total = float(err) + tail
    if total > quad.tol:
        raise NonConverged(f"strip Poisson quadrature error {total:.3g} > tol {quad.tol:g}",
                           estimate=VectorValue(val), error=total)
    return VectorValue(np.asarray(val).reshape(d), getattr(bp.f1, "norm_tag", "sup"))


def _data_bound(f, x, T):
    b = getattr(f, "bound", None)
    if isinstance(f, TrigPolynomial):
        return f.coefficient_bound()
    if b is not None and math.isfinite(b):
        return b
    t = x + np.linspace(-T, T, 2001)
    return float(vector_norm(np.asarray(f(t)).reshape(t.size, -1), "sup").max())


def strip_extension(bp):
    """Callable harmonic extension for closed-form data."""
    if not bp.closed_form:
        raise ValueError("closed-form extension needs TrigPolynomial data")
    return StripHarmonic(bp.f1, bp.f2)
