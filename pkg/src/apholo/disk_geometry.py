"""Conformal charts between the unit disk, the upper half-plane and the strip.

Circle points are given as angles in radians throughout.  The basic chart at
a boundary point ``z0`` is

    phi_{z0}(z) = 2i (z0 - z) / (z0 + z),

which sends the disk into the upper half-plane and ``z0`` to 0.  Composing
with the principal logarithm lands in the strip ``0 <= Im w <= pi``; the arc
leaving ``z0`` counterclockwise goes to the real axis and the clockwise arc to
``R + i pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LogOfZero, PoleAt

POLE_TOL = 1e-14
BOUNDARY_TOL = 1e-12


def circle_point(angle):
    return np.exp(1j * np.asarray(angle, dtype=float))


def angular_distance(a, b):
    """Distance in [0, pi] between two angles on the circle."""
    d = np.mod(np.asarray(a) - np.asarray(b), 2 * np.pi)
    return np.minimum(d, 2 * np.pi - d)


def signed_offset(theta, t0):
    """Offset of ``theta`` from ``t0`` reduced to (-pi, pi]."""
    raw = np.asarray(theta, dtype=float) - t0
    d = np.mod(raw + np.pi, 2 * np.pi) - np.pi
    d = np.where(d == -np.pi, np.pi, d)
    # keep the exact difference when no wrap is needed; the shifted mod
    # above costs ~1e-16 absolute, which matters at tiny offsets
    return np.where(np.abs(raw) < np.pi, raw, d)


@dataclass(frozen=True)
class CircleArc:
    """The arc ``{exp(i (t0 + k t)) : 0 <= t < s}``."""

    t0: float
    s: float
    k: int = 1

    def __post_init__(self):
        if not 0 < self.s < math.pi:
            raise ValueError("arc length s must lie in (0, pi)")
        if self.k not in (-1, 1):
            raise ValueError("orientation k must be -1 or +1")

    def angles(self, n):
        return self.t0 + self.k * np.linspace(0.0, self.s, n, endpoint=False)

    def points(self, n):
        return circle_point(self.angles(n))

    def contains(self, theta):
        d = signed_offset(theta, self.t0) * self.k
        return (d >= 0) & (d < self.s)


@dataclass(frozen=True)
class MobiusChart:
    z0_angle: float

    @property
    def z0(self):
        return complex(np.exp(1j * self.z0_angle))

    def __call__(self, z):
        return mobius(self, z)

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        return self.z0 * (2j - w) / (2j + w)


def mobius(chart, z):
    """``phi_{z0}(z) = 2i (z0 - z) / (z0 + z)``; raises PoleAt at ``-z0``."""
    z0 = chart.z0
    z = np.asarray(z, dtype=complex)
    den = z0 + z
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleAt(f"z = -z0 = {-z0}")
    out = 2j * (z0 - z) / den
    return out if out.ndim else complex(out)


def principal_log(w):
    """``ln|w| + i Arg(w)`` with ``Arg`` in (-pi, pi]."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == 0):
        raise LogOfZero("Log(0) is undefined")
    arg = np.angle(w)
    # a signed zero imaginary part must not flip the negative axis to -pi
    arg = np.where((w.imag == 0) & (w.real < 0), np.pi, arg)
    out = np.log(np.abs(w)) + 1j * arg
    return out if out.ndim else complex(out)


def arc_to_strip(u, k):
    """Strip coordinate ``Log phi_{z0}`` of the point at angular offset ``k u``.

    On the boundary ``phi_{z0}(z0 e^{i k u}) = 2 k tan(u / 2)``, hence the
    image is ``ln(2 tan(u/2))`` plus ``i pi`` on the clockwise arc.
    """
    u = np.asarray(u, dtype=float)
    x = np.log(2 * np.tan(u / 2))
    return x + (1j * np.pi if k == -1 else 0.0)


def strip_to_arc(x):
    """Inverse of ``arc_to_strip`` in the real part: ``u = 2 arctan(e^x / 2)``."""
    return 2 * np.arctan(np.exp(np.asarray(x, dtype=float)) / 2)


def arc_midpoint_angle(x_angle, y_angle):
    """Midpoint of the counterclockwise arc from x to y."""
    span = (y_angle - x_angle) % (2 * math.pi)
    return x_angle + span / 2


@dataclass(frozen=True)
class TwoPointChart:
    """Moebius map sending x to 0, the ccw midpoint of [x, y] to 1, y to infinity."""

    x_angle: float
    y_angle: float

    def __post_init__(self):
        if angular_distance(self.x_angle, self.y_angle) < 1e-12:
            raise ValueError("x and y must be distinct circle points")

    @property
    def x(self):
        return complex(np.exp(1j * self.x_angle))

    @property
    def y(self):
        return complex(np.exp(1j * self.y_angle))

    @property
    def mid(self):
        return complex(np.exp(1j * arc_midpoint_angle(self.x_angle, self.y_angle)))

    @property
    def k(self):
        return (self.mid - self.y) / (self.mid - self.x)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        den = z - self.y
        if np.any(np.abs(den) < POLE_TOL):
            raise PoleAt(f"z = y = {self.y}")
        out = self.k * (z - self.x) / den
        return out if out.ndim else complex(out)


def mobius_two_point(x_angle, y_angle, z):
    return TwoPointChart(x_angle, y_angle)(z)


@dataclass(frozen=True)
class GeneratorSpec:
    """``z -> exp(-(i lam / pi) Log phi_{x,y}(z) + lam C)``.

    With ``C = 0`` the boundary modulus is 1 on the arc through the mapped
    midpoint and ``e^lam`` on the complementary arc (from y to x).
    """

    lam: float
    x_angle: float
    y_angle: float
    C: complex = 0j

    @property
    def chart(self):
        return TwoPointChart(self.x_angle, self.y_angle)

    def to_dict(self):
        return {"lambda": self.lam, "x_angle": self.x_angle, "y_angle": self.y_angle,
                "C": [complex(self.C).real, complex(self.C).imag]}

    @classmethod
    def from_dict(cls, d):
        c = d.get("C", [0.0, 0.0])
        return cls(float(d["lambda"]), float(d["x_angle"]), float(d["y_angle"]), complex(c[0], c[1]))


def boundary_log(w, z):
    """``Log w`` with the branch fixed by the half-plane for boundary ``z``.

    For ``|z| = 1`` the chart value is real and the limit from inside the
    disk has argument 0 or pi according to its sign.
    """
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if np.any(w == 0):
        raise LogOfZero("Log(0) is undefined")
    out = np.asarray(principal_log(w), dtype=complex)
    on = np.abs(np.abs(z) - 1.0) <= BOUNDARY_TOL
    if np.any(on):
        lim = np.log(np.abs(w)) + 1j * np.pi * (w.real < 0)
        out = np.where(on, lim, out)
    return out


def sap_generator(spec, z):
    """Value of the generator at points of the closed disk other than x, y."""
    z = np.asarray(z, dtype=complex)
    w = spec.chart(z)
    L = boundary_log(w, z)
    out = np.exp(-(1j * spec.lam / math.pi) * L + spec.lam * spec.C)
    return out if out.ndim else complex(out)


def generator_strip_profile(spec, at):
    """Leading exponential of the generator in the strip chart at an endpoint.

    Returns ``(c, mu)`` such that ``generator(z) = c exp(i mu w) (1 + O(|z - z0|))``
    with ``w = Log phi_{z0}(z)``, for ``at`` in {'x', 'y'}.
    """
    g = spec.chart
    lam = spec.lam
    if at == "x":
        # phi_{x,y} / phi_x -> q > 0 at x
        q = (1j * g.k * g.x / (g.x - g.y)).real
        return complex(np.exp(-1j * lam * math.log(q) / math.pi + lam * spec.C)), -lam / math.pi
    if at == "y":
        # phi_{x,y} * phi_y -> p < 0 at y
        p = (-1j * g.k * (g.y - g.x) / g.y).real
        c = np.exp(lam - 1j * lam * math.log(abs(p)) / math.pi + lam * spec.C)
        return complex(c), lam / math.pi
    raise ValueError("at must be 'x' or 'y'")
