"""Explicit bounded holomorphic functions built from jump generators.

An ``ASFunction`` is

    f(z) = P(z) + sum_j a_j(z) * gen_j(z),

where ``P`` and ``a_j`` are polynomials with vector coefficients and each
``gen_j`` is a ``GeneratorSpec``.  Such an ``f`` is holomorphic in the disk,
continuous on the closed disk minus the generator endpoints, and has an
exact exponential profile in the strip chart at every endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ap_core import BasisSet, Frequency
from .disk_geometry import GeneratorSpec, angular_distance, generator_strip_profile, sap_generator
from .strip_holo import StripExpSum

ENDPOINT_TOL = 1e-12


def _poly_eval(coeffs, z):
    """Horner evaluation of ``sum_n c_n z^n`` with ``c`` of shape (deg+1, d)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + (coeffs.shape[1],), dtype=complex)
    for c in coeffs[::-1]:
        out = out * z[..., None] + c
    return out


def _coeffs_to_json(c):
    return [[[float(v.real), float(v.imag)] for v in row] for row in c]


def _coeffs_from_json(rows):
    return np.array([[complex(a, b) for a, b in row] for row in rows], dtype=complex)


@dataclass
class GeneratorTerm:
    spec: GeneratorSpec
    poly: np.ndarray  # (deg+1, d)

    def __post_init__(self):
        self.poly = np.atleast_2d(np.asarray(self.poly, dtype=complex))

    def __call__(self, z):
        return _poly_eval(self.poly, z) * np.asarray(sap_generator(self.spec, z))[..., None]

    def endpoints(self):
        return (self.spec.x_angle, self.spec.y_angle)


@dataclass
class ASFunction:
    dim: int = 1
    poly: np.ndarray = None
    terms: list = field(default_factory=list)

    def __post_init__(self):
        if self.poly is None:
            self.poly = np.zeros((1, self.dim), dtype=complex)
        self.poly = np.atleast_2d(np.asarray(self.poly, dtype=complex))
        if self.poly.shape[1] != self.dim or any(t.poly.shape[1] != self.dim for t in self.terms):
            raise ValueError("all coefficient vectors must have length dim")

    @classmethod
    def generator(cls, spec, coeff=1.0):
        c = np.atleast_1d(np.asarray(coeff, dtype=complex))
        return cls(dim=c.size, terms=[GeneratorTerm(spec, c[None, :])])

    @classmethod
    def polynomial(cls, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None]
        return cls(dim=c.shape[1], poly=c)

    def __add__(self, other):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        n = max(len(self.poly), len(other.poly))
        p = np.zeros((n, self.dim), dtype=complex)
        p[:len(self.poly)] += self.poly
        p[:len(other.poly)] += other.poly
        return ASFunction(self.dim, p, list(self.terms) + list(other.terms))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = _poly_eval(self.poly, z)
        for t in self.terms:
            out = out + t(z)
        return out

    def boundary(self, theta):
        return self(np.exp(1j * np.asarray(theta, dtype=float)))

    @property
    def singular_angles(self):
        """Generator endpoints with nonzero exponent, sorted in [0, 2 pi)."""
        pts = []
        for t in self.terms:
            if t.spec.lam == 0 or not np.any(t.poly):
                continue
            for a in t.endpoints():
                a = a % (2 * math.pi)
                if all(angular_distance(a, b) > ENDPOINT_TOL for b in pts):
                    pts.append(a)
        return sorted(pts)

    @property
    def is_disk_algebra(self):
        return not self.singular_angles

    def local_profile(self, angle):
        """Strip-chart profile at a boundary point.

        Returns a StripExpSum ``P`` in the variable ``w = Log phi_{z0}(z)``
        with ``f(z) - P(w) -> 0`` as ``z -> z0``.  Away from generator
        endpoints this is the constant ``f(z0)``.
        """
        z0 = complex(np.exp(1j * angle))
        const = _poly_eval(self.poly, z0)
        expo = []  # (coefficient vector, mu)
        for t in self.terms:
            a0 = _poly_eval(t.poly, z0)
            hit = None
            if t.spec.lam != 0:
                if angular_distance(angle, t.spec.x_angle) <= ENDPOINT_TOL:
                    hit = "x"
                elif angular_distance(angle, t.spec.y_angle) <= ENDPOINT_TOL:
                    hit = "y"
            if hit is None:
                const = const + a0 * complex(sap_generator(t.spec, z0))
            else:
                c, mu = generator_strip_profile(t.spec, hit)
                expo.append((a0 * c, mu))
        betas = []
        for _, mu in expo:
            if all(abs(abs(mu) - b) > 1e-14 * max(1.0, b) for b in betas):
                betas.append(abs(mu))
        basis = BasisSet(tuple(betas) or (1.0,), tuple(f"mu{i}" for i in range(max(1, len(betas)))))
        r = basis.rank
        freqs = [Frequency((Fraction(0),) * r, basis)]
        coeffs = [const]
        for b, mu in expo:
            j = min(range(len(betas)), key=lambda i: abs(betas[i] - abs(mu)))
            coords = [Fraction(0)] * r
            coords[j] = Fraction(1 if mu > 0 else -1)
            freqs.append(Frequency(tuple(coords), basis))
            coeffs.append(b)
        return StripExpSum(basis, freqs, np.array(coeffs, dtype=complex), dim=self.dim)

    def to_dict(self):
        return {
            "dim": self.dim,
            "poly": _coeffs_to_json(self.poly),
            "generators": [dict(t.spec.to_dict(), poly=_coeffs_to_json(t.poly)) for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data):
        dim = int(data.get("dim", 1))
        poly = _coeffs_from_json(data["poly"]) if data.get("poly") else None
        terms = []
        for g in data.get("generators", []):
            p = _coeffs_from_json(g["poly"]) if "poly" in g else np.ones((1, dim), dtype=complex)
            terms.append(GeneratorTerm(GeneratorSpec.from_dict(g), p))
        return cls(dim, poly, terms)
