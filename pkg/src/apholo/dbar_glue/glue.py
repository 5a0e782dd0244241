"""The two gluing steps.

First gluing: with ``H`` the Cauchy transform of ``h`` over the annulus
``A``, ``c_j = ftilde_j - H`` is holomorphic on each chart and
``f_eps = f_j - c_j = sum_k rho_k f_k + H`` is a single holomorphic function
on ``A`` close to ``f``.

Second gluing: ``A' = A`` and ``D' = {|z| < 1 - w/2}`` overlap in a collar.
With ``c = f - f_eps`` and ``G`` the Cauchy transform of ``c dbar rho_{A'}``
over the collar, ``F_eps = rho_{D'} f + rho_{A'} f_eps + G`` is holomorphic
on the whole disk and equals both ``f - rho_{A'} c + G`` and
``f_eps + rho_{D'} c + G``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from ..ap_core import vector_norm
from ..errors import GlueMismatch
from ..fields import GridField, dbar_fd
from .cauchy import CauchyTransform, width_constant
from .partition import RadialPartition

TWO_PI = 2 * math.pi


@dataclass
class GlueConfig:
    """Numerical parameters of the gluing pipeline.

    Parameters
    ----------
    width : float
        Initial annulus width ``w``; halved while the cover or the first
        gluing cannot meet ``eps``.
    n_r : int
        Radii of the annulus grid.
    n_theta : int or None
        Angles of every polar grid; by default the smallest power of two
        (at least 2048) giving ``nodes_per_transition`` nodes across the
        narrowest transition.
    cauchy_nr : int
        Gauss-Legendre nodes per radial panel of the Cauchy transforms.
    cauchy_oversample : int
        Angular oversampling of the Cauchy transforms relative to the grid
        (the data have transitions only ``nodes_per_transition`` nodes wide).
    cauchy_graded : bool
        Geometric radial refinement toward each evaluation radius.
    regular : {'restriction', 'constant'}
        Chart function at regular points: ``f`` itself, or the constant
        boundary value at the chart centre (which needs ``w`` of order
        ``eps`` times the distance to the singular set).
    max_halvings : int
        Bound on the number of width halvings.
    residual_band : float
        The ``dbar F_eps`` residual is measured for
        ``1 - (1 + residual_band) w <= |z| <= 1 - w/2``.
    """

    width: float = 0.1
    n_r: int = 41
    n_theta: int = None
    nodes_per_transition: int = 12
    n_theta_min: int = 2048
    n_theta_max: int = 65536
    cauchy_nr: int = 16
    cauchy_oversample: int = 4
    cauchy_graded: bool = False
    regular: str = "restriction"
    max_halvings: int = 6
    cap_factor: float = 0.4
    smoothing: float = 0.5
    residual_band: float = 0.5
    glue_tol: float = 1e-6
    certificate: bool = True

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def theta_count(self, min_transition):
        if self.n_theta is not None:
            return int(self.n_theta)
        n = self.n_theta_min
        while n < self.n_theta_max and TWO_PI / n * self.nodes_per_transition > min_transition:
            n *= 2
        return n


class FirstGlued:
    """``f_eps = sum_k rho_k f_k + H`` on the annulus."""

    def __init__(self, psum, H):
        self.psum = psum
        self.H = H

    def __call__(self, z):
        return self.psum(z) + self.H(z)

    def polar(self, radii, n_phi, offset=0.0):
        return self.psum.polar(radii, n_phi, offset) + self.H.polar(radii, n_phi, offset)


@dataclass
class FirstGlue:
    f_eps: FirstGlued
    H: CauchyTransform
    sup_H: float
    sup_h: float
    sup_c: float
    C: float
    c_residual: float
    c_residual_mid: float
    glue_error: float

    def summary(self):
        return {"sup_H": self.sup_H, "sup_h": self.sup_h, "sup_c": self.sup_c, "C": self.C,
                "c_residual": self.c_residual, "c_residual_mid": self.c_residual_mid,
                "glue_error": self.glue_error}


def first_glue(cocycle, resolution, cfg, width):
    """Solve ``dbar H = h`` on the annulus and glue the charts."""
    grid = cocycle.grid
    H = CauchyTransform(resolution.h, 1.0 - width, 1.0, n_theta=grid.n_theta * cfg.cauchy_oversample,
                        n_r=cfg.cauchy_nr, graded=cfg.cauchy_graded)
    Hv = H.polar(grid.radii, grid.n_theta, grid.offset)
    sup_H = float(vector_norm(Hv, "sup").max())
    sup_c = res_all = res_mid = glue_err = 0.0
    mid = (grid.radii[1:-1] > 1 - 0.75 * width) & (grid.radii[1:-1] < 1 - 0.25 * width)
    psum_sector = []
    for j, s in enumerate(cocycle.sectors):
        cj = resolution.ftilde[j] - Hv[:, s.index]
        sup_c = max(sup_c, float(vector_norm(cj, "sup").max()))
        # the chart formula f_j - c_j against the global sum_k rho_k f_k + H
        ps = s.values - resolution.ftilde[j]
        glue_err = max(glue_err, float(np.abs((s.values - cj) - (ps + Hv[:, s.index])).max()))
        psum_sector.append(ps)
        if s.index.size >= 3 and grid.radii.size >= 3:
            z = grid.radii[:, None] * np.exp(1j * s.angles)[None, :]
            r, _ = dbar_fd(GridField(z, cj, grid.step, kind="polar", axes=(grid.radii, s.angles)))
            n = vector_norm(r, "sup")
            res_all = max(res_all, float(n.max()))
            if np.any(mid):
                res_mid = max(res_mid, float(n[mid].max()))
    C = width_constant(sup_H, width, resolution.sup_h)
    return FirstGlue(FirstGlued(resolution.psum, H), H, sup_H, resolution.sup_h, sup_c, C,
                     res_all, res_mid, glue_err)


class CollarDatum:
    """``g = (f - f_eps) dbar rho_{A'}`` sampled on circles."""

    def __init__(self, f, f_eps, part):
        self.f, self.f_eps, self.part = f, f_eps, part

    def polar(self, radii, n_phi, offset=0.0):
        radii = np.asarray(radii, dtype=float)
        th = offset + TWO_PI * np.arange(n_phi) / n_phi
        z = radii[:, None] * np.exp(1j * th)[None, :]
        c = self.f(z) - self.f_eps.polar(radii, n_phi, offset)
        return c * self.part.dbar_rho_A(z)[..., None]


class Glued:
    """``F_eps = rho_{D'} f + rho_{A'} f_eps + G`` on the closed disk."""

    def __init__(self, f, f_eps, part, G):
        self.f, self.f_eps, self.part, self.G = f, f_eps, part, G

    def polar(self, radii, n_phi, offset=0.0):
        radii = np.asarray(radii, dtype=float)
        th = offset + TWO_PI * np.arange(n_phi) / n_phi
        z = radii[:, None] * np.exp(1j * th)[None, :]
        out = np.asarray(self.f(z), dtype=complex) * self.part.rho_D(radii)[:, None, None]
        use = radii >= self.part.r0
        if np.any(use):
            fe = self.f_eps.polar(radii[use], n_phi, offset)
            out[use] += self.part.rho_A(radii[use])[:, None, None] * fe
        return out + self.G.polar(radii, n_phi, offset)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        out = np.asarray(self.f(z), dtype=complex) * self.part.rho_D(r)[..., None]
        use = r >= self.part.r0
        if np.any(use):
            out[use] += self.part.rho_A(r[use])[:, None] * self.f_eps(z[use])
        return out + self.G(z)


@dataclass
class SecondGlue:
    F: Glued
    G: CauchyTransform
    sup_G: float
    sup_c: float
    sup_cA: float
    sup_cD: float
    formula_gap: float
    C_rho: float

    def summary(self):
        return {"sup_G": self.sup_G, "sup_c": self.sup_c, "sup_c_A": self.sup_cA,
                "sup_c_D": self.sup_cD, "formula_gap": self.formula_gap, "C_rho": self.C_rho}


def second_glue(f, f_eps, cfg, width, n_theta, offset=None):
    """Glue ``f`` on ``D'`` with ``f_eps`` on ``A'``.

    Raises ``GlueMismatch`` if the two expressions for ``F_eps`` differ by
    more than ``cfg.glue_tol`` on the collar ``D' cap A``.
    """
    part = RadialPartition.for_annulus(width)
    offset = math.pi / n_theta if offset is None else offset
    G = CauchyTransform(CollarDatum(f, f_eps, part), part.r0, part.r1, n_theta=n_theta * cfg.cauchy_oversample,
                        n_r=cfg.cauchy_nr, graded=cfg.cauchy_graded)
    # collar: both formulas
    rc = np.linspace(part.r0, part.r1, 9)
    th = offset + TWO_PI * np.arange(n_theta) / n_theta
    z = rc[:, None] * np.exp(1j * th)[None, :]
    fz = np.asarray(f(z), dtype=complex)
    fe = f_eps.polar(rc, n_theta, offset)
    Gc = G.polar(rc, n_theta, offset)
    c = fz - fe
    rA = part.rho_A(rc)[:, None, None]
    rD = part.rho_D(rc)[:, None, None]
    F1 = fz - rA * c + Gc
    F2 = fe + rD * c + Gc
    gap = float(np.abs(F1 - F2).max())
    if gap > cfg.glue_tol:
        raise GlueMismatch(f"gluing formulas differ by {gap:.3g} on the collar")
    # c_{A'} on A and c_{D'} on D'
    ra = np.linspace(part.r0, 1.0, 17)
    za = ra[:, None] * np.exp(1j * th)[None, :]
    ca = np.asarray(f(za), dtype=complex) - f_eps.polar(ra, n_theta, offset)
    Ga = G.polar(ra, n_theta, offset)
    cA = -part.rho_D(ra)[:, None, None] * ca - Ga
    rd = np.concatenate([np.linspace(0.0, part.r0, 9, endpoint=False), rc])
    Gd = G.polar(rd, n_theta, offset)
    cD_collar = part.rho_A(rc)[:, None, None] * c - Gc
    sup_cD = max(float(vector_norm(Gd[:9], "sup").max()), float(vector_norm(cD_collar, "sup").max()))
    sup_G = max(float(vector_norm(Gd, "sup").max()), float(vector_norm(Ga, "sup").max()))
    return SecondGlue(Glued(f, f_eps, part, G), G, sup_G, float(vector_norm(ca, "sup").max()),
                      float(vector_norm(cA, "sup").max()), sup_cD, gap, part.constant(width))
