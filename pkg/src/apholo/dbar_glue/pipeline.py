"""End-to-end approximation of a bounded holomorphic function with
semi-almost periodic boundary values by explicit holomorphic functions.

Stages: local approximants on a cover of the boundary, the cocycle of their
differences, its resolution by a partition of unity, the first gluing on an
annulus ``A`` and the second gluing with ``f`` on the inner disk.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..ap_core import vector_norm
from ..disk_geometry import GeneratorSpec, angular_distance, generator_strip_profile, sap_generator
from ..errors import CoverMismatch, StageError
from ..fields import GridField, dbar_fd
from .cocycle import PolarGrid, build_cocycle, resolve_cocycle
from .cover import build_cover, chart_transitions
from .glue import GlueConfig, first_glue, second_glue
from .partition import AngularPartition

TWO_PI = 2 * math.pi


@dataclass
class CertificateBlock:
    """``coeff * gen(spec)``, times ``(z + z_k) / (2 z_k)`` unless merged."""

    coeff: np.ndarray
    spec: GeneratorSpec
    center: float = None  # z_k of the corrective factor; None when merged

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        v = self.coeff * np.asarray(sap_generator(self.spec, z))[..., None]
        if self.center is not None:
            v = v * _factor(z, self.center)[..., None]
        return v

    def to_dict(self):
        return {"kind": "generator",
                "coeff": [[float(c.real), float(c.imag)] for c in np.atleast_1d(self.coeff)],
                "generator": self.spec.to_dict(),
                "factor_center": self.center}


@dataclass
class Certificate:
    """``F_eps = sum of blocks + R``; ``R`` should be a disk-algebra function,
    which is checked by its jumps across the singular points."""

    blocks: list = field(default_factory=list)
    identity_error: float = 0.0
    remainder_sup: float = 0.0
    remainder_jump: dict = field(default_factory=dict)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = 0
        for b in self.blocks:
            out = out + b(z)
        return out

    def to_list(self):
        rem = {"kind": "disk_algebra_remainder", "sup": self.remainder_sup,
               "jump": {f"{k:.12g}": v for k, v in sorted(self.remainder_jump.items())},
               "identity_error": self.identity_error}
        return [b.to_dict() for b in self.blocks] + [rem]


def _factor(z, zk):
    e = np.exp(1j * zk)
    return (np.asarray(z) + e) / (2 * e)


def _pair_blocks(blocks, tol=1e-9):
    """Replace matching blocks from two singular points by one generator.

    A block at ``p`` with exponent ``lam`` and one at ``q`` with ``-lam`` come
    from chart terms ``b_p e^{i mu w_p}`` and ``b_q e^{-i mu w_q}``
    (``mu = -lam / pi``).  The generator ``gen(lam; p, q)`` has exactly these
    leading terms, ``c_x e^{i mu w_p}`` at ``p`` and ``c_y e^{-i mu w_q}`` at
    ``q``; when ``b_p / c_x = b_q / c_y = a`` the pair is replaced by
    ``a gen(lam; p, q)`` without corrective factors (the difference is
    continuous at both points, so it moves into the remainder).  For
    ``q = -p`` this is ``gen(lam; y, x) = e^lam gen(-lam; x, y)``.
    """
    out, used = [], set()
    for i, a in enumerate(blocks):
        if i in used:
            continue
        for j in range(i + 1, len(blocks)):
            b = blocks[j]
            if j in used or angular_distance(a.center, b.center) < 1e-12:
                continue
            if abs(a.spec.lam + b.spec.lam) > tol * max(1.0, abs(a.spec.lam)):
                continue
            spec = GeneratorSpec(a.spec.lam, a.center, b.center)
            cx, _ = generator_strip_profile(spec, "x")
            cy, _ = generator_strip_profile(spec, "y")
            # chart coefficients b e^{i mu w}, from block coefficients b e^{i mu ln 2}
            bp = a.coeff * np.exp(1j * a.spec.lam * math.log(2) / math.pi)
            bq = b.coeff * np.exp(1j * b.spec.lam * math.log(2) / math.pi)
            ap, aq = bp / cx, bq / cy
            if np.abs(ap - aq).max() <= tol * max(1.0, float(np.abs(ap).max())):
                out.append(CertificateBlock(ap, spec, None))
                used.update((i, j))
                break
        else:
            out.append(a)
            used.add(i)
    return out


def build_certificate(F, charts, n_phi=1024, offsets=(1e-3, 1e-4, 1e-5)):
    """Split ``F`` into generator blocks from the singular charts plus a remainder.

    A chart term ``b e^{i lam w}`` with ``w = Log phi_{z_k}(z)`` equals
    ``b e^{i lam ln 2} gen(-pi lam; z_k, -z_k)`` since
    ``phi_{z_k, -z_k} = phi_{z_k} / 2``; the identity is checked numerically
    on each chart sector.
    """
    cert = Certificate()
    sing = [c for c in charts if c.kind == "singular"]
    raw = []
    for ch in sing:
        Q = ch.profile
        mine = []
        for lam, b in zip(Q.lambdas, Q.coeffs):
            spec = GeneratorSpec(float(-math.pi * lam) + 0.0, ch.center, (ch.center + math.pi) % TWO_PI)
            mine.append(CertificateBlock(b * np.exp(1j * lam * math.log(2)), spec, ch.center))
        u = np.linspace(-ch.half_width, ch.half_width, 201)[1:-1:2]
        z = np.concatenate([0.999 * np.exp(1j * (ch.center + u)), 0.5 * np.exp(1j * (ch.center + u))])
        via = sum(blk.coeff * np.asarray(sap_generator(blk.spec, z))[:, None] for blk in mine)
        cert.identity_error = max(cert.identity_error, float(np.abs(ch.func(z) - via).max()))
        # zero-frequency terms are polynomials times the corrective factor,
        # so they belong to the disk-algebra remainder
        raw.extend(blk for blk in mine if blk.spec.lam != 0)
    cert.blocks = _pair_blocks(raw)

    radii = np.linspace(0.0, 1.0, 21)
    th = math.pi / n_phi + TWO_PI * np.arange(n_phi) / n_phi
    z = radii[:, None] * np.exp(1j * th)[None, :]
    R = F.polar(radii, n_phi, math.pi / n_phi) - cert(z)
    cert.remainder_sup = float(vector_norm(R, "sup").max())
    for ch in sing:
        jumps = []
        for u in offsets:
            zz = np.exp(1j * (ch.center + np.array([u, -u])))
            r = F(zz) - cert(zz)
            jumps.append(float(np.abs(r[0] - r[1]).max()))
        cert.remainder_jump[ch.center] = max(jumps)
    return cert


@dataclass
class ApproximationReport:
    epsilon: float
    width: float = 0.0
    n_theta: int = 0
    stage_errors: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    dbar_residual: dict = field(default_factory=dict)
    sup_error: float = 0.0
    certificate: list = field(default_factory=list)
    cover: dict = field(default_factory=dict)
    cocycle: dict = field(default_factory=dict)
    first_glue: dict = field(default_factory=dict)
    second_glue: dict = field(default_factory=dict)
    halvings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class Identity:
    """``F_eps = f`` (no singular points)."""

    def __init__(self, f):
        self.f = f

    def __call__(self, z):
        return self.f(z)

    def polar(self, radii, n_phi, offset=0.0):
        th = offset + TWO_PI * np.arange(n_phi) / n_phi
        return self.f(np.asarray(radii, dtype=float)[:, None] * np.exp(1j * th)[None, :])


def dbar_residual(F, r_lo, r_hi, n_phi, chunk=24, order=4):
    """Max of ``|dF/dx + i dF/dy|`` on a polar grid with radial step equal to
    the angular step at radius 1; returns ``(max, step)``."""
    step = TWO_PI / n_phi
    n = max(3, int(math.ceil((r_hi - r_lo) / step)) + 1)
    radii = np.linspace(r_lo, r_hi, n)
    th = math.pi / n_phi + TWO_PI * np.arange(n_phi) / n_phi
    worst = 0.0
    i = 0
    m = order // 2
    while i < n - 2 * m:
        rows = radii[i:min(n, i + chunk + 2 * m)]
        vals = F.polar(rows, n_phi, math.pi / n_phi)
        z = rows[:, None] * np.exp(1j * th)[None, :]
        res, _ = dbar_fd(GridField(z, vals, step, kind="polar", axes=(rows, th)), order)
        worst = max(worst, float(vector_norm(res, "sup").max()))
        i += chunk
    return worst, float(max(radii[1] - radii[0], step))


def _output_field(F, n_r=33, n_phi=256):
    radii = np.linspace(0.0, 1.0, n_r)
    th = math.pi / n_phi + TWO_PI * np.arange(n_phi) / n_phi
    z = radii[:, None] * np.exp(1j * th)[None, :]
    vals = F.polar(radii, n_phi, math.pi / n_phi)
    return GridField(z, vals, float(max(radii[1], TWO_PI / n_phi)), region="disk", kind="polar",
                     axes=(radii, th))


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except CoverMismatch:
        raise
    except StageError:
        raise
    except Exception as exc:  # annotate which stage failed
        raise StageError(name, exc) from exc


def approximate(f, eps, cfg=None, singular=None):
    """Approximate ``f`` within ``C eps`` on the closed disk.

    Parameters
    ----------
    f : callable
        Bounded holomorphic function on the disk, ``z -> (..., d)`` values,
        with continuous boundary values off ``singular`` and a
        ``local_profile(angle)`` strip profile at each singular point (as
        ``ASFunction`` provides).
    eps : float
        Target accuracy of the local approximants.
    cfg : GlueConfig, optional
    singular : sequence of float, optional
        Singular angles; defaults to ``f.singular_angles``.

    Returns
    -------
    F : callable
        The glued function (also exposes ``polar``).
    field : GridField
        ``F`` sampled on a polar grid of the closed disk.
    certificate : Certificate or None
    report : ApproximationReport
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    cfg = cfg or GlueConfig()
    if singular is None:
        singular = getattr(f, "singular_angles", [])
    singular = sorted(float(s) % TWO_PI for s in singular)
    report = ApproximationReport(epsilon=float(eps), config=cfg.to_dict())
    t_all = time.perf_counter()
    if not singular:
        F = Identity(f)
        report.constants = {"C": 0.0, "C_prime": 0.0, "C_bar": 0.0, "C_hat": 0.0, "C_rho": 0.0}
        report.stage_errors = {"cover": 0.0, "cocycle": 0.0, "resolution": 0.0,
                               "first_glue": 0.0, "second_glue": 0.0}
        report.dbar_residual = {"max": 0.0, "step": 0.0, "threshold": 0.0, "region": [], "pass": True}
        field_ = _output_field(F)
        cert = Certificate(remainder_sup=field_.sup_norm())
        report.certificate = cert.to_list()
        report.timings = {"total": time.perf_counter() - t_all}
        return F, field_, cert, report

    width = cfg.width
    for attempt in range(cfg.max_halvings + 1):
        t0 = time.perf_counter()
        try:
            charts, cover_rep = build_cover(f, singular, eps, width, cfg.cap_factor, cfg.regular)
            part = AngularPartition(chart_transitions(charts))
        except CoverMismatch as exc:
            report.halvings.append({"width": width, "reason": str(exc)})
            width /= 2
            continue
        n_theta = cfg.theta_count(part.min_transition())
        grid = PolarGrid.annulus(width, cfg.n_r, n_theta)
        coc = _stage("cocycle", build_cocycle, charts, grid, threshold=math.inf, order=4)
        res = _stage("resolution", resolve_cocycle, coc, part)
        t1 = time.perf_counter()
        g1 = _stage("first_glue", first_glue, coc, res, cfg, width)
        t2 = time.perf_counter()
        if g1.sup_H >= eps and attempt < cfg.max_halvings:
            report.halvings.append({"width": width, "reason": f"sup|H| = {g1.sup_H:.3g} >= eps"})
            width /= 2
            continue
        break
    else:
        raise StageError("cover", CoverMismatch("no annulus width met eps"))

    g2 = _stage("second_glue", second_glue, f, g1.f_eps, cfg, width, n_theta)
    t3 = time.perf_counter()
    F = g2.F

    # sup error on the closed disk
    radii = np.unique(np.concatenate([np.linspace(0.0, 1.0 - width, 11), grid.radii]))
    zz = radii[:, None] * np.exp(1j * grid.thetas)[None, :]
    diff = np.asarray(f(zz)) - F.polar(radii, n_theta, grid.offset)
    sup_err = float(vector_norm(diff, "sup").max())
    r_lo = max(0.0, 1.0 - (1.0 + cfg.residual_band) * width)
    r_hi = 1.0 - width / 2
    worst, step = dbar_residual(F, r_lo, r_hi, n_theta)
    t4 = time.perf_counter()
    cert = build_certificate(F, charts) if cfg.certificate else None
    t5 = time.perf_counter()

    report.width = width
    report.n_theta = n_theta
    report.cover = cover_rep.to_dict()
    report.cocycle = dict(coc.summary(), **res.summary())
    report.first_glue = g1.summary()
    report.second_glue = g2.summary()
    report.stage_errors = {"cover": cover_rep.max_local_error, "cocycle": coc.sup,
                           "resolution": res.cocycle_error, "first_glue": g1.glue_error,
                           "second_glue": g2.formula_gap}
    report.constants = {"C": g1.C, "C_prime": g2.sup_G / eps,
                        "C_bar": max(g2.sup_cA, g2.sup_cD) / eps, "C_hat": sup_err / eps,
                        "C_rho": g2.C_rho}
    report.dbar_residual = {"max": worst, "step": step, "threshold": 10 * step,
                            "region": [r_lo, r_hi], "pass": bool(worst < 10 * step)}
    report.sup_error = sup_err
    report.certificate = cert.to_list() if cert else []
    report.timings = {"cover_cocycle": t1 - t0, "first_glue": t2 - t1, "second_glue": t3 - t2,
                      "verify": t4 - t3, "certificate": t5 - t4, "total": time.perf_counter() - t_all}
    return F, _output_field(F), cert, report
