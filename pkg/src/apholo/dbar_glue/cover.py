"""Circular neighbourhoods of boundary points and the local approximants on them.

A chart couples a circular neighbourhood ``U = B(z0, radius) cap closed disk``
with a holomorphic approximant ``f_k`` of ``f`` on it.  The part of ``U``
used by the gluing is an angular sector of the annulus
``A = {1 - w <= |z| <= 1}``; its half-width is the smallest angular
half-width of ``U`` over the radii of ``A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bochner_fejer import apply_operator, certified_error, choose_kernel_for_net
from ..disk_geometry import MobiusChart, angular_distance, boundary_log, mobius, signed_offset
from ..errors import CoverMismatch
from ..ap_core import vector_norm

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class CircularNeighbourhood:
    """``B(e^{i z0}, radius) cap closed disk`` minus the centre."""

    z0: float
    radius: float

    def __post_init__(self):
        if not 0 < self.radius <= 1:
            raise ValueError("radius must lie in (0, 1]")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        c = np.exp(1j * self.z0)
        return (np.abs(z - c) < self.radius) & (np.abs(z) <= 1 + 1e-15) & (z != c)


def sector_half_width(radius, width):
    """Angular half-width of ``B(z0, radius)`` that is valid at every radius
    in ``[1 - w, 1]`` (0 if the disk misses part of the annulus)."""
    out = math.pi
    for r in (1.0 - width, 1.0):
        c = (r * r + 1 - radius * radius) / (2 * r)
        if c >= 1:
            return 0.0
        out = min(out, math.acos(max(-1.0, c)))
    return out


def radius_for_half_width(alpha, width):
    r = 1.0 - width
    return math.sqrt(max(2 - 2 * math.cos(alpha), r * r + 1 - 2 * r * math.cos(alpha)))


class StripChartFunction:
    """``z -> Q(Log phi_{z0}(z))`` for a strip exponential sum ``Q``."""

    def __init__(self, z0, Q):
        self.z0 = z0
        self.Q = Q
        self._chart = MobiusChart(z0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        w = boundary_log(mobius(self._chart, z), z)
        w = np.asarray(w, dtype=complex)
        # clamp rounding just outside the strip
        w = w.real + 1j * np.clip(w.imag, 0.0, math.pi)
        return self.Q(w)


class ConstantFunction:
    def __init__(self, value):
        self.value = np.asarray(value, dtype=complex).reshape(-1)

    def __call__(self, z):
        z = np.asarray(z)
        return np.broadcast_to(self.value, z.shape + self.value.shape).copy()


class Restriction:
    """``f`` itself as the chart function of a regular point."""

    def __init__(self, f):
        self.f = f

    def __call__(self, z):
        return np.asarray(self.f(np.asarray(z)), dtype=complex)


@dataclass
class Chart:
    nbhd: CircularNeighbourhood
    half_width: float
    kind: str
    func: object
    local_error: float = 0.0
    profile: object = None
    kernel: object = None
    certified_smoothing: float = 0.0

    @property
    def center(self):
        return self.nbhd.z0

    def in_sector(self, theta):
        return angular_distance(theta, self.center) < self.half_width

    def sector_angles(self, thetas):
        """Indices of grid angles inside the sector, in increasing order of
        the unwrapped angle, and those unwrapped angles."""
        thetas = np.asarray(thetas)
        off = signed_offset(thetas, self.center)
        idx = np.nonzero(np.abs(off) < self.half_width)[0]
        order = np.argsort(off[idx])
        idx = idx[order]
        return idx, self.center + off[idx]


@dataclass
class CoverReport:
    singular: list = field(default_factory=list)
    regular_per_gap: list = field(default_factory=list)
    n_charts: int = 0
    max_local_error: float = 0.0

    def to_dict(self):
        return {"singular": self.singular, "regular_per_gap": self.regular_per_gap,
                "n_charts": self.n_charts, "max_local_error": self.max_local_error}


def _sector_grid(center, alpha, width, n_ang=96, n_rad=9, log_floor=1e-9, singular=False):
    radii = np.linspace(1.0 - width, 1.0, n_rad)
    if singular:
        u = np.geomspace(log_floor, alpha, n_ang)
        off = np.concatenate([u, -u])
    else:
        off = np.linspace(-alpha, alpha, n_ang)
    z = radii[:, None] * np.exp(1j * (center + off))[None, :]
    return z


def smoothed_profile(f, z0, budget):
    """Bochner-Fejer smoothing of ``f.local_profile(z0)`` to within ``budget``
    over the whole strip (coefficients weighted by ``max(1, e^{-lambda pi})``)."""
    P = f.local_profile(z0)
    growth = np.maximum(1.0, np.exp(-P.lambdas * math.pi)) if len(P) else np.zeros(0)
    spec = choose_kernel_for_net([P], budget, weights=[growth])
    Q = apply_operator(spec, P)
    bound = float(np.sum(P.coefficient_norms() * growth *
                         (1 - np.array([1.0 if P.lambdas[i] == 0 else
                                        float(Q.coefficient_norms()[list(Q.frequencies).index(q)] /
                                              P.coefficient_norms()[i])
                                        if q in Q.frequencies else 0.0
                                        for i, q in enumerate(P.frequencies)])))) if len(P) else 0.0
    return P, Q, spec, max(bound, 0.0)


def singular_chart(f, z0, eps, width, cap, shrink=0.8, levels=60, smoothing=0.5):
    """Chart at a singular point: largest radius in ``cap * shrink^n`` with
    ``sup ||f - f_k|| < eps`` on its sector of the annulus."""
    P, Q, spec, cert = smoothed_profile(f, z0, smoothing * eps)
    func = StripChartFunction(z0, Q)
    best = math.inf
    for n in range(levels):
        rad = min(1.0, cap) * shrink ** n
        alpha = sector_half_width(rad, width)
        if alpha <= 0:
            continue
        z = _sector_grid(z0, alpha, width, singular=True)
        err = float(vector_norm(f(z) - func(z), "sup").max())
        best = min(best, err)
        if err < eps:
            return Chart(CircularNeighbourhood(z0, rad), alpha, "singular", func, err, Q,
                         spec, certified_error(spec, P))
    raise CoverMismatch(f"no singular chart radius reaches eps at angle {z0:.6g} (best {best:.3g})")


def _regular_charts(f, a, b, eps, width, left_hw, right_hw, q0=4, q_max=1 << 14, regular="constant"):
    """Evenly spaced charts covering the gap ``(a, b)`` between two singular
    sectors (angles unwrapped, ``a < b``).

    With ``regular="constant"`` each chart carries the constant ``f(e^{ic})``
    of its centre and the count doubles until every chart is eps-close to
    ``f``; with ``"restriction"`` the chart function is ``f`` itself, which
    is continuous on the closed chart since the gap avoids the singular set.
    """
    if regular not in ("constant", "restriction"):
        raise ValueError(f"unknown regular chart choice {regular!r}")
    L = b - a
    q = max(q0, int(math.ceil(L / 0.2)))
    while q <= q_max:
        delta = L / q
        alpha = 0.75 * delta
        if 0.25 * delta < min(left_hw, right_hw):
            centers = a + (np.arange(q) + 0.5) * delta
            charts = []
            ok = True
            for c in centers:
                nbhd = CircularNeighbourhood(float(c % TWO_PI), radius_for_half_width(alpha, width))
                if regular == "restriction":
                    charts.append(Chart(nbhd, alpha, "regular", Restriction(f), 0.0))
                    continue
                val = f(np.asarray(np.exp(1j * c)))
                z = _sector_grid(c, alpha, width, n_ang=48)
                err = float(vector_norm(f(z) - val, "sup").max())
                if err >= eps:
                    ok = False
                    break
                charts.append(Chart(nbhd, alpha, "regular", ConstantFunction(val), err))
            if ok:
                return charts
        q *= 2
    raise CoverMismatch("regular charts could not meet eps; reduce the annulus width")


def build_cover(f, singular, eps, width, cap_factor=0.4, regular="constant"):
    """Charts (counterclockwise) covering the annulus of the given width."""
    pts = sorted(float(p) % TWO_PI for p in singular)
    report = CoverReport()
    if not pts:
        raise ValueError("build_cover needs at least one singular point")
    sing = []
    for i, p in enumerate(pts):
        others = [q for j, q in enumerate(pts) if j != i]
        if others:
            dist = min(2 * math.sin(angular_distance(p, q) / 2) for q in others)
            cap = min(1.0, cap_factor * dist)
        else:
            cap = 1.0
        ch = singular_chart(f, p, eps, width, cap)
        sing.append(ch)
        report.singular.append({"angle": p, "radius": ch.nbhd.radius, "half_width": ch.half_width,
                                "local_error": ch.local_error,
                                "kernel": ch.kernel.to_dict() if ch.kernel else None,
                                "certified_smoothing": ch.certified_smoothing})
    charts = []
    m = len(sing)
    for i in range(m):
        s0, s1 = sing[i], sing[(i + 1) % m]
        a = s0.center + s0.half_width
        b = s1.center - s1.half_width
        if m == 1 or b <= a:
            b = b + TWO_PI if b <= a else b
        if b - a <= 0:
            raise CoverMismatch("singular sectors overlap")
        regs = _regular_charts(f, a, b, eps, width, s0.half_width, s1.half_width, regular=regular)
        report.regular_per_gap.append(len(regs))
        charts.append(s0)
        charts.extend(regs)
    report.n_charts = len(charts)
    report.max_local_error = max(c.local_error for c in charts)
    return charts, report


def chart_transitions(charts):
    """Transition intervals between consecutive charts: each overlap shrunk
    by 10% on both sides."""
    out = []
    m = len(charts)
    for i in range(m):
        c0, c1 = charts[i], charts[(i + 1) % m]
        r = c0.center + c0.half_width
        start = c1.center - c1.half_width
        l = r - ((r - start) % TWO_PI) if m > 1 else start
        gap = r - l
        if gap <= 0 or gap >= c0.half_width + c1.half_width + 1e-12:
            raise CoverMismatch(f"charts {i} and {(i + 1) % m} do not overlap")
        out.append((l + 0.1 * gap, r - 0.1 * gap))
    return out
