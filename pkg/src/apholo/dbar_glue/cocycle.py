"""Cocycles of local approximants and their resolution by a partition of unity.

On the overlap of charts ``k`` and ``j`` the difference ``c_kj = f_k - f_j``
is holomorphic and small.  With a partition of unity ``rho_k`` subordinate
to the cover, ``ftilde_j = f_j - sum_k rho_k f_k`` satisfies
``ftilde_k - ftilde_j = c_kj`` and ``dbar ftilde_j = h`` with the same
``h = -sum_k (d rho_k / d zbar) f_k`` on every chart.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..ap_core import vector_norm
from ..errors import NotHolomorphic
from ..fields import GridField, dbar_fd, holo_residual
from .partition import angular_dbar

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class PolarGrid:
    """Tensor grid ``r_i e^{i theta_l}`` with uniform, half-step-offset angles."""

    radii: np.ndarray
    n_theta: int
    offset: float = None

    def __post_init__(self):
        object.__setattr__(self, "radii", np.asarray(self.radii, dtype=float))
        if self.offset is None:
            object.__setattr__(self, "offset", math.pi / self.n_theta)

    @classmethod
    def annulus(cls, width, n_r, n_theta):
        return cls(np.linspace(1.0 - width, 1.0, n_r), n_theta)

    @property
    def thetas(self):
        return self.offset + TWO_PI * np.arange(self.n_theta) / self.n_theta

    @property
    def nodes(self):
        return self.radii[:, None] * np.exp(1j * self.thetas)[None, :]

    @property
    def step(self):
        dr = float(np.max(np.diff(self.radii))) if self.radii.size > 1 else 0.0
        return max(dr, float(self.radii.max()) * TWO_PI / self.n_theta)


@dataclass
class SectorData:
    """Chart values on the grid nodes of its sector."""

    index: np.ndarray  # grid angle indices, ordered counterclockwise
    angles: np.ndarray  # the same angles, unwrapped around the chart centre
    values: np.ndarray  # (n_r, len(index), d)


@dataclass
class Cocycle:
    charts: list
    grid: PolarGrid
    sectors: list
    pairs: dict = field(default_factory=dict)  # (k, j) -> (positions in sector k, values)
    antisymmetry_error: float = 0.0
    triple_count: int = 0
    triple_error: float = 0.0
    residuals: dict = field(default_factory=dict)
    order: int = 2

    @property
    def sup(self):
        return max((float(vector_norm(v, "sup").max()) for _, v in self.pairs.values()), default=0.0)

    @property
    def max_residual(self):
        return max(self.residuals.values(), default=0.0)

    def field(self, k, j):
        """The cocycle ``c_kj`` as a polar GridField on the common sector."""
        pos, vals = self.pairs[(k, j)]
        ang = self.sectors[k].angles[pos]
        z = self.grid.radii[:, None] * np.exp(1j * ang)[None, :]
        step = self.grid.step
        return GridField(z, vals, step, region=f"U{k}&U{j}", kind="polar", axes=(self.grid.radii, ang))

    def summary(self):
        return {"pairs": len(self.pairs) // 2, "sup": self.sup,
                "antisymmetry_error": self.antisymmetry_error,
                "triples": self.triple_count, "triple_error": self.triple_error,
                "max_dbar_residual": self.max_residual, "residual_order": self.order,
                "step": self.grid.step}


def _sector(chart, grid):
    idx, ang = chart.sector_angles(grid.thetas)
    z = grid.radii[:, None] * np.exp(1j * ang)[None, :]
    return SectorData(idx, ang, np.asarray(chart.func(z), dtype=complex))


def build_cocycle(charts, grid, threshold=None, order=2):
    """``c_kj = f_k - f_j`` on every pairwise overlap, with checks.

    Antisymmetry and the triple identity ``c_kj + c_jl = c_kl`` are measured
    on the grid; each ``c_kj`` must pass a finite-difference holomorphy test
    with residual below ``threshold`` (default ``10 * step * max(1, sup)``),
    otherwise ``NotHolomorphic`` is raised.  ``order`` selects the 2nd or
    4th order stencil of the holomorphy test.
    """
    sectors = [_sector(c, grid) for c in charts]
    coc = Cocycle(charts, grid, sectors, order=order)
    m = len(charts)
    pos = [dict(zip(s.index.tolist(), range(s.index.size))) for s in sectors]
    for k, j in itertools.combinations(range(m), 2):
        common = [i for i in sectors[k].index.tolist() if i in pos[j]]
        if not common:
            continue
        pk = np.array([pos[k][i] for i in common])
        pj = np.array([pos[j][i] for i in common])
        ckj = sectors[k].values[:, pk] - sectors[j].values[:, pj]
        cjk = sectors[j].values[:, pj] - sectors[k].values[:, pk]
        coc.pairs[(k, j)] = (pk, ckj)
        coc.pairs[(j, k)] = (pj, cjk)
        coc.antisymmetry_error = max(coc.antisymmetry_error, float(np.abs(ckj + cjk).max()))
    for k, j, l in itertools.combinations(range(m), 3):
        common = set(sectors[k].index.tolist()) & set(pos[j]) & set(pos[l])
        if not common:
            continue
        coc.triple_count += 1
        c = sorted(common)
        a = np.array([pos[k][i] for i in c])
        b = np.array([pos[j][i] for i in c])
        e = np.array([pos[l][i] for i in c])
        vk, vj, vl = sectors[k].values[:, a], sectors[j].values[:, b], sectors[l].values[:, e]
        err = np.abs((vk - vj) + (vj - vl) - (vk - vl)).max()
        coc.triple_error = max(coc.triple_error, float(err))
    for (k, j) in list(coc.pairs):
        if k > j:
            continue
        f = coc.field(k, j)
        if min(f.nodes.shape) < order + 1:
            continue
        res = holo_residual(f, order=order)
        coc.residuals[(k, j)] = res
        limit = threshold if threshold is not None else 10 * f.step * max(1.0, f.sup_norm())
        if res > limit:
            raise NotHolomorphic(f"cocycle c_{k}{j} has dbar residual {res:.3g} > {limit:.3g}")
    return coc


class PartitionSum:
    """``sum_k rho_k f_k`` and ``h = -sum_k (d rho_k / d zbar) f_k``."""

    def __init__(self, charts, partition):
        self.charts = charts
        self.partition = partition
        self.dim = None

    def _pairs(self, z):
        z = np.asarray(z, dtype=complex)
        return z, self.partition.pair_weights(np.angle(z))

    def _eval(self, idx, z):
        return np.asarray(self.charts[idx].func(z), dtype=complex)

    def __call__(self, z):
        z, (k, k1, wk, wk1, _) = self._pairs(z)
        out = None
        for c in np.unique(k):
            sel = k == c
            v = self._eval(c, z[sel])
            if out is None:
                out = np.zeros(z.shape + v.shape[-1:], dtype=complex)
            out[sel] += wk[sel, None] * v
        for c in np.unique(k1[wk1 > 0]):
            sel = (k1 == c) & (wk1 > 0)
            out[sel] += wk1[sel, None] * self._eval(c, z[sel])
        return out

    def h(self, z):
        z, (k, k1, _, wk1, dw) = self._pairs(z)
        d = self._eval(0, np.asarray(z.reshape(-1)[:1])).shape[-1]
        out = np.zeros(z.shape + (d,), dtype=complex)
        act = dw != 0
        for c in np.unique(k[act]):
            sel = act & (k == c)
            diff = self._eval(int(k1[sel][0]), z[sel]) - self._eval(c, z[sel])
            out[sel] = -angular_dbar(dw[sel], z[sel])[:, None] * diff
        return out

    def polar(self, radii, n_phi, offset=0.0):
        th = offset + TWO_PI * np.arange(n_phi) / n_phi
        return self(np.asarray(radii, dtype=float)[:, None] * np.exp(1j * th)[None, :])


@dataclass
class Resolution:
    psum: PartitionSum
    ftilde: list  # per chart, values on its sector nodes
    cocycle_error: float
    sup_h: float
    h_consistency: float

    @property
    def h(self):
        return self.psum.h

    def summary(self):
        return {"cocycle_error": self.cocycle_error, "sup_h": self.sup_h,
                "h_consistency": self.h_consistency}


def resolve_cocycle(cocycle, partition):
    """``ftilde_j = f_j - sum_k rho_k f_k`` on each sector, checked against
    ``ftilde_k - ftilde_j = c_kj``, and the common ``dbar`` datum ``h``.

    ``h_consistency`` compares a finite-difference ``dbar ftilde_j`` with
    ``h`` (a diagnostic limited by how well the grid resolves transitions).
    """
    psum = PartitionSum(cocycle.charts, partition)
    grid = cocycle.grid
    ftilde = []
    sup_h = 0.0
    cons = 0.0
    for j, s in enumerate(cocycle.sectors):
        z = grid.radii[:, None] * np.exp(1j * s.angles)[None, :]
        ft = s.values - psum(z)
        ftilde.append(ft)
        hz = psum.h(z)
        sup_h = max(sup_h, float(vector_norm(hz, "sup").max()))
        if z.shape[0] >= 3 and z.shape[1] >= 3:
            f = GridField(z, ft, grid.step, kind="polar", axes=(grid.radii, s.angles))
            res, _ = dbar_fd(f)
            cons = max(cons, float(np.abs(0.5 * res - hz[1:-1, 1:-1]).max()))
    err = 0.0
    for (k, j), (pk, c) in cocycle.pairs.items():
        pj = cocycle.pairs[(j, k)][0]
        err = max(err, float(np.abs(ftilde[k][:, pk] - ftilde[j][:, pj] - c).max()))
    return Resolution(psum, ftilde, err, sup_h, cons)
