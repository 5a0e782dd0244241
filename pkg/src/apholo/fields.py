"""Sampled complex vector fields on planar grids.

A ``GridField`` is either rectangular (nodes on a ``meshgrid`` of x and y)
or polar (nodes ``r e^{i theta}`` on a tensor grid of radii and angles).
Either way ``values`` has shape ``nodes.shape + (d,)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .ap_core import vector_norm
from .errors import GridTooCoarse


@dataclass
class GridField:
    nodes: np.ndarray
    values: np.ndarray
    step: float
    region: str = "rect"
    kind: str = "rect"
    axes: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=complex)
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape == self.nodes.shape:
            vals = vals[..., None]
        if vals.shape[:-1] != self.nodes.shape:
            raise ValueError("values must have shape nodes.shape + (d,)")
        self.values = vals
        if self.kind not in ("rect", "polar", "scattered"):
            raise ValueError(f"unknown grid kind {self.kind!r}")

    @property
    def dim(self):
        return self.values.shape[-1]

    @classmethod
    def rectangular(cls, func, x, y, region="rect", **meta):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        X, Y = np.meshgrid(x, y)
        Z = X + 1j * Y
        step = float(max(np.max(np.diff(x)) if x.size > 1 else 0.0,
                         np.max(np.diff(y)) if y.size > 1 else 0.0))
        return cls(Z, func(Z), step, region=region, kind="rect", axes=(x, y), meta=meta)

    @classmethod
    def polar(cls, func, radii, thetas, region="annulus", **meta):
        radii = np.asarray(radii, dtype=float)
        thetas = np.asarray(thetas, dtype=float)
        Z = radii[:, None] * np.exp(1j * thetas[None, :])
        dr = np.max(np.diff(radii)) if radii.size > 1 else 0.0
        dt = np.max(np.diff(thetas)) if thetas.size > 1 else 0.0
        step = float(max(dr, radii.max() * dt))
        return cls(Z, func(Z), step, region=region, kind="polar", axes=(radii, thetas), meta=meta)

    def sup_norm(self, mask=None, norm="sup"):
        n = vector_norm(self.values, norm)
        if mask is not None:
            n = n[mask]
        return float(n.max()) if n.size else 0.0

    def to_csv(self, path=None):
        """Columns x, y, re_1, im_1, ..., re_d, im_d."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["x", "y"]
        for k in range(self.dim):
            header += [f"re_{k + 1}", f"im_{k + 1}"]
        w.writerow(header)
        z = self.nodes.reshape(-1)
        v = self.values.reshape(-1, self.dim)
        for zi, vi in zip(z, v):
            row = [repr(float(zi.real)), repr(float(zi.imag))]
            for c in vi:
                row += [repr(float(c.real)), repr(float(c.imag))]
            w.writerow(row)
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source, step=0.0, region="scattered"):
        """Read a field written by ``to_csv`` (as scattered nodes)."""
        if hasattr(source, "read"):
            text = source.read()
        elif "\n" in str(source):
            text = str(source)
        else:
            with open(source) as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], rows[1:]
        if header[:2] != ["x", "y"] or (len(header) - 2) % 2:
            raise ValueError("expected columns x, y, re_1, im_1, ...")
        d = (len(header) - 2) // 2
        data = np.array(body, dtype=float).reshape(-1, 2 + 2 * d)
        nodes = data[:, 0] + 1j * data[:, 1]
        vals = data[:, 2::2] + 1j * data[:, 3::2]
        return cls(nodes, vals, step, region=region, kind="scattered")


def _diff(v, axis, h, order, periodic=False):
    """Centered first derivative along ``axis`` (uniform spacing ``h``).

    Non-periodic axes lose ``order // 2`` nodes at each end.
    """
    if periodic:
        if order == 2:
            return (np.roll(v, -1, axis) - np.roll(v, 1, axis)) / (2 * h)
        return (-np.roll(v, -2, axis) + 8 * np.roll(v, -1, axis)
                - 8 * np.roll(v, 1, axis) + np.roll(v, 2, axis)) / (12 * h)
    n = v.shape[axis]

    def sl(a, b):
        idx = [slice(None)] * v.ndim
        idx[axis] = slice(a, n + b if n + b != n else None)
        return v[tuple(idx)]

    if order == 2:
        return (sl(2, 0) - sl(0, -2)) / (2 * h)
    return (-sl(4, 0) + 8 * sl(3, -1) - 8 * sl(1, -3) + sl(0, -4)) / (12 * h)


def _uniform(a):
    d = np.diff(a)
    return d.size > 0 and np.allclose(d, d[0], rtol=1e-9, atol=0.0)


def dbar_fd(field, order=2):
    """Centered-difference ``df/dx + i df/dy`` at interior nodes.

    Returns ``(residual, interior_nodes)``; the residual array has shape
    ``(n_interior..., d)``.  For polar grids the operator is written as
    ``e^{i theta} (d/dr + (i/r) d/dtheta)``, with periodic angles detected
    automatically.  ``order`` is 2 or 4; order 4 needs uniform axes.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    m = order // 2
    if field.kind == "rect":
        x, y = field.axes
        if x.size < 2 * m + 1 or y.size < 2 * m + 1:
            raise GridTooCoarse(f"need at least {2 * m + 1} nodes per axis")
        v = field.values
        if order == 2:
            hx = (x[2:] - x[:-2])[None, :, None] / 2
            hy = (y[2:] - y[:-2])[:, None, None] / 2
        else:
            if not (_uniform(x) and _uniform(y)):
                raise GridTooCoarse("order 4 needs uniform axes")
            hx, hy = x[1] - x[0], y[1] - y[0]
        dx = _diff(v[m:-m], 1, hx, order)
        dy = _diff(v[:, m:-m], 0, hy, order)
        return dx + 1j * dy, field.nodes[m:-m, m:-m]
    if field.kind == "polar":
        r, th = field.axes
        if r.size < 2 * m + 1 or th.size < 3:
            raise GridTooCoarse(f"need at least {2 * m + 1} nodes per axis")
        v = field.values
        periodic = np.isclose((th[1] - th[0]) * th.size, 2 * np.pi)
        if order == 2:
            hr = (r[2:] - r[:-2])[:, None, None] / 2
        else:
            if not _uniform(r) or (not periodic and not _uniform(th)):
                raise GridTooCoarse("order 4 needs uniform axes")
            hr = r[1] - r[0]
        if periodic:
            dtheta = _diff(v, 1, th[1] - th[0], order, periodic=True)[m:-m]
            nodes = field.nodes[m:-m]
            ang = th[None, :]
        else:
            if th.size < 2 * m + 1:
                raise GridTooCoarse(f"need at least {2 * m + 1} angles")
            ht = (th[2:] - th[:-2])[None, :, None] / 2 if order == 2 else th[1] - th[0]
            dtheta = _diff(v[m:-m], 1, ht, order)
            nodes = field.nodes[m:-m, m:-m]
            v = v[:, m:-m]
            ang = th[None, m:-m]
        drad = _diff(v, 0, hr, order)
        rr = r[m:-m, None, None]
        res = np.exp(1j * ang)[..., None] * (drad + 1j * dtheta / rr)
        return res, nodes
    raise GridTooCoarse("finite differences need a rectangular or polar grid")


def holo_residual(field, mask=None, order=2):
    """Max over interior nodes of ``|df/dx + i df/dy|`` (twice ``|df/dzbar|``)."""
    res, nodes = dbar_fd(field, order)
    n = vector_norm(res, "sup")
    if mask is not None:
        n = n[mask(nodes)]
    return float(n.max()) if n.size else 0.0
