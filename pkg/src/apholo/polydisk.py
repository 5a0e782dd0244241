"""Finite sums of products of one-variable functions on the polydisk.

A ``TensorFunction`` is ``F(z_1, ..., z_n) = sum_t w_t prod_k f_{t,k}(z_k)``
with scalar factors.  Approximation works factor by factor with the
one-variable pipeline; the error of each product term is bounded by the
telescoping inequality

    ||prod_k f_k - prod_k g_k|| <= sum_k (prod_{j<k} ||g_j||) ||f_k - g_k|| (prod_{j>k} ||f_j||).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .as_functions import ASFunction
from .errors import ApholoError, StageError

TWO_PI = 2 * math.pi


class UnitFactor:
    """The constant function 1."""

    singular_angles = ()
    dim = 1

    def __call__(self, z):
        z = np.asarray(z)
        return np.ones(z.shape + (1,), dtype=complex)

    def polar(self, radii, n_phi, offset=0.0):
        return np.ones((len(radii), n_phi, 1), dtype=complex)

    def to_dict(self):
        return "unit"


def _factor_from_json(d):
    if d == "unit":
        return UnitFactor()
    return ASFunction.from_dict(d)


def _scalar(v):
    v = np.asarray(v)
    if v.ndim and v.shape[-1] == 1:
        return v[..., 0]
    raise ValueError("tensor factors must be scalar valued")


@dataclass
class TensorFunction:
    """``sum_t weights[t] * prod_k terms[t][k](z_k)``."""

    n: int
    terms: list = field(default_factory=list)  # list of tuples of n factors
    weights: list = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        self.terms = [tuple(t) for t in self.terms]
        if any(len(t) != self.n for t in self.terms):
            raise ValueError("every term needs exactly n factors")
        if self.weights is None:
            self.weights = [1.0] * len(self.terms)
        self.weights = [complex(w) for w in self.weights]
        if len(self.weights) != len(self.terms):
            raise ValueError("one weight per term")

    @classmethod
    def product(cls, *factors, weight=1.0):
        return cls(len(factors), [tuple(factors)], [weight])

    def singular_sets(self):
        """``S_k``: union of the singular angles of the factors in position ``k``."""
        out = []
        for k in range(self.n):
            pts = set()
            for t in self.terms:
                pts.update(round(float(a) % TWO_PI, 14) for a in getattr(t[k], "singular_angles", ()))
            out.append(sorted(pts))
        return out

    def to_dict(self):
        return {"n": self.n,
                "terms": [{"weight": [w.real, w.imag], "factors": [f.to_dict() for f in t]}
                          for w, t in zip(self.weights, self.terms)]}

    @classmethod
    def from_dict(cls, data):
        terms, weights = [], []
        for t in data["terms"]:
            w = t.get("weight", 1.0)
            weights.append(complex(w[0], w[1]) if isinstance(w, (list, tuple)) else complex(w))
            terms.append(tuple(_factor_from_json(f) for f in t["factors"]))
        return cls(int(data["n"]), terms, weights)


def tensor_eval(F, z):
    """``F`` at points ``z = (z_1, ..., z_n)`` (arrays broadcast together)."""
    if len(z) != F.n:
        raise ValueError(f"expected {F.n} coordinates")
    zs = np.broadcast_arrays(*[np.asarray(c, dtype=complex) for c in z])
    out = np.zeros(zs[0].shape, dtype=complex)
    for w, t in zip(F.weights, F.terms):
        prod = w
        for k, (f, zk) in enumerate(zip(t, zs)):
            try:
                prod = prod * _scalar(f(zk))
            except ApholoError as exc:
                raise StageError(f"coordinate {k}", exc) from exc
        out = out + prod
    return out


def circle_grid(n_grid):
    """Half-step offset angles, avoiding the usual singular angles."""
    return math.pi / n_grid + TWO_PI * np.arange(n_grid) / n_grid


def _boundary_samples(f, th):
    if hasattr(f, "polar"):
        return _scalar(f.polar(np.array([1.0]), th.size, float(th[0]))[0])
    return _scalar(f(np.exp(1j * th)))


def torus_values(F, n_grid=256):
    """``F`` on the torus grid ``circle_grid(n_grid)^n``, shape ``(n_grid,) * n``."""
    th = circle_grid(n_grid)
    cache = {}
    out = np.zeros((n_grid,) * F.n, dtype=complex)
    for w, t in zip(F.weights, F.terms):
        vecs = []
        for f in t:
            if id(f) not in cache:
                cache[id(f)] = _boundary_samples(f, th)
            vecs.append(cache[id(f)])
        prod = np.asarray(w)
        for v in vecs:
            prod = np.multiply.outer(prod, v)
        out = out + prod
    return out


@dataclass
class TensorSupNorm:
    grid_max: float
    product_bound: float = None  # prod of factor sups, single-term functions only


def tensor_sup_norm(F, n_grid=256):
    """Grid max of ``|F|`` over the torus; for one product term also the
    product of the factor sups on the same grid (an upper bound)."""
    th = circle_grid(n_grid)
    gmax = float(np.abs(torus_values(F, n_grid)).max())
    bound = None
    if len(F.terms) == 1:
        bound = abs(F.weights[0])
        for f in F.terms[0]:
            bound *= float(np.abs(_boundary_samples(f, th)).max())
    return TensorSupNorm(gmax, bound)


@dataclass
class TensorReport:
    factor_errors: list
    factor_sups: list
    bound: float
    measured: float
    factor_reports: list

    def to_dict(self):
        return {"factor_errors": self.factor_errors, "factor_sups": self.factor_sups,
                "bound": self.bound, "measured": self.measured, "factor_reports": self.factor_reports}


def tensor_approximate(F, eps, cfg=None, n_grid=256, approximate=None):
    """Approximate every factor with the one-variable pipeline.

    Factors without singular points are kept unchanged (error 0).  Returns
    the approximant and a report with the telescoping bound and the
    torus-grid error.
    """
    if approximate is None:
        from .dbar_glue import approximate
    # ``approximate(f, eps, cfg) -> (F, field, certificate, report)`` may be
    # swapped, e.g. to reuse one-variable runs
    th = circle_grid(n_grid)
    approx, errs, sups, reports = {}, {}, {}, {}
    for t in F.terms:
        for k, f in enumerate(t):
            if id(f) in approx:
                continue
            fs = _boundary_samples(f, th)
            sups[id(f)] = float(np.abs(fs).max())
            if not list(getattr(f, "singular_angles", ())):
                approx[id(f)], errs[id(f)], reports[id(f)] = f, 0.0, None
                continue
            try:
                g, _, _, rep = approximate(f, eps, cfg)
            except ApholoError as exc:
                raise StageError(f"coordinate {k}", exc) from exc
            # the pipeline's error and the error on this boundary grid
            e = max(rep.sup_error, float(np.abs(fs - _boundary_samples(g, th)).max()))
            approx[id(f)], errs[id(f)], reports[id(f)] = g, e, rep.to_dict()
    G = TensorFunction(F.n, [tuple(approx[id(f)] for f in t) for t in F.terms], list(F.weights))
    bound = 0.0
    for w, t in zip(F.weights, F.terms):
        term = 0.0
        for k in range(F.n):
            left = math.prod(sups[id(f)] + errs[id(f)] for f in t[:k])
            right = math.prod(sups[id(f)] for f in t[k + 1:])
            term += left * errs[id(t[k])] * right
        bound += abs(w) * term
    measured = float(np.abs(torus_values(F, n_grid) - torus_values(G, n_grid)).max())
    keys = list(dict.fromkeys(id(f) for t in F.terms for f in t))
    rep = TensorReport([errs[i] for i in keys], [sups[i] for i in keys], bound, measured,
                       [reports[i] for i in keys])
    return G, rep
