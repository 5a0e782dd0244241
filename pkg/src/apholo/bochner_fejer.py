"""Bochner-Fejer kernels and the finite-rank smoothing operator they induce.

The kernel for a ``KernelSpec`` is the product of classical Fejer kernels

    K(t) = prod_j sum_{|nu_j| <= N_j} (1 - |nu_j| / N_j) exp(i (nu_j / m_j) beta_j t),

which is nonnegative with unit mean.  Convolving in the Bohr-mean sense,
``(T f)(t) = M_s{f(t + s) K(s)}``, multiplies a term with frequency
``sum_j (p_j / m_j) beta_j`` by ``prod_j (1 - |p_j| / N_j)`` and kills every
frequency off the kernel lattice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ap_core import BasisSet, Frequency, TrigPolynomial, vector_norm
from .errors import SizeLimit, Unrepresentable

DEFAULT_TERM_CAP = 10**6


@dataclass(frozen=True)
class KernelSpec:
    basis: BasisSet
    m: tuple
    N: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        N = tuple(int(v) for v in self.N)
        if not (len(m) == len(N) == self.basis.rank):
            raise ValueError("m and N need one entry per basis element")
        if min(m) < 1 or min(N) < 1:
            raise ValueError("all m_j and N_j must be >= 1")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "N", N)

    @property
    def rank_bound(self):
        """Dimension bound of the operator range, prod_j (2 N_j - 1)."""
        return math.prod(2 * n - 1 for n in self.N)

    def to_dict(self):
        return {"basis": list(self.basis.betas), "m": list(self.m), "N": list(self.N)}

    @classmethod
    def from_dict(cls, data):
        return cls(BasisSet(tuple(data["basis"]), tuple(data.get("labels", ()))),
                   tuple(data["m"]), tuple(data["N"]))


def lattice_index(spec, freq):
    """Integer lattice coordinates p_j with coords_j = p_j / m_j, or None."""
    out = []
    for c, m in zip(freq.coords, spec.m):
        scaled = c * m
        if scaled.denominator != 1:
            return None
        out.append(int(scaled))
    return tuple(out)


def damping_factor(spec, freq):
    """prod_j (1 - |p_j| / N_j) for lattice frequencies, 0 otherwise (exact)."""
    p = lattice_index(spec, freq)
    if p is None:
        return Fraction(0)
    fac = Fraction(1)
    for pj, Nj in zip(p, spec.N):
        if abs(pj) >= Nj:
            return Fraction(0)
        fac *= 1 - Fraction(abs(pj), Nj)
    return fac


def build_kernel(spec, cap=DEFAULT_TERM_CAP):
    """Expand the kernel as a TrigPolynomial with real coefficients."""
    count = spec.rank_bound
    if count > cap:
        raise SizeLimit(f"kernel expands to {count} terms (cap {cap})")
    axes = [range(-(n - 1), n) for n in spec.N]
    freqs, coeffs = [], []
    for nu in itertools.product(*axes):
        w = math.prod(1 - Fraction(abs(v), n) for v, n in zip(nu, spec.N))
        freqs.append(Frequency(tuple(Fraction(v, m) for v, m in zip(nu, spec.m)), spec.basis))
        coeffs.append([float(w)])
    return TrigPolynomial(spec.basis, freqs, np.array(coeffs, dtype=complex), dim=1)


@dataclass
class DampingEntry:
    frequency: Frequency
    factor: Fraction
    on_grid: bool
    in_range: bool


def damping_report(spec, f):
    """Per-term damping factors of ``apply_operator(spec, f)``."""
    out = []
    for freq in f.frequencies:
        p = lattice_index(spec, freq)
        in_range = p is not None and all(abs(a) < n for a, n in zip(p, spec.N))
        out.append(DampingEntry(freq, damping_factor(spec, freq), p is not None, in_range))
    return out


def apply_operator(spec, f):
    """``T f`` for a TrigPolynomial ``f`` (off-lattice terms map to zero)."""
    if f.basis != spec.basis:
        raise ValueError("polynomial and kernel use different bases")
    factors = np.array([float(damping_factor(spec, q)) for q in f.frequencies])
    return f.with_coeffs(factors[:, None] * f.coeffs if len(f) else f.coeffs)


def certified_error(spec, f):
    """Upper bound sum_l ||b_l|| (1 - factor_l) on ||f - T f||."""
    if not len(f):
        return 0.0
    factors = np.array([float(damping_factor(spec, q)) for q in f.frequencies])
    return float(np.sum(f.coefficient_norms() * (1.0 - factors)))


def _lattice_extent(fs, m):
    """max_l |p_{l,j}| per basis direction over all spectra."""
    r = len(m)
    ext = [0] * r
    for f in fs:
        for q in f.frequencies:
            for j, c in enumerate(q.coords):
                ext[j] = max(ext[j], abs(int(c * m[j])))
    return ext


def choose_kernel_for_net(fs, eps, weights=None, max_order=10**7):
    """Kernel whose operator moves every f in ``fs`` by at most ``eps``.

    Grid denominators are the lcm of the coordinate denominators appearing
    in the spectra; the Fejer orders are the smallest common scaling (found
    by doubling then bisection) for which every certified bound is <= eps.

    ``weights`` optionally scales each coefficient norm, e.g. by the growth
    of ``exp(i lambda z)`` across the strip.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one function")
    basis = fs[0].basis
    if any(f.basis != basis for f in fs):
        raise ValueError("all functions must share one basis")
    m = [1] * basis.rank
    for f in fs:
        for j, d in enumerate(f.denominators()):
            m[j] = math.lcm(m[j], d)
    ext = _lattice_extent(fs, m)

    def bound_for(spec):
        worst = 0.0
        for i, f in enumerate(fs):
            if not len(f):
                continue
            norms = f.coefficient_norms()
            if weights is not None:
                norms = norms * np.asarray(weights[i])
            factors = np.array([float(damping_factor(spec, q)) for q in f.frequencies])
            worst = max(worst, float(np.sum(norms * (1.0 - factors))))
        return worst

    def spec_for(scale):
        N = tuple(max(e + 1, int(math.ceil(scale * max(e, 1)))) for e in ext)
        return KernelSpec(basis, tuple(m), N)

    lo, hi = 0.0, 1.0
    while bound_for(spec_for(hi)) > eps:
        lo, hi = hi, hi * 2
        if max(spec_for(hi).N) > max_order:
            raise Unrepresentable("Fejer order needed for this eps exceeds max_order")
    for _ in range(60):
        if hi - lo <= 1e-3 * hi:
            break
        mid = 0.5 * (lo + hi)
        if bound_for(spec_for(mid)) <= eps:
            hi = mid
        else:
            lo = mid
    return spec_for(hi)


def operator_norm_check(spec, f, n=None):
    """Max of ||T f|| and ||f|| on a common torus grid.

    On the torus of the combined lattice the operator is a discrete
    convolution with nonnegative weights summing to one (exact once the
    grid has more points than the summed degrees), so the first number
    never exceeds the second.
    """
    from .ap_core import torus_samples

    Tf = apply_operator(spec, f)
    dens = [math.lcm(a, b) for a, b in zip(spec.m, f.denominators())]
    if n is None:
        # no aliasing between kernel and f degrees: the grid operator is then an
        # exact convex combination of grid values
        deg_f = 1
        for q in f.frequencies:
            for j, c in enumerate(q.coords):
                deg_f = max(deg_f, abs(int(c * dens[j])))
        deg_k = max((N - 1) * (D // m) for N, D, m in zip(spec.N, dens, spec.m))
        n = deg_f + deg_k + 1
    fa = torus_samples(f, n, dens)
    ta = torus_samples(Tf, n, dens)
    return float(vector_norm(ta, Tf.norm_tag).max()), float(vector_norm(fa, f.norm_tag).max())
