"""Almost periodic functions on the real line.

Exponential sums ``sum_l b_l exp(i lambda_l t)`` with vector coefficients,
Bohr mean values and sup-norm estimates.  Frequencies are stored as exact
rational coordinate vectors over a user-declared basis, so equality of
frequencies (and hence reading off a Bohr-Fourier coefficient) is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonConverged

NORM_TAGS = ("sup", "euclidean")


def vector_norm(values, norm="sup"):
    """Norm of complex vectors stored along the last axis."""
    values = np.asarray(values)
    if norm == "sup":
        if values.shape[-1] == 0:
            return np.zeros(values.shape[:-1])
        return np.max(np.abs(values), axis=-1)
    if norm == "euclidean":
        # scale by the largest modulus so tiny components do not underflow
        mod = np.abs(values)
        top = mod.max(axis=-1, keepdims=True) if mod.shape[-1] else np.zeros(mod.shape[:-1] + (1,))
        safe = np.where(top > 0, top, 1.0)
        return top[..., 0] * np.sqrt(np.sum((mod / safe) ** 2, axis=-1))
    raise ValueError(f"unknown norm {norm!r}; expected one of {NORM_TAGS}")


@dataclass(frozen=True, eq=False)
class VectorValue:
    """An element of a finite-dimensional complex normed space."""

    components: np.ndarray
    norm_tag: str = "sup"

    def __post_init__(self):
        comp = np.array(self.components, dtype=complex).reshape(-1)
        if comp.size < 1:
            raise ValueError("VectorValue needs at least one component")
        if self.norm_tag not in NORM_TAGS:
            raise ValueError(f"unknown norm {self.norm_tag!r}")
        comp.setflags(write=False)
        object.__setattr__(self, "components", comp)

    @property
    def dim(self):
        return self.components.size

    def norm(self):
        return float(vector_norm(self.components, self.norm_tag))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def _other(self, other):
        if isinstance(other, VectorValue):
            return other.components
        return np.asarray(other, dtype=complex)

    def __add__(self, other):
        return VectorValue(self.components + self._other(other), self.norm_tag)

    __radd__ = __add__

    def __sub__(self, other):
        return VectorValue(self.components - self._other(other), self.norm_tag)

    def __rsub__(self, other):
        return VectorValue(self._other(other) - self.components, self.norm_tag)

    def __mul__(self, scalar):
        return VectorValue(complex(scalar) * self.components, self.norm_tag)

    __rmul__ = __mul__

    def __neg__(self):
        return VectorValue(-self.components, self.norm_tag)

    def __eq__(self, other):
        if isinstance(other, VectorValue):
            return np.array_equal(self.components, other.components)
        try:
            return np.array_equal(self.components, np.broadcast_to(
                np.asarray(other, dtype=complex), self.components.shape))
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.components.tobytes())

    def allclose(self, other, atol=1e-12, rtol=0.0):
        return bool(np.allclose(self.components, self._other(other), atol=atol, rtol=rtol))

    def __repr__(self):
        if self.dim == 1:
            return f"VectorValue({self.components[0]!r})"
        return f"VectorValue({list(self.components)!r})"


def as_fraction(x):
    """Exact rational from an int, Fraction, ``"p/q"`` string or short float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError("frequency coordinates must be finite")
        # repr round-trip: 0.1 -> 1/10 rather than the binary expansion
        return Fraction(repr(float(x)))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@dataclass(frozen=True)
class BasisSet:
    """Reals beta_1..beta_r declared linearly independent over the rationals."""

    betas: tuple
    labels: tuple = ()

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if not betas:
            raise ValueError("a basis needs at least one element")
        if any(b == 0.0 or not math.isfinite(b) for b in betas):
            raise ValueError("basis elements must be finite and nonzero")
        if len(set(betas)) != len(betas):
            raise ValueError("basis elements must be pairwise distinct")
        labels = tuple(self.labels) or tuple(f"beta{j + 1}" for j in range(len(betas)))
        if len(labels) != len(betas):
            raise ValueError("one label per basis element")
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "labels", labels)

    @property
    def rank(self):
        return len(self.betas)


@dataclass(frozen=True, order=False)
class Frequency:
    """lambda = sum_j coords[j] * basis.betas[j] with exact rational coords."""

    coords: tuple
    basis: BasisSet

    def __post_init__(self):
        coords = tuple(as_fraction(c) for c in self.coords)
        if len(coords) != self.basis.rank:
            raise ValueError(
                f"frequency has {len(coords)} coordinates, basis has rank {self.basis.rank}")
        object.__setattr__(self, "coords", coords)

    @property
    def value(self):
        return float(sum(float(c) * b for c, b in zip(self.coords, self.basis.betas)))

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __neg__(self):
        return Frequency(tuple(-c for c in self.coords), self.basis)

    def __add__(self, other):
        if other.basis != self.basis:
            raise ValueError("frequencies over different bases")
        return Frequency(tuple(a + b for a, b in zip(self.coords, other.coords)), self.basis)

    def sort_key(self):
        return (self.value, self.coords)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def _coords_key(freq):
    return freq.coords


class TrigPolynomial:
    """Finite exponential sum ``t -> sum_l b_l exp(i lambda_l t)``.

    Parameters
    ----------
    basis : BasisSet
        Rational basis for all frequencies.
    freqs : sequence
        Frequencies, as ``Frequency`` objects or coordinate tuples.
    coeffs : array_like, shape (L, d) or (L,)
        One coefficient vector per frequency.
    norm : {'sup', 'euclidean'}
        Norm on the coefficient space.
    dim : int, optional
        Coefficient dimension; only needed when there are no terms.

    Duplicate frequencies are merged by adding coefficients and exact zero
    coefficients are dropped, so every instance is in canonical form with
    terms sorted by frequency value.
    """

    def __init__(self, basis, freqs, coeffs, norm="sup", dim=None):
        if norm not in NORM_TAGS:
            raise ValueError(f"unknown norm {norm!r}")
        self.basis = basis
        self.norm_tag = norm
        freqs = [f if isinstance(f, Frequency) else Frequency(tuple(f), basis) for f in freqs]
        for f in freqs:
            if f.basis != basis:
                raise ValueError("frequency basis differs from polynomial basis")
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs.reshape(len(freqs), -1) if len(freqs) else coeffs.reshape(0, dim or 1)
        if coeffs.shape[0] != len(freqs):
            raise ValueError("one coefficient row per frequency")
        if dim is None:
            dim = coeffs.shape[1] if coeffs.shape[0] else 1
        if coeffs.shape[0] and coeffs.shape[1] != dim:
            raise ValueError("coefficient dimension mismatch")
        if dim < 1:
            raise ValueError("coefficient dimension must be >= 1")
        merged = {}
        for f, c in zip(freqs, coeffs):
            key = f.coords
            if key in merged:
                merged[key] = (merged[key][0], merged[key][1] + c)
            else:
                merged[key] = (f, c.copy())
        items = [(f, c) for f, c in merged.values() if np.any(c != 0)]
        items.sort(key=lambda fc: fc[0].sort_key())
        self.frequencies = tuple(f for f, _ in items)
        arr = np.array([c for _, c in items], dtype=complex).reshape(len(items), dim)
        arr.setflags(write=False)
        self.coeffs = arr
        self.dim = dim
        lam = np.array([f.value for f in self.frequencies], dtype=float)
        lam.setflags(write=False)
        self.lambdas = lam

    # construction helpers
    @classmethod
    def from_terms(cls, basis, terms, norm="sup", dim=None):
        """Build from ``(coefficient, coords)`` pairs."""
        terms = list(terms)
        freqs = [f if isinstance(f, Frequency) else Frequency(tuple(f), basis) for _, f in terms]
        coeffs = [np.atleast_1d(np.asarray(c, dtype=complex)) for c, _ in terms]
        if coeffs:
            d = max(c.size for c in coeffs)
            coeffs = [np.broadcast_to(c, (d,)) for c in coeffs]
        return cls(basis, freqs, np.array(coeffs).reshape(len(freqs), -1) if coeffs else
                   np.zeros((0, dim or 1)), norm=norm, dim=dim)

    @classmethod
    def constant(cls, basis, value, norm="sup"):
        value = np.atleast_1d(np.asarray(value, dtype=complex))
        return cls(basis, [Frequency((0,) * basis.rank, basis)], value.reshape(1, -1),
                   norm=norm, dim=value.size)

    @classmethod
    def zero(cls, basis, dim=1, norm="sup"):
        return cls(basis, [], np.zeros((0, dim)), norm=norm, dim=dim)

    def with_coeffs(self, coeffs):
        return type(self)(self.basis, self.frequencies, coeffs, norm=self.norm_tag, dim=self.dim)

    # evaluation
    def __call__(self, t):
        t = np.asarray(t)
        phases = np.exp(1j * t[..., None] * self.lambdas)
        return phases @ self.coeffs

    def __len__(self):
        return len(self.frequencies)

    @property
    def terms(self):
        return [(VectorValue(c, self.norm_tag), f) for c, f in zip(self.coeffs, self.frequencies)]

    def coefficient(self, freq):
        """Bohr-Fourier coefficient at an exact frequency (zero if absent)."""
        for f, c in zip(self.frequencies, self.coeffs):
            if f.coords == freq.coords and f.basis == freq.basis:
                return VectorValue(c, self.norm_tag)
        return VectorValue(np.zeros(self.dim), self.norm_tag)

    def coefficient_norms(self):
        return vector_norm(self.coeffs, self.norm_tag) if len(self) else np.zeros(0)

    def coefficient_bound(self):
        """sum_l ||b_l||, an upper bound for the sup norm on the line."""
        return float(np.sum(self.coefficient_norms()))

    def denominators(self):
        """Per basis element, the lcm of coordinate denominators (1 if none)."""
        dens = [1] * self.basis.rank
        for f in self.frequencies:
            for j, c in enumerate(f.coords):
                dens[j] = math.lcm(dens[j], c.denominator)
        return dens

    # algebra
    def _check_compatible(self, other):
        if not isinstance(other, TrigPolynomial):
            raise TypeError("expected a TrigPolynomial")
        if other.basis != self.basis:
            raise ValueError("polynomials over different bases")
        if other.dim != self.dim:
            raise ValueError("coefficient dimensions differ")

    def __add__(self, other):
        self._check_compatible(other)
        return type(self)(self.basis, self.frequencies + other.frequencies,
                          np.vstack([self.coeffs, other.coeffs]), norm=self.norm_tag, dim=self.dim)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, scalar):
        return self.with_coeffs(complex(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return (self.basis == other.basis and self.dim == other.dim
                and tuple(map(_coords_key, self.frequencies)) == tuple(map(_coords_key, other.frequencies))
                and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def __repr__(self):
        parts = []
        for c, f in zip(self.coeffs, self.frequencies):
            cc = c[0] if self.dim == 1 else list(c)
            parts.append(f"{cc}*e^(i*{f.value:g}t)")
        return f"{type(self).__name__}(" + " + ".join(parts or ["0"]) + ")"

    # serialization
    def to_dict(self):
        out = {
            "basis": list(self.basis.betas),
            "terms": [
                {"coeff": [[float(z.real), float(z.imag)] for z in c],
                 "freq": [f"{q.numerator}/{q.denominator}" for q in f.coords]}
                for c, f in zip(self.coeffs, self.frequencies)
            ],
        }
        if self.basis.labels != tuple(f"beta{j + 1}" for j in range(self.basis.rank)):
            out["labels"] = list(self.basis.labels)
        if self.norm_tag != "sup":
            out["norm"] = self.norm_tag
        if not self.frequencies:
            out["dim"] = self.dim
        return out

    @classmethod
    def from_dict(cls, data):
        basis = BasisSet(tuple(data["basis"]), tuple(data.get("labels", ())))
        terms = []
        for i, term in enumerate(data.get("terms", [])):
            try:
                coeff = np.array([complex(re, im) for re, im in term["coeff"]])
                freq = tuple(as_fraction(q) for q in term["freq"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"terms[{i}]: {exc}") from exc
            terms.append((coeff, freq))
        return cls.from_terms(basis, terms, norm=data.get("norm", "sup"), dim=data.get("dim"))


@dataclass
class EvaluationOracle:
    """A general almost periodic function known only through evaluation.

    ``func`` maps an array of reals to values of shape ``t.shape + (dim,)``
    (or ``t.shape`` when ``dim == 1``).
    """

    func: Callable
    bound: float = math.inf
    dim: int = 1
    norm_tag: str = "sup"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.func(t), dtype=complex)
        if out.shape == t.shape:
            out = out[..., None]
        return out.reshape(t.shape + (self.dim,))

    @classmethod
    def from_polynomial(cls, p):
        return cls(p, bound=p.coefficient_bound(), dim=p.dim, norm_tag=p.norm_tag)


@dataclass(frozen=True)
class AveragingPlan:
    """Truncation schedule for the Bohr mean of an oracle.

    Windows are ``[-T_k, T_k]`` with ``T_k = t1 * ratio**k`` for
    ``k = 0..levels-1``, each integrated with the composite midpoint rule.
    """

    t1: float = 25.0
    levels: int = 8
    ratio: float = 2.0
    step: float = 0.01
    tol: float = 1e-3

    @property
    def windows(self):
        return tuple(self.t1 * self.ratio ** k for k in range(self.levels))


@dataclass
class MeanDiagnostics:
    exact: bool
    windows: tuple = ()
    estimates: list = field(default_factory=list)
    differences: list = field(default_factory=list)
    tolerance: float = 0.0
    converged: bool = True


def evaluate(p, t):
    """Value of ``p`` at a single real ``t``."""
    return VectorValue(p(np.asarray(float(t))), getattr(p, "norm_tag", "sup"))


def shift(p, tau):
    """Translate: ``shift(p, tau)(t) == p(t + tau)``."""
    return p.with_coeffs(np.exp(1j * p.lambdas * tau)[:, None] * p.coeffs)


def _match_frequency(p, lam):
    if isinstance(lam, Frequency):
        return p.coefficient(lam)
    lam = float(lam)
    hits = np.nonzero(np.isclose(p.lambdas, lam, rtol=1e-12, atol=1e-15))[0]
    total = p.coeffs[hits].sum(axis=0) if hits.size else np.zeros(p.dim)
    return VectorValue(total, p.norm_tag)


def _midpoint_means(f, lam, windows, step):
    """Midpoint-rule means of f(t) exp(-i lam t) over each symmetric window."""
    nested = all(abs(T / step - round(T / step)) < 1e-9 for T in windows)
    out = []
    if nested:
        big = max(windows)
        n_half = int(round(big / step))
        sums = np.zeros((n_half + 1, f.dim), dtype=complex)  # sums[k]: nodes with |t| < k*step
        chunk = 200_000
        idx = np.arange(n_half)
        for start in range(0, n_half, chunk):
            k = idx[start:start + chunk]
            t = (k + 0.5) * step
            vals = f(t) * np.exp(-1j * lam * t)[:, None] + f(-t) * np.exp(1j * lam * t)[:, None]
            sums[start + 1:start + 1 + k.size] = np.cumsum(vals, axis=0) + sums[start]
        for T in windows:
            out.append(sums[int(round(T / step))] * step / (2 * T))
        return out
    for T in windows:
        n = max(1, int(math.ceil(2 * T / step)))
        h = 2 * T / n
        t = -T + (np.arange(n) + 0.5) * h
        out.append((f(t) * np.exp(-1j * lam * t)[:, None]).sum(axis=0) * h / (2 * T))
    return out


def bohr_mean(f, lam, plan=None, strict=False):
    """Bohr-Fourier coefficient ``M_t{f(t) exp(-i lam t)}``.

    Parameters
    ----------
    f : TrigPolynomial or EvaluationOracle
    lam : Frequency or float
        Exact frequency (matched by rational coordinates) or a real value.
    plan : AveragingPlan, optional
        Used only for oracles.
    strict : bool
        Raise ``NonConverged`` instead of flagging it in the diagnostics.

    Returns
    -------
    value : VectorValue
    diagnostics : MeanDiagnostics
    """
    if isinstance(f, TrigPolynomial):
        return _match_frequency(f, lam), MeanDiagnostics(exact=True)
    plan = plan or AveragingPlan()
    lam_val = lam.value if isinstance(lam, Frequency) else float(lam)
    ests = _midpoint_means(f, lam_val, plan.windows, plan.step)
    norm = getattr(f, "norm_tag", "sup")
    diffs = [float(vector_norm(b - a, norm)) for a, b in zip(ests, ests[1:])]
    converged = not diffs or diffs[-1] <= plan.tol
    diag = MeanDiagnostics(exact=False, windows=plan.windows, estimates=ests,
                           differences=diffs, tolerance=plan.tol, converged=converged)
    value = VectorValue(ests[-1], norm)
    if strict and not converged:
        raise NonConverged(f"Bohr mean not settled: last difference {diffs[-1]:.3g} > {plan.tol:g}",
                           estimate=value, error=diffs[-1])
    return value, diag


def spectrum(p):
    """Nonzero terms of ``p`` as ``(Frequency, VectorValue)``, sorted by value."""
    return [(f, VectorValue(c, p.norm_tag)) for f, c in zip(p.frequencies, p.coeffs)]


@dataclass
class SupNormEstimate:
    """Grid maximum (a lower bound for the sup norm) and, when available,
    the coefficient-sum upper bound."""

    grid_max: float
    upper_bound: float | None
    argmax: float

    def __float__(self):
        return self.grid_max


def sup_norm_estimate(f, window, step):
    a, b = map(float, window)
    if not step > 0:
        raise ValueError("step must be positive")
    if not b >= a:
        raise ValueError("empty window")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    best, arg = -1.0, a
    norm = getattr(f, "norm_tag", "sup")
    chunk = 200_000
    for start in range(0, n, chunk):
        t = a + step * np.arange(start, min(n, start + chunk))
        vals = vector_norm(f(t), norm)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, arg = float(vals[i]), float(t[i])
    upper = f.coefficient_bound() if isinstance(f, TrigPolynomial) else None
    return SupNormEstimate(best, upper, arg)


def torus_samples(p, n, denominators=None):
    """Sample ``p`` on a uniform grid of its frequency torus.

    With ``lambda = sum_j (nu_j / M_j) beta_j`` the function
    ``F(theta) = sum b exp(i sum_j nu_j theta_j)`` on ``(R / 2 pi Z)^r`` has
    the same sup norm as ``p`` on the line (Kronecker).  ``denominators``
    fixes the ``M_j`` (they must be multiples of the polynomial's own
    denominators).  Returns an array of shape ``(n,)*r + (d,)``.
    """
    dens = list(denominators) if denominators is not None else p.denominators()
    own = p.denominators()
    for M, m in zip(dens, own):
        if M % m:
            raise ValueError("torus denominators must be multiples of the polynomial's")
    r = p.basis.rank
    theta = 2 * np.pi * np.arange(n) / n
    out = np.zeros((n,) * r + (p.dim,), dtype=complex)
    for c, f in zip(p.coeffs, p.frequencies):
        phase = np.ones((n,) * r, dtype=complex)
        for j, q in enumerate(f.coords):
            nu = int(q * dens[j])
            shape = [1] * r
            shape[j] = n
            phase = phase * np.exp(1j * nu * theta).reshape(shape)
        out += phase[..., None] * c
    return out
