"""Semi-almost periodic boundary functions on the unit circle.

Near each singular point ``z0 = e^{i t0}`` a SAP function is described along
the two approaching arcs in logarithmic scale: for the arc of orientation
``k`` and scale ``s``,

    f(exp(i (t0 + k s e^t))) ~ h_k(t),   t < 0,

with ``h_k`` almost periodic.  Away from the singular set the function is a
continuous background, and a smoothstep collar joins the two descriptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from .ap_core import EvaluationOracle, TrigPolynomial, VectorValue, shift, vector_norm
from .bochner_fejer import apply_operator, certified_error, choose_kernel_for_net
from .disk_geometry import angular_distance, arc_to_strip, signed_offset, strip_to_arc
from .errors import (AtSingularPoint, NonConverged, OutOfDomain, OverlappingBlends,
                     ProfileMismatch, VerificationFailed)
from .strip_holo import BoundaryPair, StripHarmonic

TWO_PI = 2 * math.pi
SINGULAR_TOL = 1e-15


def smoothstep(x):
    """Quintic ``6x^5 - 15x^4 + 10x^3`` clamped to [0, 1] (C^2)."""
    x = np.clip(x, 0.0, 1.0)
    # the polynomial overshoots 1 by an ulp near x = 1
    return np.minimum(x * x * x * (x * (6 * x - 15) + 10), 1.0)


def smoothstep_prime(x):
    inside = (x > 0) & (x < 1)
    x = np.clip(x, 0.0, 1.0)
    return np.where(inside, 30 * x * x * (x - 1) ** 2, 0.0)


@dataclass(frozen=True)
class SingularSet:
    points: tuple = ()

    def __post_init__(self):
        pts = sorted(float(p) % TWO_PI for p in self.points)
        for a, b in zip(pts, pts[1:]):
            if b - a < 1e-12:
                raise ValueError("singular points must be distinct")
        if len(pts) > 1 and pts[0] + TWO_PI - pts[-1] < 1e-12:
            raise ValueError("singular points must be distinct")
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _dim_of(h):
    return getattr(h, "dim", None)


@dataclass
class APProfile:
    """Log-scale profiles ``(h_minus, h_plus)`` at ``z0`` with scale ``s``."""

    z0: float
    h_minus: object
    h_plus: object
    s: float

    def __post_init__(self):
        if not 0 < self.s < math.pi:
            raise ValueError("profile scale s must lie in (0, pi)")
        d1, d2 = _dim_of(self.h_minus), _dim_of(self.h_plus)
        if d1 is not None and d2 is not None and d1 != d2:
            raise ProfileMismatch("profiles on the two arcs differ in dimension")

    @property
    def dim(self):
        return _dim_of(self.h_plus) or _dim_of(self.h_minus) or 1

    def profile(self, k):
        return self.h_plus if k == 1 else self.h_minus

    def at_offset(self, u, k):
        """Profile value at angular offset ``k u`` from ``z0``."""
        u = np.asarray(u, dtype=float)
        h = self.profile(k)
        return np.asarray(h(np.log(u / self.s))).reshape(u.shape + (self.dim,))

    @classmethod
    def from_strip_profile(cls, z0, P, s):
        """Profiles of a strip exponential sum ``P(w)``, ``w = Log phi_{z0}``.

        Uses ``Log phi_{z0} = ln u + O(u^2)`` on the arcs, so in the
        variable ``t = ln(u / s)`` the two profiles are shifts of the
        restrictions of ``P`` to the two boundary lines.
        """
        ls = math.log(s)
        return cls(z0, shift(P.top(), ls), shift(P.bottom(), ls), s)

    def to_dict(self):
        return {"z0": self.z0, "s": self.s,
                "h_minus": self.h_minus.to_dict(), "h_plus": self.h_plus.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["z0"]), TrigPolynomial.from_dict(d["h_minus"]),
                   TrigPolynomial.from_dict(d["h_plus"]), float(d["s"]))


class SAPFunction:
    """Assembled boundary function; see ``build_sap``."""

    def __init__(self, singular, profiles, background, blend, dim):
        self.singular = singular
        self.profiles = list(profiles)
        self.background = background
        self.blend = tuple(float(b) for b in blend)
        self.dim = dim

    def __call__(self, theta):
        return eval_boundary(self, theta)

    def profile_at(self, z0):
        for p in self.profiles:
            if angular_distance(p.z0, z0) < 1e-12:
                return p
        return None

    def boundary_oracle(self):
        return lambda theta: eval_boundary(self, theta, check=False)


def _background_values(bg, theta, dim):
    v = np.asarray(bg(theta), dtype=complex)
    return v.reshape(np.shape(theta) + (dim,))


def build_sap(singular, profiles, background, blend=None):
    """Assemble a SAP boundary function.

    Parameters
    ----------
    singular : SingularSet or sequence of angles
    profiles : list of APProfile, one per singular point
    background : callable
        ``theta -> values`` of shape ``theta.shape + (d,)``.
    blend : sequence of float, optional
        Outer radius of the collar at each point (defaults to ``2 s``).
        On offsets ``u <= s`` the profile is used; on ``s < u < blend`` it is
        joined to the background by a smoothstep.
    """
    if not isinstance(singular, SingularSet):
        singular = SingularSet(tuple(singular))
    profiles = list(profiles)
    ordered = []
    for z0 in singular:
        match = [p for p in profiles if angular_distance(p.z0, z0) < 1e-12]
        if len(match) != 1:
            raise ProfileMismatch(f"need exactly one profile at angle {z0:.6g}")
        ordered.append(match[0])
    if len(profiles) != len(ordered):
        raise ProfileMismatch("profile base points differ from the singular set")
    dims = {p.dim for p in ordered}
    probe = np.asarray(background(np.array([0.1234])), dtype=complex)
    d_bg = probe.shape[-1] if probe.ndim > 1 else 1
    dims.add(d_bg)
    if len(dims) > 1:
        raise ProfileMismatch(f"coefficient dimensions differ: {sorted(dims)}")
    dim = dims.pop()
    if blend is None:
        blend = [min(2 * p.s, math.pi) for p in ordered]
    blend = list(blend)
    if len(blend) != len(ordered):
        raise ValueError("one blend radius per singular point")
    for p, b in zip(ordered, blend):
        if not p.s <= b <= math.pi:
            raise ValueError("blend radius must satisfy s <= blend <= pi")
    pts = singular.points
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if blend[i] + blend[j] > angular_distance(pts[i], pts[j]) + 1e-15:
                raise OverlappingBlends(f"collars at {pts[i]:.6g} and {pts[j]:.6g} overlap")
    return SAPFunction(singular, ordered, background, blend, dim)


def eval_boundary(f, theta, check=True):
    """Values ``f(e^{i theta})`` with shape ``theta.shape + (d,)``."""
    theta = np.asarray(theta, dtype=float)
    out = _background_values(f.background, theta, f.dim).copy()
    for p, b in zip(f.profiles, f.blend):
        off = signed_offset(theta, p.z0)
        u = np.abs(off)
        if check and np.any(u <= SINGULAR_TOL):
            raise AtSingularPoint(f"angle {p.z0:.6g} is a singular point")
        near = (u < b) & (u > SINGULAR_TOL)
        if not np.any(near):
            continue
        for k in (1, -1):
            sel = near & ((off > 0) if k == 1 else (off < 0))
            if not np.any(sel):
                continue
            prof = p.at_offset(u[sel], k)
            if b > p.s:
                sig = smoothstep((u[sel] - p.s) / (b - p.s))[:, None]
            else:
                sig = np.zeros((prof.shape[0], 1))
            out[sel] = (1 - sig) * prof + sig * out[sel]
    return out


# angles near 2 pi carry ~1e-15 absolute rounding; at this floor the relative
# error of an offset (hence of t = ln(u/s)) stays near 1e-8
OFFSET_FLOOR = 1e-7


def _log_grid(s, n=4001, depth=30.0):
    """Offsets ``u = s e^t`` for ``t`` uniform in ``[-depth, 0]``, clipped
    below at ``OFFSET_FLOOR``."""
    lo = max(-depth, math.log(OFFSET_FLOOR / s)) if s > OFFSET_FLOOR else 0.0
    return s * np.exp(np.linspace(lo, 0.0, n))


@dataclass
class VerifyReport:
    z0: float
    epsilon: float
    s_epsilon: float = None
    sup_error: float = None
    passed: bool = False
    trials: list = field(default_factory=list)

    def to_dict(self):
        return {"z0": self.z0, "epsilon": self.epsilon, "s_epsilon": self.s_epsilon,
                "sup_error": self.sup_error, "pass": self.passed,
                "trials": [{"s": s, "sup_error": e} for s, e in self.trials]}


def verify_sap(f, z0, eps, candidate=None, levels=20, n_grid=4001, depth=30.0):
    """Largest trial ``s`` (schedule ``s_0 2^-n``) on which ``f`` is eps-close
    to the candidate profiles on both arcs.

    The candidate defaults to the profile ``f`` was built from.  The sup is
    taken over a logarithmic grid of offsets ``s e^t``, ``-depth <= t <= 0``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    cand = candidate if candidate is not None else f.profile_at(z0)
    if cand is None:
        raise ProfileMismatch("no candidate profile at this point")
    if cand.dim != f.dim:
        raise ProfileMismatch("candidate dimension differs from f")
    report = VerifyReport(float(z0), float(eps))
    norm = getattr(cand.h_plus, "norm_tag", "sup")
    best = math.inf
    for n in range(levels + 1):
        s_n = cand.s * 2.0 ** (-n)
        u = _log_grid(s_n, n_grid, depth)
        err = 0.0
        for k in (1, -1):
            vals = eval_boundary(f, z0 + k * u, check=False)
            err = max(err, float(vector_norm(vals - cand.at_offset(u, k), norm).max()))
        report.trials.append((s_n, err))
        best = min(best, err)
        if err < eps:
            report.s_epsilon, report.sup_error, report.passed = s_n, err, True
            return s_n, report
    report.sup_error = best
    raise VerificationFailed(f"no trial arc passed (best sup error {best:.3g})", report)


class StripPullback(BoundaryPair):
    """Boundary data transported to the strip; ``x_max`` bounds the arc images."""

    def __init__(self, f1, f2, x_max):
        super().__init__(f1, f2)
        self.x_max = x_max


def strip_pullback(f, z0, s, dim=None):
    """``h_k = f o phi_{z0}^{-1} o Log^{-1}`` on the two strip lines.

    ``f`` maps angles to values.  The whole arc of orientation ``k`` and
    length pi is carried to the full line, so the data are total; the image
    of the arc of length ``s`` is ``x <= x_max = ln(2 tan(s/2))``.
    """
    if not 0 < s < math.pi:
        raise OutOfDomain("s must lie in (0, pi)")
    if dim is None:
        dim = getattr(f, "dim", None)
        if dim is None:
            dim = np.asarray(f(np.array([z0 + 0.5]))).reshape(1, -1).shape[1]
    g = f.boundary_oracle() if isinstance(f, SAPFunction) else f

    def side(k):
        return lambda x: np.asarray(g(z0 + k * strip_to_arc(x))).reshape(np.shape(x) + (dim,))

    bound = math.inf
    h1 = EvaluationOracle(side(1), bound, dim)
    h2 = EvaluationOracle(side(-1), bound, dim)
    return StripPullback(h1, h2, float(np.real(arc_to_strip(s, 1))))


@dataclass
class LocalReport:
    z0: float
    epsilon: float
    s_epsilon: float = None
    sup_error: float = None
    certified_smoothing: float = 0.0
    kernel: dict = None
    trials: list = field(default_factory=list)

    def to_dict(self):
        return {"z0": self.z0, "epsilon": self.epsilon, "s_epsilon": self.s_epsilon,
                "sup_error": self.sup_error, "certified_smoothing": self.certified_smoothing,
                "kernel": self.kernel, "trials": [{"s": s, "sup_error": e} for s, e in self.trials]}


def smoothed_strip_data(profile, eps):
    """Bochner-Fejer smoothing of a profile's strip data.

    Returns ``(q1, q2, spec)``: the smoothed data on ``R`` and ``R + i pi``
    in the strip variable ``x = t + ln s``.
    """
    p1, p2 = profile.h_plus, profile.h_minus
    if not (isinstance(p1, TrigPolynomial) and isinstance(p2, TrigPolynomial)):
        raise TypeError("smoothing needs TrigPolynomial profiles")
    ls = math.log(profile.s)
    q1, q2 = shift(p1, -ls), shift(p2, -ls)
    spec = choose_kernel_for_net([q1, q2], eps)
    return apply_operator(spec, q1), apply_operator(spec, q2), spec


def local_approximant(f, z0, eps, candidate=None, levels=20, n_grid=4001, depth=30.0):
    """Harmonic strip function ``H`` approximating the pullback of ``f`` at ``z0``.

    At a singular point the candidate profiles (default: those of ``f``) are
    smoothed with a Bochner-Fejer kernel moving them by at most ``eps / 2``
    and extended harmonically; at a regular point ``H`` is the constant
    ``f(z0)``.  ``s_eps`` is the largest trial arc on which
    ``sup ||h_k - H|| < eps``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    prof = candidate if candidate is not None else (
        f.profile_at(z0) if isinstance(f, SAPFunction) else None)
    report = LocalReport(float(z0), float(eps))
    dim = f.dim
    if prof is None:
        from .ap_core import BasisSet
        c = np.asarray(f(np.array([z0]))).reshape(dim) if not isinstance(f, SAPFunction) \
            else _background_values(f.background, np.array([z0]), dim)[0]
        basis = BasisSet((1.0,), ("1",))
        const = TrigPolynomial.constant(basis, c)
        H = StripHarmonic(const, const)
        s0 = math.pi / 2
    else:
        q1, q2, spec = smoothed_strip_data(prof, eps / 2)
        report.kernel = spec.to_dict()
        report.certified_smoothing = max(certified_error(spec, shift(prof.h_plus, -math.log(prof.s))),
                                         certified_error(spec, shift(prof.h_minus, -math.log(prof.s))))
        H = StripHarmonic(q1, q2)
        s0 = prof.s
    g = f.boundary_oracle() if isinstance(f, SAPFunction) else f
    best = math.inf
    for n in range(levels + 1):
        s_n = s0 * 2.0 ** (-n)
        u = _log_grid(s_n, n_grid, depth)
        err = 0.0
        for k in (1, -1):
            w = arc_to_strip(u, k)
            vals = np.asarray(g(z0 + k * u)).reshape(u.shape + (dim,))
            err = max(err, float(vector_norm(vals - H(w), "sup").max()))
        report.trials.append((s_n, err))
        best = min(best, err)
        if err < eps:
            report.s_epsilon, report.sup_error = s_n, err
            return H, s_n, report
    report.sup_error = best
    raise VerificationFailed(f"local approximation failed (best sup error {best:.3g})", report)


def disk_poisson_kernel(r, d):
    return (1 - r * r) / (1 - 2 * r * np.cos(d) + r * r)


def poisson_disk(f, z, tol=1e-8, singular=(), dim=None, limit=20000):
    """Poisson integral of boundary data ``f(theta)`` at ``|z| < 1``."""
    z = complex(z)
    r, th = abs(z), math.atan2(z.imag, z.real)
    if r >= 1:
        raise OutOfDomain("poisson_disk needs |z| < 1")
    if isinstance(f, SAPFunction):
        singular = tuple(f.singular.points) if not singular else singular
        dim = f.dim
        g = f.boundary_oracle()
    else:
        g = f
    if dim is None:
        dim = np.asarray(g(np.array([th]))).reshape(1, -1).shape[1]

    def integrand(t):
        return disk_poisson_kernel(r, t - th) * np.asarray(g(np.asarray(t))).reshape(dim) / TWO_PI

    pts = sorted({th + ((a - th + math.pi) % TWO_PI) - math.pi for a in singular} | {th})
    pts = [p for p in pts if th - math.pi < p < th + math.pi]
    val, err = quad_vec(integrand, th - math.pi, th + math.pi, epsabs=tol, epsrel=0.0,
                        points=pts or None, limit=limit, norm="max")
    if not err <= 10 * tol:
        raise NonConverged(f"disk Poisson quadrature error {err:.3g}", estimate=VectorValue(val), error=err)
    return VectorValue(np.asarray(val).reshape(dim))


def sap_from_as_function(f, s=0.5, blend=None, exact=True):
    """SAP boundary function of an ``ASFunction``.

    With ``exact`` the profiles are the exact log-scale pullbacks of the
    boundary values, so the assembled function coincides with ``f`` on the
    circle; otherwise they are the asymptotic exponential sums.
    """
    pts = f.singular_angles
    profiles = []
    for z0 in pts:
        if exact:
            def side(k, z0=z0):
                return EvaluationOracle(
                    lambda t: f.boundary(z0 + k * s * np.exp(np.asarray(t))).reshape(np.shape(t) + (f.dim,)),
                    math.inf, f.dim)
            profiles.append(APProfile(z0, side(-1), side(1), s))
        else:
            profiles.append(APProfile.from_strip_profile(z0, f.local_profile(z0), s))
    if blend is None:
        gap = min((angular_distance(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]), default=math.pi)
        blend = [min(2 * s, gap / 2, math.pi)] * len(pts)
    return build_sap(SingularSet(tuple(pts)), profiles, f.boundary, blend)
