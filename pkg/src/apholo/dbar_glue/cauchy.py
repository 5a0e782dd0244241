"""Cauchy transform ``H(z) = -(1/pi) \\iint_Omega h(zeta) / (zeta - z) dA`` on annuli.

Two solvers are provided.

``CauchyTransform`` expands ``h`` in angular Fourier modes on Gauss-Legendre
radial panels.  For ``zeta = r e^{it}`` and ``z = rho e^{i phi}`` the kernel
expansion gives, for every mode ``h_n(r)``, a single output mode ``n - 1``:

    H_{n-1}(rho) = -2 \\int_{r > rho} h_n(r) (rho / r)^{n-1} dr      (n >= 1)
    H_{n-1}(rho) = +2 \\int_{r < rho} h_n(r) (r / rho)^{1-n} dr      (n <= 0)

so whole circles of values cost one FFT.  ``cauchy_polar`` integrates in
polar coordinates centred at each evaluation point, where the kernel
singularity cancels against the area element; it is slow but independent.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BarycentricInterpolator

from ..errors import QuadratureFailure


def _gl(a, b, n):
    x, w = leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


class CauchyTransform:
    """Cauchy transform of ``h`` over the annulus ``a <= |z| <= b``.

    Parameters
    ----------
    h : callable
        ``z -> values`` of shape ``z.shape + (d,)``; only called inside the
        annulus.  If ``h`` has a ``polar(radii, n_phi, offset)`` method it is
        used instead, sampling whole circles at once.
    a, b : float
        Radii, ``0 <= a < b``.
    n_theta : int
        Angular samples (and Fourier modes).
    n_r : int
        Gauss-Legendre nodes per radial panel.
    panels : int, optional
        Number of radial panels (default about one per 0.1 of width).
    graded : bool
        Subdivide panels geometrically toward the evaluation radius so that
        high modes, whose kernel decays on the scale ``rho / n``, are
        resolved.  Without it only the panel containing ``rho`` is split.
    """

    def __init__(self, h, a, b, n_theta=4096, n_r=16, panels=None, dim=None, graded=True):
        if not 0 <= a < b:
            raise ValueError("need 0 <= a < b")
        self.a, self.b = float(a), float(b)
        self.n_theta = int(n_theta)
        self.n_r = int(n_r)
        self.graded = bool(graded)
        if panels is None:
            panels = max(1, int(math.ceil((b - a) / 0.1 - 1e-9)))
        edges = np.linspace(a, b, panels + 1)
        self.edges = edges
        self.theta = 2 * np.pi * np.arange(self.n_theta) / self.n_theta
        nodes, weights, coefs = [], [], []
        for p in range(panels):
            r, w = _gl(edges[p], edges[p + 1], self.n_r)
            z = r[:, None] * np.exp(1j * self.theta[None, :])
            if hasattr(h, "polar"):
                v = np.asarray(h.polar(r, self.n_theta, 0.0), dtype=complex)
            else:
                v = np.asarray(h(z), dtype=complex)
            if v.shape == z.shape:
                v = v[..., None]
            if not np.all(np.isfinite(v)):
                raise QuadratureFailure("h is not finite on the sampling grid")
            nodes.append(r)
            weights.append(w)
            coefs.append(np.fft.fft(v, axis=1) / self.n_theta)  # (n_r, n_theta, d)
        self.nodes, self.weights, self.coefs = nodes, weights, coefs
        self.dim = coefs[0].shape[-1]
        self.modes = np.fft.fftfreq(self.n_theta, 1.0 / self.n_theta).astype(int)
        self.pos = self.modes >= 1
        self._bary = {}
        self._sup_h = float(max(np.max(np.abs(c).sum(axis=1)) for c in coefs))

    # radial integrals
    def _accumulate(self, out, r, w, hn, rho, sel=None):
        """Add the contribution of nodes ``r`` (weights ``w``, modes ``hn``),
        optionally restricted to the mode indices ``sel``."""
        n = self.modes
        idx = np.arange(n.size) if sel is None else sel
        above = r >= rho
        if rho <= 0:
            # only n == 1 survives at the centre
            j = idx[n[idx] == 1]
            k = np.searchsorted(idx, j)
            out[j] += -2 * np.einsum("j,jmd->md", w, hn[:, k])
            return
        lr = np.log(rho / r)  # <= 0 above rho, >= 0 below
        pos = self.pos[idx]
        if np.any(above):
            ra = np.nonzero(above)[0]
            p = np.nonzero(pos)[0]
            k = np.exp(np.outer(lr[ra], n[idx[p]] - 1))
            out[idx[p]] += -2 * np.einsum("j,jm,jmd->md", w[ra], k, hn[np.ix_(ra, p)])
        if np.any(~above):
            rb = np.nonzero(~above)[0]
            q = np.nonzero(~pos)[0]
            k = np.exp(np.outer(-lr[rb], 1 - n[idx[q]]))
            out[idx[q]] += 2 * np.einsum("j,jm,jmd->md", w[rb], k, hn[np.ix_(rb, q)])

    def _interp_matrix(self, p, r2):
        if p not in self._bary:
            self._bary[p] = BarycentricInterpolator(self.nodes[p], np.eye(self.n_r), axis=0)
        return self._bary[p](r2)

    def _pieces(self, lo, hi, rho):
        """Sub-intervals of ``[lo, hi]`` graded geometrically toward ``rho``,
        where the kernel of mode ``n`` varies on the scale ``rho / n``."""
        L = hi - lo
        nmax = max(abs(int(self.modes.min())), int(self.modes.max()))
        cuts = {lo, hi}
        if lo < rho < hi:
            cuts.add(rho)
        for e in sorted(cuts):
            delta = abs(rho - e)
            if delta > L:
                continue
            floor = max(rho / nmax, delta / 40, 1e-14)
            for sgn in (-1, 1):
                t = L / 2
                while t > floor:
                    x = e + sgn * t
                    if lo < x < hi:
                        cuts.add(x)
                    t /= 2
        return np.array(sorted(cuts))

    def _cutoff(self, c, d, rho):
        """Mode indices whose kernel exceeds ``e^{-40}`` somewhere on ``[c, d]``."""
        n = self.modes
        if c >= rho:
            m = 40 / max(math.log(c / rho), 1e-300)
            return np.nonzero((n >= 1) & (n - 1 <= m))[0]
        if d <= rho:
            m = 40 / max(math.log(rho / d), 1e-300)
            return np.nonzero((n <= 0) & (1 - n <= m))[0]
        return None

    def modes_at(self, rho):
        """Output Fourier coefficients at radius ``rho``; entry ``i`` is the
        coefficient of ``exp(i (modes[i] - 1) phi)``."""
        out = np.zeros((self.n_theta, self.dim), dtype=complex)
        for p, (r, w, hn) in enumerate(zip(self.nodes, self.weights, self.coefs)):
            lo, hi = self.edges[p], self.edges[p + 1]
            if rho <= 0:
                cuts = np.array([lo, hi])
            elif self.graded:
                cuts = self._pieces(lo, hi, rho)
            else:
                cuts = np.array([lo, rho, hi]) if lo < rho < hi else np.array([lo, hi])
            if cuts.size == 2 and not (lo < rho < hi):
                self._accumulate(out, r, w, hn, rho)
                continue
            for c, d in zip(cuts[:-1], cuts[1:]):
                sel = self._cutoff(c, d, rho)
                if sel is not None and sel.size == 0:
                    continue
                r2, w2 = _gl(c, d, self.n_r)
                W = self._interp_matrix(p, r2)
                h2 = np.einsum("sj,jmd->smd", W, hn if sel is None else hn[:, sel])
                self._accumulate(out, r2, w2, h2, rho, sel)
        return out

    def on_circle(self, rho, n_phi=None, offset=0.0):
        """Values at ``rho exp(i (offset + 2 pi l / n_phi))``, shape (n_phi, d)."""
        n_phi = n_phi or self.n_theta
        out = self.modes_at(rho)
        k = self.modes - 1
        phase = np.exp(1j * k * offset)[:, None]
        bins = np.zeros((n_phi, self.dim), dtype=complex)
        np.add.at(bins, np.mod(k, n_phi), out * phase)
        return n_phi * np.fft.ifft(bins, axis=0)

    def polar(self, radii, n_phi, offset=0.0):
        """Values on a polar grid, shape (len(radii), n_phi, d)."""
        return np.stack([self.on_circle(float(r), n_phi, offset) for r in radii])

    def __call__(self, z):
        """Values at arbitrary points (direct mode sums, one radius at a time)."""
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1)
        res = np.zeros((flat.size, self.dim), dtype=complex)
        rho = np.round(np.abs(flat), 14)
        k = self.modes - 1
        for r in np.unique(rho):
            idx = np.nonzero(rho == r)[0]
            out = self.modes_at(float(r))
            phi = np.angle(flat[idx])
            for s in range(0, idx.size, 256):
                sl = slice(s, s + 256)
                res[idx[sl]] = np.exp(1j * np.outer(phi[sl], k)) @ out
        return res.reshape(z.shape + (self.dim,))

    @property
    def width(self):
        return self.b - self.a

    @property
    def sample_sup(self):
        """Upper bound of ``sup |h|`` on the sampling radii (mode-sum bound)."""
        return self._sup_h


def _ray_interval(z, e, R):
    """Parameters ``s >= 0`` with ``|z + s e| <= R`` (arrays over rays)."""
    p = np.real(np.conj(z) * e)
    disc = p * p - (abs(z) ** 2 - R * R)
    ok = disc > 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    lo = np.maximum(-p - sq, 0.0)
    hi = np.maximum(-p + sq, 0.0)
    ok &= hi > lo
    return np.where(ok, lo, 0.0), np.where(ok, hi, 0.0)


def cauchy_polar(h, z, a, b, n_alpha=256, n_s=64):
    """Cauchy transform at one point by polar coordinates centred at ``z``.

    With ``zeta = z + s e^{i alpha}`` the integrand ``h / (zeta - z) dA`` becomes
    ``h e^{-i alpha} ds d alpha``.  Each ray meets the annulus in at most two
    segments, found exactly; the angle uses the trapezoid rule and each
    segment Gauss-Legendre with ``n_s`` nodes.
    """
    z = complex(z)
    alpha = 2 * np.pi * np.arange(n_alpha) / n_alpha
    e = np.exp(1j * alpha)
    lo_b, hi_b = _ray_interval(z, e, b)
    if a > 0:
        lo_a, hi_a = _ray_interval(z, e, a)
        has_a = hi_a > lo_a
    else:
        lo_a = hi_a = np.zeros_like(lo_b)
        has_a = np.zeros(n_alpha, dtype=bool)
    # segments: [lo_b, hi_b] minus [lo_a, hi_a]
    seg1 = (lo_b, np.where(has_a, np.clip(lo_a, lo_b, hi_b), hi_b))
    seg2 = (np.where(has_a, np.clip(hi_a, lo_b, hi_b), hi_b), hi_b)
    x, w = leggauss(n_s)
    total = 0.0
    for s0, s1 in (seg1, seg2):
        L = s1 - s0
        if not np.any(L > 0):
            continue
        s = 0.5 * (s1 - s0)[:, None] * x[None, :] + 0.5 * (s0 + s1)[:, None]
        pts = z + s * e[:, None]
        v = np.asarray(h(pts), dtype=complex)
        if v.shape == pts.shape:
            v = v[..., None]
        seg = np.einsum("an,and->ad", 0.5 * L[:, None] * w[None, :], v)
        total = total + np.einsum("a,ad->d", np.conj(e), seg)
    return -(1 / np.pi) * (2 * np.pi / n_alpha) * np.asarray(total)


def width_constant(sup_H, width, sup_h):
    """Fitted ``C`` in ``sup |H| <= C w sup |h|``."""
    return float(sup_H / (width * sup_h)) if sup_h > 0 else 0.0


def fit_width_constant(data, widths, n_theta=512, n_r=16, n_eval=21):
    """Fitted ``C`` in ``sup |H| <= C w sup |h|`` on annuli ``1 - w <= |z| <= 1``.

    Parameters
    ----------
    data : list of callables
        Each entry maps a width to a datum ``h`` (a callable on the annulus,
        or an object with ``polar``), so data tied to the annulus, such as
        the pipeline's ``dbar`` datum, can be rebuilt per width.
    widths : sequence of float

    Returns
    -------
    dict
        ``{"C": [max ratio per width], "ratios": [[ratio per datum] per width]}``.
    """
    out = {"C": [], "ratios": []}
    for w in widths:
        a = 1.0 - w
        r = np.linspace(a, 1.0, n_eval)
        th = 2 * np.pi * np.arange(n_theta) / n_theta
        z = r[:, None] * np.exp(1j * th)[None, :]
        row = []
        for make in data:
            h = make(w)
            hv = h.polar(r, n_theta, 0.0) if hasattr(h, "polar") else h(z)
            sup_h = float(np.abs(np.asarray(hv)).max())
            H = CauchyTransform(h, a, 1.0, n_theta=n_theta, n_r=n_r, graded=False)
            sup_H = float(np.abs(H.polar(r, n_theta, 0.0)).max())
            row.append(width_constant(sup_H, w, sup_h))
        out["ratios"].append(row)
        out["C"].append(max(row))
    return out
