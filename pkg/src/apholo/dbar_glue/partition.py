"""Smooth partitions of unity built from the quintic smoothstep.

``AngularPartition`` lives on an annulus and depends on the angle only: a
chain of charts around the circle with consecutive overlaps, each bump
equal to 1 off the overlaps and switching inside a transition interval
that is the overlap shrunk by 10% on either side.  ``RadialPartition`` is
the pair ``(rho_{A'}, rho_{D'})`` of the second gluing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..sap_circle import smoothstep, smoothstep_prime

TWO_PI = 2 * math.pi
SMOOTHSTEP_MAX_SLOPE = 1.875  # max of 30 x^2 (1 - x)^2


def _wrap(theta, start):
    """Representative of ``theta`` in ``[start, start + 2 pi)``."""
    return start + np.mod(np.asarray(theta, dtype=float) - start, TWO_PI)


@dataclass
class AngularPartition:
    """Angular bumps for charts ``k = 0..m-1`` in counterclockwise order.

    ``transitions[k] = (l, r)`` is where chart ``k`` hands over to chart
    ``k + 1`` (cyclically); angles increase ``l < r`` and lie in the overlap.
    """

    transitions: list

    def __post_init__(self):
        m = len(self.transitions)
        self.m = m
        if m == 0:
            raise ValueError("need at least one chart")
        if m > 1:
            # unwrap the chain so that every transition follows its predecessor
            tr = []
            base = self.transitions[0][0]
            prev = base
            for l, r in self.transitions:
                l = float(_wrap(l, prev))
                r = l + ((r - l) % TWO_PI)
                tr.append((l, r))
                prev = r
            if tr[-1][1] - base > TWO_PI + 1e-12:
                raise ValueError("transitions overlap or are out of order")
            self._tr = tr
            self._start = base

    @property
    def size(self):
        return self.m

    def locate(self, theta):
        """Chart pair and weights at each angle.

        Returns ``(k, x)``: chart ``k`` hands over to ``k + 1`` with
        normalized transition coordinate ``x`` (``x <= 0`` means wholly in
        chart ``k``).  Weights are ``1 - S(x)`` and ``S(x)``.
        """
        theta = np.asarray(theta, dtype=float)
        if self.m == 1:
            return np.zeros(theta.shape, dtype=int), np.zeros(theta.shape)
        t = _wrap(theta, self._start)
        ls = np.array([l for l, _ in self._tr])
        rs = np.array([r for _, r in self._tr])
        # chart k owns [r_{k-1}, r_k); the transition k -> k+1 is [l_k, r_k)
        k = np.searchsorted(rs, t, side="right")
        k = np.where(k >= self.m, 0, k)
        t_adj = np.where((k == 0) & (t >= rs[-1]), t - TWO_PI, t)
        x = (t_adj - ls[k]) / (rs[k] - ls[k])
        return k, np.minimum(x, 1.0)

    def rho(self, k, theta):
        """Bump of chart ``k`` at the given angles."""
        if self.m == 1:
            return np.ones(np.shape(theta))
        j, x = self.locate(theta)
        out = np.zeros(np.shape(theta))
        out = np.where(j == k, 1 - smoothstep(x), out)
        out = np.where(np.mod(j + 1, self.m) == k, smoothstep(x), out)
        return out

    def rho_prime(self, k, theta):
        """Angular derivative of the bump of chart ``k``."""
        if self.m == 1:
            return np.zeros(np.shape(theta))
        j, x = self.locate(theta)
        width = np.array([r - l for l, r in self._tr])[j]
        sp = smoothstep_prime(x) / width
        out = np.zeros(np.shape(theta))
        out = np.where(j == k, -sp, out)
        out = np.where(np.mod(j + 1, self.m) == k, sp, out)
        return out

    def pair_weights(self, theta):
        """``(k, k + 1, w_k, w_{k+1}, dw_{k+1}/dtheta)`` at each angle."""
        theta = np.asarray(theta, dtype=float)
        if self.m == 1:
            z = np.zeros(theta.shape, dtype=int)
            return z, z, np.ones(theta.shape), np.zeros(theta.shape), np.zeros(theta.shape)
        j, x = self.locate(theta)
        width = np.array([r - l for l, r in self._tr])[j]
        s = smoothstep(x)
        return j, np.mod(j + 1, self.m), 1 - s, s, smoothstep_prime(x) / width

    def max_angular_slope(self):
        if self.m == 1:
            return 0.0
        return SMOOTHSTEP_MAX_SLOPE / min(r - l for l, r in self._tr)

    def min_transition(self):
        return min(r - l for l, r in self._tr) if self.m > 1 else TWO_PI


def angular_dbar(rho_prime, z):
    """``d rho / d zbar`` for a function of the angle only: ``i e^{i theta} rho' / (2 r)``."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    return 1j * np.exp(1j * np.angle(z)) * rho_prime / (2 * r)


@dataclass(frozen=True)
class RadialPartition:
    """``rho_{D'} = 1`` for ``r <= r0`` and ``0`` for ``r >= r1``; ``rho_{A'} = 1 - rho_{D'}``."""

    r0: float
    r1: float

    @classmethod
    def for_annulus(cls, width):
        """``D'`` meets the annulus ``1 - w <= |z| <= 1`` in a collar of width ``w / 2``."""
        return cls(1.0 - width, 1.0 - width / 2)

    def rho_D(self, r):
        return 1.0 - smoothstep((np.asarray(r) - self.r0) / (self.r1 - self.r0))

    def rho_A(self, r):
        return smoothstep((np.asarray(r) - self.r0) / (self.r1 - self.r0))

    def drho_A(self, r):
        return smoothstep_prime((np.asarray(r) - self.r0) / (self.r1 - self.r0)) / (self.r1 - self.r0)

    def dbar_rho_A(self, z):
        """``d rho_{A'} / d zbar = e^{i theta} rho_{A'}'(r) / 2``."""
        z = np.asarray(z, dtype=complex)
        return 0.5 * np.exp(1j * np.angle(z)) * self.drho_A(np.abs(z))

    @property
    def max_gradient(self):
        return SMOOTHSTEP_MAX_SLOPE / (self.r1 - self.r0)

    def constant(self, width):
        """``C`` in ``max |grad rho| <= 2 C / w``."""
        return self.max_gradient * width / 2


def radial_partition(cfg):
    """``(rho_{A'}, rho_{D'})`` callables of ``|z|`` plus the partition object."""
    part = RadialPartition.for_annulus(cfg.width)
    return part.rho_A, part.rho_D, part
