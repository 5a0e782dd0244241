import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apholo.as_functions import ASFunction
from apholo.dbar_glue import (AngularPartition, CauchyTransform, Chart, CircularNeighbourhood,
                              GlueConfig, PolarGrid, approximate, build_cocycle, chart_transitions,
                              first_glue, radial_partition, resolve_cocycle, second_glue)
from apholo.dbar_glue.cover import radius_for_half_width
from apholo.dbar_glue.partition import RadialPartition
from apholo.disk_geometry import GeneratorSpec
from apholo.errors import CoverMismatch, GlueMismatch, NotHolomorphic

TWO_PI = 2 * math.pi
WIDTH = 0.1


def chart(center, half_width, func, width=WIDTH):
    return Chart(CircularNeighbourhood(center % TWO_PI, radius_for_half_width(half_width, width)),
                 half_width, "regular", func)


def ring(funcs):
    """Charts evenly spaced around the circle, consecutive ones overlapping
    (a neighbourhood radius <= 1 caps the half-width at pi/3, so m >= 4)."""
    m = len(funcs)
    return [chart(TWO_PI * k / m, 0.75 * TWO_PI / m, f) for k, f in enumerate(funcs)]


def pair(f0, f1):
    return [chart(-0.2, 0.3, f0), chart(0.2, 0.3, f1)]


def const(c):
    return lambda z: np.full(np.shape(z) + (1,), c, dtype=complex)


poly = ASFunction.polynomial([[0.3], [1.0], [0.0], [0.2j]])
GRID = PolarGrid.annulus(WIDTH, 11, 1024)


def test_cover_types():
    n = CircularNeighbourhood(0.0, 0.5)
    assert n.contains(0.9) and not n.contains(1.0) and not n.contains(-1.0)
    with pytest.raises(ValueError):
        CircularNeighbourhood(0.0, 1.5)
    far = [chart(0.0, 0.2, poly), chart(math.pi, 0.2, poly)]
    with pytest.raises(CoverMismatch):
        chart_transitions(far)


def test_cocycle_examples():
    coc = build_cocycle(ring([poly] * 6), GRID)
    # chart 0 samples at angles unwrapped by 2 pi, so only roundoff remains
    assert coc.sup < 1e-12 and coc.antisymmetry_error == 0
    two = pair(lambda z: poly(z) + 1, poly)
    coc = build_cocycle(two, GRID)
    assert np.allclose(coc.pairs[(0, 1)][1], 1) and np.allclose(coc.pairs[(1, 0)][1], -1)


def test_cocycle_not_holomorphic():
    bad = pair(lambda z: poly(z) + np.conj(z)[..., None], poly)
    with pytest.raises(NotHolomorphic):
        build_cocycle(bad, GRID)


def test_resolution_examples():
    charts = ring([poly] * 6)
    coc = build_cocycle(charts, GRID)
    part = AngularPartition(chart_transitions(charts))
    res = resolve_cocycle(coc, part)
    assert max(np.abs(f).max() for f in res.ftilde) < 1e-15 and res.sup_h < 1e-15
    # charts 0..2 carry f + 1, charts 3..5 carry f.  With ftilde_j = f_j - sum_k rho_k f_k
    # (so that ftilde_k - ftilde_j = c_kj) this is ftilde_j = [j < 3] - sum_{k < 3} rho_k
    charts = ring([lambda z: poly(z) + 1] * 3 + [poly] * 3)
    coc = build_cocycle(charts, GRID)
    part = AngularPartition(chart_transitions(charts))
    res = resolve_cocycle(coc, part)
    for j, s in enumerate(coc.sectors):
        upper = sum(part.rho(k, s.angles) for k in range(3))
        expect = (1.0 if j < 3 else 0.0) - upper
        assert np.allclose(res.ftilde[j][..., 0], expect[None, :], atol=1e-14)
    assert res.cocycle_error < 1e-12
    # h = -sum_k (d rho_k / d zbar) f_k = -dbar(sum_{k < 3} rho_k), one global field
    z = 0.95 * np.exp(1j * np.linspace(0, TWO_PI, 2001))
    from apholo.dbar_glue.partition import angular_dbar
    slope = sum(part.rho_prime(k, np.angle(z)) for k in range(3))
    assert np.allclose(res.h(z)[:, 0], -angular_dbar(slope, z), atol=1e-12)


def test_cauchy_examples():
    zero = CauchyTransform(const(0.0), 0.0, 1.0, n_theta=64, n_r=8, graded=False)
    assert np.abs(zero(np.array([0.1, 0.5j]))).max() == 0
    one = CauchyTransform(const(1.0), 0.0, 1.0, n_theta=256, n_r=16, panels=16, graded=False)
    z = np.array([0.0, 0.3 + 0.1j, -0.7j, 0.5 - 0.5j])
    assert np.abs(one(z)[:, 0] - np.conj(z)).max() < 1e-3


@pytest.mark.parametrize("j", [1, 2, 3])
def test_cauchy_holomorphic_data(j):
    # -(1/pi) int_D zeta^j / (zeta - z) dA = z^j zbar - z^(j-1) for |z| < 1
    h = lambda z: (np.asarray(z) ** j)[..., None]
    H = CauchyTransform(h, 0.0, 1.0, n_theta=256, n_r=16, panels=16, graded=False)
    rng = np.random.default_rng(j)
    z = np.sqrt(rng.uniform(0, 0.64, 50)) * np.exp(TWO_PI * 1j * rng.uniform(size=50))
    assert np.abs(H(z)[:, 0] - (z**j * np.conj(z) - z ** (j - 1))).max() < 1e-6


def test_radial_partition_examples():
    cfg = GlueConfig(width=0.1)
    rho_A, rho_D, part = radial_partition(cfg)
    r = np.linspace(0, 1, 100001)
    assert np.abs(rho_A(r) + rho_D(r) - 1).max() < 1e-12
    assert np.all(rho_D(r[r >= 1 - cfg.width / 2]) == 0) and np.all(rho_A(r[r <= 1 - cfg.width]) == 0)
    grad = np.abs(np.gradient(rho_A(r), r)).max()
    assert abs(grad - 1.875 / (cfg.width / 2)) < 1e-3 * grad
    assert abs(part.max_gradient - 3.75 / cfg.width) < 1e-12
    assert abs(part.constant(cfg.width) - 1.875) < 1e-12


def test_first_glue_zero_cocycle():
    charts = ring([poly] * 6)
    coc = build_cocycle(charts, GRID)
    res = resolve_cocycle(coc, AngularPartition(chart_transitions(charts)))
    fg = first_glue(coc, res, GlueConfig(width=WIDTH), WIDTH)
    z = GRID.nodes
    assert np.abs(fg.f_eps(z) - poly(z)).max() < 1e-14 and fg.sup_H == 0


def test_first_glue_constant_cocycle():
    charts = ring([lambda z: poly(z) + 0.05, poly, lambda z: poly(z) - 0.03] * 2)
    coc = build_cocycle(charts, PolarGrid.annulus(WIDTH, 11, 2048))
    res = resolve_cocycle(coc, AngularPartition(chart_transitions(charts)))
    fg = first_glue(coc, res, GlueConfig(width=WIDTH), WIDTH)
    sup_ft = max(np.abs(f).max() for f in res.ftilde)
    assert fg.glue_error < 1e-9
    assert fg.sup_c <= sup_ft + fg.sup_H + 1e-12


class _Same:
    def __init__(self, f):
        self.f = f

    def __call__(self, z):
        return self.f(z)

    def polar(self, radii, n_phi, offset=0.0):
        th = offset + TWO_PI * np.arange(n_phi) / n_phi
        return self.f(np.asarray(radii)[:, None] * np.exp(1j * th)[None, :])


def test_second_glue_zero_difference():
    sg = second_glue(poly, _Same(poly), GlueConfig(width=WIDTH), WIDTH, 256)
    z = np.array([0.0, 0.5j, 0.93 - 0.1j, 0.999])
    assert np.array_equal(sg.F(z), poly(z)) and sg.formula_gap == 0


def test_second_glue_mismatch():
    cfg = GlueConfig(width=WIDTH, glue_tol=-1.0)
    with pytest.raises(GlueMismatch):
        second_glue(poly, _Same(lambda z: poly(z) + 0.01), cfg, WIDTH, 256)


@pytest.fixture(scope="module")
def mixed():
    f = ASFunction.generator(GeneratorSpec(1.0, 1.0, -1.0)) + ASFunction.polynomial([[0], [0.1]])
    return f, approximate(f, 0.1)


def test_approximate_disk_algebra():
    F, _, cert, rep = approximate(poly, 0.05)
    d = rep.to_dict()
    assert [b["kind"] for b in d["certificate"]] == ["disk_algebra_remainder"]
    assert d["sup_error"] < 1e-6


def test_approximate_generator_plus_polynomial(mixed):
    f, (F, field, cert, rep) = mixed
    d = rep.to_dict()
    kinds = [b["kind"] for b in d["certificate"]]
    assert kinds == ["generator", "disk_algebra_remainder"]
    gen = d["certificate"][0]
    assert gen["generator"]["lambda"] == 1.0 and gen["factor_center"] is None
    eps = 0.1
    assert d["sup_error"] < 20 * eps and d["constants"]["C_hat"] == d["sup_error"] / eps
    assert d["cocycle"]["sup"] < 2 * eps  # c_kj bound
    assert d["first_glue"]["sup_c"] <= 3 * eps
    assert d["second_glue"]["formula_gap"] < 1e-6
    assert d["dbar_residual"]["pass"]
    # the remainder is continuous at the singular points: its jump shrinks toward them
    assert all(v < 1e-2 for v in cert.remainder_jump.values())
    z = np.array([0.2, -0.4j, 0.8 * np.exp(1j)])
    assert np.abs(cert(z) - F(z)).max() <= cert.remainder_sup + 1e-12


def test_approximate_vector_valued():
    f = ASFunction.generator(GeneratorSpec(1.0, 1.0, -1.0), coeff=[1.0, 0.5j])
    F, _, cert, rep = approximate(f, 0.2)
    d = rep.to_dict()
    gens = [b for b in d["certificate"] if b["kind"] == "generator"]
    assert len(gens) == 1
    a, b = (complex(*c) for c in gens[0]["coeff"])
    assert abs(b - 0.5j * a) < 1e-9
    assert d["sup_error"] < 20 * 0.2


# properties

@given(st.integers(4, 12), st.floats(0.1, 0.45), st.floats(0, TWO_PI))
def test_angular_partition_of_unity(m, frac, rot):
    hw = min((0.5 + frac) * TWO_PI / m, 1.0)
    charts = [chart(rot + TWO_PI * k / m, hw, poly) for k in range(m)]
    part = AngularPartition(chart_transitions(charts))
    th = np.linspace(0, TWO_PI, 5001)
    rho = np.array([part.rho(k, th) for k in range(m)])
    assert np.abs(rho.sum(axis=0) - 1).max() < 1e-12
    assert rho.min() >= 0 and rho.max() <= 1
    for k, c in enumerate(charts):
        assert part.rho(k, np.array([c.center]))[0] == 1.0
        outside = np.abs(np.angle(np.exp(1j * (th - c.center)))) > hw
        assert np.all(rho[k][outside] == 0)
    # closed-form slope bound
    slope = max(np.abs(part.rho_prime(k, th)).max() for k in range(m))
    assert slope <= part.max_angular_slope() + 1e-9


@given(st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
                min_size=3, max_size=3))
def test_cocycle_laws_random_shifts(shifts):
    funcs = [lambda z, s=s: poly(z) + s * np.asarray(z)[..., None] for s in shifts]
    charts = [chart(c, 0.3, f) for c, f in zip((-0.2, 0.0, 0.2), funcs)]
    coc = build_cocycle(charts, PolarGrid.annulus(WIDTH, 11, 4096))
    assert coc.antisymmetry_error <= 1e-9
    assert coc.triple_count == 1 and coc.triple_error <= 1e-9
    assert coc.max_residual <= 10 * coc.grid.step ** 2


@given(st.floats(0.02, 0.3))
def test_radial_partition_width(w):
    part = RadialPartition.for_annulus(w)
    r = np.linspace(0, 1, 20001)
    assert np.abs(part.rho_A(r) + part.rho_D(r) - 1).max() < 1e-12
    assert abs((part.r1 - part.r0) - w / 2) < 1e-15  # collar of width w/2
