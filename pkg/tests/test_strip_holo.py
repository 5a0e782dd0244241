import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apholo.ap_core import BasisSet, EvaluationOracle, TrigPolynomial
from apholo.errors import GridTooCoarse, NonConverged, OutOfDomain
from apholo.fields import GridField
from apholo.strip_holo import (BoundaryPair, QuadraturePlan, StripExpSum, StripPoint, eval_strip,
                               holo_residual, poisson_extend_strip, strip_sup_norm)

SQRT2 = math.sqrt(2.0)
B1 = BasisSet((1.0,))
B2 = BasisSet((1.0, SQRT2))

coords = st.fractions(min_value=-2, max_value=2, max_denominator=3)
cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
interior = st.builds(complex, st.floats(-5, 5), st.floats(0.05, math.pi - 0.05))


@st.composite
def polys(draw, basis=B2):
    n = draw(st.integers(0, 4))
    terms = [(draw(cplx), tuple(draw(coords) for _ in range(basis.rank))) for _ in range(n)]
    return TrigPolynomial.from_terms(basis, terms, dim=1)


def expsum(terms, basis=B1):
    return StripExpSum.from_polynomial(TrigPolynomial.from_terms(basis, terms))


def zero():
    return TrigPolynomial.zero(B1)


def test_eval_strip_examples():
    p = expsum([(1.0, (1,))])
    assert eval_strip(p, 1j * math.pi).allclose(math.exp(-math.pi), atol=1e-15)
    assert abs(math.exp(-math.pi) - 0.0432139) < 1e-7
    assert eval_strip(p, 0).allclose(1.0)
    c = StripExpSum.from_polynomial(TrigPolynomial.constant(B1, [2.0, 1j]))
    assert eval_strip(c, 3 + 1j).allclose([2.0, 1j])
    with pytest.raises(OutOfDomain):
        eval_strip(p, 4j)
    with pytest.raises(OutOfDomain):
        StripPoint(-0.1j)


def test_strip_sup_examples():
    est = strip_sup_norm(expsum([(1.0, (1,))]), (-10, 10), 0.01)
    assert abs(est.grid_max - 1) < 1e-12 and est.argmax.imag == 0
    est = strip_sup_norm(expsum([(1.0, (-1,))]), (-10, 10), 0.01)
    assert abs(est.grid_max - math.exp(math.pi)) < 1e-9 and abs(est.upper_bound - 23.1407) < 1e-4
    assert est.argmax.imag == math.pi
    c = StripExpSum.from_polynomial(TrigPolynomial.constant(B1, 3.0))
    assert strip_sup_norm(c, (0, 1), 0.1).grid_max == 3.0


def test_poisson_examples():
    c = TrigPolynomial.constant(B1, 1.5 - 1j)
    bp = BoundaryPair(c, c)
    for z in (0.3 + 1j, -2 + 3j):
        assert poisson_extend_strip(bp, z).allclose(1.5 - 1j, atol=1e-14)
    bp = BoundaryPair(zero(), TrigPolynomial.constant(B1, 1.0))
    for z in (0.3 + 1j, -2 + 3j):
        assert poisson_extend_strip(bp, z).allclose(z.imag / math.pi, atol=1e-14)
    bp = BoundaryPair(TrigPolynomial.from_terms(B1, [(1.0, (1,))]), zero())
    z = 0.7 + 1.1j
    expect = np.exp(1j * z.real) * math.sinh(math.pi - z.imag) / math.sinh(math.pi)
    assert poisson_extend_strip(bp, z).allclose(expect, atol=1e-14)
    assert poisson_extend_strip(bp, z, method="quadrature").allclose(expect, atol=1e-8)
    with pytest.raises(OutOfDomain):
        poisson_extend_strip(bp, 1.0)


def test_poisson_oracle_nonconverged():
    bp = BoundaryPair(EvaluationOracle(np.cos, bound=1.0), EvaluationOracle(np.cos, bound=1.0))
    with pytest.raises(NonConverged):
        poisson_extend_strip(bp, 1j, QuadraturePlan(t_trunc=3.0, tol=1e-10))


def test_holo_residual_examples():
    res, ratios = [], []
    for n in (21, 41, 81):
        x = np.linspace(-1, 1, n)
        y = np.linspace(0.5, 2.5, n)
        f = GridField.rectangular(lambda z: np.exp(1j * z), x, y)
        res.append(holo_residual(f))
        ratios.append(res[-1] / (x[1] - x[0]) ** 2)
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert max(ratios) < 1.0 and np.all(orders > 1.9)
    x = np.linspace(0, 1, 11)
    assert abs(holo_residual(GridField.rectangular(np.conj, x, x)) - 2) < 1e-12
    assert holo_residual(GridField.rectangular(lambda z: 0 * z + 4, x, x)) == 0
    with pytest.raises(GridTooCoarse):
        holo_residual(GridField.rectangular(np.conj, [0, 1], [0, 1, 2]))


def test_laplacian_of_extension_vanishes():
    bp = BoundaryPair(TrigPolynomial.from_terms(B1, [(1.0, (1,))]), zero())
    f = lambda z: poisson_extend_strip(bp, z).components[0]
    z, h = 0.4 + 1.3j, 1e-3
    lap = (f(z + h) + f(z - h) + f(z + 1j * h) + f(z - 1j * h) - 4 * f(z)) / h**2
    assert abs(lap) < 1e-4


# properties

@given(st.integers(-3, 3).filter(bool), st.lists(interior, min_size=3, max_size=3))
def test_quadrature_matches_closed_form(lam, zs):
    bp = BoundaryPair(TrigPolynomial.from_terms(B1, [(1.0, (lam,))]), zero())
    for z in zs:
        a = poisson_extend_strip(bp, z, method="closed").components
        b = poisson_extend_strip(bp, z, method="quadrature").components
        assert np.max(np.abs(a - b)) < 1e-6


@given(polys(), polys(), interior)
def test_extension_linear(f1, f2, z):
    zero2 = TrigPolynomial.zero(B2)
    whole = poisson_extend_strip(BoundaryPair(f1, f2), z).components
    parts = (poisson_extend_strip(BoundaryPair(f1, zero2), z).components
             + poisson_extend_strip(BoundaryPair(zero2, f2), z).components)
    assert np.allclose(whole, parts, atol=1e-12)


@given(polys(), polys())
def test_max_principle(f1, f2):
    from apholo.strip_holo import strip_extension
    h = strip_extension(BoundaryPair(f1, f2))
    x = np.linspace(-10, 10, 81)
    y = np.linspace(0.05, math.pi - 0.05, 31)
    Z = x[None, :] + 1j * y[:, None]
    inner = np.abs(h(Z)).max()
    t = np.linspace(-200, 200, 40001)
    edge = max(np.abs(f1(t)).max(initial=0), np.abs(f2(t)).max(initial=0))
    bound = max(f1.coefficient_bound(), f2.coefficient_bound())
    assert inner <= max(edge, bound) + 1e-9


@given(polys(), st.floats(-50, 50))
def test_restriction_to_real_line(p, t):
    s = StripExpSum.from_polynomial(p)
    assert np.array_equal(s(np.asarray(complex(t, 0.0))), p(np.asarray(t)))


@given(polys())
def test_holomorphic_extension_recovered(p):
    s = StripExpSum.from_polynomial(p)
    from apholo.strip_holo import StripHarmonic
    h = StripHarmonic(s.bottom(), s.top())
    z = np.array([0.3 + 0.5j, -1 + 2j, 2 + 3j])
    assert np.allclose(h(z), s(z), atol=1e-10 * max(1.0, s.coefficient_bound()))
