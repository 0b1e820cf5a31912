import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from trieig.representation import Factored, lu_product, ul_product
from trieig.transforms import (
    ComplexFactored,
    DqdsResult,
    complex_dqds_step,
    dqds_step,
    qds_step,
    rejection_test,
)

from conftest import rel_close


@st.composite
def factored(draw, min_n=1, max_n=20, lo=-2.0, hi=2.0):
    n = draw(st.integers(min_n, max_n))
    el = st.floats(lo, hi, allow_nan=False)
    u = draw(st.lists(el, min_size=n, max_size=n))
    l = draw(st.lists(el, min_size=n - 1, max_size=n - 1))
    return Factored(u, l, draw(st.floats(-3.0, 3.0)))


def test_dqds_diagonal_case():
    r = dqds_step(Factored([5.0, 2.0], [0.0]), 1.0)
    np.testing.assert_array_equal(r.fhat.u, [4.0, 1.0])
    np.testing.assert_array_equal(r.fhat.l, [0.0])
    np.testing.assert_array_equal(r.d, [4.0, 1.0])
    assert r.fhat.acshift == 1.0


def test_dqds_two_by_two():
    F = Factored([4.0, 1.0], [1.0])
    r = dqds_step(F, 0.0)
    np.testing.assert_allclose(r.fhat.u, [5.0, 0.8], rtol=1e-15)
    np.testing.assert_allclose(r.fhat.l, [0.2], rtol=1e-15)
    np.testing.assert_allclose(r.d, [4.0, 0.8], rtol=1e-15)
    np.testing.assert_allclose(lu_product(r.fhat).to_dense(), ul_product(F).to_dense(), rtol=1e-15)
    assert not rejection_test(r)


def test_dqds_breakdown_propagates():
    r = dqds_step(Factored([1.0, 1.0], [-1.0]), 0.0)
    assert r.d[0] == 1.0
    assert r.fhat.u[0] == 0.0
    assert np.isinf(r.fhat.l[0])
    assert rejection_test(r)


def test_qds_examples():
    F = qds_step(Factored([4.0, 1.0], [1.0]), 0.0)
    np.testing.assert_allclose(F.u, [5.0, 0.8], rtol=1e-15)
    np.testing.assert_allclose(F.l, [0.2], rtol=1e-15)

    F = qds_step(Factored([3.0, -2.0, 7.0], [0.0, 0.0]), 0.0)
    np.testing.assert_array_equal(F.u, [3.0, -2.0, 7.0])
    np.testing.assert_array_equal(F.l, [0.0, 0.0])

    F = qds_step(Factored([2.0, 2.0], [1.0]), 1.0)
    r = dqds_step(Factored([2.0, 2.0], [1.0]), 1.0)
    np.testing.assert_allclose(F.u, [2.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(F.l, [1.0], rtol=1e-15)
    np.testing.assert_allclose(F.u, r.fhat.u, atol=1e-15)


def test_complex_step_closure_of_reals():
    F = ComplexFactored.from_real(Factored([4.0, 1.0, 3.0], [1.0, -0.5]))
    G = complex_dqds_step(F, 0.5)
    assert np.all(G.u.imag == 0) and np.all(G.l.imag == 0)


def test_complex_three_steps_return_to_reals():
    sigma = 1j
    F = ComplexFactored.from_real(Factored([4.0, 1.0], [1.0]))
    for s in (sigma, np.conj(sigma) - sigma, -np.conj(sigma)):
        F = complex_dqds_step(F, s)
    assert np.abs(F.u.imag).max() <= 1e-12
    assert np.abs(F.l.imag).max() <= 1e-12


def test_complex_scalar_case():
    G = complex_dqds_step(ComplexFactored([3.0], []), 1 + 2j)
    assert G.u[0] == 2 - 2j


def test_rejection_examples():
    r = DqdsResult(Factored([1.0, 1.0], [0.0]), np.zeros(2), 0.0, 0.0)
    assert not rejection_test(r)
    bad = DqdsResult(Factored([1.0, np.nan], [0.0]), np.zeros(2), 0.0, 0.0)
    assert rejection_test(bad)
    bad = DqdsResult(Factored([1.0, 1.0], [np.inf]), np.zeros(2), 0.0, 0.0)
    assert rejection_test(bad)


def test_rejection_threshold_from_growth():
    # u=(1,1), l=(1): |u|+|l| = 2 in the first slot, lhat_1 = 2001
    F = Factored([1.0, 1.0], [1.0])
    lhat, d = 2001.0, np.array([1.0, 1.0])
    growth = (abs(lhat) + 3 * abs(d[0])) / 2.0
    r = DqdsResult(Factored([1.0, 1.0], [lhat]), d, growth, 0.0)
    assert rejection_test(r)
    assert not rejection_test(r, threshold=2000.0)
    assert F.n == 2


def test_growth_matches_definition():
    F = Factored([0.3, -1.2, 0.7, 2.0], [0.9, -0.4, 1.1])
    r = dqds_step(F, 0.45)
    lh = np.append(r.fhat.l, 0.0)
    l = np.append(F.l, 0.0)
    expect = np.max((abs(r.sigma) + np.abs(lh) + 3 * np.abs(r.d)) / (np.abs(F.u) + np.abs(l)))
    assert np.isclose(r.growth, expect, rtol=1e-14)


@given(factored(), st.floats(-2.0, 2.0))
def test_dqds_residual_identity(F, sigma):
    r = dqds_step(F, sigma)
    assume(not rejection_test(r))
    J = ul_product(F).to_dense() - sigma * np.eye(F.n)
    K = lu_product(r.fhat).to_dense()
    scale = max(np.abs(J).max(), np.abs(K).max(), 1.0)
    assert np.abs(J - K).max() <= 1e-10 * (1 + r.growth) * scale


@given(factored(), st.floats(-2.0, 2.0))
def test_acshift_bookkeeping(F, sigma):
    r = dqds_step(F, sigma)
    assert r.fhat.acshift == F.acshift + sigma
    assert r.sigma == sigma
    # from a zero accumulated shift the difference is exact
    z = dqds_step(Factored(F.u, F.l, 0.0), sigma)
    assert z.fhat.acshift - 0.0 == sigma


@given(factored(lo=0.5, hi=2.0), st.floats(-0.4, 0.4))
def test_dqds_matches_qds(F, sigma):
    r = dqds_step(F, sigma)
    assume(not rejection_test(r) and r.growth <= 10)
    q = qds_step(F, sigma)
    assert rel_close(r.fhat.u, q.u, 1e-10, floor=1e-300)
    assert rel_close(r.fhat.l, q.l, 1e-10, floor=1e-300)


@given(factored(), st.floats(-2.0, 2.0))
def test_complex_step_reproduces_real_step(F, sigma):
    r = dqds_step(F, sigma)
    c = complex_dqds_step(ComplexFactored.from_real(F), complex(sigma, 0.0))
    ok = np.isfinite(r.fhat.u).all() and np.isfinite(r.fhat.l).all()
    assume(ok)
    np.testing.assert_array_equal(c.u.real, r.fhat.u)
    np.testing.assert_array_equal(c.l.real, r.fhat.l)
