import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from trieig.representation import Factored, charpoly, lu_product, ul_product
from trieig.transforms import ComplexFactored, complex_dqds_step, dqds_step
from trieig.tridqds import TridqdsWorkspace, growth_diagnostics, m_column, tridqds_sweep

from conftest import rel_close


def three_complex_steps(F, sigma):
    G = ComplexFactored.from_real(F)
    for s in (sigma, np.conj(sigma) - sigma, -np.conj(sigma)):
        G = complex_dqds_step(G, s)
    return G


@st.composite
def well_scaled(draw, min_n=4, max_n=12):
    n = draw(st.integers(min_n, max_n))
    el = st.floats(0.5, 2.0)
    u = draw(st.lists(el, min_size=n, max_size=n))
    l = draw(st.lists(el, min_size=n - 1, max_size=n - 1))
    return Factored(u, l)


shifts = st.builds(
    lambda r, t: r * complex(np.cos(t), np.sin(t)),
    st.floats(0.1, 2.0),
    st.floats(0.0, 2 * np.pi),
)


def test_m_column_diagonal_input_has_no_bulge():
    F = Factored([1.0, 2.0, 3.0, 4.0], [0.0, 0.0, 0.0])
    assert m_column(F, 0.3 + 0.7j) == (0.0, 0.0)


def test_m_column_hand_values():
    F = Factored([1.0, 1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
    x_l, y_l = m_column(F, 1j)
    assert x_l == pytest.approx(-2.0 / 3.0, rel=1e-15)
    assert y_l == pytest.approx(-1.0 / 6.0, rel=1e-15)


def test_m_column_real_shift_against_dense():
    F = Factored([1.3, 0.7, 2.1, 0.9], [0.4, 1.2, 0.8])
    tau = 0.35
    J = ul_product(F).to_dense()
    M = (J - tau * np.eye(4)) @ (J - tau * np.eye(4))
    x_l, y_l = m_column(F, tau)
    assert x_l == pytest.approx(-M[1, 0] / M[0, 0], rel=1e-13)
    assert y_l == pytest.approx(-M[2, 0] / M[0, 0], rel=1e-13)


def test_sweep_on_diagonal_input_is_identity():
    F = Factored([3.0, -1.0, 2.0, 0.5, 4.0], [0.0] * 4, 1.25)
    res = tridqds_sweep(F, 0.4 + 1.1j)
    assert not res.rejected
    np.testing.assert_array_equal(res.fhat.u, F.u)
    np.testing.assert_array_equal(res.fhat.l, F.l)
    assert res.fhat.acshift == 1.25


def test_sweep_matches_complex_path_n6():
    rng = np.random.default_rng(6)
    F = Factored(rng.uniform(0.5, 2, 6), rng.uniform(0.5, 2, 5))
    res = tridqds_sweep(F, 1 + 1j)
    ref = three_complex_steps(F, 1 + 1j)
    assert not res.rejected
    assert rel_close(res.fhat.u, ref.u.real, 1e-10)
    assert rel_close(res.fhat.l, ref.l.real, 1e-10)


def test_sweep_preserves_charpoly_n4():
    F = Factored([1.0, 1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
    res = tridqds_sweep(F, 1j)
    J0 = ul_product(F)
    J1 = lu_product(res.fhat)
    np.testing.assert_allclose(charpoly(J1.a, J1.e), charpoly(J0.a, J0.e), rtol=1e-10, atol=1e-10)


def test_sweep_needs_four_rows():
    with pytest.raises(ValueError):
        tridqds_sweep(Factored([1.0, 1.0, 1.0], [1.0, 1.0]), 1j)


def test_growth_diagnostics_examples():
    assert growth_diagnostics(TridqdsWorkspace(), 1.0, 1.0) == 0.0
    assert growth_diagnostics(TridqdsWorkspace(x_l=0.7), 0.7, 1.0) == pytest.approx(1.0)
    g = growth_diagnostics(TridqdsWorkspace(x_r=1.0), 1.0, 1e-12)
    assert g >= 1e24
    assert g > 1000.0**2


def test_growth_is_compared_with_squared_threshold():
    F = Factored([1e-3, 1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
    res = tridqds_sweep(F, 0.5 + 0.01j)
    assert 2.25 < res.growth < 4.0
    assert not res.rejected
    assert tridqds_sweep(F, 0.5 + 0.01j, threshold=2.0).rejected_reason is None
    assert tridqds_sweep(F, 0.5 + 0.01j, threshold=1.5).rejected_reason == "growth"


@given(well_scaled(), shifts)
def test_oracle_equivalence(F, sigma):
    res = tridqds_sweep(F, sigma)
    assume(not res.rejected)
    ref = three_complex_steps(F, sigma)
    assert np.abs(ref.u.imag).max() <= 1e-10 * max(1.0, np.abs(ref.u).max())
    assert np.abs(ref.l.imag).max() <= 1e-10 * max(1.0, np.abs(ref.l).max())
    assert rel_close(res.fhat.u, ref.u.real, 1e-8)
    assert rel_close(res.fhat.l, ref.l.real, 1e-8)


@given(well_scaled(max_n=8), shifts)
def test_shift_restoration(F, sigma):
    res = tridqds_sweep(F, sigma)
    assume(not res.rejected)
    before = np.sort_complex(np.linalg.eigvals(ul_product(F).to_dense()))
    after = np.sort_complex(np.linalg.eigvals(lu_product(res.fhat).to_dense()))
    from trieig.oracle import match_spectra

    _, dist = match_spectra(before, after)
    assert dist.max() <= 1e-8
    assert res.fhat.u.dtype == np.float64 and res.fhat.l.dtype == np.float64


@given(well_scaled(), st.floats(-1.5, 1.5))
def test_degenerate_real_pair(F, tau):
    res = tridqds_sweep(F, complex(tau, 0.0))
    assume(not res.rejected)
    G = F
    for s in (tau, 0.0, -tau):
        r = dqds_step(G, s)
        G = r.fhat
    assume(G.is_finite())
    assert rel_close(res.fhat.u, G.u, 1e-8)
    assert rel_close(res.fhat.l, G.l, 1e-8)
