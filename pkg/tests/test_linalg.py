import numpy as np
import pytest
import sympy as sp
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import brute_partial_trace, random_density, random_ket
from wtangle.errors import DimensionMismatch, NonSquare, NotDensityLike, NotHermitian
from wtangle.linalg import (
    SIGMA_Y,
    concurrence_spectrum,
    hermitian_eigenvalues,
    kron,
    partial_trace,
    partial_transpose,
)
from wtangle.states import build_symmetric, to_full

I2 = np.eye(2)
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])


def w_pair_matrix(n):
    m = np.zeros((4, 4))
    m[0, 0] = n - 2
    m[1:3, 1:3] = 1
    return m / n


def sympy_w_pair(n):
    return sp.Matrix([[n - 2, 0, 0, 0], [0, 1, 1, 0], [0, 1, 1, 0], [0, 0, 0, 0]]) / n


# --- hermitian_eigenvalues -------------------------------------------------


def test_eigenvalues_identity():
    assert np.allclose(hermitian_eigenvalues(I2), [1, 1])


def test_eigenvalues_pauli_y():
    assert np.allclose(hermitian_eigenvalues(SIGMA_Y), [-1, 1])


def test_eigenvalues_w_pair_matrix_against_exact_spectrum():
    exact = sorted(float(v) for v, mult in sympy_w_pair(3).eigenvals().items() for _ in range(mult))
    assert exact == pytest.approx([0, 0, 1 / 3, 2 / 3], abs=1e-15)
    assert hermitian_eigenvalues(w_pair_matrix(3)) == pytest.approx(exact, abs=1e-14)


def test_eigenvalues_errors():
    with pytest.raises(NonSquare):
        hermitian_eigenvalues(np.ones((2, 3)))
    with pytest.raises(NotHermitian) as info:
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
    assert info.value.deviation == pytest.approx(1.0)


def test_eigenvalue_sum_matches_trace(rng):
    for _ in range(1000):
        d = int(rng.integers(1, 17))
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = g + g.conj().T
        ev = hermitian_eigenvalues(h)
        assert np.all(np.diff(ev) >= 0)
        assert abs(ev.sum() - np.trace(h).real) <= d * 1e-9


@seed(11)
@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(-10, 10)), arrays(np.float64, (5, 5), elements=st.floats(-10, 10)))
def test_eigenvalue_sum_matches_trace_hypothesis(re, im):
    g = re + 1j * im
    h = g + g.conj().T
    assert abs(hermitian_eigenvalues(h).sum() - np.trace(h).real) <= 5 * 1e-9


# --- concurrence_spectrum --------------------------------------------------


def test_spectrum_maximally_mixed():
    assert concurrence_spectrum(np.eye(4) / 4) == pytest.approx([0.25] * 4, abs=1e-15)


def test_spectrum_product_projector():
    assert concurrence_spectrum(np.diag([1.0, 0, 0, 0])) == pytest.approx([0] * 4, abs=1e-15)


def test_spectrum_bell_state():
    psi = np.array([0, 1, 1, 0]) / np.sqrt(2)
    assert concurrence_spectrum(np.outer(psi, psi)) == pytest.approx([1, 0, 0, 0], abs=1e-12)


def test_spectrum_errors():
    with pytest.raises(NotDensityLike):
        concurrence_spectrum(np.eye(2) / 2)
    with pytest.raises(NotDensityLike):
        concurrence_spectrum(np.eye(4))
    with pytest.raises(NotDensityLike):
        concurrence_spectrum(np.triu(np.ones((4, 4))) / 4)


def test_spectrum_of_pure_states_has_single_nonzero(rng):
    for _ in range(300):
        psi = random_ket(rng, 4)
        lam = concurrence_spectrum(np.outer(psi, psi.conj()))
        assert np.all(np.diff(lam) <= 0)
        assert lam[1:] == pytest.approx([0, 0, 0], abs=1e-9)
        # pure-state oracle: l1 = |<psi| Y⊗Y |psi*>|
        flip = abs(psi.conj() @ kron(SIGMA_Y, SIGMA_Y) @ psi.conj())
        assert lam[0] == pytest.approx(flip, abs=1e-12)


# --- partial_trace ---------------------------------------------------------


def test_partial_trace_product_state():
    rho = kron(P0, P1)
    assert np.allclose(partial_trace(rho, 2, [0]), P0)
    assert np.allclose(partial_trace(rho, 2, [1]), P1)


def test_partial_trace_w_state_gives_pair_matrix():
    full = to_full(build_symmetric(3, 0)).data
    assert np.allclose(partial_trace(full, 3, [1, 2]), w_pair_matrix(3), atol=1e-15)


def test_partial_trace_of_transformed_state_matches_reduced_forms(rng):
    from wtangle.sampling import SamplerConfig, sample_state

    m = sample_state(SamplerConfig(5, 3, "mixed-general")).matrix()
    alpha = m[0, 0]
    x1, x2, x3 = m[0, 1:]
    b1, b2, b3 = m[1, 1], m[2, 2], m[3, 3]
    g, h, t = m[1, 2], m[1, 3], m[2, 3]
    c = np.conj
    ab = np.array([[alpha + b1, x2, x3, 0], [c(x2), b2, t, 0], [c(x3), c(t), b3, 0], [0, 0, 0, 0]])
    ac = np.array([[alpha + b2, x1, x3, 0], [c(x1), b1, h, 0], [c(x3), c(h), b3, 0], [0, 0, 0, 0]])
    bc = np.array([[alpha + b3, x1, x2, 0], [c(x1), b1, g, 0], [c(x2), c(g), b2, 0], [0, 0, 0, 0]])
    from wtangle.states import WSubspaceState

    full = to_full(WSubspaceState.from_matrix(m)).data
    assert np.allclose(partial_trace(full, 3, [0, 1]), ab, atol=1e-15)
    assert np.allclose(partial_trace(full, 3, [0, 2]), ac, atol=1e-15)
    assert np.allclose(partial_trace(full, 3, [1, 2]), bc, atol=1e-15)


def test_partial_trace_against_brute_force(rng):
    for n in (2, 3, 4):
        rho = random_density(rng, 1 << n)
        for keep in ([0], [n - 1], [0, n - 1], list(range(n - 1))):
            assert np.allclose(partial_trace(rho, n, keep), brute_partial_trace(rho, n, keep), atol=1e-14)


def test_partial_trace_composes(rng):
    rho = random_density(rng, 32)
    one_step = partial_trace(rho, 5, [1, 3])
    two_step = partial_trace(partial_trace(rho, 5, [0, 1, 3]), 3, [1, 2])
    assert np.allclose(one_step, two_step, atol=1e-14)
    assert np.trace(one_step) == pytest.approx(1.0)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        partial_trace(np.eye(6), 3, [0])


# --- partial_transpose -----------------------------------------------------


def test_partial_transpose_product_state_stays_positive(rng):
    ra, rb = random_density(rng, 2), random_density(rng, 2)
    pt = partial_transpose(kron(ra, rb), 2, [1])
    assert np.allclose(pt, kron(ra, rb.T))
    assert hermitian_eigenvalues(pt).min() >= -1e-12


def test_partial_transpose_bell_min_eigenvalue():
    psi = np.array([0, 1, 1, 0]) / np.sqrt(2)
    assert hermitian_eigenvalues(partial_transpose(np.outer(psi, psi), 2, [1])).min() == pytest.approx(-0.5)


def test_partial_transpose_w_pair_min_eigenvalue():
    pt = sympy_w_pair(3)
    # swap the |00><11| and |01><10| blocks by hand: transpose of qubit 1
    pt_exact = sp.Matrix(4, 4, lambda i, j: pt[(i & 2) | (j & 1), (j & 2) | (i & 1)])
    exact_min = min(sp.re(sp.N(v, 30)) for v in pt_exact.eigenvals())
    assert float(exact_min) == pytest.approx((1 - np.sqrt(5)) / 6, abs=1e-15)
    got = hermitian_eigenvalues(partial_transpose(w_pair_matrix(3), 2, [1])).min()
    assert got == pytest.approx((1 - np.sqrt(5)) / 6, abs=1e-14)


def test_partial_transpose_is_exact_involution(rng):
    for n in (1, 2, 3, 4):
        rho = random_density(rng, 1 << n)
        for qs in ([0], [n - 1], list(range(n))):
            once = partial_transpose(rho, n, qs)
            assert np.array_equal(partial_transpose(once, n, qs), rho)
            assert np.trace(once) == pytest.approx(np.trace(rho))
            assert np.allclose(once, once.conj().T)


def test_partial_trace_and_transpose_commute_on_disjoint_sets(rng):
    rho = random_density(rng, 16)
    a = partial_trace(partial_transpose(rho, 4, [0]), 4, [0, 2])
    b = partial_transpose(partial_trace(rho, 4, [0, 2]), 2, [0])
    assert np.max(np.abs(a - b)) <= 1e-12


def test_partial_transpose_batched_matches_single(rng):
    stack = np.stack([random_density(rng, 4) for _ in range(5)])
    batched = partial_transpose(stack, 2, [1])
    for k in range(5):
        assert np.array_equal(batched[k], partial_transpose(stack[k], 2, [1]))


# --- kron ------------------------------------------------------------------


def test_kron_identity():
    assert np.array_equal(kron(I2, I2), np.eye(4))


def test_kron_sigma_y_squared():
    yy = kron(SIGMA_Y, SIGMA_Y)
    assert np.allclose(np.fliplr(yy).diagonal(), [-1, 1, 1, -1])
    assert np.count_nonzero(yy) == 4


def test_kron_projectors():
    assert np.array_equal(kron(P0, P1), np.diag([0, 1, 0, 0]))
