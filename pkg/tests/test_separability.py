import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wtangle.errors import CoherencesNotZero, NegativeWeight, SylvesterViolation
from wtangle.linalg import partial_trace
from wtangle.measures import negativity, one_tangle, pair_concurrences
from wtangle.sampling import SamplerConfig, sample_state
from wtangle.separability import (
    ProductVector,
    audit_sample,
    audit_theorem,
    certify,
    check_positivity,
    vector_entanglement,
)
from wtangle.states import WSubspaceState, build_symmetric, compact_to_ket, to_full, zero_coherences


def arrow(A, X, pops):
    X = np.asarray(X, dtype=complex)
    return WSubspaceState(len(X), A, X, np.diag(np.asarray(pops, dtype=complex)))


BOUNDARY = arrow(0.5, [1 / 6] * 3, [1 / 6] * 3)


# --- certify ---------------------------------------------------------------


def test_certify_diagonal_state():
    s = arrow(0.1, [0, 0, 0, 0], [0.2, 0.3, 0.15, 0.25])
    cert = certify(s)
    assert cert.weights == pytest.approx([0.1, 0.2, 0.3, 0.15, 0.25])
    assert cert.vectors[0].kind == "vacuum"
    for v in cert.vectors[1:]:
        assert v.vacuum_amp == 0 and v.exc_amp == 1
    assert cert.reconstruction_residual == 0


def test_certify_boundary_state():
    cert = certify(BOUNDARY)
    # p0 = 1/2 - 3 (1/36)/(1/6) = 0 is dropped; each p_i = 1/6 + 1/6
    assert len(cert.weights) == 3
    assert cert.weights == pytest.approx([1 / 3] * 3, abs=1e-15)
    assert sum(cert.weights) == pytest.approx(1, abs=1e-12)
    assert cert.reconstruction_residual <= 1e-15


@pytest.mark.parametrize("n", [3, 5, 8])
def test_certify_dephased_w(n):
    cert = certify(zero_coherences(build_symmetric(n, 0)))
    assert cert.weights == pytest.approx([1 / n] * n)
    assert [v.excitation for v in cert.vectors] == list(range(n))
    assert all(v.vacuum_amp == 0 for v in cert.vectors)


def test_certify_rejects_coherent_state():
    with pytest.raises(CoherencesNotZero) as info:
        certify(build_symmetric(3, 0))
    assert info.value.magnitude == pytest.approx(1 / 3)
    assert {info.value.s, info.value.r} <= {0, 1, 2}


def test_certify_sylvester_violation():
    s = arrow(0.5, [0.1, 0, 0], [0, 0.25, 0.25])
    with pytest.raises(SylvesterViolation) as info:
        certify(s)
    assert info.value.index == 0


def test_certify_negative_weight():
    with pytest.raises(NegativeWeight):
        certify(arrow(0.25, [0.5, 0, 0], [0.25, 0.25, 0.25]))


def test_certify_degenerate_population_is_dropped():
    cert = certify(arrow(0.5, [0, 0.1, 0], [0, 0.3, 0.2]))
    assert all(v.excitation != 0 for v in cert.vectors)
    assert cert.reconstruction_residual <= 1e-15


def test_certify_keeps_complex_phase():
    x = 0.05 * np.exp(1.1j)
    cert = certify(arrow(0.6, [x, 0, 0], [0.2, 0.1, 0.1]))
    v = next(v for v in cert.vectors if v.excitation == 0)
    p = next(p for p, w in zip(cert.weights, cert.vectors) if w is v)
    assert p * v.vacuum_amp * np.conj(v.exc_amp) == pytest.approx(x, abs=1e-15)


def test_certificate_json_shape():
    d = json.loads(certify(BOUNDARY).to_json())
    assert {"weights", "vectors", "residual"} <= set(d)
    assert set(d["vectors"][0]) == {"kind", "excitation", "vacuum_amp", "exc_amp"}


def test_certificate_soundness_and_weights():
    for n in (2, 3, 5, 7):
        for i in range(200):
            s = sample_state(SamplerConfig(70 + n, n, "mixed-zero-coherence"), i)
            cert = certify(s)
            assert cert.reconstruction_residual <= 1e-9
            assert min(cert.weights) >= 0
            assert sum(cert.weights) == pytest.approx(1, abs=1e-10)
            pops = s.B.diagonal().real
            p_i = pops + np.abs(s.X) ** 2 / pops
            p0 = s.A - np.sum(np.abs(s.X) ** 2 / pops)
            assert p0 == pytest.approx(1 - p_i.sum(), abs=1e-10)
            assert all(v.norm_error() <= 1e-12 for v in cert.vectors)


def test_certificate_vectors_are_product_states():
    s = sample_state(SamplerConfig(3, 4, "mixed-zero-coherence"))
    for v in certify(s).vectors:
        psi = compact_to_ket(v.amplitudes(), 4)
        assert max(pair_concurrences(psi).values()) <= 1e-12
        for q in range(4):
            assert negativity(psi, [q]) <= 1e-12
            assert one_tangle(psi, q) <= 1e-12
    assert vector_entanglement(certify(s).vectors) <= 1e-12


def test_two_term_vectors_are_product_for_any_amplitudes(rng):
    vecs = []
    for _ in range(200):
        n = int(rng.integers(2, 8))
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        u /= np.linalg.norm(u)
        vecs.append(ProductVector(n, "two-term", int(rng.integers(n)), u[0], u[1]))
    for v in vecs:
        assert vector_entanglement([v]) <= 1e-12


# --- check_positivity ------------------------------------------------------


def test_positivity_boundary_example():
    rep = check_positivity(BOUNDARY)
    assert rep.determinant == pytest.approx(0, abs=1e-15)
    assert rep.feasible
    assert rep.sylvester_minors == pytest.approx([0.5 / 6 - 1 / 36] * 3)


def test_positivity_infeasible_example():
    s = arrow(0.25, [0.5, 0, 0], [0.25, 0.25, 0.25])
    assert not check_positivity(s).feasible
    assert s.min_eigenvalue() < 0


def test_positivity_zero_population_term_dropped():
    rep = check_positivity(arrow(0.4, [0, 0.1, 0.1], [0, 0.3, 0.3]))
    assert rep.feasible
    assert rep.vacuum_margin == pytest.approx(0.4 - 2 * 0.01 / 0.3)


def test_positivity_determinant_matches_numpy(rng):
    for _ in range(200):
        n = int(rng.integers(2, 7))
        s = arrow(rng.random(), rng.normal(size=n) + 1j * rng.normal(size=n), rng.random(n))
        assert check_positivity(s).determinant == pytest.approx(np.linalg.det(s.matrix()).real, rel=1e-9, abs=1e-12)


def test_feasibility_matches_psd(rng):
    outcomes = set()
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        pops = rng.random(n)
        pops[rng.random(n) < 0.1] = 0.0
        if rng.random() < 0.05:
            pops[0] = -0.1
        X = (rng.normal(size=n) + 1j * rng.normal(size=n)) * rng.random() * 0.5
        X[pops == 0] *= rng.random() < 0.5
        s = arrow(rng.random(), X, pops)
        psd = s.min_eigenvalue() >= -1e-9
        assert check_positivity(s).feasible == psd
        outcomes.add(psd)
    assert outcomes == {True, False}


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_feasible_states_certify(n, seed):
    s = sample_state(SamplerConfig(seed, n, "mixed-zero-coherence"))
    assert check_positivity(s).feasible
    assert certify(s).reconstruction_residual <= 1e-9


# --- audit -----------------------------------------------------------------


def test_audit_empty():
    rep = audit_theorem(0, 3, 1)
    assert rep.samples == rep.passes == rep.failed == 0


def test_audit_n3():
    rep = audit_theorem(1000, 3, 2024)
    assert rep.passes == 1000 and rep.failed == 0
    assert rep.summary_line() == "1000/1000 pass (n=3, seed=2024)"


def test_audit_n6():
    rep = audit_theorem(100, 6, 7)
    assert rep.passes == 100
    assert rep.max_residual <= 1e-9


def test_audit_independent_of_workers():
    a = audit_theorem(40, 4, 99, workers=1).to_dict()
    b = audit_theorem(40, 4, 99, workers=4).to_dict()
    assert a == b


def test_audit_sample_reports_failure_as_data():
    reason, _ = audit_sample(build_symmetric(3, 0))
    assert "CoherencesNotZero" in reason


def test_audit_cross_check_uses_partial_trace():
    s = sample_state(SamplerConfig(1, 3, "mixed-zero-coherence"))
    full = to_full(s).data
    assert np.allclose(partial_trace(full, 3, [0, 1])[3], 0)
    assert audit_sample(s)[0] is None
