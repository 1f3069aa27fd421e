"""Constructive separability for zero-coherence W-subspace states.

A compact state whose excitation block ``B`` is diagonal decomposes as::

    rho = p_0 |0...0><0...0| + sum_i p_i |psi_i><psi_i|

    p_i   = B_ii + |X_i|^2 / B_ii
    p_0   = A - sum_i |X_i|^2 / B_ii
    psi_i = ((X_i / sqrt(B_ii)) |0...0> + sqrt(B_ii) e_i) / sqrt(p_i)

Each ``psi_i`` only touches one qubit, so it is a product state, and
:func:`certify` returns the ensemble together with its reconstruction error.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import CoherencesNotZero, NegativeWeight, SylvesterViolation, WTangleError
from .linalg import DEFAULT_CAP, partial_trace
from .measures import concurrences_batch, negativities_batch
from .sampling import SamplerConfig, sample_state
from .states import (
    WSubspaceState,
    pair_list,
    reduce_pairs,
    reduce_pairs_stacked,
    to_full,
)

DEFAULT_COHERENCE_TOL = 1e-9
WEIGHT_CLAMP = 1e-12
NEGATIVE_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class ProductVector:
    """``|0...0>`` or ``vacuum_amp |0...0> + exc_amp e_excitation``."""

    n: int
    kind: str
    excitation: int | None = None
    vacuum_amp: complex = 1.0 + 0j
    exc_amp: complex = 0j

    @classmethod
    def vacuum(cls, n: int) -> "ProductVector":
        return cls(n, "vacuum")

    def amplitudes(self) -> np.ndarray:
        """Compact amplitudes ``(c_vac, c_1, ..., c_n)``."""
        c = np.zeros(self.n + 1, dtype=complex)
        c[0] = self.vacuum_amp
        if self.kind == "two-term":
            c[1 + self.excitation] = self.exc_amp
        return c

    def norm_error(self) -> float:
        return abs(abs(self.vacuum_amp) ** 2 + abs(self.exc_amp) ** 2 - 1)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "excitation": self.excitation,
            "vacuum_amp": [float(self.vacuum_amp.real), float(self.vacuum_amp.imag)],
            "exc_amp": [float(self.exc_amp.real), float(self.exc_amp.imag)],
        }


@dataclass
class SeparabilityCertificate:
    weights: list[float]
    vectors: list[ProductVector]
    reconstruction_residual: float
    max_coherence: float = 0.0

    def ensemble_matrix(self) -> np.ndarray:
        n = self.vectors[0].n if self.vectors else 0
        out = np.zeros((n + 1, n + 1), dtype=complex)
        for p, v in zip(self.weights, self.vectors):
            c = v.amplitudes()
            out += p * np.outer(c, c.conj())
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "weights": list(self.weights),
            "vectors": [v.to_dict() for v in self.vectors],
            "residual": self.reconstruction_residual,
            "max_coherence": self.max_coherence,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def certify(state: WSubspaceState, coherence_tol: float = DEFAULT_COHERENCE_TOL) -> SeparabilityCertificate:
    """Build and check the product-state ensemble of a zero-coherence state.

    Raises
    ------
    CoherencesNotZero
        Some ``|B[s, r]|`` (s != r) exceeds ``coherence_tol``.
    SylvesterViolation
        ``B_ii <= coherence_tol`` while ``|X_i| > sqrt(coherence_tol)``.
    NegativeWeight
        ``p_0 < -1e-9``, i.e. the input was not positive semidefinite.
    """
    n = state.n
    s, r, mag = state.max_coherence()
    if mag > coherence_tol:
        raise CoherencesNotZero(s, r, mag, coherence_tol)

    pops = state.B.diagonal().real
    weights: list[float] = []
    vectors: list[ProductVector] = []
    drained = 0.0
    for i in range(n):
        b, x = float(pops[i]), complex(state.X[i])
        if b <= coherence_tol:
            # zero population forces zero vacuum coherence; the term is dropped
            if abs(x) > math.sqrt(coherence_tol):
                raise SylvesterViolation(i, b, abs(x))
            p, vec = b, ProductVector(n, "two-term", i, 0j, 1.0 + 0j)
        else:
            shift = abs(x) ** 2 / b
            p = b + shift
            drained += shift
            sp = math.sqrt(p)
            vec = ProductVector(n, "two-term", i, x / math.sqrt(b) / sp, math.sqrt(b) / sp)
        if p >= WEIGHT_CLAMP:
            weights.append(p)
            vectors.append(vec)

    p0 = state.A - drained
    if p0 < -NEGATIVE_WEIGHT_TOL:
        raise NegativeWeight(p0)
    if p0 >= WEIGHT_CLAMP:
        weights.insert(0, p0)
        vectors.insert(0, ProductVector.vacuum(n))

    cert = SeparabilityCertificate(weights, vectors, 0.0, mag)
    if vectors:
        cert.reconstruction_residual = float(np.max(np.abs(cert.ensemble_matrix() - state.matrix())))
    else:
        cert.reconstruction_residual = float(np.max(np.abs(state.matrix())))
    return cert


@dataclass
class PositivityReport:
    determinant: float
    sylvester_minors: list[float]
    feasible: bool
    vacuum_margin: float


def check_positivity(state: WSubspaceState, tol: float = DEFAULT_COHERENCE_TOL) -> PositivityReport:
    """Determinant and 2x2 minors of the arrow-shaped zero-coherence matrix.

    ``determinant = A prod_i B_ii - sum_i |X_i|^2 prod_{j != i} B_jj``.
    ``feasible`` holds when ``A >= sum_i |X_i|^2 / B_ii`` (within ``tol``),
    where a term with ``B_ii <= tol`` is dropped if ``|X_i| <= sqrt(tol)``
    and makes the state infeasible otherwise. ``state`` need not be a valid
    density matrix; off-diagonal ``B`` entries are ignored.
    """
    pops = state.B.diagonal().real
    x2 = np.abs(state.X) ** 2
    A = float(state.A)
    n = state.n
    det = A * float(np.prod(pops))
    for i in range(n):
        det -= float(x2[i]) * float(np.prod(np.delete(pops, i)))
    minors = [A * float(pops[i]) - float(x2[i]) for i in range(n)]

    feasible = A >= -tol and bool(np.all(pops >= -tol))
    margin = A
    for i in range(n):
        if pops[i] <= tol:
            if math.sqrt(x2[i]) > math.sqrt(tol):
                feasible = False
        else:
            margin -= float(x2[i]) / float(pops[i])
    feasible = feasible and margin >= -tol
    return PositivityReport(det, minors, feasible, margin)


# --- randomized audit ------------------------------------------------------


@dataclass
class AuditFailure:
    index: int
    reason: str
    state: dict[str, Any]


@dataclass
class AuditReport:
    n: int
    seed: int
    samples: int
    passes: int = 0
    failures: list[AuditFailure] = field(default_factory=list)
    max_residual: float = 0.0
    max_pair_concurrence: float = 0.0
    max_pair_negativity: float = 0.0
    max_vector_entanglement: float = 0.0

    @property
    def failed(self) -> int:
        return len(self.failures)

    def summary_line(self) -> str:
        return f"{self.passes}/{self.samples} pass (n={self.n}, seed={self.seed})"

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "seed": self.seed,
            "samples": self.samples,
            "passes": self.passes,
            "failed": self.failed,
            "max_residual": self.max_residual,
            "max_pair_concurrence": self.max_pair_concurrence,
            "max_pair_negativity": self.max_pair_negativity,
            "max_vector_entanglement": self.max_vector_entanglement,
            "failures": [f.__dict__ for f in self.failures],
        }


AUDIT_TOL = 1e-9


def _pair_measures(reds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return concurrences_batch(reds), negativities_batch(reds, 2, [1])


def vector_entanglement(vectors: list[ProductVector], pairs=None) -> float:
    """Largest pair concurrence, pair negativity or one-tangle over ``vectors``.

    A pure state whose one-tangles all vanish is a full product state, so a
    zero return certifies every vector as fully separable.
    """
    if not vectors:
        return 0.0
    c = np.stack([v.amplitudes() for v in vectors])
    vac, exc = c[:, 0], c[:, 1:]
    A = np.abs(vac) ** 2
    X = vac[:, None] * exc.conj()
    B = exc[:, :, None] * exc[:, None, :].conj()
    pairs = pair_list(vectors[0].n) if pairs is None else pairs
    reds = reduce_pairs_stacked(A, X, B, pairs)
    conc = concurrences_batch(reds)
    neg = negativities_batch(reds, 2, [1])
    pops = np.abs(exc) ** 2
    one = np.abs(4 * ((1 - pops) * pops - np.abs(X) ** 2))
    return float(max(conc.max(initial=0.0), neg.max(initial=0.0), one.max(initial=0.0)))


def audit_sample(state: WSubspaceState, cap: int = DEFAULT_CAP, full_check: bool = True) -> tuple[str | None, dict[str, float]]:
    """Run every audit check on one state. Returns ``(failure_reason, stats)``."""
    stats = {"residual": 0.0, "conc": 0.0, "neg": 0.0, "vec": 0.0}
    try:
        cert = certify(state)
    except WTangleError as exc:
        return f"certify raised {type(exc).__name__}: {exc}", stats
    stats["residual"] = cert.reconstruction_residual
    if cert.reconstruction_residual > AUDIT_TOL:
        return f"reconstruction residual {cert.reconstruction_residual:.3e}", stats

    pairs = pair_list(state.n)
    reds = reduce_pairs(state, pairs)
    if full_check and state.n <= cap:
        # compact reductions must agree with the full-space partial trace
        full = to_full(state, cap).data
        ref = np.stack([partial_trace(full, state.n, p) for p in pairs])
        dev = float(np.max(np.abs(ref - reds)))
        if dev > 1e-12:
            return f"compact reduction deviates from partial trace by {dev:.3e}", stats
    conc, neg = _pair_measures(reds)
    stats["conc"], stats["neg"] = float(conc.max()), float(neg.max())
    if stats["conc"] > AUDIT_TOL:
        return f"pair concurrence {stats['conc']:.3e}", stats
    if stats["neg"] > AUDIT_TOL:
        return f"pair negativity {stats['neg']:.3e}", stats

    for v in cert.vectors:
        if v.norm_error() > 1e-12:
            return f"certificate vector not normalised ({v.norm_error():.3e})", stats
    worst = vector_entanglement(cert.vectors, pairs)
    stats["vec"] = worst
    if worst > 1e-12:
        return f"certificate vector entangled ({worst:.3e})", stats
    return None, stats


def audit_theorem(sample_count: int, n: int, seed: int, workers: int = 1, cap: int = DEFAULT_CAP) -> AuditReport:
    """Sample zero-coherence states and check that each one certifies as separable.

    Sample ``i`` uses its own generator derived from ``(seed, i)``, so the
    result does not depend on ``workers``.
    """
    report = AuditReport(n=n, seed=seed, samples=sample_count)

    def run(i: int):
        st = sample_state(SamplerConfig(seed=seed, n=n, kind="mixed-zero-coherence"), index=i)
        return i, st, audit_sample(st, cap)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(sample_count)))
    else:
        results = [run(i) for i in range(sample_count)]

    for i, st, (reason, stats) in results:
        report.max_residual = max(report.max_residual, stats["residual"])
        report.max_pair_concurrence = max(report.max_pair_concurrence, stats["conc"])
        report.max_pair_negativity = max(report.max_pair_negativity, stats["neg"])
        report.max_vector_entanglement = max(report.max_vector_entanglement, stats["vec"])
        if reason is None:
            report.passes += 1
        else:
            report.failures.append(AuditFailure(i, reason, st.to_dict()))
    return report
