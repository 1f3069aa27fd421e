"""W-class states in the vacuum-plus-single-excitation subspace.

Compact representation
----------------------
An n-qubit state supported on ``{|0...0>, e_1, ..., e_n}`` is stored as the
(n+1)x(n+1) block matrix::

    [[A,    X    ],
     [X^H,  B    ]]

with ``X[i] = <0...0| rho |e_{i+1}>`` (first-row convention) and
``B[i, j] = <e_{i+1}| rho |e_{j+1}>``.

Excitation ordering follows ``e_1 = |0...01>, e_2 = |0...010>, ...,
e_n = |10...0>``. Excitation index ``i`` (0-based) therefore flips qubit
``n - 1 - i`` and sits at full-space basis index ``2**i``. Use
:func:`excitation_of_qubit` / :func:`qubit_of_excitation` to convert.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    CapExceeded,
    DimensionMismatch,
    InvalidQubitCount,
    LengthMismatch,
    NormViolation,
    NotHermitian,
    NotPositive,
    TraceViolation,
    ValidationError,
)
from .linalg import DEFAULT_CAP, DEFAULT_TOL, as_matrix, hermiticity_deviation, qubit_count

STRUCT_TOL = 1e-10
PSD_TOL = 1e-9


def excitation_of_qubit(q: int, n: int) -> int:
    if not 0 <= q < n:
        raise IndexError(f"qubit {q} out of range for {n} qubits")
    return n - 1 - q


def qubit_of_excitation(i: int, n: int) -> int:
    if not 0 <= i < n:
        raise IndexError(f"excitation {i} out of range for {n} qubits")
    return n - 1 - i


def subspace_indices(n: int) -> np.ndarray:
    """Full-space basis indices of ``|0...0>, e_1, ..., e_n``."""
    return np.array([0] + [1 << i for i in range(n)], dtype=np.int64)


def _check_n(n: int, minimum: int = 1) -> int:
    if int(n) != n or n < minimum:
        raise InvalidQubitCount(f"qubit count must be an integer >= {minimum}, got {n}")
    return int(n)


@dataclass(eq=False)
class WSubspaceState:
    """Compact (n+1)-dimensional density matrix; see the module docstring."""

    n: int
    A: float
    X: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        self.n = _check_n(self.n)
        a = complex(self.A)
        if abs(a.imag) > STRUCT_TOL:
            raise ValidationError(f"vacuum population A must be real, got {a}")
        self.A = a.real
        self.X = np.asarray(self.X, dtype=complex).reshape(-1)
        self.B = np.asarray(self.B, dtype=complex)
        if self.X.shape != (self.n,):
            raise LengthMismatch(f"X has length {self.X.size}, expected {self.n}")
        if self.B.shape != (self.n, self.n):
            raise DimensionMismatch(f"B has shape {self.B.shape}, expected ({self.n}, {self.n})")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.B)) and np.isfinite(self.A)):
            raise ValidationError("state has non-finite entries")

    @classmethod
    def from_matrix(cls, m, validate: bool = True) -> "WSubspaceState":
        m = as_matrix(m)
        if m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise DimensionMismatch(f"compact matrix must be square with size >= 2, got {m.shape}")
        dev = hermiticity_deviation(m)
        if dev > STRUCT_TOL:
            raise NotHermitian(dev, STRUCT_TOL)
        state = cls(m.shape[0] - 1, m[0, 0].real, m[0, 1:].copy(), m[1:, 1:].copy())
        if validate:
            state.validate()
        return state

    @classmethod
    def from_vector(cls, c) -> "WSubspaceState":
        """Pure state from compact amplitudes ``(c_vac, c_1, ..., c_n)``."""
        c = np.asarray(c, dtype=complex).reshape(-1)
        if c.size < 2:
            raise DimensionMismatch("need at least one excitation amplitude")
        norm = np.linalg.norm(c)
        if abs(norm - 1) > STRUCT_TOL:
            raise NormViolation(f"amplitude vector has norm {norm:.12g}")
        return cls.from_matrix(np.outer(c, c.conj()))

    def matrix(self) -> np.ndarray:
        m = np.empty((self.n + 1, self.n + 1), dtype=complex)
        m[0, 0] = self.A
        m[0, 1:] = self.X
        m[1:, 0] = self.X.conj()
        m[1:, 1:] = self.B
        return m

    def min_eigenvalue(self) -> float:
        m = self.matrix()
        return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])

    def validate(self, psd_tol: float = PSD_TOL) -> "WSubspaceState":
        dev = hermiticity_deviation(self.B)
        if dev > STRUCT_TOL:
            raise NotHermitian(dev, STRUCT_TOL)
        tr = self.A + float(np.trace(self.B).real)
        if abs(tr - 1) > STRUCT_TOL:
            raise TraceViolation(f"A + tr(B) = {tr:.15g}, expected 1")
        lo = self.min_eigenvalue()
        if lo < -psd_tol:
            raise NotPositive(lo, psd_tol)
        return self

    def purity(self) -> float:
        m = self.matrix()
        return float(np.real(np.vdot(m, m)))

    def max_coherence(self) -> tuple[int, int, float]:
        """Largest ``|B[s, r]|`` over s < r as ``(s, r, magnitude)``."""
        if self.n < 2:
            return (0, 0, 0.0)
        iu = np.triu_indices(self.n, 1)
        mags = np.abs(self.B[iu])
        k = int(np.argmax(mags))
        return int(iu[0][k]), int(iu[1][k]), float(mags[k])

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "A": float(self.A),
            "X": [[float(z.real), float(z.imag)] for z in self.X],
            "B": [[[float(z.real), float(z.imag)] for z in row] for row in self.B],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any], validate: bool = True) -> "WSubspaceState":
        try:
            n = d["n"]
            A = d["A"]
            X = [complex(re, im) for re, im in d["X"]]
            B = [[complex(re, im) for re, im in row] for row in d["B"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed state JSON: {exc!r}") from exc
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValidationError("state JSON field 'n' must be an integer")
        if isinstance(A, (list, dict, str)) or A is None:
            raise ValidationError("state JSON field 'A' must be a number")
        state = cls(n, A, np.array(X, dtype=complex), np.array(B, dtype=complex))
        if validate:
            state.validate()
        return state

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str, validate: bool = True) -> "WSubspaceState":
        return cls.from_dict(json.loads(text), validate=validate)


@dataclass(frozen=True)
class SymmetricWState:
    """``(a|0...0> + sum of all single excitations) / sqrt(|a|^2 + n)``."""

    n: int
    a: complex = 0j

    def __post_init__(self):
        _check_n(self.n, 3)

    def amplitudes(self) -> np.ndarray:
        c = np.ones(self.n + 1, dtype=complex)
        c[0] = self.a
        return c / np.sqrt(abs(self.a) ** 2 + self.n)


@dataclass(frozen=True)
class AsymmetricWState:
    """``sum_i k_i e_i`` with ``k[0]`` on ``|0...01>``."""

    n: int
    k: tuple[complex, ...] = field(default=())

    def __post_init__(self):
        _check_n(self.n, 3)
        if len(self.k) != self.n:
            raise LengthMismatch(f"expected {self.n} coefficients, got {len(self.k)}")
        norm2 = float(sum(abs(z) ** 2 for z in self.k))
        if abs(norm2 - 1) > STRUCT_TOL:
            raise NormViolation(f"sum |k_i|^2 = {norm2:.15g}, expected 1")

    def amplitudes(self) -> np.ndarray:
        return np.concatenate([[0j], np.asarray(self.k, dtype=complex)])


def build_symmetric(n: int, a: complex = 0j) -> WSubspaceState:
    return WSubspaceState.from_vector(SymmetricWState(n, a).amplitudes())


def build_asymmetric(n: int, k) -> WSubspaceState:
    state = AsymmetricWState(n, tuple(complex(z) for z in k))
    c = state.amplitudes()
    # re-normalise the last few ulps so from_vector's stricter check passes
    return WSubspaceState.from_vector(c / np.linalg.norm(c))


def compact_to_ket(c, n: int | None = None) -> np.ndarray:
    """Embed compact amplitudes ``(c_vac, c_1..c_n)`` into a 2**n ket."""
    c = np.asarray(c, dtype=complex).reshape(-1)
    n = c.size - 1 if n is None else n
    psi = np.zeros(1 << n, dtype=complex)
    psi[subspace_indices(n)] = c
    return psi


@dataclass(eq=False)
class DensityMatrix:
    """Validated density matrix tagged with its qubit count and representation.

    ``kind`` is ``"full"`` for a 2**n x 2**n matrix or ``"compact"`` for the
    (n+1)x(n+1) W-subspace block.
    """

    data: np.ndarray
    n: int
    kind: str = "full"

    @classmethod
    def from_array(cls, m, kind: str = "full", tol: float = DEFAULT_TOL) -> "DensityMatrix":
        a = as_matrix(m)
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {a.shape}")
        if kind == "full":
            n = qubit_count(a.shape[0])
        elif kind == "compact":
            n = a.shape[0] - 1
        else:
            raise ValidationError(f"unknown representation kind {kind!r}")
        dev = hermiticity_deviation(a)
        if dev > tol:
            raise NotHermitian(dev, tol)
        tr = np.trace(a)
        if abs(tr - 1) > tol:
            raise TraceViolation(f"trace {tr:.15g}, expected 1")
        lo = float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])
        if lo < -tol:
            raise NotPositive(lo, tol)
        return cls(a, n, kind)

    @classmethod
    def from_ket(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls.from_array(np.outer(psi, psi.conj()))


@dataclass(eq=False)
class BipartiteReduction:
    """Two-qubit reduction in the basis ``|00>, |01>, |10>, |11>`` of (s, r), s < r."""

    s: int
    r: int
    rho: np.ndarray


def to_full(state: WSubspaceState, cap: int = DEFAULT_CAP) -> DensityMatrix:
    if state.n > cap:
        raise CapExceeded(state.n, cap)
    idx = subspace_indices(state.n)
    full = np.zeros((1 << state.n, 1 << state.n), dtype=complex)
    full[np.ix_(idx, idx)] = state.matrix()
    return DensityMatrix(full, state.n, "full")


def pair_list(n: int) -> list[tuple[int, int]]:
    return [(s, r) for s in range(n) for r in range(s + 1, n)]


def _check_pairs(pairs, n: int) -> np.ndarray:
    qs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if np.any(qs < 0) or np.any(qs >= n) or np.any(qs[:, 0] == qs[:, 1]):
        raise IndexError(f"invalid qubit pair in {pairs} for {n} qubits")
    return qs


def reduce_pairs_stacked(A, X, B, pairs) -> np.ndarray:
    """Pair reductions of a stack of compact states.

    ``A`` has shape ``(S,)``, ``X`` ``(S, n)`` and ``B`` ``(S, n, n)``; the
    result has shape ``(S, P, 4, 4)`` for ``P`` pairs.
    """
    A = np.asarray(A, dtype=float)
    X = np.asarray(X, dtype=complex)
    B = np.asarray(B, dtype=complex)
    S, n = X.shape
    if len(pairs) == 0:
        return np.zeros((S, 0, 4, 4), dtype=complex)
    qs = _check_pairs(pairs, n)
    lo, hi = qs.min(axis=1), qs.max(axis=1)
    i_lo, i_hi = n - 1 - lo, n - 1 - hi
    pops = B.diagonal(axis1=1, axis2=2).real
    out = np.zeros((S, qs.shape[0], 4, 4), dtype=complex)
    out[..., 0, 0] = (A + pops.sum(axis=1))[:, None] - pops[:, i_lo] - pops[:, i_hi]
    # |01> excites the higher-numbered qubit, |10> the lower one
    out[..., 0, 1] = X[:, i_hi]
    out[..., 0, 2] = X[:, i_lo]
    out[..., 1, 1] = B[:, i_hi, i_hi]
    out[..., 1, 2] = B[:, i_hi, i_lo]
    out[..., 2, 2] = B[:, i_lo, i_lo]
    out[..., 1, 0] = out[..., 0, 1].conj()
    out[..., 2, 0] = out[..., 0, 2].conj()
    out[..., 2, 1] = out[..., 1, 2].conj()
    return out


def reduce_pairs(state: WSubspaceState, pairs=None) -> np.ndarray:
    """Two-qubit reductions for many qubit pairs at once, shape ``(P, 4, 4)``.

    Defaults to every pair ``s < r`` in :func:`pair_list` order.
    """
    pairs = pair_list(state.n) if pairs is None else pairs
    return reduce_pairs_stacked([state.A], state.X[None], state.B[None], pairs)[0]


def reduce_pair(state: WSubspaceState, s: int, r: int) -> BipartiteReduction:
    """Reduced state of qubits ``s`` and ``r`` without building the full matrix."""
    if s == r:
        raise IndexError("pair indices must differ")
    if not (0 <= s < state.n and 0 <= r < state.n):
        raise IndexError(f"pair ({s}, {r}) out of range for {state.n} qubits")
    lo, hi = sorted((s, r))
    return BipartiteReduction(lo, hi, reduce_pairs(state, [(lo, hi)])[0])


def single_qubit_reductions(state: WSubspaceState) -> np.ndarray:
    """One-qubit reductions for qubits ``0..n-1``, shape ``(n, 2, 2)``."""
    n = state.n
    exc = n - 1 - np.arange(n)
    pops = state.B.diagonal().real[exc]
    out = np.zeros((n, 2, 2), dtype=complex)
    out[:, 0, 0] = 1 - pops
    out[:, 1, 1] = pops
    out[:, 0, 1] = state.X[exc]
    out[:, 1, 0] = state.X[exc].conj()
    return out


def zero_coherences(state: WSubspaceState) -> WSubspaceState:
    """Drop every excitation-excitation coherence ``B[s, r]``, s != r."""
    out = WSubspaceState(state.n, state.A, state.X.copy(), np.diag(state.B.diagonal()))
    return out.validate()
