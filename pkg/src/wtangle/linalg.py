"""Dense complex matrix helpers for small qubit systems.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Qubit 0 is the
leftmost tensor factor, so in ``|001>`` qubits 0 and 1 are in ``|0>`` and
qubit 2 is in ``|1>``; basis index ``b`` of an n-qubit ket has qubit ``q`` in
bit position ``n - 1 - q``.

The qubit-level functions accept arrays with leading batch dimensions,
``(..., 2**n, 2**n)``, which the measure code uses to process every qubit pair
of a state in one call.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .errors import (
    DimensionMismatch,
    NonSquare,
    NotDensityLike,
    NotHermitian,
    NumericalInstability,
    ValidationError,
)

DEFAULT_TOL = 1e-9
DEFAULT_CAP = 12

# Eigenvalues of the spin-flip product R below this are rounding residue of
# exact zeros; their square roots would otherwise leak ~1e-8 into concurrence.
SPIN_FLIP_RANK_FLOOR = 64 * np.finfo(float).eps

SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def qubit_count(dim: int) -> int:
    """Return n such that ``dim == 2**n``."""
    n = int(dim).bit_length() - 1
    if n < 0 or 1 << n != dim:
        raise DimensionMismatch(f"dimension {dim} is not a power of two")
    return n


def check_qubits(members: Iterable[int], n: int) -> tuple[int, ...]:
    """Validate a qubit index set and return it as a strictly increasing tuple."""
    out = tuple(sorted(int(q) for q in members))
    if len(set(out)) != len(out):
        raise ValidationError(f"repeated qubit index in {out}")
    if out and (out[0] < 0 or out[-1] >= n):
        raise ValidationError(f"qubit indices {out} out of range for {n} qubits")
    return out


def _check_qubit_operator(rho: np.ndarray, n: int) -> None:
    d = 1 << n
    if rho.ndim < 2 or rho.shape[-2:] != (d, d):
        raise DimensionMismatch(f"expected trailing shape ({d}, {d}) for {n} qubits, got {rho.shape}")


def hermiticity_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - np.swapaxes(m, -1, -2).conj()))) if m.size else 0.0


def hermitian_eigenvalues(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Raises
    ------
    NonSquare
        If ``m`` is not square.
    NotHermitian
        If any entry of ``m - m^H`` exceeds ``tol`` in magnitude.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"matrix is {a.shape[0]}x{a.shape[1]}")
    dev = hermiticity_deviation(a)
    if dev > tol:
        raise NotHermitian(dev, tol)
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))


def spin_flip_spectra(rhos: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Batched version of :func:`concurrence_spectrum` without input validation.

    ``rhos`` has shape ``(..., 4, 4)``; the result has shape ``(..., 4)``.
    """
    rhos = np.asarray(rhos, dtype=complex)
    flipped = SIGMA_YY @ rhos.conj() @ SIGMA_YY
    ev = np.linalg.eigvals(rhos @ flipped)
    worst_imag = float(np.max(np.abs(ev.imag))) if ev.size else 0.0
    if worst_imag > tol:
        raise NumericalInstability(f"spin-flip eigenvalue has imaginary part {worst_imag:.3e}")
    re = ev.real
    if re.size and re.min() < -tol:
        raise NumericalInstability(f"spin-flip eigenvalue {re.min():.3e} is negative")
    re = np.where(re < SPIN_FLIP_RANK_FLOOR, 0.0, re)
    return -np.sort(-np.sqrt(re), axis=-1)


def concurrence_spectrum(rho, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Descending square roots of the eigenvalues of ``rho (Y⊗Y) rho* (Y⊗Y)``.

    Eigenvalues are taken from the non-Hermitian product directly. Imaginary
    parts and negative real parts up to ``tol`` are dropped; eigenvalues below
    ``SPIN_FLIP_RANK_FLOOR`` are treated as exact zeros.
    """
    a = as_matrix(rho)
    if a.shape != (4, 4):
        raise NotDensityLike(f"two-qubit state must be 4x4, got {a.shape}")
    dev = hermiticity_deviation(a)
    if dev > tol:
        raise NotDensityLike(f"not Hermitian (deviation {dev:.3e})")
    tr = np.trace(a)
    if abs(tr - 1) > tol:
        raise NotDensityLike(f"trace {tr:.12g} != 1")
    return spin_flip_spectra(a, tol)


def partial_trace(rho, n: int, keep: Iterable[int]) -> np.ndarray:
    """Trace out every qubit not in ``keep``.

    The kept qubits stay in increasing order. Leading batch dimensions of
    ``rho`` are preserved.
    """
    rho = np.asarray(rho, dtype=complex)
    _check_qubit_operator(rho, n)
    keep = check_qubits(keep, n)
    gone = [q for q in range(n) if q not in keep]
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(batch + (2,) * (2 * n))
    order = list(keep) + gone
    perm = list(range(nb)) + [nb + q for q in order] + [nb + n + q for q in order]
    dk, dg = 1 << len(keep), 1 << len(gone)
    t = t.transpose(perm).reshape(batch + (dk, dg, dk, dg))
    return np.trace(t, axis1=nb + 1, axis2=nb + 3)


def partial_transpose(rho, n: int, transpose_set: Iterable[int]) -> np.ndarray:
    """Transpose the qubits in ``transpose_set``; a pure index permutation."""
    rho = np.asarray(rho, dtype=complex)
    _check_qubit_operator(rho, n)
    qs = check_qubits(transpose_set, n)
    batch = rho.shape[:-2]
    nb = len(batch)
    axes = list(range(nb + 2 * n))
    for q in qs:
        axes[nb + q], axes[nb + n + q] = axes[nb + n + q], axes[nb + q]
    t = rho.reshape(batch + (2,) * (2 * n)).transpose(axes)
    return t.reshape(rho.shape)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))
