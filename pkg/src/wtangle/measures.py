"""Entanglement measures: concurrence, negativity, tangles and their sums.

State arguments may be a :class:`~wtangle.states.WSubspaceState`, a
:class:`~wtangle.states.DensityMatrix`, a 2**n x 2**n array, or a 1-D ket.
Compact states take the fast route through :func:`~wtangle.states.reduce_pairs`
wherever the measure allows it; everything else goes through the full space
and is capped at ``cap`` qubits.

The aggregate sums multiply by a normalisation constant ``Z``::

    sum_two_tangles = Z * sum_{s<r} C(s, r)**2
    sum_pi_tangles  = Z * sum_i pi_i

:data:`Z_PRESETS` holds the named constants.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    CapExceeded,
    EmptySequence,
    InvalidQubitCount,
    InvalidZ,
    NotPure,
    NumericalInstability,
    ValidationError,
    WrongQubitCount,
)
from .linalg import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    as_matrix,
    concurrence_spectrum,
    partial_trace,
    partial_transpose,
    qubit_count,
    spin_flip_spectra,
)
from .states import (
    BipartiteReduction,
    DensityMatrix,
    WSubspaceState,
    pair_list,
    reduce_pairs,
    reduce_pairs_stacked,
    single_qubit_reductions,
    to_full,
)

Z_PRESETS: dict[str, float] = {
    "three-qubit": 0.75,
    "large-n-two-tangle": 0.5,
    "large-n-pi": 0.25,
}

# differences of tangles landing in [-CLAMP_TOL, 0) are reported as 0
CLAMP_TOL = 1e-9
PURITY_TOL = 1e-9


def resolve_z(preset: str | None = None, z: float | None = None) -> float:
    """Pick a normalisation constant from an explicit value or a preset name."""
    if z is not None:
        return check_z(z)
    if preset is None:
        return 1.0
    try:
        return Z_PRESETS[preset]
    except KeyError:
        raise InvalidZ(f"unknown Z preset {preset!r}; choose from {sorted(Z_PRESETS)}") from None


def check_z(z: float) -> float:
    z = float(z)
    if not (math.isfinite(z) and z > 0):
        raise InvalidZ(f"Z must be a positive finite number, got {z}")
    return z


def _clamp(x: float) -> float:
    return 0.0 if -CLAMP_TOL <= x < 0 else x


def _full(state, cap: int = DEFAULT_CAP) -> tuple[np.ndarray, int]:
    """Full-space density matrix and qubit count of any accepted state form."""
    if isinstance(state, WSubspaceState):
        dm = to_full(state, cap)
        return dm.data, dm.n
    if isinstance(state, DensityMatrix):
        if state.kind == "compact":
            return _full(WSubspaceState.from_matrix(state.data), cap)
        rho = state.data
    else:
        a = np.asarray(state, dtype=complex)
        if a.ndim == 1:
            a = np.outer(a, a.conj())
        rho = as_matrix(a)
    if rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got {rho.shape}")
    n = qubit_count(rho.shape[0])
    if n > cap:
        raise CapExceeded(n, cap)
    return rho, n


def _qubits_of(state) -> int:
    if isinstance(state, (WSubspaceState, DensityMatrix)):
        return state.n
    a = np.asarray(state)
    return qubit_count(a.shape[0])


def _purity(rho: np.ndarray) -> float:
    return float(np.real(np.vdot(rho, rho)))


def negativities_batch(rhos: np.ndarray, n: int, partition) -> np.ndarray:
    """Negativity across ``partition`` for a stack of n-qubit states."""
    pt = partial_transpose(rhos, n, partition)
    ev = np.linalg.eigvalsh(0.5 * (pt + np.swapaxes(pt, -1, -2).conj()))
    return 2.0 * np.abs(np.where(ev < 0, ev, 0.0)).sum(axis=-1)


# --- two-qubit measures ----------------------------------------------------


def _concurrence_from_spectra(spectra: np.ndarray) -> np.ndarray:
    raw = spectra[..., 0] - spectra[..., 1:].sum(axis=-1)
    return np.maximum(raw, 0.0)


def concurrences_batch(rhos: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Concurrence of a stack of 4x4 states, shape ``(..., 4, 4) -> (...)``."""
    return _concurrence_from_spectra(spin_flip_spectra(rhos, tol))


def concurrence(rho_pair, tol: float = DEFAULT_TOL) -> float:
    """``max(0, l1 - l2 - l3 - l4)`` from the spin-flip spectrum."""
    if isinstance(rho_pair, BipartiteReduction):
        rho_pair = rho_pair.rho
    elif isinstance(rho_pair, DensityMatrix):
        rho_pair = rho_pair.data
    lam = concurrence_spectrum(rho_pair, tol)
    return float(_concurrence_from_spectra(lam))


def pair_concurrences(state, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> dict[tuple[int, int], float]:
    """Concurrence of every unordered qubit pair, keyed ``(s, r)`` with s < r."""
    return dict(zip(*_pair_concurrence_arrays(state, tol, cap)[:2]))


def _pair_reductions(state, cap: int) -> tuple[list[tuple[int, int]], np.ndarray]:
    if isinstance(state, WSubspaceState):
        pairs = pair_list(state.n)
        return pairs, reduce_pairs(state, pairs)
    rho, n = _full(state, cap)
    pairs = pair_list(n)
    if not pairs:
        return pairs, np.zeros((0, 4, 4), dtype=complex)
    return pairs, np.stack([partial_trace(rho, n, p) for p in pairs])


def _pair_concurrence_arrays(state, tol, cap):
    pairs, reds = _pair_reductions(state, cap)
    if not pairs:
        return pairs, [], np.zeros(0)
    spectra = spin_flip_spectra(reds, tol)
    raw = spectra[:, 0] - spectra[:, 1:].sum(axis=1)
    conc = np.maximum(raw, 0.0)
    return pairs, [float(c) for c in conc], raw


def pair_negativities(state, cap: int = DEFAULT_CAP) -> dict[tuple[int, int], float]:
    """Negativity of every two-qubit reduction, keyed ``(s, r)`` with s < r."""
    pairs, reds = _pair_reductions(state, cap)
    if not pairs:
        return {}
    return dict(zip(pairs, (float(v) for v in negativities_batch(reds, 2, [1]))))


def negativity(rho, partition, cap: int = DEFAULT_CAP) -> float:
    """Twice the absolute sum of negative eigenvalues of the partial transpose."""
    full, n = _full(rho, cap)
    part = tuple(partition)
    if not part or len(set(part)) >= n:
        raise ValidationError(f"partition {part} must be a nonempty proper subset of {n} qubits")
    return float(negativities_batch(full, n, part))


# --- pure-state tangles ----------------------------------------------------


def one_tangle(psi, pivot: int, tol: float = PURITY_TOL, cap: int = DEFAULT_CAP) -> float:
    """``4 det(rho_pivot)``: squared concurrence of ``pivot`` against the rest.

    Defined for pure states only.
    """
    if isinstance(psi, WSubspaceState):
        if psi.purity() < 1 - tol:
            raise NotPure(f"state purity {psi.purity():.12g} < 1")
        if not 0 <= pivot < psi.n:
            raise IndexError(f"pivot {pivot} out of range")
        r1 = single_qubit_reductions(psi)[pivot]
    else:
        rho, n = _full(psi, cap)
        if _purity(rho) < 1 - tol:
            raise NotPure(f"state purity {_purity(rho):.12g} < 1")
        if not 0 <= pivot < n:
            raise IndexError(f"pivot {pivot} out of range")
        r1 = partial_trace(rho, n, [pivot])
    det = float(np.real(r1[0, 0] * r1[1, 1] - r1[0, 1] * r1[1, 0]))
    return max(4.0 * det, 0.0)


def three_tangle(psi, tol: float = PURITY_TOL) -> float:
    """Residual tangle of a pure three-qubit state with qubit 0 as pivot."""
    if _qubits_of(psi) != 3:
        raise WrongQubitCount(f"three-tangle needs 3 qubits, got {_qubits_of(psi)}")
    tau1 = one_tangle(psi, 0, tol)
    c = pair_concurrences(psi)
    return _clamp(tau1 - c[(0, 1)] ** 2 - c[(0, 2)] ** 2)


# --- pi-tangle -------------------------------------------------------------


def _is_pure_compact(state) -> bool:
    return isinstance(state, WSubspaceState) and state.purity() >= 1 - PURITY_TOL


def _pivot_negativities_sq(state, cap: int) -> tuple[int, np.ndarray]:
    """Squared ``pivot | rest`` negativity for every qubit."""
    if _is_pure_compact(state):
        r1 = single_qubit_reductions(state)
        det = np.real(r1[:, 0, 0] * r1[:, 1, 1] - r1[:, 0, 1] * r1[:, 1, 0])
        return state.n, np.maximum(4.0 * det, 0.0)
    rho, n = _full(state, cap)
    return n, np.array([negativities_batch(rho, n, [i]) ** 2 for i in range(n)])


def pi_tangle(state, pivot: int, cap: int = DEFAULT_CAP) -> float:
    """``N(pivot|rest)**2 - sum_j N(pivot, j)**2``.

    Pure compact states use the single-excitation structure (the one-qubit
    reduction gives the pivot negativity, pairs come from 4x4 reductions).
    Anything else is transposed in the full space.
    """
    n = _qubits_of(state)
    if not 0 <= pivot < n:
        raise IndexError(f"pivot {pivot} out of range for {n} qubits")
    others = [(min(pivot, j), max(pivot, j)) for j in range(n) if j != pivot]
    if _is_pure_compact(state):
        r1 = single_qubit_reductions(state)[pivot]
        whole = max(4.0 * float(np.real(r1[0, 0] * r1[1, 1] - r1[0, 1] * r1[1, 0])), 0.0)
        reds = reduce_pairs(state, others)
    else:
        rho, n = _full(state, cap)
        whole = float(negativities_batch(rho, n, [pivot])) ** 2
        reds = np.stack([partial_trace(rho, n, p) for p in others])
    pairs = negativities_batch(reds, 2, [1])
    return _clamp(whole - float(np.sum(pairs**2)))


# --- aggregate sums --------------------------------------------------------


def sum_two_tangles(state, Z: float = 1.0, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP, check: bool = True) -> float:
    """``Z`` times the sum of squared concurrences over all unordered pairs.

    For compact states with ``check`` set, the result is compared against
    ``4 * sum_{s<r} |B[s, r]|**2``: equal when every pair sits on the positive
    branch of the concurrence formula, an upper bound otherwise.
    """
    Z = check_z(Z)
    pairs, conc, raw = _pair_concurrence_arrays(state, tol, cap)
    total = float(np.sum(np.square(conc)))
    if check and isinstance(state, WSubspaceState) and pairs:
        coh = coherence_two_tangle_sum(state)
        if np.all(raw >= -tol):
            if abs(total - coh) > 1e-9:
                raise NumericalInstability(
                    f"sum of two-tangles {total:.15g} disagrees with coherence formula {coh:.15g}"
                )
        elif total > coh + 1e-9:
            raise NumericalInstability(
                f"sum of two-tangles {total:.15g} exceeds coherence bound {coh:.15g}"
            )
    return Z * total


def sum_two_tangles_stacked(A, X, B, Z: float = 1.0, tol: float = DEFAULT_TOL) -> np.ndarray:
    """:func:`sum_two_tangles` for a stack of compact states (no validation)."""
    Z = check_z(Z)
    n = np.asarray(X).shape[1]
    reds = reduce_pairs_stacked(A, X, B, pair_list(n))
    return Z * np.sum(concurrences_batch(reds, tol) ** 2, axis=-1)


def coherence_two_tangle_sum(state: WSubspaceState) -> float:
    """``4 * sum_{s<r} |B[s, r]|**2``."""
    iu = np.triu_indices(state.n, 1)
    return 4.0 * float(np.sum(np.abs(state.B[iu]) ** 2))


def sum_pi_tangles(state, Z: float = 1.0, cap: int = DEFAULT_CAP) -> float:
    """``Z`` times the sum of pi-tangles over every pivot qubit."""
    Z = check_z(Z)
    n, whole = _pivot_negativities_sq(state, cap)
    pairs = pair_list(n)
    if pairs:
        pair_n2 = np.array(list(pair_negativities(state, cap).values())) ** 2
        qs = np.array(pairs)
        # each unordered pair enters the pi-tangles of both of its qubits
        np.subtract.at(whole, qs[:, 0], pair_n2)
        np.subtract.at(whole, qs[:, 1], pair_n2)
    return Z * float(sum(_clamp(float(p)) for p in whole))


# --- closed forms for the maximally entangled W state ----------------------


def _check_closed_n(n: float) -> float:
    if not (n == math.inf or (float(n).is_integer() and n >= 3)):
        raise InvalidQubitCount(f"closed forms need an integer n >= 3 (or inf), got {n}")
    return float(n)


def _pair_negativity_w(n: float) -> float:
    # sqrt((n-2)^2 + 4) - (n-2), rationalised to avoid cancellation
    if n == math.inf:
        return 0.0
    m = n - 2
    return 4.0 / (math.sqrt(m * m + 4.0) + m) / n


def closed_form_sum_two_tangles(n: float, Z: float = 1.0) -> float:
    """``Z * 2(n-1)/n``."""
    n = _check_closed_n(n)
    Z = check_z(Z)
    return Z * 2.0 if n == math.inf else Z * 2.0 * (n - 1) / n


def closed_form_pi_tangle(n: float) -> float:
    """Pi-tangle of any qubit of the maximally entangled n-qubit W state."""
    n = _check_closed_n(n)
    if n == math.inf:
        return 0.0
    return 4.0 * (n - 1) / n**2 - (n - 1) * _pair_negativity_w(n) ** 2


def closed_form_sum_pi(n: float, Z: float = 1.0) -> float:
    """``Z * (n-1)/n * (4 - (sqrt((n-2)^2+4) - n + 2)^2)``; tends to ``4Z``."""
    n = _check_closed_n(n)
    Z = check_z(Z)
    if n == math.inf:
        return 4.0 * Z
    gap = n * _pair_negativity_w(n)
    return Z * (n - 1) / n * (4.0 - gap * gap)


def large_n_condition_check(measure_values: Mapping[int, float], threshold: float, tail_fraction: float = 0.25) -> bool:
    """True when the large-n tail of ``measure_values`` stays at or above ``threshold``.

    The tail is the last ``tail_fraction`` of the entries ordered by n (at
    least one entry). This is a finite stand-in for ``lim T(rho_n) != 0``.
    """
    if not measure_values:
        raise EmptySequence("need at least one (n, value) entry")
    ordered = [measure_values[k] for k in sorted(measure_values)]
    size = max(1, math.ceil(len(ordered) * tail_fraction))
    return all(v >= threshold for v in ordered[-size:])


# --- report ----------------------------------------------------------------


def _pair_key(p: tuple[int, int]) -> str:
    return f"{p[0]},{p[1]}"


@dataclass
class MeasureReport:
    n: int
    pair_concurrence: dict[tuple[int, int], float]
    pair_negativity: dict[tuple[int, int], float]
    pi_tangle: dict[int, float] | None
    sum_two_tangles: float
    sum_pi_tangles: float | None
    Z_two: float
    Z_pi: float
    one_tangle: dict[int, float] | None = None
    notes: list[str] = field(default_factory=list)

    def concurrence(self, s: int, r: int) -> float:
        return self.pair_concurrence[(min(s, r), max(s, r))]

    def negativity(self, s: int, r: int) -> float:
        return self.pair_negativity[(min(s, r), max(s, r))]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "pair_concurrence": {_pair_key(k): v for k, v in self.pair_concurrence.items()},
            "pair_negativity": {_pair_key(k): v for k, v in self.pair_negativity.items()},
            "one_tangle": None if self.one_tangle is None else {str(k): v for k, v in self.one_tangle.items()},
            "pi_tangle": None if self.pi_tangle is None else {str(k): v for k, v in self.pi_tangle.items()},
            "sum_two_tangles": self.sum_two_tangles,
            "sum_pi_tangles": self.sum_pi_tangles,
            "Z_two": self.Z_two,
            "Z_pi": self.Z_pi,
            "notes": list(self.notes),
        }


def measure_report(state, Z_two: float = 1.0, Z_pi: float = 1.0, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> MeasureReport:
    Z_two, Z_pi = check_z(Z_two), check_z(Z_pi)
    n = _qubits_of(state)
    conc = pair_concurrences(state, tol, cap)
    neg = pair_negativities(state, cap)
    notes = []

    pure = _is_pure_compact(state)
    if not isinstance(state, WSubspaceState):
        rho, _ = _full(state, cap)
        pure = _purity(rho) >= 1 - PURITY_TOL
    ones = {i: one_tangle(state, i, cap=cap) for i in range(n)} if pure else None

    try:
        pis = {i: pi_tangle(state, i, cap) for i in range(n)}
        spi = Z_pi * sum(pis.values())
    except CapExceeded as exc:
        pis, spi = None, None
        notes.append(f"pi-tangles skipped: {exc}")

    return MeasureReport(
        n=n,
        pair_concurrence=conc,
        pair_negativity=neg,
        one_tangle=ones,
        pi_tangle=pis,
        sum_two_tangles=Z_two * sum(c * c for c in conc.values()),
        sum_pi_tangles=spi,
        Z_two=Z_two,
        Z_pi=Z_pi,
        notes=notes,
    )
