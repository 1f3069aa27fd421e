"""Seeded random W-subspace states, local unitaries and dephasing.

Every draw goes through :func:`make_rng`, which spawns an independent PCG64
stream from ``(seed, index)`` via ``numpy.random.SeedSequence``. Sample ``i``
of a batch is therefore reproducible on its own, whatever order or thread it
runs in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidConfig, StrengthOutOfRange
from .states import WSubspaceState, build_asymmetric, build_symmetric

KINDS = ("pure-symmetric", "pure-asymmetric", "mixed-general", "mixed-zero-coherence")

_DEFAULTS: dict[str, dict[str, Any]] = {
    "pure-symmetric": {"a_max": 3.0, "complex": True},
    "pure-asymmetric": {"complex": True},
    "mixed-general": {"rank": None},
    "mixed-zero-coherence": {},
}


@dataclass(frozen=True)
class SamplerConfig:
    """What to sample.

    ``parameters`` by kind:

    * ``pure-symmetric``: ``a_max`` (radius of the disk ``a`` is drawn from),
      ``complex`` (allow complex ``a``).
    * ``pure-asymmetric``: ``complex`` (allow complex ``k``).
    * ``mixed-general``: ``rank`` (columns of the Gram factor, default n+1).
    """

    seed: int
    n: int
    kind: str
    parameters: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfig(f"unknown sampler kind {self.kind!r}; choose from {KINDS}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise InvalidConfig(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        minimum = 3 if self.kind.startswith("pure") else 2
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < minimum:
            raise InvalidConfig(f"{self.kind} needs an integer n >= {minimum}, got {self.n!r}")
        unknown = set(self.parameters) - set(_DEFAULTS[self.kind])
        if unknown:
            raise InvalidConfig(f"unknown parameters for {self.kind}: {sorted(unknown)}")

    def param(self, name: str):
        return self.parameters.get(name, _DEFAULTS[self.kind][name])


def make_rng(seed: int, index: int | None = None) -> np.random.Generator:
    spawn_key = () if index is None else (int(index),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=spawn_key)))


def _complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def _unit_disk(rng: np.random.Generator, size, radius: float = 1.0) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=size))
    return r * np.exp(2j * np.pi * rng.uniform(size=size))


def sample_state(cfg: SamplerConfig, index: int | None = None) -> WSubspaceState:
    """Draw one state of kind ``cfg.kind``; ``index`` selects a sample in a batch."""
    rng = make_rng(cfg.seed, index)
    n = cfg.n
    if cfg.kind == "pure-symmetric":
        if cfg.param("complex"):
            a = complex(_unit_disk(rng, None, cfg.param("a_max")))
        else:
            a = rng.uniform(-cfg.param("a_max"), cfg.param("a_max"))
        return build_symmetric(n, a)
    if cfg.kind == "pure-asymmetric":
        k = _complex_normal(rng, n) if cfg.param("complex") else rng.standard_normal(n) + 0j
        return build_asymmetric(n, k / np.linalg.norm(k))
    if cfg.kind == "mixed-general":
        rank = cfg.param("rank") or n + 1
        if not 1 <= int(rank) <= n + 1:
            raise InvalidConfig(f"rank must be in [1, {n + 1}], got {rank}")
        g = _complex_normal(rng, (n + 1, int(rank)))
        m = g @ g.conj().T
        m /= np.trace(m).real
        return WSubspaceState.from_matrix(0.5 * (m + m.conj().T))
    return _zero_coherence(rng, n)


def _zero_coherence(rng: np.random.Generator, n: int) -> WSubspaceState:
    # mixture of |0...0> and n single-qubit superpositions sqrt(1-|mu|^2)|0..0> + mu e_i
    p = rng.dirichlet(np.ones(n + 1))
    mu = _unit_disk(rng, n)
    vac = np.sqrt(np.clip(1 - np.abs(mu) ** 2, 0.0, None))
    w = p[1:]
    pops = w * np.abs(mu) ** 2
    X = w * vac * mu.conj()
    # p_0 + sum_i w_i (1 - |mu_i|^2) == 1 - sum_i pops_i since the weights sum to 1
    A = 1.0 - float(np.sum(pops))
    return WSubspaceState(n, A, X, np.diag(pops).astype(complex)).validate()


def sample_local_unitary(seed: int, n: int, identity: bool = False, index: int | None = None) -> list[np.ndarray]:
    """``n`` Haar-random 2x2 unitaries from QR of complex Gaussian matrices.

    The phases of R's diagonal are folded back into Q so the distribution is
    Haar rather than QR-biased. ``identity=True`` returns identities instead.
    """
    if n < 1:
        raise InvalidConfig(f"need n >= 1, got {n}")
    if identity:
        return [np.eye(2, dtype=complex) for _ in range(n)]
    rng = make_rng(seed, index)
    out = []
    for _ in range(n):
        q, r = np.linalg.qr(_complex_normal(rng, (2, 2)) / np.sqrt(2))
        d = r.diagonal()
        out.append(q * (d / np.abs(d)))
    return out


def local_unitary(factors: list[np.ndarray]) -> np.ndarray:
    """Tensor product ``U_0 ⊗ U_1 ⊗ ...`` with qubit 0 leftmost."""
    u = np.ones((1, 1), dtype=complex)
    for f in factors:
        u = np.kron(u, f)
    return u


def dephase(state: WSubspaceState, strength: float) -> WSubspaceState:
    """Scale every coherence (``X`` and off-diagonal ``B``) by ``1 - strength``."""
    strength = float(strength)
    if not 0.0 <= strength <= 1.0:
        raise StrengthOutOfRange(f"strength must lie in [0, 1], got {strength}")
    keep = 1.0 - strength
    diag = np.diag(state.B.diagonal())
    B = diag + keep * (state.B - diag)
    return WSubspaceState(state.n, state.A, keep * state.X, B).validate()
