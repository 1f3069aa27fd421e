import numpy as np
import pytest

_CRITERIA: list[str] = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    _CRITERIA.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


def random_ket(rng, dim):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_density(rng, dim, rank=None):
    g = rng.standard_normal((dim, rank or dim)) + 1j * rng.standard_normal((dim, rank or dim))
    m = g @ g.conj().T
    return m / np.trace(m).real


def brute_partial_trace(rho, n, keep):
    """Element-by-element partial trace over bit strings; slow but obviously right."""
    keep = sorted(keep)
    gone = [q for q in range(n) if q not in keep]
    dk = 1 << len(keep)
    out = np.zeros((dk, dk), dtype=complex)

    def index(kbits, gbits):
        bits = [0] * n
        for q, b in zip(keep, kbits):
            bits[q] = b
        for q, b in zip(gone, gbits):
            bits[q] = b
        return int("".join(map(str, bits)), 2) if bits else 0

    def bits_of(v, width):
        return [(v >> (width - 1 - j)) & 1 for j in range(width)]

    for a in range(dk):
        for b in range(dk):
            for g in range(1 << len(gone)):
                gb = bits_of(g, len(gone))
                out[a, b] += rho[index(bits_of(a, len(keep)), gb), index(bits_of(b, len(keep)), gb)]
    return out
