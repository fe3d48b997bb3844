import numpy as np
import pytest

from qrenyi.states import substream


def classical_renyi(p, q, alpha):
    """Scalar oracle sum p^a q^(1-a), log base 2."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(np.log2(np.sum(p**alpha * q ** (1.0 - alpha))) / (alpha - 1.0))


def classical_kl(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def random_hermitian_from(rng, d, scale=1.0):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (g + g.conj().T)


def random_psd_from(rng, d, rank=None, scale=1.0):
    r = rank if rank is not None else d
    g = (rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))) / np.sqrt(2.0)
    return scale * (g @ g.conj().T)


@pytest.fixture
def rng():
    return substream(20240)
