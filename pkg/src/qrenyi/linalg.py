"""Dense complex Hermitian linear algebra on small matrices.

Everything here operates on plain ``numpy.ndarray`` values of dtype
``complex128``.  Matrix functions (powers, square roots, logarithms) are
evaluated spectrally and restricted to the support of the operator, with a
relative eigenvalue cutoff separating "zero" from "nonzero" modes.

Index convention: tensor products are A-major (``kron(A, B)`` row-major),
and all partial traces assume that layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEigenvalue,
    NoConvergence,
    NonHermitianInput,
)

#: Relative hermiticity tolerance (against the max-entry magnitude).
HERMITICITY_TOL = 1e-9

#: Relative eigenvalue cutoff defining numerical supports.
DEFAULT_CUTOFF = 1e-10

#: Jacobi sweep budget before giving up.
_MAX_SWEEPS = 100

#: Off-diagonal convergence target, relative to the initial entry scale.
_OFF_DIAG_TOL = 1e-14


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; ``eigenvectors`` holds the
    matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class SupportInfo:
    """Numerical support of a positive semidefinite operator."""

    rank: int
    projector: np.ndarray
    cutoff_used: float


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def max_abs(a: np.ndarray) -> float:
    """Max-entry norm ``max_ij |a_ij|``."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={m.ndim}")
    return m


def check_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate hermiticity and return the symmetrized matrix.

    Raises NonHermitianInput when ``max|A - A^dag|`` exceeds ``tol`` times
    the max-entry magnitude of A.
    """
    m = as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"matrix is not square: shape {m.shape}")
    scale = max_abs(m)
    defect = max_abs(m - m.conj().T)
    if defect > tol * max(scale, 1e-300):
        raise NonHermitianInput(
            f"hermiticity defect {defect:.3e} exceeds {tol:.1e} x {scale:.3e}"
        )
    return hermitian_part(m)


def hermitian_eig(h: np.ndarray) -> Spectrum:
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.

    The input is hermiticity-checked and symmetrized first.  Rotations are
    swept cyclically over the strict upper triangle until every off-diagonal
    entry falls below ``1e-14`` of the initial entry scale.  Eigenvalues are
    returned ascending; each eigenvector is phased so its largest-magnitude
    entry is real positive, which makes the decomposition deterministic.
    """
    a = check_hermitian(h)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return Spectrum(a.real.reshape(1).copy(), v)

    scale = max_abs(a)
    if scale == 0.0:
        return Spectrum(np.zeros(n), v)
    tol = _OFF_DIAG_TOL * scale

    converged = False
    for _ in range(_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            row = a[p, p + 1 :]
            if row.size:
                off = max(off, float(np.max(np.abs(row))))
        if off <= tol:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                ab = abs(b)
                if ab <= tol * 1e-2:
                    continue
                # Diagonalize the 2x2 pivot block [[app, b], [conj(b), aqq]]:
                # a phase folds b onto the real axis, then a real rotation.
                phase = b.conjugate() / ab
                phi = 0.5 * np.arctan2(2.0 * ab, a[p, p].real - a[q, q].real)
                c = np.cos(phi)
                s = np.sin(phi)
                r = np.array(
                    [[c, -s], [phase * s, phase * c]], dtype=np.complex128
                )
                a[:, [p, q]] = a[:, [p, q]] @ r
                a[[p, q], :] = r.conj().T @ a[[p, q], :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, [p, q]] = v[:, [p, q]] @ r
    if not converged:
        raise NoConvergence(f"Jacobi sweep budget ({_MAX_SWEEPS}) exhausted")

    evals = np.diag(a).real.copy()
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    v = v[:, order]
    # Deterministic phases: largest-magnitude entry of each column real > 0.
    idx = np.argmax(np.abs(v), axis=0)
    anchors = v[idx, np.arange(n)]
    v = v * (anchors.conjugate() / np.abs(anchors))
    return Spectrum(evals, v)


def _check_spectrum_positive(evals: np.ndarray, cutoff: float) -> None:
    abs_max = float(np.max(np.abs(evals))) if evals.size else 0.0
    floor = -cutoff * max(1.0, abs_max)
    low = float(np.min(evals)) if evals.size else 0.0
    if low < floor:
        raise NegativeEigenvalue(
            f"eigenvalue {low:.3e} below allowed floor {floor:.3e}"
        )


def support_of(a: np.ndarray, cutoff: float = DEFAULT_CUTOFF) -> SupportInfo:
    """Support projector of a positive semidefinite operator.

    Eigenvalues above ``cutoff * max(1, lambda_max)`` count towards the
    rank; anything in ``[-cutoff*max(1,|lambda|_max), threshold]`` is treated
    as zero, and eigenvalues below that floor raise NegativeEigenvalue.
    """
    spec = hermitian_eig(a)
    _check_spectrum_positive(spec.eigenvalues, cutoff)
    lam_max = float(np.max(spec.eigenvalues)) if spec.eigenvalues.size else 0.0
    threshold = cutoff * max(1.0, lam_max)
    keep = spec.eigenvalues > threshold
    vk = spec.eigenvectors[:, keep]
    projector = vk @ vk.conj().T
    return SupportInfo(int(np.sum(keep)), hermitian_part(projector), threshold)


def matrix_power_on_support(
    a: np.ndarray, p: float, cutoff: float = DEFAULT_CUTOFF
) -> np.ndarray:
    """``A^p`` evaluated on the support of A (pseudo-inverse convention).

    Eigenvalues above the support threshold map to ``lambda^p``; the rest
    map to 0 (this clamps small negative roundoff).  ``p == 0`` returns the
    support projector.
    """
    spec = hermitian_eig(a)
    _check_spectrum_positive(spec.eigenvalues, cutoff)
    lam_max = float(np.max(spec.eigenvalues)) if spec.eigenvalues.size else 0.0
    threshold = cutoff * max(1.0, lam_max)
    keep = spec.eigenvalues > threshold
    vals = np.zeros_like(spec.eigenvalues)
    if p == 0:
        vals[keep] = 1.0
    else:
        vals[keep] = spec.eigenvalues[keep] ** p
    v = spec.eigenvectors
    return hermitian_part((v * vals) @ v.conj().T)


def matrix_function_on_support(
    a: np.ndarray, fn, cutoff: float = DEFAULT_CUTOFF
) -> np.ndarray:
    """Apply a scalar function to the supported eigenvalues, zero elsewhere."""
    spec = hermitian_eig(a)
    _check_spectrum_positive(spec.eigenvalues, cutoff)
    lam_max = float(np.max(spec.eigenvalues)) if spec.eigenvalues.size else 0.0
    threshold = cutoff * max(1.0, lam_max)
    keep = spec.eigenvalues > threshold
    vals = np.zeros_like(spec.eigenvalues)
    vals[keep] = fn(spec.eigenvalues[keep])
    v = spec.eigenvectors
    return hermitian_part((v * vals) @ v.conj().T)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the A-major index convention."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def partial_trace(
    m: np.ndarray, dim_a: int, dim_b: int, keep: str = "A"
) -> np.ndarray:
    """Partial trace of an operator on A (x) B.

    ``keep`` selects which factor survives ("A" traces out B and vice
    versa).  The input must be square of dimension ``dim_a * dim_b``.
    """
    mat = as_complex_matrix(m)
    d = dim_a * dim_b
    if mat.shape != (d, d):
        raise DimensionMismatch(
            f"operator is {mat.shape}, expected ({d}, {d}) = ({dim_a}x{dim_b})^2"
        )
    t = mat.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    if keep == "B":
        return np.einsum("abac->bc", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def trace_norm(a: np.ndarray) -> float:
    """Trace norm (sum of singular values) of a square matrix.

    Hermitian inputs take the cheaper sum-of-|eigenvalues| route; general
    inputs go through the Hermitian embedding ``[[0, A], [A^dag, 0]]``,
    whose spectrum is ``{+s_i, -s_i}``.  The embedding keeps the error in
    each singular value linear in machine epsilon (a Gram-matrix route
    would take square roots of roundoff for singular directions).
    """
    m = as_complex_matrix(a)
    n = m.shape[0]
    if n != m.shape[1]:
        raise DimensionMismatch("trace norm defined here for square input")
    scale = max_abs(m)
    if scale == 0.0:
        return 0.0
    if max_abs(m - m.conj().T) <= HERMITICITY_TOL * scale:
        spec = hermitian_eig(m)
        return float(np.sum(np.abs(spec.eigenvalues)))
    embed = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    embed[:n, n:] = m
    embed[n:, :n] = m.conj().T
    evals = hermitian_eig(embed).eigenvalues
    return float(0.5 * np.sum(np.abs(evals)))


def fidelity(omega: np.ndarray, tau: np.ndarray) -> float:
    """Uhlmann fidelity ``|| sqrt(omega) sqrt(tau) ||_1`` of two states."""
    w = as_complex_matrix(omega)
    t = as_complex_matrix(tau)
    if w.shape != t.shape:
        raise DimensionMismatch(f"shape mismatch {w.shape} vs {t.shape}")
    sw = matrix_power_on_support(w, 0.5)
    st = matrix_power_on_support(t, 0.5)
    val = trace_norm(sw @ st)
    return float(min(max(val, 0.0), 1.0))
