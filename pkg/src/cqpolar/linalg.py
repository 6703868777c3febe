"""Dense Hermitian linear algebra: square roots, fidelity, entropies, eigenspace projectors.

All functions are pure; matrices are never modified in place. Inputs are
validated against the tolerances below and rejected with ``ValueError`` when
they are structurally wrong (non-square, non-Hermitian, negative spectrum
beyond round-off).
"""

from __future__ import annotations

import numpy as np

# Hermiticity tolerance for accepting a matrix as Hermitian.
HERMITIAN_ATOL = 1e-12
# Eigenvalues above this (negative) floor are treated as round-off and clamped.
EIGENVALUE_FLOOR = -1e-10
# Trace-one tolerance for density operators.
TRACE_ATOL = 1e-10
# Eigenvalues in [-tol, tol] count as part of the ">= 0" eigenspace.
ZERO_EIGENVALUE_TOL = 1e-10
# Spectrum entries at or below this contribute zero entropy.
ENTROPY_CUTOFF = 1e-12


def as_square_matrix(m) -> np.ndarray:
    # dtype is preserved: real symmetric inputs stay real, which roughly
    # halves the LAPACK cost of every decomposition downstream
    m = np.asarray(m)
    if not np.issubdtype(m.dtype, np.complexfloating):
        m = m.astype(float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def require_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate Hermiticity within ``atol`` and return the Hermitian part."""
    m = as_square_matrix(m)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > atol:
        raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e} > {atol:.1e}")
    return 0.5 * (m + m.conj().T)


def density_operator_violations(rho, atol_trace: float = TRACE_ATOL) -> list[str]:
    """List of violated density-operator invariants (empty when valid)."""
    problems = []
    try:
        rho = require_hermitian(rho)
    except ValueError as exc:
        return [str(exc)]
    eigs = np.linalg.eigvalsh(rho)
    if eigs[0] < EIGENVALUE_FLOOR:
        problems.append(f"negative eigenvalue {eigs[0]:.3e} below floor {EIGENVALUE_FLOOR:.1e}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > atol_trace:
        problems.append(f"trace {tr!r} deviates from 1 by more than {atol_trace:.1e}")
    return problems


def require_density_operator(rho) -> np.ndarray:
    problems = density_operator_violations(rho)
    if problems:
        raise ValueError("invalid density operator: " + "; ".join(problems))
    return require_hermitian(rho)


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with real eigenvalues ``w`` ascending and orthonormal
    eigenvectors in the columns of ``v``, so that ``m = v @ diag(w) @ v†``.
    """
    m = require_hermitian(m)
    return np.linalg.eigh(m)


def matrix_sqrt(m) -> np.ndarray:
    """Positive square root of a positive semidefinite Hermitian matrix.

    Eigenvalues within round-off of zero (above ``EIGENVALUE_FLOOR``) are
    clamped to zero; anything more negative is rejected as an invalid state.
    """
    w, v = eig_hermitian(m)
    if w[0] < EIGENVALUE_FLOOR:
        raise ValueError(f"matrix has eigenvalue {w[0]:.3e} below {EIGENVALUE_FLOOR:.1e}; "
                         "not positive semidefinite")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def trace_norm(m) -> float:
    """Nuclear norm ``Tr sqrt(A† A)``, i.e. the sum of singular values."""
    m = as_square_matrix(m)
    return float(np.linalg.svd(m, compute_uv=False).sum())


def fidelity(a, b) -> float:
    """Fidelity ``||sqrt(a) sqrt(b)||_1^2`` between two density operators.

    Symmetric in its arguments; 1 for identical states, 0 for states that a
    measurement can distinguish perfectly. Note the squared convention: some
    texts call the square root of this quantity the fidelity.
    """
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return trace_norm(matrix_sqrt(a) @ matrix_sqrt(b)) ** 2


def root_fidelity(a, b) -> float:
    """Root fidelity ``Tr sqrt(sqrt(a) b sqrt(a)) = ||sqrt(a) sqrt(b)||_1``.

    Cheaper than ``fidelity`` (one full eigendecomposition instead of two
    plus an SVD); agrees with ``sqrt(fidelity(a, b))``.
    """
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    ra = matrix_sqrt(a)
    inner = ra @ b @ ra
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sqrt(np.clip(w, 0.0, None)).sum())


def shannon_entropy(p) -> float:
    """Entropy in bits of a nonnegative spectrum/probability vector.

    Entries at or below ``ENTROPY_CUTOFF`` contribute zero.
    """
    p = np.asarray(p, dtype=float)
    p = p[p > ENTROPY_CUTOFF]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log2(p)).sum())


def von_neumann_entropy(rho) -> float:
    """Entropy ``-Tr(rho log2 rho)`` in bits of a density operator."""
    rho = require_density_operator(rho)
    return shannon_entropy(np.linalg.eigvalsh(rho))


def binary_entropy(x: float) -> float:
    """Binary entropy ``-x log2 x - (1-x) log2 (1-x)``; endpoints give 0."""
    if not -1e-12 <= x <= 1 + 1e-12:
        raise ValueError(f"binary_entropy argument {x!r} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    return shannon_entropy([x, 1.0 - x])


def positive_eigenspace_projector(m, zero_tolerance: float = ZERO_EIGENVALUE_TOL,
                                  strict: bool = False) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue >= 0.

    The kernel counts as part of the nonnegative eigenspace (eigenvalues in
    ``[-zero_tolerance, zero_tolerance]`` are included), so the zero matrix
    maps to the identity. With ``strict=True`` only eigenvalues strictly
    above ``zero_tolerance`` are included, which yields the complementary
    "< 0" projector as ``positive_eigenspace_projector(-m, strict=True)``.
    """
    w, v = eig_hermitian(m)
    keep = w > zero_tolerance if strict else w >= -zero_tolerance
    vk = v[:, keep]
    p = vk @ vk.conj().T
    return 0.5 * (p + p.conj().T)


def kron(a, b) -> np.ndarray:
    """Tensor (Kronecker) product of two operators."""
    return np.kron(np.asarray(a), np.asarray(b))
