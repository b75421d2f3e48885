"""Hermitian functional calculus, skew polar decompositions and PSD checks.

Everything downstream (modular operators, thermal functions, Gram-matrix
positivity tests) is built on the four operations in this module.  All
spectral computations go through the Hermitian eigendecomposition; fractional
powers, logs etc. are defined by applying the scalar function to the
eigenvalues, which fixes the branch unambiguously for Hermitian input.
"""

from typing import Callable, NamedTuple

import numpy as np

# Absolute floor added to every relative tolerance so that checks on the
# zero matrix do not degenerate to "equal to machine zero exactly".
ABS_FLOOR = 1e-14


class NonHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class DomainError(ValueError):
    """A scalar function was evaluated outside its domain."""


class SingularDError(ValueError):
    """Skew matrix has a numerical kernel; split it off before polar."""


class EigenDecomposition(NamedTuple):
    """Spectral data of a Hermitian matrix.

    Attributes
    ----------
    eigenvalues : (n,) real ndarray, sorted ascending
    eigenvectors : (n, n) complex ndarray, unitary, columns are eigenvectors
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def require_hermitian(A, tol=1e-12):
    """Return ``A`` as a complex ndarray, raising if it is not Hermitian.

    The tolerance is relative to the largest entry in absolute value.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonHermitianError(f"expected a square matrix, got shape {A.shape}")
    scale = max(np.abs(A).max(initial=0.0), 1.0)
    defect = np.abs(A - A.conj().T).max(initial=0.0)
    if defect > tol * scale + ABS_FLOOR:
        raise NonHermitianError(f"Hermitian defect {defect:.3e} exceeds tolerance")
    return A


def require_skew(D, tol=1e-12):
    """Return ``D`` as a real ndarray, raising if it is not real skew-symmetric."""
    D = np.asarray(D)
    if np.iscomplexobj(D):
        if np.abs(D.imag).max(initial=0.0) > tol:
            raise ValueError("skew-symmetric input must be real")
        D = D.real
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {D.shape}")
    scale = max(np.abs(D).max(initial=0.0), 1.0)
    if np.abs(D + D.T).max(initial=0.0) > tol * scale + ABS_FLOOR:
        raise ValueError("matrix is not skew-symmetric")
    return D


def herm_eig(A) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues sorted ascending and a unitary matrix of
    eigenvectors with ``A = V diag(w) V*``.

    Raises
    ------
    NonHermitianError
        If ``A`` fails the Hermitian symmetry check.
    """
    A = require_hermitian(A)
    w, V = np.linalg.eigh(A)
    return EigenDecomposition(w, V)


def herm_fun(A, g: Callable[[float], complex]):
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Parameters
    ----------
    A : Hermitian matrix
    g : callable
        Scalar function; applied to each eigenvalue.  Must be finite on the
        spectrum of ``A``.

    Returns
    -------
    ndarray
        ``V diag(g(w)) V*``.  Hermitian whenever ``g`` is real valued.
    """
    w, V = herm_eig(A)
    with np.errstate(all="ignore"):
        gw = np.array([g(x) for x in w], dtype=complex)
    if not np.all(np.isfinite(gw)):
        bad = w[~np.isfinite(gw)]
        raise DomainError(f"scalar function not finite at eigenvalue(s) {bad}")
    return (V * gw) @ V.conj().T


def psd_check(G, tol=1e-8):
    """Check positive semidefiniteness of a Hermitian Gram matrix.

    The verdict is ``min_eig >= -tol * max(1, trace|G|)``, i.e. the
    tolerance scales with the total mass of the matrix but never collapses
    below the absolute value ``tol``.

    Returns
    -------
    (is_psd, min_eig) : (bool, float)
    """
    G = require_hermitian(G)
    if G.shape[0] == 0:
        return True, 0.0
    w = np.linalg.eigvalsh(G)
    min_eig = float(w[0])
    mass = float(np.abs(w).sum())
    return min_eig >= -tol * max(1.0, mass), min_eig


def polar_skew(D):
    """Polar decomposition ``D = I |D|`` of an injective real skew matrix.

    Returns
    -------
    (I, absD) : pair of real ndarrays
        ``I`` orthogonal with ``I^2 = -1``, ``absD`` symmetric positive
        definite, ``[I, absD] = 0``.

    Raises
    ------
    SingularDError
        If the smallest singular value of ``D`` is below ``1e-12 * ||D||``;
        split off the kernel first.
    """
    D = require_skew(D)
    # |D| = sqrt(D^T D) = sqrt(-D^2) for skew-symmetric D.
    M = -D @ D
    w, V = herm_eig(M)
    norm = float(np.sqrt(max(w[-1], 0.0)))
    smin = float(np.sqrt(max(w[0], 0.0)))
    if norm == 0.0 or smin <= 1e-12 * norm:
        raise SingularDError("skew matrix has a numerical kernel")
    absD = ((V * np.sqrt(w)) @ V.conj().T).real
    I = D @ ((V * (1.0 / np.sqrt(w))) @ V.conj().T).real
    return I, absD
