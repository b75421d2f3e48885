"""Thermal (beta-KMS) positive definite functions with values in the
bilinear forms on a real vector space V.

A function psi: R -> Bil(V) satisfies the beta-KMS condition when it
extends continuously to the strip 0 <= Im z <= beta, holomorphically
inside, with the boundary coupling psi(i beta + t) = conj(psi(t)).  At
finite dimension every such function is a finite exponential sum

    psi(z) = sum_k exp(i z lambda_k) M_k

with PSD form atoms M_k, the lambda_k being the eigenvalues of
L = -(1/beta) log Delta for the modular operator Delta attached to a skew
strict contraction C_V on V.  Atoms come in reflected pairs satisfying
M_{-lambda} = exp(-beta lambda) conj(M_lambda).

Form values are complex m x m matrices F with psi(z)(v, w) = v^dagger F w;
the first argument is conjugated in the sesquilinear extension.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .matfun import DomainError, herm_eig, herm_fun, psd_check
from .subspace import ContractionOnV

STRIP_TOL = 1e-12


class OutOfStripError(ValueError):
    """Evaluation point lies outside the closed strip 0 <= Im z <= beta."""


class NegativeAtomError(ValueError):
    """A spectral measure for beta = infinity has an atom at lambda < 0."""


@dataclass(frozen=True)
class KmsFunction:
    """A beta-KMS positive definite function psi: R -> Bil(V).

    Parameters
    ----------
    beta : positive float
    contraction : ContractionOnV
        Strict skew contraction C_V on V1 determining the modular flow.
    jmap : real matrix, optional
        Linear map V -> V1; defaults to the identity (V1 = V).  The form
        dimension m is the number of columns of ``jmap``.
    """

    beta: float
    contraction: ContractionOnV
    jmap: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        self.contraction.require_strict()
        j = self.jmap
        if j is None:
            j = np.eye(self.contraction.m)
        j = np.asarray(j, dtype=float)
        if j.shape[0] != self.contraction.m:
            raise ValueError("jmap must map V into the space carrying C_V")
        object.__setattr__(self, "jmap", j)

    @property
    def m(self):
        """Dimension of V (size of the form matrices)."""
        return self.jmap.shape[1]

    @cached_property
    def _spectral(self):
        """Eigendata (s, U) of the Hermitian matrix iC_V."""
        K = 1j * self.contraction.matrix
        w, U = herm_eig(K)
        return w, U

    @cached_property
    def frequencies(self):
        """lambda_k = (1/beta) log((1+s_k)/(1-s_k)) for eigenvalues s of iC_V."""
        s, _ = self._spectral
        return np.log((1.0 + s) / (1.0 - s)) / self.beta

    @cached_property
    def _atom_forms(self):
        """Form atom matrices M_k = j^T (1 + s_k) u_k u_k^dagger j."""
        s, U = self._spectral
        j = self.jmap
        return [
            (1.0 + s[k]) * (j.T @ np.outer(U[:, k], np.conj(U[:, k])) @ j)
            for k in range(len(s))
        ]


def psi_eval(k: KmsFunction, z):
    """Evaluate psi on the closed strip 0 <= Im z <= beta.

    Returns the complex m x m form matrix sum_k exp(i z lambda_k) M_k.

    Raises
    ------
    OutOfStripError
        If Im z is outside [0, beta] (up to a tiny tolerance).
    """
    z = complex(z)
    if not -STRIP_TOL <= z.imag <= k.beta + STRIP_TOL:
        raise OutOfStripError(f"Im z = {z.imag} outside [0, {k.beta}]")
    lam = k.frequencies
    F = np.zeros((k.m, k.m), dtype=complex)
    for lk, M in zip(lam, k._atom_forms):
        F += np.exp(1j * z * lk) * M
    return F


def kms_boundary_check(k: KmsFunction, grid):
    """Max entrywise defect of psi(i beta + t) = conj(psi(t)) over a grid."""
    defect = 0.0
    for t in np.asarray(grid, dtype=float):
        d = np.abs(psi_eval(k, t + 1j * k.beta) - np.conj(psi_eval(k, t)))
        defect = max(defect, float(d.max(initial=0.0)))
    return defect


@dataclass(frozen=True)
class DiscreteFormMeasure:
    """Finitely supported Bil^+(V)-valued measure: atoms (lambda, M)."""

    atoms: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "atoms",
            tuple((float(lam), np.asarray(M, dtype=complex))
                  for lam, M in self.atoms),
        )

    @property
    def m(self):
        return self.atoms[0][1].shape[0] if self.atoms else 0

    def total_mass(self):
        return sum(M for _, M in self.atoms)

    def eval(self, z):
        """Fourier--Laplace transform sum exp(i z lambda) M at complex z."""
        z = complex(z)
        F = np.zeros((self.m, self.m), dtype=complex)
        for lam, M in self.atoms:
            F += np.exp(1j * z * lam) * M
        return F

    def atoms_psd(self, tol=1e-10):
        """True when every atom form passes the PSD check."""
        return all(psd_check(0.5 * (M + M.conj().T), tol)[0]
                   for _, M in self.atoms)

    def reflection_defect(self, beta):
        """Max defect of M_{-lambda} = exp(-beta lambda) conj(M_lambda)."""
        defect = 0.0
        for lam, M in self.atoms:
            target = np.exp(-beta * lam) * np.conj(M)
            partner = np.zeros_like(M)
            for mu, N in self.atoms:
                if abs(mu + lam) <= 1e-9 * (1.0 + abs(lam)):
                    partner = partner + N
            defect = max(defect,
                         float(np.abs(partner - target).max(initial=0.0)))
        return defect


def spectral_measure(k: KmsFunction, merge_tol=1e-9) -> DiscreteFormMeasure:
    """Spectral measure of psi: atoms at the eigenvalues of -(1/beta) log Delta.

    Eigenvalues closer than ``merge_tol`` (relatively) are merged into a
    single atom.
    """
    lam = k.frequencies
    order = np.argsort(lam)
    atoms = []
    for idx in order:
        lk, M = lam[idx], k._atom_forms[idx]
        if atoms and abs(atoms[-1][0] - lk) <= merge_tol * (1.0 + abs(lk)):
            atoms[-1] = (atoms[-1][0], atoms[-1][1] + M)
        else:
            atoms.append((lk, M.copy()))
    return DiscreteFormMeasure(atoms=tuple(atoms))


def phi_operator_form(k: KmsFunction, t):
    """phi(t) = psi(it) through the closed Cayley-power formula.

    Computes (1 + iC_V)^{1 - t/beta} (1 - iC_V)^{t/beta} on V1 and pulls it
    back to a form on V through ``jmap``.  With the default identity jmap
    the result *is* the operator matrix.

    Raises
    ------
    DomainError
        For t outside [0, beta].
    """
    t = float(t)
    if not -STRIP_TOL <= t <= k.beta + STRIP_TOL:
        raise DomainError(f"t = {t} outside [0, {k.beta}]")
    K = 1j * k.contraction.matrix
    x = t / k.beta
    G = herm_fun(K, lambda s: (1.0 + s) ** (1.0 - x) * (1.0 - s) ** x)
    return k.jmap.T @ G @ k.jmap


def phi_periodic_extend(k: KmsFunction, t):
    """The unique continuous 2 beta-periodic extension of phi = psi(i .).

    Satisfies phi(t + beta) = conj(phi(t)) and phi(t + 2 beta) = phi(t).
    """
    beta = k.beta
    t = float(t) % (2.0 * beta)
    if t <= beta:
        return phi_operator_form(k, t)
    return np.conj(phi_operator_form(k, t - beta))


def strip_kernel_check(k: KmsFunction, points, tol=1e-8):
    """PSD report for the half-strip kernel K(z, w) = psi(z - conj(w)).

    ``points`` must lie in the closed half-strip 0 <= Im z <= beta/2 so
    that all differences stay inside the domain of psi.
    """
    points = [complex(z) for z in points]
    for z in points:
        if not -STRIP_TOL <= z.imag <= k.beta / 2.0 + STRIP_TOL:
            raise OutOfStripError(
                f"strip kernel needs Im z in [0, beta/2], got {z.imag}")
    p, m = len(points), k.m
    G = np.zeros((p * m, p * m), dtype=complex)
    for i, zi in enumerate(points):
        for j, zj in enumerate(points):
            G[i * m:(i + 1) * m, j * m:(j + 1) * m] = psi_eval(
                k, zi - np.conj(zj))
    G = 0.5 * (G + G.conj().T)
    is_psd, min_eig = psd_check(G, tol)
    return {"is_psd": is_psd, "min_eig": min_eig, "gram": G}


def kernel_section(k: KmsFunction, w, eta):
    """The strip-kernel section K_{(w, eta)}: z -> psi(z - conj(w)) eta."""
    w = complex(w)
    eta = np.asarray(eta, dtype=complex)

    def section(z):
        return psi_eval(k, complex(z) - np.conj(w)) @ eta

    return section


def strip_realization_J1(k: KmsFunction, ws, etas, zgrid):
    """Check the antiunitary J1 on kernel sections of the strip space.

    J1 acts by (J1 f)(z) = conj(f(conj(z) + i beta/2)).  For real eta it
    maps the section at (w, eta) to the section at (conj(w) + i beta/2,
    eta); at w = 0 this is the Delta^{1/2}-weighted section.  Returns the
    max defect of these identities and of J1^2 = id over the grid.
    """
    beta = k.beta
    defect = 0.0
    for w in ws:
        w = complex(w)
        for eta in etas:
            eta = np.asarray(eta, dtype=float)  # sections taken at real eta
            sec = kernel_section(k, w, eta)
            target = kernel_section(k, np.conj(w) + 0.5j * beta, eta)
            for z in zgrid:
                z = complex(z)
                j1 = np.conj(sec(np.conj(z) + 0.5j * beta))
                defect = max(defect,
                             float(np.abs(j1 - target(z)).max(initial=0.0)))
                # J1^2 = identity
                j1j1 = np.conj(
                    np.conj(sec(np.conj(np.conj(z) + 0.5j * beta)
                                + 0.5j * beta)))
                defect = max(defect,
                             float(np.abs(j1j1 - sec(z)).max(initial=0.0)))
    # J1 K_{(0, eta)} equals the Delta^{1/2}-scaled section, evaluated
    # spectrally: atom at lambda picks up the factor exp(-beta lambda / 2).
    lam = k.frequencies
    for eta in etas:
        eta = np.asarray(eta, dtype=float)
        half = kernel_section(k, 0.5j * beta, eta)
        for z in zgrid:
            z = complex(z)
            spectral = np.zeros(k.m, dtype=complex)
            for lk, M in zip(lam, k._atom_forms):
                spectral += (np.exp(1j * z * lk) * np.exp(-0.5 * beta * lk)
                             * (M @ eta))
            defect = max(defect,
                         float(np.abs(half(z) - spectral).max(initial=0.0)))
    return defect


def translation_gram(k: KmsFunction, ts, tol=1e-8):
    """PSD report for the translation kernel psi(t_i - t_j) on the line."""
    ts = np.asarray(ts, dtype=float)
    p, m = len(ts), k.m
    G = np.zeros((p * m, p * m), dtype=complex)
    for i in range(p):
        for j in range(p):
            G[i * m:(i + 1) * m, j * m:(j + 1) * m] = psi_eval(
                k, ts[i] - ts[j])
    G = 0.5 * (G + G.conj().T)
    is_psd, min_eig = psd_check(G, tol)
    return {"is_psd": is_psd, "min_eig": min_eig}


def boundedness_check(k: KmsFunction, zs):
    """Max excess of |psi(z)(v,v)| over max(psi(0)(v,v), psi(i beta)(v,v))."""
    F0 = psi_eval(k, 0.0)
    Fb = psi_eval(k, 1j * k.beta)
    excess = 0.0
    for z in zs:
        F = psi_eval(k, z)
        for v in np.eye(k.m):
            bound = max((v @ F0 @ v).real, (v @ Fb @ v).real)
            excess = max(excess, abs(v @ F @ v) - bound)
    return float(excess)


def kms_infinity(measure: DiscreteFormMeasure, grid, half_plane_points=(),
                 tol=1e-8):
    """The beta = infinity variant: measure on [0, inf), reflection on R_+.

    Builds psi(z) = sum exp(i z lambda) M_k for Im z >= 0, checks pointwise
    boundedness |psi(z)(v,v)| <= psi(0)(v,v) on the supplied upper-half-
    plane samples, and verifies positive definiteness of the kernel
    f(t + s, tau) = psi(i(t + s)) over the nonnegative grid.

    Raises
    ------
    NegativeAtomError
        If the measure has an atom at lambda < 0.
    """
    for lam, _ in measure.atoms:
        if lam < -1e-12:
            raise NegativeAtomError(f"atom at lambda = {lam} < 0")
    m = measure.m
    F0 = measure.eval(0.0)
    bound_excess = 0.0
    for z in half_plane_points:
        z = complex(z)
        if z.imag < -STRIP_TOL:
            raise OutOfStripError("beta = infinity needs Im z >= 0")
        F = measure.eval(z)
        for v in np.eye(m):
            bound_excess = max(
                bound_excess, abs(v @ F @ v) - (v @ F0 @ v).real)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0):
        raise ValueError("reflection grid must lie in [0, inf)")
    p = len(grid)
    G = np.zeros((p * m, p * m), dtype=complex)
    for i in range(p):
        for j in range(p):
            G[i * m:(i + 1) * m, j * m:(j + 1) * m] = measure.eval(
                1j * (grid[i] + grid[j]))
    G = 0.5 * (G + G.conj().T)
    is_psd, min_eig = psd_check(G, tol)
    return {
        "boundedness_excess": float(bound_excess),
        "reflection_psd": is_psd,
        "reflection_min_eig": min_eig,
    }
