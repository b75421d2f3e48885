"""Standard real subspaces of C^n, their contraction parametrizations and
modular objects.

A real subspace V of C^n is *standard* when V intersects iV trivially and
V + iV is all of C^n.  Such subspaces are parametrized by skew-symmetric
strict contractions C on E = R^n via V = (1 + iC)E.  From V one obtains the
modular pair (Delta, J): the positive operator and antilinear involution in
the polar decomposition of the conjugation S(v + iw) = v - iw.

Two distinct skew contractions appear and are kept strictly apart:

* ``C_E`` lives on E = R^n and parametrizes V = (1 + iC_E)E;
* ``C_V`` lives on V itself, with the inner product gamma = Re<.,.>, and
  encodes the imaginary part omega of the ambient inner product via
  omega(v, w) = gamma(v, C_V w).
"""

from dataclasses import dataclass, field

import numpy as np

from .matfun import (
    ABS_FLOOR,
    herm_eig,
    herm_fun,
    psd_check,
    require_skew,
)

STRICT_MARGIN = 1e-8


class NotStrictError(ValueError):
    """Skew contraction has operator norm too close to 1."""


class NotStandardError(ValueError):
    """Vectors do not span a standard real subspace."""


class DegenerateBasisError(ValueError):
    """Fixed-point space of J Delta^{1/2} has the wrong real dimension."""


class NotPositiveDefiniteError(ValueError):
    """The sesquilinear form gamma + i omega is not positive semidefinite."""


# ---------------------------------------------------------------------------
# real/complex bookkeeping for antilinear maps
# ---------------------------------------------------------------------------

def realify(x):
    """C^n vector (or matrix of column vectors) -> stacked R^{2n} form."""
    x = np.asarray(x, dtype=complex)
    return np.concatenate([x.real, x.imag], axis=0)


def unrealify(r):
    """Inverse of :func:`realify`."""
    r = np.asarray(r, dtype=float)
    n = r.shape[0] // 2
    return r[:n] + 1j * r[n:]


def antilinear_real_matrix(A):
    """Real 2n x 2n matrix of the antilinear map x -> A conj(x)."""
    A = np.asarray(A, dtype=complex)
    Ar, Ai = A.real, A.imag
    return np.block([[Ar, Ai], [Ai, -Ar]])


def real_span_projector(vectors):
    """Orthogonal projector in R^{2n} onto the real span of complex vectors.

    ``vectors`` is an (n, k) complex array whose columns span the subspace.
    """
    R = realify(np.asarray(vectors, dtype=complex))
    Q, _ = np.linalg.qr(R)
    return Q @ Q.T


def subspace_distance(vectors1, vectors2):
    """Gap between two real subspaces of C^n (norm of projector difference)."""
    P1 = real_span_projector(vectors1)
    P2 = real_span_projector(vectors2)
    return float(np.linalg.norm(P1 - P2, 2))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StandardSubspaceE:
    """Real Hilbert space E = R^n with a skew-symmetric contraction C_E.

    Encodes the real subspace V = (1 + i C_E) E of C^n, which is standard
    exactly when C_E is a strict contraction.
    """

    C_E: np.ndarray

    def __post_init__(self):
        C = require_skew(self.C_E)
        if np.linalg.norm(C, 2) > 1.0 + 1e-10:
            raise ValueError("C_E must be a contraction")
        object.__setattr__(self, "C_E", C)

    @property
    def n(self):
        return self.C_E.shape[0]

    def is_strict(self, margin=STRICT_MARGIN):
        """True when the largest singular value stays below 1 - margin."""
        if self.n == 0:
            return True
        return np.linalg.norm(self.C_E, 2) < 1.0 - margin

    def subspace_basis(self):
        """Columns (1 + iC_E) e_k spanning V over the reals."""
        return np.eye(self.n) + 1j * self.C_E


@dataclass(frozen=True)
class ModularPair:
    """Modular objects (Delta, J) of a standard subspace.

    ``delta`` is Hermitian positive definite; the antilinear involution is
    x -> j_mat @ conj(x).  They satisfy J Delta J = Delta^{-1}.
    """

    delta: np.ndarray
    j_mat: np.ndarray

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=complex)
        j_mat = np.asarray(self.j_mat, dtype=complex)
        w, _ = herm_eig(delta)
        if w[0] <= 0:
            raise ValueError("delta must be positive definite")
        invol = j_mat @ np.conj(j_mat)
        if np.linalg.norm(invol - np.eye(len(j_mat)), 2) > 1e-8:
            raise ValueError("J is not an antilinear involution")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "j_mat", j_mat)

    @property
    def n(self):
        return self.delta.shape[0]

    def delta_power(self, p):
        """Delta^p via the spectral calculus (p may be complex)."""
        return herm_fun(self.delta, lambda lam: lam ** p)

    def j_apply(self, x):
        """Apply the antilinear involution J to vectors/columns."""
        return self.j_mat @ np.conj(x)

    def jdj(self):
        """The linear operator J Delta J."""
        return self.j_mat @ np.conj(self.delta) @ np.conj(self.j_mat)

    def s_mat(self):
        """Antilinear matrix of S = J Delta^{1/2} (as x -> S_mat conj(x))."""
        return self.j_mat @ np.conj(self.delta_power(0.5))


@dataclass(frozen=True)
class ContractionOnV:
    """Skew contraction C_V on a real subspace V with inner product gamma.

    ``basis`` (optional) maps coordinate vectors to the ambient space; its
    columns are gamma-orthonormal when produced by
    :func:`contraction_on_V_from_modular`.
    """

    matrix: np.ndarray
    basis: np.ndarray | None = field(default=None)

    def __post_init__(self):
        C = require_skew(self.matrix)
        if np.linalg.norm(C, 2) > 1.0 + 1e-10:
            raise ValueError("C_V must be a contraction")
        object.__setattr__(self, "matrix", C)
        if self.basis is not None:
            object.__setattr__(
                self, "basis", np.asarray(self.basis, dtype=complex))

    @property
    def m(self):
        return self.matrix.shape[0]

    def is_strict(self, margin=STRICT_MARGIN):
        if self.m == 0:
            return True
        return np.linalg.norm(self.matrix, 2) < 1.0 - margin

    def require_strict(self, margin=STRICT_MARGIN):
        if not self.is_strict(margin):
            raise NotStrictError("C_V is not a strict contraction")
        return self


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def modular_from_contraction(s: StandardSubspaceE) -> ModularPair:
    """Modular pair of V = (1 + iC_E)E: Delta = ((1-iC)/(1+iC))^2, J = conj.

    Raises
    ------
    NotStrictError
        If 1 + C_E^2 is numerically singular (C_E not strict).
    """
    if not s.is_strict():
        raise NotStrictError("C_E is not a strict contraction")
    K = 1j * s.C_E  # Hermitian, spectrum in (-1, 1)
    delta = herm_fun(K, lambda t: ((1.0 - t) / (1.0 + t)) ** 2)
    return ModularPair(delta=delta, j_mat=np.eye(s.n))


def fix_point_basis(mp: ModularPair):
    """Orthonormal basis (w.r.t. gamma = Re<.,.>) of V = Fix(J Delta^{1/2}).

    The antilinear involution S = J Delta^{1/2} is realized as a real-linear
    involution on R^{2n}; V is its +1 eigenspace.

    Raises
    ------
    DegenerateBasisError
        If the fixed-point space does not have real dimension n.
    """
    n = mp.n
    S_real = antilinear_real_matrix(mp.s_mat())
    P = 0.5 * (np.eye(2 * n) + S_real)
    U, sv, _ = np.linalg.svd(P)
    rank = int(np.sum(sv > 1e-8 * max(sv[0], 1.0)))
    if rank != n:
        raise DegenerateBasisError(
            f"Fix(J Delta^(1/2)) has real dimension {rank}, expected {n}")
    return unrealify(U[:, :rank])


def check_standard(s: StandardSubspaceE) -> dict:
    """Report on the equivalent characterizations of standardness.

    Evaluates, from the spectral data of C_E, the numerically checkable
    conditions: injectivity of 1 + C^2, strict contractivity, triviality of
    V i* iV (the (-i)-eigenspace of C), injectivity of 1 +- iC, and fullness
    of V + iV.  All booleans agree for consistent input.
    """
    C = s.C_E
    n = s.n
    K = 1j * C
    w, _ = herm_eig(K)  # spectrum of iC in [-1, 1]
    smax = float(np.abs(w).max(initial=0.0))

    min_eig_1_plus_C2 = 1.0 - smax ** 2
    # dim of the (-i)-eigenspace of C = multiplicity of eigenvalue +1 of iC
    dim_v_cap_iv = int(np.sum(w > 1.0 - STRICT_MARGIN))
    basis = s.subspace_basis()
    stacked = realify(np.concatenate([basis, 1j * basis], axis=1))
    sv = np.linalg.svd(stacked, compute_uv=False)
    rank_v_plus_iv = int(np.sum(sv > 1e-9 * max(sv[0], 1.0)))

    margin = 1.0 - smax
    report = {
        "one_plus_C2_injective": min_eig_1_plus_C2 > 2.0 * STRICT_MARGIN
        - STRICT_MARGIN ** 2,
        "strict_contraction": margin > STRICT_MARGIN,
        "V_cap_iV_trivial": dim_v_cap_iv == 0,
        "one_pm_iC_injective": margin > STRICT_MARGIN,
        "V_plus_iV_full": rank_v_plus_iv == 2 * n and dim_v_cap_iv == 0,
        "min_eig_1_plus_C2": min_eig_1_plus_C2,
        "max_singular_value": smax,
        "dim_V_cap_iV": dim_v_cap_iv,
        "rank_V_plus_iV": rank_v_plus_iv,
    }
    flags = [report[k] for k in (
        "one_plus_C2_injective", "strict_contraction", "V_cap_iV_trivial",
        "one_pm_iC_injective", "V_plus_iV_full")]
    report["standard"] = all(flags)
    report["agree"] = len(set(flags)) == 1
    return report


def split_kernel(s: StandardSubspaceE, tol=1e-8):
    """Orthogonal split E = E0 + E1 with E0 = ker(C^2 + 1).

    Returns orthonormal real bases (columns) of E0 and E1.  C restricted to
    E0 is a complex structure; on E1 it is a strict contraction.
    """
    C = s.C_E
    M = np.eye(s.n) + C @ C  # symmetric PSD, eigenvalues 1 - sigma^2
    w, V = herm_eig(M)
    V = V.real
    in_kernel = w < tol
    return V[:, in_kernel], V[:, ~in_kernel]


def contraction_on_V_from_modular(mp: ModularPair) -> ContractionOnV:
    """Contraction C_V on V = Fix(J Delta^{1/2}) encoding the form omega.

    C_V is the restriction to V of i (Delta - 1)/(Delta + 1); the returned
    matrix is expressed in a gamma-orthonormal basis of V, which is stored
    on the result.  Verifies Im<v, w> = gamma(v, C_V w) on that basis.
    """
    basis = fix_point_basis(mp)
    chat = 1j * herm_fun(mp.delta, lambda lam: (lam - 1.0) / (lam + 1.0))
    CB = chat @ basis
    C_V = (basis.conj().T @ CB).real  # gamma(b_k, Chat b_l)
    # consistency: the imaginary part of the ambient product is gamma(., C.)
    gram = basis.conj().T @ basis
    defect = float(np.abs(gram.imag - C_V).max(initial=0.0))
    if defect > 1e-9:
        raise ValueError(
            f"omega(v, w) = gamma(v, C_V w) fails by {defect:.3e}")
    # Chat must map V into V
    resid = float(np.abs(CB - basis @ C_V).max(initial=0.0))
    if resid > 1e-8:
        raise ValueError("Chat does not leave V invariant")
    return ContractionOnV(matrix=C_V, basis=basis)


def modular_from_subspace(V_basis) -> ModularPair:
    """Modular pair of the standard subspace spanned (over R) by ``V_basis``.

    ``V_basis`` is an (n, n) complex array whose columns form a real basis
    of V.  S is the conjugation v + iw -> v - iw with respect to V; the
    returned pair is its polar decomposition S = J Delta^{1/2}.

    Raises
    ------
    NotStandardError
        If V i* iV != {0} or V + iV != C^n numerically.
    """
    B = np.asarray(V_basis, dtype=complex)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise NotStandardError(
            "a standard subspace of C^n needs exactly n real basis vectors")
    n = B.shape[0]
    if n == 0:
        raise NotStandardError("empty basis")
    stacked = realify(np.concatenate([B, 1j * B], axis=1))
    sv = np.linalg.svd(stacked, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise NotStandardError("V + iV does not span C^n / V meets iV")
    # S fixes every basis column: S x = A conj(x) with A = B conj(B)^{-1}
    A = B @ np.linalg.inv(np.conj(B))
    delta = A.T @ np.conj(A)  # Delta = S* S
    j_mat = A @ np.conj(herm_fun(delta, lambda lam: lam ** -0.5))
    mp = ModularPair(delta=delta, j_mat=j_mat)
    if subspace_distance(fix_point_basis(mp), B) > 1e-8:
        raise NotStandardError("fixed-point space does not reproduce V")
    return mp


def real_reflection_positivity(s: StandardSubspaceE) -> dict:
    """Reflection positivity of (C^n, V, sigma) with sigma = conjugation.

    Checks that gamma_sigma(xi, eta) = <sigma xi, eta> is real and PSD on
    V = (1 + iC)E, that its nullspace has the dimension of ker(C^2 + 1),
    and — for strict C — the square-root identities of the operator
    F = sqrt((1 - iC)/(1 + iC)):  ||F xi||^2 = <sigma xi, xi>  and
    sigma F sigma = F^{-1}.
    """
    C = s.C_E
    basis = s.subspace_basis()
    gram_sigma = basis.T @ basis  # <sigma b_k, b_l> = b_k^T b_l
    imag_defect = float(np.abs(gram_sigma.imag).max(initial=0.0))
    G = gram_sigma.real
    is_psd, min_eig = psd_check(G, tol=1e-10)
    w = np.linalg.eigvalsh(G)
    null_dim = int(np.sum(w < 1e-8 * max(w[-1], 1.0)))
    E0, _ = split_kernel(s)
    report = {
        "gamma_sigma_imag_defect": imag_defect,
        "gamma_sigma_psd": is_psd,
        "gamma_sigma_min_eig": min_eig,
        "null_dim": null_dim,
        "dim_V0": E0.shape[1],
        "null_matches_V0": null_dim == E0.shape[1],
    }
    if s.is_strict():
        K = 1j * C
        F = herm_fun(K, lambda t: np.sqrt((1.0 - t) / (1.0 + t)))
        lhs = np.real(np.sum(np.abs(F @ basis) ** 2, axis=0))
        rhs = np.real(np.diag(gram_sigma))
        report["F_norm_defect"] = float(np.abs(lhs - rhs).max(initial=0.0))
        report["F_inverse_defect"] = float(
            np.linalg.norm(np.conj(F) @ F - np.eye(s.n), 2))
    return report


def form_to_contraction(gamma, omega) -> ContractionOnV:
    """Skew contraction C with omega(v, w) = <[v], C[w]> on the completion.

    ``gamma`` is real symmetric PSD, ``omega`` real skew-symmetric.  The
    completion V_gamma is the quotient of R^m by the gamma-nullspace; the
    returned contraction acts on it (dimension = rank of gamma), with the
    inducing quotient map stored as ``basis`` (rows of the factor).

    Raises
    ------
    NotPositiveDefiniteError
        If h = gamma + i omega is not PSD — equivalently, if omega has
        components off the range of gamma or the induced operator exceeds
        norm 1.
    """
    gamma = np.asarray(gamma, dtype=float)
    omega = require_skew(omega)
    if np.linalg.norm(gamma - gamma.T, 2) > 1e-10 * max(
            np.linalg.norm(gamma, 2), 1.0):
        raise ValueError("gamma must be symmetric")
    is_psd, min_eig = psd_check(gamma, tol=1e-10)
    if not is_psd:
        raise NotPositiveDefiniteError(f"gamma has eigenvalue {min_eig:.3e}")
    scale = max(np.linalg.norm(gamma, 2), np.linalg.norm(omega, 2), 1.0)
    w, Q = herm_eig(gamma + 0j)
    Q = Q.real
    keep = w > 1e-10 * max(w[-1], 0.0) + ABS_FLOOR
    wr, Qr = w[keep], Q[:, keep]
    inv_sqrt = 1.0 / np.sqrt(wr)
    # C in the gamma-orthonormal coordinates of range(gamma)
    C = (inv_sqrt[:, None] * (Qr.T @ omega @ Qr)) * inv_sqrt[None, :]
    phi = np.sqrt(wr)[:, None] * Qr.T  # gamma = phi^T phi
    resid = float(np.abs(omega - phi.T @ C @ phi).max(initial=0.0))
    if resid > 1e-9 * scale:
        raise NotPositiveDefiniteError(
            f"omega has components outside range(gamma), residual {resid:.3e}")
    norm_C = np.linalg.norm(C, 2) if C.size else 0.0
    if norm_C > 1.0 + 1e-8:
        raise NotPositiveDefiniteError(
            f"induced operator has norm {norm_C:.6f} > 1")
    C = 0.5 * (C - C.T)
    if norm_C > 1.0:  # round tiny excursions back into the unit ball
        C = C / norm_C
    return ContractionOnV(matrix=C, basis=phi.astype(complex))
