"""Form-valued positive definite functions on finite groups, the GNS
construction, kernel calculus, and complex extensions of real positive
definite functions.

The reproducing kernel Hilbert space of a finite kernel is realized as the
column space of its Gram matrix; rank is cut at 1e-10 times the largest
eigenvalue.  Everything here is exact finite-dimensional linear algebra.
"""

from dataclasses import dataclass, field

import numpy as np

from .matfun import herm_eig, psd_check
from .subspace import NotPositiveDefiniteError, form_to_contraction

RANK_CUT = 1e-10


class NotTauInvariantError(ValueError):
    """phi o tau != phi; no canonical extension exists."""


class NonCommutingError(ValueError):
    """Kernel values do not commute pointwise."""


class NotCommutingError(ValueError):
    """Operator does not commute with the GNS representation."""


class NotContractionError(ValueError):
    """Operator norm exceeds 1."""


# ---------------------------------------------------------------------------
# finite groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``table[i, j]`` is the index of the product of elements i and j.  The
    unit and inverse table are derived; associativity, unit and inverse
    laws are verified exhaustively at construction.
    """

    table: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.table, dtype=int)
        n = T.shape[0]
        if T.shape != (n, n) or n == 0:
            raise ValueError("multiplication table must be square and nonempty")
        units = [e for e in range(n)
                 if all(T[e, g] == g and T[g, e] == g for g in range(n))]
        if len(units) != 1:
            raise ValueError("group must have exactly one unit")
        unit = units[0]
        inverse = np.full(n, -1, dtype=int)
        for g in range(n):
            inv = np.flatnonzero(T[g] == unit)
            if len(inv) != 1 or T[inv[0], g] != unit:
                raise ValueError(f"element {g} has no two-sided inverse")
            inverse[g] = inv[0]
        for a in range(n):
            for b in range(n):
                if not np.array_equal(T[T[a, b]], T[a][T[b]]):
                    raise ValueError("multiplication table is not associative")
        object.__setattr__(self, "table", T)
        object.__setattr__(self, "_unit", int(unit))
        object.__setattr__(self, "_inverse", inverse)

    @property
    def order(self):
        return self.table.shape[0]

    @property
    def unit(self):
        return self._unit

    def mul(self, a, b):
        return int(self.table[a, b])

    def inv(self, a):
        return int(self._inverse[a])


def cyclic_group(n) -> FiniteGroup:
    """Z/nZ with elements 0..n-1."""
    idx = np.arange(n)
    return FiniteGroup(table=(idx[:, None] + idx[None, :]) % n)


@dataclass(frozen=True)
class TauDoubledGroup:
    """G_tau = G x| {1, tau} for an order-2 automorphism tau of G.

    Elements are indexed g + order(G) * eps; multiplication follows
    (g, eps)(h, delta) = (g tau^eps(h), eps xor delta).  ``group`` is the
    resulting FiniteGroup; ``base`` the original one.
    """

    base: FiniteGroup
    tau: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=int)
        n = self.base.order
        T = self.base.table
        if sorted(tau) != list(range(n)):
            raise ValueError("tau must be a permutation of the group")
        for a in range(n):
            for b in range(n):
                if tau[T[a, b]] != T[tau[a], tau[b]]:
                    raise ValueError("tau must be an automorphism")
            if tau[tau[a]] != a:
                raise ValueError("tau must be an involution")
        big = np.zeros((2 * n, 2 * n), dtype=int)
        for a in range(2 * n):
            ga, ea = a % n, a // n
            for b in range(2 * n):
                gb, eb = b % n, b // n
                h = tau[gb] if ea else gb
                big[a, b] = T[ga, h] + n * (ea ^ eb)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "group", FiniteGroup(table=big))

    @property
    def n(self):
        return self.base.order

    @property
    def tau_element(self):
        """Index of (unit, tau) in the doubled group."""
        return self.base.unit + self.n


def klein_four() -> TauDoubledGroup:
    """The Klein-4 group as (Z/2)_tau with trivial tau action."""
    return TauDoubledGroup(base=cyclic_group(2), tau=np.array([0, 1]))


# ---------------------------------------------------------------------------
# positive definite functions and GNS
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormPDFunction:
    """A Bil(V)-valued function on a finite group: one m x m value per element."""

    group: FiniteGroup
    values: tuple

    def __post_init__(self):
        vals = tuple(np.asarray(M, dtype=complex) for M in self.values)
        if len(vals) != self.group.order:
            raise ValueError("need one value per group element")
        object.__setattr__(self, "values", vals)

    @property
    def m(self):
        return self.values[0].shape[0]

    def big_gram(self):
        """Gram of the kernel K((x,v),(y,w)) = phi(x y^{-1})(v, w)."""
        G, m = self.group, self.m
        n = G.order
        out = np.zeros((n * m, n * m), dtype=complex)
        for x in range(n):
            for y in range(n):
                out[x * m:(x + 1) * m, y * m:(y + 1) * m] = self.values[
                    G.mul(x, G.inv(y))]
        defect = float(np.abs(out - out.conj().T).max(initial=0.0))
        if defect > 1e-8 * max(1.0, float(np.abs(out).max(initial=0.0))):
            raise NotPositiveDefiniteError(
                f"phi(g^-1) != phi(g)* (defect {defect:.3e})")
        return 0.5 * (out + out.conj().T)


def gns_build(phi: FormPDFunction, tol=1e-8):
    """GNS construction: unitaries U_g and j with phi(g)(v,w) = <j v, U_g j w>.

    Returns a dict with the representation matrices (in orthonormal
    coordinates on the cyclic space), the map j, the Hilbert dimension,
    and the reconstruction/unitarity defects.

    Raises
    ------
    NotPositiveDefiniteError
        If the big Gram of phi fails the PSD check.
    """
    G, m = phi.group, phi.m
    n = G.order
    gram = phi.big_gram()
    is_psd, min_eig = psd_check(gram, tol)
    if not is_psd:
        raise NotPositiveDefiniteError(f"Gram min eigenvalue {min_eig:.3e}")
    w, U = herm_eig(gram)
    keep = w > RANK_CUT * max(w[-1], 0.0)
    coords = np.sqrt(np.clip(w[keep], 0.0, None))[:, None] * U[:, keep].conj().T
    pinv = U[:, keep] * (1.0 / np.sqrt(w[keep]))[None, :]
    # U_g sends the kernel vector at (y, w) to the one at (y g^{-1}, w)
    reps = []
    for g in range(n):
        P = np.zeros((n * m, n * m))
        for y in range(n):
            tgt = G.mul(y, G.inv(g))
            P[tgt * m:(tgt + 1) * m, y * m:(y + 1) * m] = np.eye(m)
        reps.append(coords @ P @ pinv)
    j = coords[:, G.unit * m:(G.unit + 1) * m]
    recon = 0.0
    uni = 0.0
    dim = coords.shape[0]
    for g in range(n):
        R = reps[g]
        uni = max(uni, float(np.linalg.norm(
            R.conj().T @ R - np.eye(dim), 2)))
        recon = max(recon, float(np.abs(
            j.conj().T @ R @ j - phi.values[g]).max(initial=0.0)))
    homo = 0.0
    for a in range(n):
        for b in range(n):
            homo = max(homo, float(np.linalg.norm(
                reps[a] @ reps[b] - reps[G.mul(a, b)], 2)))
    return {
        "rep": reps,
        "j": j,
        "dim": dim,
        "reconstruction_defect": recon,
        "unitarity_defect": uni,
        "homomorphism_defect": homo,
        "gram_min_eig": min_eig,
    }


def reflection_positive_check(phi: FormPDFunction, doubled: TauDoubledGroup,
                              plus, tol=1e-8):
    """(RP1)/(RP2) report for phi on G_tau with respect to G_+ = ``plus``.

    ``phi.group`` must be ``doubled.group``; ``plus`` lists base-group
    element indices.  On success the report carries the data of the
    reflection positive Hilbert space (Gram, theta permutation, E_+
    indices) in the layout expected by :func:`kmsrp.rpext.os_quantize`.
    """
    if phi.group is not doubled.group and not np.array_equal(
            phi.group.table, doubled.group.table):
        raise ValueError("phi must live on the doubled group")
    G, m = phi.group, phi.m
    n = G.order
    gram = phi.big_gram()
    rp1, rp1_min = psd_check(gram, tol)
    tau_el = doubled.tau_element
    plus = [int(s) for s in plus]
    p = len(plus)
    rp2_gram = np.zeros((p * m, p * m), dtype=complex)
    for a, s in enumerate(plus):
        for b, t in enumerate(plus):
            g = G.mul(G.mul(s, tau_el), G.inv(t))
            rp2_gram[a * m:(a + 1) * m, b * m:(b + 1) * m] = phi.values[g]
    rp2_gram = 0.5 * (rp2_gram + rp2_gram.conj().T)
    rp2, rp2_min = psd_check(rp2_gram, tol)
    # theta = right translation by tau on the kernel vectors
    theta = np.zeros((n * m, n * m))
    for y in range(n):
        tgt = G.mul(y, tau_el)
        theta[tgt * m:(tgt + 1) * m, y * m:(y + 1) * m] = np.eye(m)
    return {
        "rp1": rp1,
        "rp1_min_eig": rp1_min,
        "rp2": rp2,
        "rp2_min_eig": rp2_min,
        "reflection_positive": rp1 and rp2,
        "gram": gram,
        "theta": theta,
        "plus_indices": tuple(
            s * m + k for s in plus for k in range(m)),
        "rp2_gram": rp2_gram,
    }


def tau_invariant_extend(phi: FormPDFunction,
                         doubled: TauDoubledGroup) -> FormPDFunction:
    """Extend a tau-invariant phi on G to G_tau by phi_hat(g, tau) = phi(g).

    Raises
    ------
    NotTauInvariantError
        If phi o tau != phi.
    """
    if phi.group.order != doubled.n:
        raise ValueError("phi must live on the base group")
    tau = doubled.tau
    for g in range(phi.group.order):
        d = np.abs(phi.values[g] - phi.values[tau[g]]).max(initial=0.0)
        if d > 1e-10 * max(1.0, float(np.abs(phi.values[g]).max(initial=0.0))):
            raise NotTauInvariantError(f"phi o tau != phi at element {g}")
    values = list(phi.values) + list(phi.values)
    return FormPDFunction(group=doubled.group, values=tuple(values))


# ---------------------------------------------------------------------------
# kernel calculus
# ---------------------------------------------------------------------------

def kernel_product(K1, K2, tol=1e-8):
    """Pointwise product of two commuting matrix-valued PSD kernels.

    ``K1``/``K2`` are (p, p, m, m) arrays.  Verifies the pointwise
    commutation K1(x,y) K2(x',y') = K2(x',y') K1(x,y), forms the product
    kernel, and returns it with a PSD report.

    Raises
    ------
    NonCommutingError
    """
    K1 = np.asarray(K1, dtype=complex)
    K2 = np.asarray(K2, dtype=complex)
    if K1.shape != K2.shape:
        raise ValueError("kernels must have equal shapes")
    p, _, m, _ = K1.shape
    scale = max(float(np.abs(K1).max(initial=0.0))
                * float(np.abs(K2).max(initial=0.0)), 1.0)
    for x in range(p):
        for y in range(p):
            for xp in range(p):
                for yp in range(p):
                    comm = (K1[x, y] @ K2[xp, yp]
                            - K2[xp, yp] @ K1[x, y])
                    if np.abs(comm).max(initial=0.0) > 1e-10 * scale:
                        raise NonCommutingError(
                            "kernel values do not commute pointwise")
    K = np.einsum("xyij,xyjk->xyik", K1, K2)
    G = K.transpose(0, 2, 1, 3).reshape(p * m, p * m)
    G = 0.5 * (G + G.conj().T)
    is_psd, min_eig = psd_check(G, tol)
    return K, {"is_psd": is_psd, "min_eig": min_eig}


def split_complex_kernel(A, B):
    """Split a complex PSD kernel K = A + iB on a finite set.

    ``A`` (real symmetric PSD) is the real part, ``B`` (real skew) the
    imaginary part.  Returns the skew contraction C on the real RKHS of A
    (in A-orthonormal coordinates) together with the factor ``phi`` with
    A = phi^T phi, so that B(x, y) = (phi^T C phi)(x, y).

    Raises
    ------
    NotPositiveDefiniteError
        If A + iB is not PSD (norm of C would exceed 1, or B has
        components off the range of A).
    """
    contraction = form_to_contraction(A, B)
    return contraction.matrix, contraction.basis.real


def commutant_skew_basis(reps, tol=1e-10):
    """Orthonormal basis of real skew matrices commuting with all ``reps``.

    ``reps`` is a list of real orthogonal matrices on R^d.  Solves the
    linear system [C, R] = 0 over the space of skew-symmetric matrices.
    """
    reps = [np.asarray(R) for R in reps]
    d = reps[0].shape[0]
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    if not pairs:
        return []
    cols = []
    for (i, j) in pairs:
        E = np.zeros((d, d))
        E[i, j], E[j, i] = 1.0, -1.0
        cols.append(np.concatenate([(R.real @ E - E @ R.real).ravel()
                                    for R in reps]))
    M = np.stack(cols, axis=1)
    _, sv, Vt = np.linalg.svd(M, full_matrices=True)
    null = Vt[np.concatenate([sv, np.zeros(Vt.shape[0] - len(sv))])
              <= tol * max(sv[0] if len(sv) else 1.0, 1.0)]
    basis = []
    for coef in null:
        C = np.zeros((d, d))
        for c, (i, j) in zip(coef, pairs):
            C[i, j] += c
            C[j, i] -= c
        basis.append(C)
    return basis


def complex_extension(phi: FormPDFunction, C, tol=1e-8) -> FormPDFunction:
    """Complex extension phi_C = phi + i C phi of a real PD function.

    ``C`` is a real skew contraction on the (real) GNS space of phi,
    expressed in the coordinates produced by :func:`gns_build`, and must
    commute with the representation.  The result is a positive definite
    FormPDFunction with Re phi_C = phi.

    Raises
    ------
    NotCommutingError, NotContractionError
    """
    data = gns_build(phi, tol)
    reps = data["rep"]
    for R in reps:
        if float(np.abs(R.imag).max(initial=0.0)) > 1e-10:
            raise ValueError("phi must be real-valued for complex extension")
    C = np.asarray(C, dtype=float)
    if np.linalg.norm(C + C.T, 2) > 1e-10 * max(np.linalg.norm(C, 2), 1.0):
        raise NotContractionError("C must be skew-symmetric")
    if np.linalg.norm(C, 2) > 1.0 + 1e-10:
        raise NotContractionError("C must be a contraction")
    for R in reps:
        if np.linalg.norm(C @ R.real - R.real @ C, 2) > 1e-10 * max(
                np.linalg.norm(R.real, 2), 1.0):
            raise NotCommutingError("C does not commute with the representation")
    j = data["j"].real
    values = tuple(j.T @ (np.eye(len(C)) + 1j * C) @ R.real @ j
                   for R in reps)
    out = FormPDFunction(group=phi.group, values=values)
    is_psd, min_eig = psd_check(out.big_gram(), tol)
    if not is_psd:
        raise NotPositiveDefiniteError(
            f"extension Gram has eigenvalue {min_eig:.3e}")
    return out


def jc_injectivity(gamma, omega, margin=1e-8):
    """True iff the contraction C of h = gamma + i omega is strict.

    Equivalently: the complexification map j_C of the GNS space of h is
    injective, and j(V) is a standard real subspace of its closure.
    """
    contraction = form_to_contraction(gamma, omega)
    C = contraction.matrix
    if C.size == 0:
        return True
    return bool(np.linalg.norm(C, 2) < 1.0 - margin)
