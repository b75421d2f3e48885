"""Reflection positive extensions on the group R_tau = R x| {1, tau}.

A beta-KMS function psi on the line, restricted to the imaginary axis,
yields the 2 beta-periodic function phi(t) = psi(it).  This module builds
the positive definite extension

    f(t, tau^eps) = u^+(t) + (iI)^eps u^-(t)

on R_tau, where u^+/u^- are the thermal (Matsubara) functions of
|D| = (1/beta) log((1 + |C|)/(1 - |C|)) and I is the complex structure from
the polar decomposition C = I |C| of the skew contraction.  f extends phi
(f(t, tau) = phi(t)), is reflection positive with respect to [0, beta/2],
and its Osterwalder--Schrader quantization recovers the KMS side.
"""

from dataclasses import dataclass, field

import numpy as np

from .matfun import DomainError, herm_eig, herm_fun, psd_check, require_skew
from .kms import KmsFunction, psi_eval
from .subspace import ContractionOnV


class NotThetaPositiveError(ValueError):
    """The twisted Gram on E_+ has a genuinely negative eigenvalue."""


class NotGraphError(ValueError):
    """E_+ meets the (-1)-eigenspace of theta; no graph operator exists."""


class IllPosedError(ValueError):
    """Samples are not consistent with a finite exponential atom set."""


# ---------------------------------------------------------------------------
# the group R_tau
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RTau:
    """Element (t, eps) of R_tau = R x| {1, tau} with tau(t) = -t.

    Group law: (t, eps)(s, delta) = (t + (-1)^eps s, eps xor delta).
    """

    t: float
    eps: int

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "eps", int(self.eps) & 1)

    def __mul__(self, other):
        sign = -1.0 if self.eps else 1.0
        return RTau(self.t + sign * other.t, self.eps ^ other.eps)

    def inverse(self):
        return RTau(self.t if self.eps else -self.t, self.eps)

    @staticmethod
    def identity():
        return RTau(0.0, 0)


# ---------------------------------------------------------------------------
# thermal functions u^+/u^- and their Matsubara expansions
# ---------------------------------------------------------------------------

def _u_scalar(lam, beta, t, sign):
    """u^{sign}_lambda(t) for scalar/array lam >= 0 and scalar/array t.

    On [0, beta]: (exp(-t lam) + sign exp(-(beta - t) lam)) / (1 + exp(-beta lam));
    extended by u(t + beta) = sign * u(t) to the full 2 beta-period.
    """
    lam = np.asarray(lam, dtype=float)
    t = np.asarray(t, dtype=float)
    tr = np.mod(t, 2.0 * beta)
    flip = tr > beta
    tr = np.where(flip, tr - beta, tr)
    num = np.exp(-tr * lam) + sign * np.exp(-(beta - tr) * lam)
    val = num / (1.0 + np.exp(-beta * lam))
    if sign < 0:
        val = np.where(flip, -val, val)
    return val


def _apply_spectral(absD, beta, t, sign):
    """Evaluate u^{sign} of a PSD matrix (or scalar) argument at scalar t."""
    absD = np.asarray(absD, dtype=float)
    if absD.ndim == 0:
        t = np.asarray(t, dtype=float)
        out = _u_scalar(float(absD), beta, t, sign)
        return out if t.ndim else float(out)
    w, V = herm_eig(absD + 0j)
    vals = _u_scalar(np.clip(w, 0.0, None), beta, float(t), sign)
    return ((V * vals) @ V.conj().T).real


def u_plus(absD, beta, t):
    """The beta-periodic thermal function u^+ of a PSD matrix or scalar."""
    return _apply_spectral(absD, beta, t, +1.0)


def u_minus(absD, beta, t):
    """The beta-antiperiodic thermal function u^- (u^-(t + beta) = -u^-(t))."""
    return _apply_spectral(absD, beta, t, -1.0)


def matsubara_coeff_scalar(lam, beta, n):
    """Fourier coefficient c_n of u^+/u^- at scalar frequency lam > 0.

    c_n = (1 - (-1)^n exp(-beta lam)) / (1 + exp(-beta lam))
          * 2 beta lam / ((beta lam)^2 + (n pi)^2);
    even n expand u^+, odd n expand u^-.  Nonnegative for all n.
    """
    lam = np.asarray(lam, dtype=float)
    n = np.asarray(n)
    sgn = np.where(n % 2 == 0, 1.0, -1.0)
    e = np.exp(-beta * lam)
    return (1.0 - sgn * e) / (1.0 + e) * 2.0 * beta * lam / (
        (beta * lam) ** 2 + (n * np.pi) ** 2)


def matsubara_coeff(absD, beta, n):
    """Matsubara coefficient c_n of a strictly positive matrix (or scalar).

    Raises
    ------
    DomainError
        If the spectrum touches 0 — split the zero modes into the constant
        component first.
    """
    absD = np.asarray(absD, dtype=float)
    if absD.ndim == 0:
        if absD <= 0:
            raise DomainError("Matsubara coefficients need lambda > 0")
        return float(matsubara_coeff_scalar(float(absD), beta, n))
    w, V = herm_eig(absD + 0j)
    if w[0] <= 1e-12 * max(w[-1], 1.0):
        raise DomainError("Matsubara coefficients need a positive matrix")
    vals = matsubara_coeff_scalar(w, beta, n)
    return ((V * vals) @ V.conj().T).real


def fourier_partial_sum(absD, beta, N, t, parity):
    """Partial Matsubara--Fourier sum S_N over indices |k| <= N.

    ``parity`` is '+' (even indices, approximating u^+) or '-' (odd
    indices, approximating u^-).  ``t`` may be a scalar or an array; for a
    matrix argument an array ``t`` returns a stack of matrices.
    """
    if parity not in ("+", "-"):
        raise ValueError("parity must be '+' or '-'")
    if N < 1:
        raise ValueError("N must be >= 1")
    start = 0 if parity == "+" else 1
    ks = np.arange(-N, N + 1)
    ks = ks[(ks % 2) == (start % 2)]
    t = np.asarray(t, dtype=float)

    def scalar_sum(lam):
        c = matsubara_coeff_scalar(lam, beta, ks)
        phases = np.exp(1j * np.pi * np.outer(np.atleast_1d(t), ks) / beta)
        val = (phases @ c).real
        return val if t.ndim else float(val[0])

    absD = np.asarray(absD, dtype=float)
    if absD.ndim == 0:
        if absD <= 0:
            raise DomainError("Matsubara sums need lambda > 0")
        return scalar_sum(float(absD))
    w, V = herm_eig(absD + 0j)
    if w[0] <= 1e-12 * max(w[-1], 1.0):
        raise DomainError("Matsubara sums need a positive matrix")
    per_eig = np.stack([np.atleast_1d(scalar_sum(lam)) for lam in w], -1)
    out = np.einsum("ik,tk,jk->tij", V, per_eig + 0j, V.conj()).real
    return out if t.ndim else out[0]


# ---------------------------------------------------------------------------
# the extension f on R_tau
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RPFunction:
    """The reflection positive extension f(t, tau^eps) = u^+(t) + (iI)^eps u^-(t).

    ``I`` and ``absD`` commute; ``absD`` is real symmetric PSD; on the
    complement of ker(absD), I is a complex structure (I^2 = -P1), while
    both vanish on the kernel, where f contributes the constant 1.
    """

    beta: float
    I: np.ndarray
    absD: np.ndarray

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        I = require_skew(self.I)
        absD = np.asarray(self.absD, dtype=float)
        w, V = herm_eig(absD + 0j)
        if w[0] < -1e-10 * max(abs(w[-1]), 1.0):
            raise ValueError("absD must be PSD")
        if np.linalg.norm(I @ absD - absD @ I, 2) > 1e-9 * max(
                np.linalg.norm(absD, 2), 1.0):
            raise ValueError("I must commute with absD")
        # complex-structure property on the support of absD
        cut = 1e-8 * max(w[-1], 1.0)
        P1 = (V[:, w > cut] @ V[:, w > cut].conj().T).real
        if np.linalg.norm(I @ I + P1, 2) > 1e-8:
            raise ValueError("I^2 = -1 must hold on the support of absD")
        object.__setattr__(self, "I", I)
        object.__setattr__(self, "absD", absD)

    @property
    def m(self):
        return self.absD.shape[0]

    def is_strict(self):
        """True when absD is strictly positive (no constant component)."""
        w = np.linalg.eigvalsh(self.absD)
        return w[0] > 1e-8 * max(w[-1], 1.0)


def build_extension(k: KmsFunction) -> RPFunction:
    """Extend the KMS function's phi to R_tau (on the space carrying C_V).

    Splits off ker(C_V), which contributes the constant component, and uses
    the polar decomposition C = I|C| with |D| = (1/beta) log((1+|C|)/(1-|C|))
    on the complement.
    """
    C = k.contraction.matrix
    beta = k.beta
    M = -C @ C  # = |C|^2
    w, V = herm_eig(M + 0j)
    sigma = np.sqrt(np.clip(w, 0.0, None))
    support = sigma > 1e-10
    lam = np.zeros_like(sigma)
    lam[support] = np.log((1.0 + sigma[support])
                          / (1.0 - sigma[support])) / beta
    absD = ((V * lam) @ V.conj().T).real
    inv_sigma = np.where(support, 1.0 / np.where(support, sigma, 1.0), 0.0)
    I = C @ ((V * inv_sigma) @ V.conj().T).real
    return RPFunction(beta=beta, I=I, absD=absD)


def f_eval(f: RPFunction, g: RTau):
    """Evaluate f at a group element; returns a complex m x m matrix."""
    up = u_plus(f.absD, f.beta, g.t)
    um = u_minus(f.absD, f.beta, g.t)
    if g.eps:
        return up.astype(complex) + 1j * (f.I @ um)
    return (up + um).astype(complex)


def odd_component(f: RPFunction, g: RTau):
    """The summand h f_2 alone: (iI)^eps u^-(t).  Not reflection positive."""
    um = u_minus(f.absD, f.beta, g.t)
    if g.eps:
        return 1j * (f.I @ um)
    return um.astype(complex)


def gram_from_function(values, m):
    """Hermitized block Gram from a dict-free callable convention.

    ``values`` is a 2D list/array of m x m blocks already evaluated;
    helper for the check routines below.
    """
    p = len(values)
    G = np.zeros((p * m, p * m), dtype=complex)
    for a in range(p):
        for b in range(p):
            G[a * m:(a + 1) * m, b * m:(b + 1) * m] = values[a][b]
    return 0.5 * (G + G.conj().T)


def check_positive_definite_group(f: RPFunction, elements, tol=1e-8):
    """PSD report for the kernel f(g_a g_b^{-1}) over sampled group elements.

    Also evaluates the equivalent 2x2 block kernel over the real parts
    (diagonal blocks f(t_a - t_b, 1), off-diagonal f(t_a + t_b, tau)) and
    reports whether both verdicts agree.
    """
    m = f.m
    vals = [[f_eval(f, a * b.inverse()) for b in elements] for a in elements]
    G = gram_from_function(vals, m)
    is_psd, min_eig = psd_check(G, tol)

    ts = [g.t for g in elements]
    p = len(ts)
    Q = np.zeros((2 * p * m, 2 * p * m), dtype=complex)
    for a, ta in enumerate(ts):
        for b, tb in enumerate(ts):
            diag = f_eval(f, RTau(ta - tb, 0))
            off = f_eval(f, RTau(ta + tb, 1))
            for sa in (0, 1):
                for sb in (0, 1):
                    blk = diag if sa == sb else off
                    ia = (2 * a + sa) * m
                    ib = (2 * b + sb) * m
                    Q[ia:ia + m, ib:ib + m] = blk
    Q = 0.5 * (Q + Q.conj().T)
    q_psd, q_min = psd_check(Q, tol)
    return {
        "is_psd": is_psd,
        "min_eig": min_eig,
        "block_is_psd": q_psd,
        "block_min_eig": q_min,
        "verdicts_agree": is_psd == q_psd,
    }


def check_reflection_positive(f: RPFunction, grid, tol=1e-8):
    """PSD report for the reflection kernel f(t + s, tau) on [0, beta/2]."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < -1e-12) or np.any(grid > f.beta / 2.0 + 1e-12):
        raise ValueError("reflection grid must lie in [0, beta/2]")
    vals = [[f_eval(f, RTau(ti + tj, 1)) for tj in grid] for ti in grid]
    G = gram_from_function(vals, f.m)
    is_psd, min_eig = psd_check(G, tol)
    return {"is_psd": is_psd, "min_eig": min_eig}


def odd_reflection_gram(f: RPFunction, grid, tol=1e-8):
    """Reflection kernel of the odd component alone (negative control).

    The summand (iI)^eps u^- is positive definite on R_tau but *not*
    reflection positive: its value at (beta, tau) is a negative operator.
    """
    grid = np.asarray(grid, dtype=float)
    vals = [[odd_component(f, RTau(ti + tj, 1)) for tj in grid]
            for ti in grid]
    G = gram_from_function(vals, f.m)
    is_psd, min_eig = psd_check(G, tol)
    return {"is_psd": is_psd, "min_eig": min_eig}


# ---------------------------------------------------------------------------
# the block function f-sharp and its bundle covariance
# ---------------------------------------------------------------------------

def f_sharp(f: RPFunction, g: RTau):
    """The 2m x 2m block function f#(t, tau^eps) = diag(u^+(t), u^-(t)(iI)^eps)."""
    m = f.m
    up = u_plus(f.absD, f.beta, g.t).astype(complex)
    um = u_minus(f.absD, f.beta, g.t).astype(complex)
    if g.eps:
        um = um @ (1j * f.I)
    out = np.zeros((2 * m, 2 * m), dtype=complex)
    out[:m, :m] = up
    out[m:, m:] = um
    return out


def rho(f: RPFunction, h: RTau):
    """The covariance cocycle on the generators (beta, 1) and (0, tau)."""
    m = f.m
    eye = np.eye(m, dtype=complex)
    if h.eps == 0 and abs(h.t - f.beta) <= 1e-12:
        return np.block([[eye, 0 * eye], [0 * eye, -eye]])
    if h.eps == 1 and abs(h.t) <= 1e-12:
        return np.block([[eye, 0 * eye], [0 * eye, 1j * f.I.astype(complex)]])
    raise ValueError("rho is defined on the generators (beta, 1) and (0, tau)")


def check_f_sharp_covariance(f: RPFunction, gs):
    """Max defect of f#(h g) = rho(h) f#(g) for the generating h's."""
    defect = 0.0
    for h in (RTau(f.beta, 0), RTau(0.0, 1)):
        R = rho(f, h)
        for g in gs:
            lhs = f_sharp(f, h * g)
            rhs = R @ f_sharp(f, g)
            defect = max(defect, float(np.abs(lhs - rhs).max(initial=0.0)))
    return defect


def integral_representation(f: RPFunction, sample=None):
    """Spectral atoms (lambda_j, P_j) of |D| and the reconstruction defect.

    f(t, tau^eps) = sum_j [u^+_{lambda_j}(t) + u^-_{lambda_j}(t) (iI)^eps] P_j.
    """
    w, V = herm_eig(f.absD + 0j)
    atoms = []
    for k in range(len(w)):
        lam = w[k]
        P = np.outer(V[:, k], V[:, k].conj()).real
        if atoms and abs(atoms[-1][0] - lam) <= 1e-9 * (1.0 + abs(lam)):
            atoms[-1] = (atoms[-1][0], atoms[-1][1] + P)
        else:
            atoms.append((lam, P))
    if sample is None:
        sample = [RTau(t, e) for t in np.linspace(0.0, 2 * f.beta, 7)
                  for e in (0, 1)]
    defect = 0.0
    for g in sample:
        recon = np.zeros((f.m, f.m), dtype=complex)
        for lam, P in atoms:
            up = _u_scalar(lam, f.beta, g.t, +1.0)
            um = _u_scalar(lam, f.beta, g.t, -1.0)
            term = float(up) * P.astype(complex)
            if g.eps:
                term = term + float(um) * (1j * f.I @ P)
            else:
                term = term + float(um) * P
            recon += term
        defect = max(defect,
                     float(np.abs(recon - f_eval(f, g)).max(initial=0.0)))
    return atoms, defect


def recover_psi(f: RPFunction, check_grid=None, tol=1e-6) -> KmsFunction:
    """Recover the unique beta-KMS function with f(t, tau) = psi(it).

    Inverts |D| = (1/beta) log((1+|C|)/(1-|C|)): the contraction is
    C = I tanh(beta |D| / 2).  Verifies the roundtrip on a t-grid.

    Raises
    ------
    IllPosedError
        If the roundtrip residual exceeds ``tol``.
    """
    absC = herm_fun(f.absD + 0j,
                    lambda lam: np.tanh(0.5 * f.beta * lam)).real
    C = f.I @ absC
    k = KmsFunction(beta=f.beta, contraction=ContractionOnV(matrix=C))
    if check_grid is None:
        check_grid = np.linspace(0.0, f.beta, 9)
    resid = 0.0
    for t in check_grid:
        lhs = f_eval(f, RTau(float(t) % (2 * f.beta), 1))
        rhs = psi_eval(k, 1j * (float(t) % (2 * f.beta)))  # valid on [0,beta]
        if float(t) % (2 * f.beta) <= f.beta:
            resid = max(resid, float(np.abs(lhs - rhs).max(initial=0.0)))
    if resid > tol:
        raise IllPosedError(
            f"f is not consistent with a finite KMS atom set ({resid:.3e})")
    return k


def fit_exponential_atoms(ts, values, lambdas, beta, tol=1e-6):
    """Least-squares weights a_j >= 0 with values(t) ~ sum_j a_j u^+_{l_j}(t).

    Returns the weight vector; raises IllPosedError when the residual of
    the linear fit exceeds ``tol`` (data not explained by the atom set).
    """
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    A = np.stack([_u_scalar(lam, beta, ts, +1.0) for lam in lambdas], axis=1)
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    resid = float(np.abs(A @ coef - values).max(initial=0.0))
    if resid > tol:
        raise IllPosedError(f"exponential fit residual {resid:.3e}")
    return coef


# ---------------------------------------------------------------------------
# reflection positive Hilbert spaces and OS quantization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReflectionPositiveSpace:
    """A finitely generated triple (E, E_+, theta) in generator coordinates.

    ``gram`` is the Hermitian Gram matrix of N generators, ``theta`` the
    matrix of the involution on generator coefficients (unitary w.r.t. the
    Gram), ``plus`` the indices of the generators spanning E_+.
    """

    gram: np.ndarray
    theta: np.ndarray
    plus: tuple

    def __post_init__(self):
        G = np.asarray(self.gram, dtype=complex)
        G = 0.5 * (G + G.conj().T)
        T = np.asarray(self.theta, dtype=complex)
        n = G.shape[0]
        if np.linalg.norm(T @ T - np.eye(n), 2) > 1e-8:
            raise ValueError("theta must be an involution")
        if np.linalg.norm(T.conj().T @ G @ T - G, 2) > 1e-8 * max(
                np.linalg.norm(G, 2), 1.0):
            raise ValueError("theta must be unitary for the Gram")
        object.__setattr__(self, "gram", G)
        object.__setattr__(self, "theta", T)
        object.__setattr__(self, "plus", tuple(int(i) for i in self.plus))

    def twisted_gram(self):
        """<theta g_a, g_b> restricted to the E_+ generators."""
        full = self.theta.conj().T @ self.gram
        idx = np.array(self.plus, dtype=int)
        T = full[np.ix_(idx, idx)]
        return 0.5 * (T + T.conj().T)


def os_quantize(space: ReflectionPositiveSpace, tol=1e-8):
    """Osterwalder--Schrader quantization of (E, E_+, theta).

    Returns a dict with the theta-twisted Gram on E_+, the quotient map
    sending E_+ generator coefficients to coordinates on the quantized
    space (nullspace removed), its dimension, and the nullspace dimension.

    Raises
    ------
    NotThetaPositiveError
        If the twisted Gram fails the PSD check.
    """
    T = space.twisted_gram()
    is_psd, min_eig = psd_check(T, tol)
    if not is_psd:
        raise NotThetaPositiveError(
            f"min eigenvalue of twisted Gram is {min_eig:.3e}")
    w, U = herm_eig(T)
    w = np.clip(w, 0.0, None)
    cut = 1e-8 * max(w[-1], 0.0)
    keep = w > cut
    q_map = (np.sqrt(w[keep])[:, None] * U[:, keep].conj().T)
    return {
        "gram_hat": T,
        "q_map": q_map,
        "hat_dim": int(keep.sum()),
        "null_dim": int(len(w) - keep.sum()),
        "min_eig": min_eig,
    }


def extension_rp_space(f: RPFunction, ts) -> ReflectionPositiveSpace:
    """The GNS data of f sampled at the E_+ generators U_{(-t, 0)} j(e_k).

    For each t in ``ts`` (inside [0, beta/2]) the generators of E_+ are
    U_{(-t,0)} j(e_k), k = 1..m; their theta-images U_{(t,tau)} j(e_k) are
    appended so that theta acts as a permutation of generators.
    """
    ts = [float(t) for t in ts]
    elements = [RTau(-t, 0) for t in ts] + [RTau(t, 1) for t in ts]
    p, m = len(elements), f.m
    G = np.zeros((p * m, p * m), dtype=complex)
    for a, ga in enumerate(elements):
        for b, gb in enumerate(elements):
            G[a * m:(a + 1) * m, b * m:(b + 1) * m] = f_eval(
                f, ga.inverse() * gb)
    theta = np.zeros((p * m, p * m))
    q = len(ts)
    for a in range(q):
        for k in range(m):
            theta[(a + q) * m + k, a * m + k] = 1.0
            theta[a * m + k, (a + q) * m + k] = 1.0
    plus = tuple(range(q * m))
    return ReflectionPositiveSpace(gram=G, theta=theta, plus=plus)


def graph_operator(space: ReflectionPositiveSpace, tol=1e-8):
    """Graph operator Z of the theta-positive subspace E_+.

    Writes E_+ inside E^1 + E^{-1} (theta eigenspaces) as the graph of a
    contraction Z and verifies the positive definite function it induces:
    Gram on E_+ = X*(1 + Z*Z)X and twisted Gram = X*(1 - Z*Z)X for the
    matrix X of E^1-components.  Also returns the normalized
    phi(tau) ~ (1 - Z*Z)/(1 + Z*Z) (up to unitary conjugation, returned in
    the E^1 eigenbasis).

    Raises
    ------
    NotGraphError
        If E_+ meets E^{-1} nontrivially (Z would be multivalued).
    """
    G, T = space.gram, space.theta
    w, U = herm_eig(G)
    keep = w > 1e-10 * max(w[-1], 0.0)
    phi = np.sqrt(w[keep])[:, None] * U[:, keep].conj().T  # coords, r x N
    pinv = U[:, keep] * (1.0 / np.sqrt(w[keep]))[None, :]
    theta_op = phi @ T @ pinv
    theta_op = 0.5 * (theta_op + theta_op.conj().T)
    wt, Ut = herm_eig(theta_op)
    Qm = Ut[:, wt < 0]
    Qp = Ut[:, wt >= 0]
    W = phi[:, list(space.plus)]
    Wp = Qp.conj().T @ W
    Wm = Qm.conj().T @ W
    Zt, *_ = np.linalg.lstsq(Wp.conj().T, Wm.conj().T, rcond=None)
    Z = Zt.conj().T  # least-squares solution of Z Wp ~ Wm
    resid = float(np.abs(Z @ Wp - Wm).max(initial=0.0))
    scale = max(float(np.abs(W).max(initial=0.0)), 1.0)
    if resid > 1e-7 * scale:
        raise NotGraphError(
            f"E_+ is not a graph over E^1 (residual {resid:.3e})")
    ZZ = Z.conj().T @ Z
    gram_plus = space.gram[np.ix_(space.plus, space.plus)]
    twisted = space.twisted_gram()
    d1 = np.abs(Wp.conj().T @ (np.eye(len(ZZ)) + ZZ) @ Wp
                - gram_plus).max(initial=0.0)
    d2 = np.abs(Wp.conj().T @ (np.eye(len(ZZ)) - ZZ) @ Wp
                - twisted).max(initial=0.0)
    phi_tau = herm_fun(ZZ, lambda a: (1.0 - a) / (1.0 + a))
    return {
        "Z": Z,
        "Z_norm": float(np.linalg.norm(Z, 2)) if Z.size else 0.0,
        "phi_tau": phi_tau,
        "psi_one_defect": float(d1),
        "psi_tau_defect": float(d2),
        "theta_involution_defect": float(
            np.linalg.norm(theta_op @ theta_op - np.eye(len(theta_op)), 2)),
    }


def klein4_analysis(a, b, c, d):
    """Reflection positivity bookkeeping for the Klein-4 group example.

    The vector v = (a, b, c, d) in the four joint eigenspaces of the
    commuting involutions U_sigma, U_tau generates the positive definite
    function f(g) = <v, U_g v> on the Klein-4 group.  Returns the closed
    forms of f, the theta-positivity of Cv and of Cv + C U_sigma v, the
    reflection positivity of the even/odd parts f_{+1}, f_{-1} under the
    left sigma-action, and a cross-check of all of it against the explicit
    4-dimensional representation.
    """
    A, B, Cq, D = (abs(x) ** 2 for x in (a, b, c, d))
    f1 = A + B + Cq + D
    ftau = A + B - Cq - D
    fsig = A - B + Cq - D
    fsigtau = A - B - Cq + D
    report = {
        "f": {"1": f1, "tau": ftau, "sigma": fsig, "sigma_tau": fsigtau},
        "Cv_theta_positive": ftau >= 0,
        "subspace_theta_positive": abs(d) <= abs(b) and abs(c) <= abs(a),
        "f_plus": {"1": A + Cq, "sigma": A + Cq,
                   "tau": A - Cq, "sigma_tau": A - Cq},
        "f_minus": {"1": B + D, "sigma": -(B + D),
                    "tau": B - D, "sigma_tau": -(B - D)},
        "f_plus_reflection_positive": abs(c) <= abs(a),
        "f_minus_reflection_positive": abs(d) <= abs(b),
    }
    # explicit representation: U_tau = diag(1,1,-1,-1), U_sigma = diag(1,-1,1,-1)
    v = np.array([a, b, c, d], dtype=complex)
    Ut = np.diag([1.0, 1.0, -1.0, -1.0])
    Us = np.diag([1.0, -1.0, 1.0, -1.0])
    elems = {"1": np.eye(4), "tau": Ut, "sigma": Us, "sigma_tau": Us @ Ut}
    defect = max(abs(np.vdot(v, elems[g] @ v) - report["f"][g])
                 for g in report["f"])
    vp = np.array([a, 0.0, c, 0.0], dtype=complex)
    vm = np.array([0.0, b, 0.0, d], dtype=complex)
    for key, vec in (("f_plus", vp), ("f_minus", vm)):
        for g in ("1", "tau", "sigma", "sigma_tau"):
            defect = max(defect,
                         abs(np.vdot(vec, elems[g] @ vec) - report[key][g]))
    # theta-positivity of Cv + C U_sigma v via the explicit 2x2 Gram
    M = np.array([
        [np.vdot(v, Ut @ v), np.vdot(v, Ut @ Us @ v)],
        [np.vdot(Us @ v, Ut @ v), np.vdot(Us @ v, Ut @ Us @ v)],
    ])
    is_psd, _ = psd_check(0.5 * (M + M.conj().T), 1e-10)
    report["subspace_gram_psd"] = bool(is_psd)
    report["closed_form_defect"] = float(defect)
    report["consistent"] = (
        defect <= 1e-12 * max(1.0, f1)
        and is_psd == report["subspace_theta_positive"]
        and (report["f_plus"]["tau"] >= 0)
        == report["f_plus_reflection_positive"]
        and (report["f_minus"]["tau"] >= 0)
        == report["f_minus_reflection_positive"]
    )
    return report
