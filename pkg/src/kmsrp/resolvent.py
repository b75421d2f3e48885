"""Resolvent realization: bundle-valued Fourier sections on the 2 beta-circle
with inner product given by (lambda^2 - Laplacian)^{-1}.

Sections take values in V^2 = C^{2m}; even Fourier modes populate the first
block (periodic component), odd modes the second (antiperiodic component).
With the weights 1/(lambda^2 + (n pi / beta)^2) this space carries a unitary
representation of R_tau that is unitarily equivalent to the GNS
representation of the block function f# in the isotypic case |D| = lambda 1.
"""

from dataclasses import dataclass

import numpy as np

from .matfun import require_skew
from .rpext import RTau, matsubara_coeff_scalar, u_minus, u_plus


class DimensionMismatchError(ValueError):
    """Sections do not share dimensions with the ambient space."""


@dataclass(frozen=True)
class ResolventSpace:
    """The section space H_lambda for a single frequency lambda > 0."""

    beta: float
    lam: float
    m: int
    I: np.ndarray

    def __post_init__(self):
        if not (self.beta > 0 and self.lam > 0):
            raise ValueError("beta and lambda must be positive")
        I = require_skew(self.I)
        if I.shape[0] != self.m:
            raise DimensionMismatchError("I must be m x m")
        if np.linalg.norm(I @ I + np.eye(self.m), 2) > 1e-10:
            raise ValueError("I must be a complex structure (I^2 = -1)")
        object.__setattr__(self, "I", I)

    def weight(self, n):
        """Inner-product weight 1/(lambda^2 + (n pi / beta)^2) of mode n."""
        return 1.0 / (self.lam ** 2 + (n * np.pi / self.beta) ** 2)

    def c_plus(self):
        """c^lambda_+ = tanh(beta lambda / 2) * 2 lambda / beta."""
        return np.tanh(0.5 * self.beta * self.lam) * 2.0 * self.lam / self.beta

    def c_minus(self):
        """c^lambda_- = 2 lambda / beta."""
        return 2.0 * self.lam / self.beta


@dataclass(frozen=True)
class FourierSection:
    """Finitely supported Fourier section sum_n coeffs[n] chi_n.

    chi_n(t) = exp(i n pi t / beta); coefficients are vectors in C^{2m}
    with the parity constraint: even modes live in the first block, odd
    modes in the second.
    """

    beta: float
    m: int
    coeffs: dict

    def __post_init__(self):
        clean = {}
        for n, v in self.coeffs.items():
            v = np.asarray(v, dtype=complex)
            if v.shape != (2 * self.m,):
                raise DimensionMismatchError(
                    f"coefficient {n} has shape {v.shape}")
            if n % 2 == 0:
                if np.abs(v[self.m:]).max(initial=0.0) > 1e-12:
                    raise ValueError("even modes must have zero second block")
            elif np.abs(v[:self.m]).max(initial=0.0) > 1e-12:
                raise ValueError("odd modes must have zero first block")
            clean[int(n)] = v
        object.__setattr__(self, "coeffs", clean)

    def __call__(self, t):
        """Pointwise value in C^{2m} at circle parameter t."""
        out = np.zeros(2 * self.m, dtype=complex)
        for n, v in self.coeffs.items():
            out += v * np.exp(1j * n * np.pi * t / self.beta)
        return out


def inner_product(space: ResolventSpace, s1: FourierSection,
                  s2: FourierSection):
    """<s1, s2> = sum_n <s1_n, s2_n> / (lambda^2 + (n pi/beta)^2)."""
    for s in (s1, s2):
        if s.m != space.m or abs(s.beta - space.beta) > 1e-12:
            raise DimensionMismatchError("section does not match the space")
    total = 0.0 + 0.0j
    for n, v in s1.coeffs.items():
        w = s2.coeffs.get(n)
        if w is not None:
            total += np.vdot(v, w) * space.weight(n)
    return total


def inner_product_quadrature(space: ResolventSpace, s1: FourierSection,
                             s2: FourierSection, num_points=None):
    """The defining integral (1/2 beta) int <s1(t), ((l^2 - Lap)^{-1} s2)(t)> dt.

    Evaluated with the trapezoid rule on the periodic interval [0, 2 beta);
    serves as an independent oracle for :func:`inner_product`.
    """
    if num_points is None:
        nmax = max([abs(n) for n in list(s1.coeffs) + list(s2.coeffs)] + [1])
        num_points = 4 * nmax + 8
    resolved = FourierSection(
        beta=s2.beta, m=s2.m,
        coeffs={n: v * space.weight(n) for n, v in s2.coeffs.items()})
    ts = np.linspace(0.0, 2.0 * space.beta, num_points, endpoint=False)
    vals = [np.vdot(s1(t), resolved(t)) for t in ts]
    return np.mean(vals)


def j_map(space: ResolventSpace, v, N_max) -> FourierSection:
    """Embedding j(v1, v2) = sqrt(c+) sum chi_2n (v1, 0) + sqrt(c-) sum chi_{2n+1} (0, v2)."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (2 * space.m,):
        raise DimensionMismatchError("v must lie in V^2")
    cp, cm = np.sqrt(space.c_plus()), np.sqrt(space.c_minus())
    coeffs = {}
    for n in range(-N_max, N_max + 1):
        vec = np.zeros(2 * space.m, dtype=complex)
        if n % 2 == 0:
            vec[:space.m] = cp * v[:space.m]
        else:
            vec[space.m:] = cm * v[space.m:]
        if np.abs(vec).max(initial=0.0) > 0:
            coeffs[n] = vec
    return FourierSection(beta=space.beta, m=space.m, coeffs=coeffs)


def group_action(space: ResolventSpace, g: RTau,
                 s: FourierSection) -> FourierSection:
    """Unitary action of R_tau: (U_t s)(x) = s(t + x), and the reflection
    (U_tau s)(x) = (s_+(-x), iI s_-(-x))."""
    coeffs = s.coeffs
    if g.eps:
        reflected = {}
        for n, v in coeffs.items():
            w = np.zeros_like(v)
            if n % 2 == 0:
                w[:space.m] = v[:space.m]
            else:
                w[space.m:] = 1j * (space.I @ v[space.m:])
            reflected[-n] = w
        coeffs = reflected
    if g.t != 0.0:
        coeffs = {n: v * np.exp(1j * n * np.pi * g.t / space.beta)
                  for n, v in coeffs.items()}
    return FourierSection(beta=s.beta, m=s.m, coeffs=coeffs)


def f_sharp_value(space: ResolventSpace, g: RTau):
    """f#(g) for the isotypic |D| = lambda 1: diag(u+ (t), u- (t) (iI)^eps)."""
    m = space.m
    up = float(u_plus(space.lam, space.beta, g.t))
    um = float(u_minus(space.lam, space.beta, g.t))
    out = np.zeros((2 * m, 2 * m), dtype=complex)
    out[:m, :m] = up * np.eye(m)
    blk = um * np.eye(m, dtype=complex)
    if g.eps:
        blk = blk @ (1j * space.I)
    out[m:, m:] = blk
    return out


def matrix_coefficient_check(space: ResolventSpace, v, w, g: RTau, N_max):
    """|<j(v), U_g j(w)> - f#(g)(v, w)| at truncation N_max."""
    jv = j_map(space, v, N_max)
    jw = group_action(space, g, j_map(space, w, N_max))
    lhs = inner_product(space, jv, jw)
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    rhs = np.vdot(v, f_sharp_value(space, g) @ w)
    return abs(lhs - rhs)


def greens_identity_check(space: ResolventSpace, N_max):
    """Green's identities of (lambda^2 - Laplacian)^{-1} in weak form.

    Part 1 (exact closed forms): c_n^lambda (lambda^2 + (n pi/beta)^2)
    equals c^lambda_+ for even n and c^lambda_- for odd n.
    Part 2: the pairing <(lambda^2 - Lap) u^pm, s> = c^lambda_pm s(0)
    against truncated test sections of the matching parity.
    """
    beta, lam = space.beta, space.lam
    ns = np.arange(-N_max, N_max + 1)
    cn = matsubara_coeff_scalar(lam, beta, ns)
    targets = np.where(ns % 2 == 0, space.c_plus(), space.c_minus())
    coeff_defect = float(np.abs(
        cn * (lam ** 2 + (ns * np.pi / beta) ** 2) - targets).max())

    rng = np.random.default_rng(11)
    pairing_defect = 0.0
    for parity in (0, 1):
        modes = [n for n in range(-7, 8) if n % 2 == parity]
        s_coeffs = {}
        for n in modes:
            vec = np.zeros(2 * space.m, dtype=complex)
            block = slice(0, space.m) if parity == 0 else slice(
                space.m, 2 * space.m)
            vec[block] = rng.normal(size=space.m) + 1j * rng.normal(
                size=space.m)
            s_coeffs[n] = vec
        s = FourierSection(beta=beta, m=space.m, coeffs=s_coeffs)
        # u^pm as a section on the matching block, truncated at N_max
        e0 = np.zeros(space.m)
        e0[0] = 1.0
        u_coeffs = {}
        for n in range(-N_max, N_max + 1):
            if n % 2 != parity:
                continue
            vec = np.zeros(2 * space.m, dtype=complex)
            block = slice(0, space.m) if parity == 0 else slice(
                space.m, 2 * space.m)
            vec[block] = matsubara_coeff_scalar(lam, beta, n) * e0
            u_coeffs[n] = vec
        u_sec = FourierSection(beta=beta, m=space.m, coeffs=u_coeffs)
        # (lambda^2 - Lap) multiplies mode n by 1/weight(n); pair the
        # result with s in the plain L^2(dt / 2 beta) sense
        pair = sum(np.vdot(u_sec.coeffs[n] / space.weight(n), s.coeffs[n])
                   for n in u_coeffs if n in s.coeffs)
        c = space.c_plus() if parity == 0 else space.c_minus()
        target = c * np.vdot(u_sec_unit(space, parity, e0), s(0.0))
        pairing_defect = max(pairing_defect, abs(pair - target))
    return {"coefficient_defect": coeff_defect,
            "pairing_defect": float(pairing_defect)}


def u_sec_unit(space: ResolventSpace, parity, e0):
    """Block-placed unit vector used by the weak Green pairing."""
    vec = np.zeros(2 * space.m, dtype=complex)
    if parity == 0:
        vec[:space.m] = e0
    else:
        vec[space.m:] = e0
    return vec


def action_unitarity_defect(space: ResolventSpace, sections, gs):
    """Max norm distortion of the group action over sampled sections."""
    defect = 0.0
    for s in sections:
        norm0 = inner_product(space, s, s).real
        for g in gs:
            moved = group_action(space, g, s)
            defect = max(defect, abs(
                inner_product(space, moved, moved).real - norm0))
    return defect


def representation_defect(space: ResolventSpace, sections, gs):
    """Max coefficient defect of U_g U_h = U_{gh} including the reflection
    relation U_tau U_t U_tau = U_{-t}."""
    defect = 0.0
    tau = RTau(0.0, 1)
    for s in sections:
        for g in gs:
            for h in gs:
                lhs = group_action(space, g, group_action(space, h, s))
                rhs = group_action(space, g * h, s)
                defect = max(defect, _section_distance(lhs, rhs))
        for t in (0.3, 1.1):
            lhs = group_action(
                space, tau, group_action(
                    space, RTau(t, 0), group_action(space, tau, s)))
            rhs = group_action(space, RTau(-t, 0), s)
            defect = max(defect, _section_distance(lhs, rhs))
    return defect


def _section_distance(s1: FourierSection, s2: FourierSection):
    keys = set(s1.coeffs) | set(s2.coeffs)
    d = 0.0
    for n in keys:
        a = s1.coeffs.get(n, np.zeros(2 * s1.m))
        b = s2.coeffs.get(n, np.zeros(2 * s2.m))
        d = max(d, float(np.abs(a - b).max(initial=0.0)))
    return d


def cyclicity_rank(space: ResolventSpace, gs, N_small=3):
    """Rank of the span of U_g j(e_k) restricted to modes |n| <= N_small.

    Full rank m (2 N_small + 1) certifies that the image of j is
    generating at this truncation.
    """
    rows = []
    modes = list(range(-N_small, N_small + 1))
    for g in gs:
        for k in range(2 * space.m):
            e = np.zeros(2 * space.m)
            e[k] = 1.0
            sec = group_action(space, g, j_map(space, e, N_small))
            rows.append(np.concatenate(
                [sec.coeffs.get(n, np.zeros(2 * space.m, dtype=complex))
                 for n in modes]))
    M = np.stack(rows)
    sv = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(sv > 1e-10 * max(sv[0], 1.0)))
    return rank, space.m * (2 * N_small + 1)
