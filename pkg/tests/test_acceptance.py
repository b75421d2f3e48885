"""Acceptance gate: ten criteria, one pass/fail line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines as the
criteria execute; each test prints exactly one verdict line.
"""

import time

import numpy as np
import pytest

from kmsrp.gns import cyclic_group, FormPDFunction, gns_build, \
    commutant_skew_basis, complex_extension, split_complex_kernel
from kmsrp.kms import (DiscreteFormMeasure, KmsFunction, NegativeAtomError,
                       kms_boundary_check, kms_infinity, phi_operator_form,
                       psi_eval, spectral_measure)
from kmsrp.matfun import herm_fun
from kmsrp.resolvent import (ResolventSpace, greens_identity_check,
                             matrix_coefficient_check)
from kmsrp.rpext import (RTau, ReflectionPositiveSpace, build_extension,
                         check_f_sharp_covariance,
                         check_positive_definite_group,
                         check_reflection_positive, extension_rp_space,
                         f_eval, f_sharp, fourier_partial_sum, graph_operator,
                         klein4_analysis, matsubara_coeff,
                         matsubara_coeff_scalar, odd_reflection_gram, rho,
                         u_minus, u_plus)
from kmsrp.subspace import (ContractionOnV, NotPositiveDefiniteError,
                            StandardSubspaceE, fix_point_basis,
                            form_to_contraction, modular_from_contraction,
                            subspace_distance)

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


def verdict(num, name, ok):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}  {name}")
    assert ok, f"criterion {num} ({name}) failed"


def random_skew(rng, n, norm):
    A = rng.normal(size=(n, n))
    S = A - A.T
    return S * (norm / np.linalg.norm(S, 2))


def fx1_kms():
    return KmsFunction(beta=1.0,
                       contraction=ContractionOnV(matrix=np.tanh(0.5) * ROT))


def test_criterion_01_modular_identity_suite():
    start = time.monotonic()
    ok = True
    count = 0
    for dim in (2, 4, 6, 8):
        for seed in range(25):
            rng = np.random.default_rng(1000 * dim + seed)
            C = random_skew(rng, dim, rng.uniform(0.3, 0.95))
            s = StandardSubspaceE(C_E=C)
            mp = modular_from_contraction(s)
            inv = herm_fun(mp.delta, lambda lam: 1.0 / lam)
            ok &= (np.linalg.norm(mp.jdj() - inv, 2)
                   <= 1e-10 * np.linalg.norm(mp.delta, 2))
            ok &= subspace_distance(fix_point_basis(mp),
                                    s.subspace_basis()) <= 1e-9
            count += 1
    elapsed = time.monotonic() - start
    ok &= count == 100 and elapsed < 5.0
    verdict(1, f"modular identities, 100 contractions in {elapsed:.2f}s", ok)


def test_criterion_02_kms_measure_roundtrip():
    k = fx1_kms()
    grid = np.arange(-5.0, 5.0 + 1e-9, 0.1)
    measure = spectral_measure(k)
    ok = measure.reflection_defect(k.beta) <= 1e-9
    resum = max(np.abs(measure.eval(t) - psi_eval(k, t)).max() for t in grid)
    ok &= resum <= 1e-10
    ok &= kms_boundary_check(k, grid) <= 1e-9
    # negative control: perturbing one atom must break the boundary law
    atoms = list(measure.atoms)
    atoms[0] = (atoms[0][0], 1.1 * atoms[0][1])
    bad = DiscreteFormMeasure(atoms=tuple(atoms))
    control = max(np.abs(bad.eval(t + 1j) - np.conj(bad.eval(t))).max()
                  for t in grid)
    ok &= control > 1e-3
    verdict(2, "thermal function <-> reflected measure roundtrip", ok)


def test_criterion_03_cayley_vs_polar():
    ok = True
    for seed in range(20):
        rng = np.random.default_rng(300 + seed)
        n = int(rng.choice([2, 4, 6]))
        beta = float(rng.uniform(0.5, 2.0))
        C = random_skew(rng, n, rng.uniform(0.3, 0.9))
        k = KmsFunction(beta=beta, contraction=ContractionOnV(matrix=C))
        f = build_extension(k)
        for t in np.linspace(0.0, beta, 11):
            ok &= np.abs(f_eval(f, RTau(t, 1))
                         - phi_operator_form(k, t)).max() <= 1e-9
    verdict(3, "Cayley power form vs polar u+- decomposition", ok)


def test_criterion_04_matsubara_convergence():
    start = time.monotonic()
    ts = np.arange(0.0, 2.0 + 1e-9, 0.01)
    sp = fourier_partial_sum(1.0, 1.0, 2000, ts, "+")
    sm = fourier_partial_sum(1.0, 1.0, 2000, ts, "-")
    ok = np.abs(sp - u_plus(1.0, 1.0, ts)).max() <= 1e-3
    ok &= np.abs(sm - u_minus(1.0, 1.0, ts)).max() <= 1e-3
    ok &= all(matsubara_coeff_scalar(1.0, 1.0, n) >= 0.0
              for n in range(0, 50))
    rng = np.random.default_rng(4)
    B = rng.normal(size=(4, 4))
    absD = herm_fun(B @ B.T + 0.2 * np.eye(4) + 0j,
                    lambda x: np.sqrt(x)).real
    for n in range(0, 13):
        ok &= np.linalg.eigvalsh(
            matsubara_coeff(absD, 1.0, n))[0] >= -1e-12
    elapsed = time.monotonic() - start
    ok &= elapsed < 10.0
    verdict(4, f"Matsubara partial sums at N=2000 in {elapsed:.2f}s", ok)


def test_criterion_05_extension_positivity():
    ok = True
    for seed in range(5):
        rng = np.random.default_rng(500 + seed)
        C = random_skew(rng, 4, rng.uniform(0.4, 0.9))
        beta = float(rng.uniform(0.6, 1.8))
        f = build_extension(
            KmsFunction(beta=beta, contraction=ContractionOnV(matrix=C)))
        elements = [RTau(t, e) for t, e in zip(
            rng.uniform(-beta, beta, 12), [0, 1] * 6)]
        rep = check_positive_definite_group(f, elements)
        ok &= rep["is_psd"] and rep["verdicts_agree"]
        grid = [0.0, beta / 8, beta / 4, 3 * beta / 8, beta / 2]
        ok &= check_reflection_positive(f, grid)["is_psd"]
        # the odd summand alone must fail
        ok &= not odd_reflection_gram(f, grid)["is_psd"]
    verdict(5, "extension positive definite + reflection positive; "
               "odd part fails", ok)


def test_criterion_06_f_sharp_covariance():
    ok = True
    for seed in range(3):
        rng = np.random.default_rng(600 + seed)
        C = random_skew(rng, 4, 0.7)
        f = build_extension(
            KmsFunction(beta=1.0, contraction=ContractionOnV(matrix=C)))
        gs = [RTau(t, e) for t, e in zip(rng.uniform(-2, 2, 20),
                                         [0, 1] * 10)]
        ok &= check_f_sharp_covariance(f, gs) <= 1e-10
        m = f.m
        for g in gs[:5]:
            F = f_sharp(f, g)
            ok &= np.abs(F[:m, m:]).max() == 0.0
            ok &= np.abs(F[m:, :m]).max() == 0.0
    verdict(6, "block function covariance under the grading generators", ok)


def test_criterion_07_os_quantization():
    f = build_extension(fx1_kms())
    k = fx1_kms()
    ts = [0.0, 1 / 8, 1 / 4, 3 / 8, 1 / 2]
    space = extension_rp_space(f, ts)
    twisted = space.twisted_gram()
    m = f.m
    ok = True
    for a, ta in enumerate(ts):
        for b, tb in enumerate(ts):
            blk = twisted[a * m:(a + 1) * m, b * m:(b + 1) * m]
            ok &= np.abs(blk - psi_eval(k, 1j * (ta + tb))).max() <= 1e-9
    w = np.linalg.eigvalsh(twisted)
    ok &= w[0] >= -1e-8 * max(1.0, w[-1])
    verdict(7, "twisted Gram equals the thermal kernel; quotient PSD", ok)


def test_criterion_08_resolvent_realization():
    space = ResolventSpace(beta=1.0, lam=1.0, m=2, I=ROT)
    ok = greens_identity_check(space, 2000)["coefficient_defect"] <= 1e-12
    rng = np.random.default_rng(8)
    basis = np.eye(4)
    for kidx in range(10):
        g = RTau(float(rng.uniform(-1, 1)), kidx % 2)
        v = basis[rng.integers(0, 4)]
        w = basis[rng.integers(0, 4)]
        ok &= matrix_coefficient_check(space, v, w, g, 2000) <= 1e-3
    ns = [250, 500, 1000, 2000]
    errs = [matrix_coefficient_check(space, basis[0], basis[0],
                                     RTau(0.0, 0), N) for N in ns]
    slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    ok &= -2.0 <= slope <= -0.5
    verdict(8, f"resolvent matrix coefficients (slope {slope:.2f})", ok)


def test_criterion_09_quotient_and_finite_group_suite():
    ok = True
    # (gamma, omega) criterion: 50 accepted, 50 rejected
    for seed in range(50):
        rng = np.random.default_rng(900 + seed)
        n = 3
        L = rng.normal(size=(n, n))
        gamma = L @ L.T + 0.05 * np.eye(n)
        R = np.linalg.cholesky(gamma)
        S = random_skew(rng, n, 0.85)
        conv = form_to_contraction(gamma, R @ S @ R.T)
        ok &= np.linalg.norm(conv.matrix, 2) <= 1.0 + 1e-10
        bad = random_skew(rng, n, 1.4)
        try:
            form_to_contraction(gamma, R @ bad @ R.T)
            ok = False
        except NotPositiveDefiniteError:
            pass
    # split after extend is the identity on the complex Gram
    base = cyclic_group(4)
    phi = FormPDFunction(
        group=base, values=tuple(np.array([[v]], dtype=complex)
                                 for v in (2.0, 1.0, 0.0, 1.0)))
    basis = commutant_skew_basis(gns_build(phi)["rep"])
    Cc = basis[0] * (0.6 / np.linalg.norm(basis[0], 2))
    K = complex_extension(phi, Cc).big_gram()
    C2, f2 = split_complex_kernel(K.real, K.imag)
    ok &= np.abs(f2.T @ (np.eye(len(C2)) + 1j * C2) @ f2 - K).max() <= 1e-9
    # Klein-four table, exact for rational inputs
    rep = klein4_analysis(2.0, 1.0, 1.0, 0.0)
    ok &= rep["f"] == {"1": 6.0, "tau": 4.0, "sigma": 4.0, "sigma_tau": 2.0}
    ok &= rep["consistent"]
    # graph-operator formula on the two-point space with |Z| = 1/2
    z = 0.5
    gram = np.array([[1 + z * z, 1 - z * z], [1 - z * z, 1 + z * z]])
    theta = np.array([[0.0, 1.0], [1.0, 0.0]])
    data = graph_operator(
        ReflectionPositiveSpace(gram=gram, theta=theta, plus=(0,)))
    ok &= abs(data["phi_tau"][0, 0] - 0.6) <= 1e-10
    verdict(9, "form quotient criterion, complex extension, Klein four, "
               "graph operator", ok)


def test_criterion_10_infinite_beta():
    rng = np.random.default_rng(10)
    measure = DiscreteFormMeasure(atoms=tuple(
        (lam, w * np.eye(1)) for lam, w in
        ((0.0, 0.2), (0.5, 0.7), (1.3, 0.4), (3.0, 0.2))))
    pts = rng.normal(size=50) + 1j * np.abs(rng.normal(size=50))
    rep = kms_infinity(measure, np.linspace(0.0, 2.0, 8),
                       half_plane_points=pts)
    ok = rep["boundedness_excess"] <= 1e-12
    ok &= rep["reflection_psd"]
    bad = DiscreteFormMeasure(atoms=((1.0, np.eye(1) + 0j),
                                     (-0.5, 0.3 * np.eye(1) + 0j)))
    try:
        kms_infinity(bad, [0.0, 1.0])
        ok = False
    except NegativeAtomError:
        pass
    verdict(10, "zero-temperature limit: boundedness, positivity, "
                "negative atom rejected", ok)
