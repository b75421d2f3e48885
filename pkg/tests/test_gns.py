"""Finite-group positive definite functions, GNS, and complex extensions."""

import numpy as np
import pytest

from kmsrp.gns import (FiniteGroup, FormPDFunction, NonCommutingError,
                       NotCommutingError, NotContractionError,
                       NotTauInvariantError, TauDoubledGroup,
                       commutant_skew_basis, complex_extension, cyclic_group,
                       gns_build, jc_injectivity, kernel_product, klein_four,
                       reflection_positive_check, split_complex_kernel,
                       tau_invariant_extend)
from kmsrp.matfun import psd_check
from kmsrp.subspace import NotPositiveDefiniteError

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


def scalar_values(*vals):
    return tuple(np.array([[v]], dtype=complex) for v in vals)


class TestGroups:
    def test_cyclic_group_laws(self):
        G = cyclic_group(5)
        assert G.order == 5 and G.unit == 0
        assert G.mul(2, 4) == 1
        assert G.inv(3) == 2

    def test_bad_table_rejected(self):
        with pytest.raises(ValueError):
            FiniteGroup(table=np.array([[0, 1], [1, 1]]))

    def test_doubled_group_law(self):
        doubled = klein_four()
        G = doubled.group
        assert G.order == 4
        tau = doubled.tau_element
        assert G.mul(tau, tau) == G.unit
        # Klein four: every element is an involution
        for g in range(4):
            assert G.mul(g, g) == G.unit

    def test_inversion_automorphism_on_z3(self):
        doubled = TauDoubledGroup(base=cyclic_group(3),
                                  tau=np.array([0, 2, 1]))
        G = doubled.group
        t = doubled.tau_element
        # tau g tau = g^{-1}
        for g in range(3):
            assert G.mul(G.mul(t, g), t) == doubled.base.inv(g)

    def test_non_automorphism_rejected(self):
        with pytest.raises(ValueError):
            TauDoubledGroup(base=cyclic_group(4), tau=np.array([0, 2, 1, 3]))


class TestGnsBuild:
    def test_z2_half_identity(self):
        # phi(1) = A = identity_2, phi(sigma) = B = A/2: 0 <= B <= A, so
        # positive definite with full GNS dimension 2m = 4
        G = cyclic_group(2)
        phi = FormPDFunction(group=G, values=(np.eye(2) + 0j,
                                              0.5 * np.eye(2) + 0j))
        data = gns_build(phi)
        assert data["dim"] == 4
        assert data["reconstruction_defect"] <= 1e-10
        assert data["unitarity_defect"] <= 1e-10
        assert data["homomorphism_defect"] <= 1e-10

    def test_b_above_a_rejected(self):
        G = cyclic_group(2)
        phi = FormPDFunction(group=G, values=scalar_values(1.0, 1.5))
        with pytest.raises(NotPositiveDefiniteError):
            gns_build(phi)

    def test_regular_representation(self):
        # phi = delta at the unit: GNS is the regular representation
        G = cyclic_group(4)
        phi = FormPDFunction(group=G, values=scalar_values(1, 0, 0, 0))
        data = gns_build(phi)
        assert data["dim"] == 4
        assert data["homomorphism_defect"] <= 1e-10

    @pytest.mark.parametrize("seed", range(5))
    def test_random_pd_functions(self, seed):
        # random PD function from a random unitary representation
        rng = np.random.default_rng(seed)
        G = cyclic_group(3)
        # diagonal rep with cube roots of unity
        w = np.exp(2j * np.pi / 3)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        values = tuple(
            np.array([[sum(abs(v[k]) ** 2 * w ** (g * k)
                           for k in range(3))]])
            for g in range(3))
        phi = FormPDFunction(group=G, values=values)
        data = gns_build(phi)
        assert data["reconstruction_defect"] <= 1e-10


class TestReflectionPositivity:
    def klein_phi(self, a, b, c, d):
        from kmsrp.rpext import klein4_analysis
        rep = klein4_analysis(a, b, c, d)
        doubled = klein_four()
        values = scalar_values(rep["f"]["1"], rep["f"]["sigma"],
                               rep["f"]["tau"], rep["f"]["sigma_tau"])
        return doubled, FormPDFunction(group=doubled.group, values=values)

    def test_klein_positive_case(self):
        doubled, phi = self.klein_phi(2.0, 1.0, 1.0, 0.0)
        rep = reflection_positive_check(phi, doubled, plus=[0])
        assert rep["rp1"] and rep["rp2"]
        assert rep["reflection_positive"]

    def test_klein_negative_case(self):
        doubled, phi = self.klein_phi(1.0, 1.0, 2.0, 0.0)
        rep = reflection_positive_check(phi, doubled, plus=[0])
        assert rep["rp1"]
        assert not rep["rp2"]  # f(tau) = 1 + 1 - 4 < 0

    def test_theta_is_involution(self):
        doubled, phi = self.klein_phi(2.0, 1.0, 1.0, 0.0)
        rep = reflection_positive_check(phi, doubled, plus=[0, 1])
        th = rep["theta"]
        assert np.abs(th @ th - np.eye(len(th))).max() <= 1e-12

    def test_tau_invariant_extension(self):
        # extend phi = (1, 1/2) on Z/2 to its doubling; RP with G+ = {1}
        base = cyclic_group(2)
        phi = FormPDFunction(group=base, values=scalar_values(1.0, 0.5))
        doubled = TauDoubledGroup(base=base, tau=np.array([0, 1]))
        ext = tau_invariant_extend(phi, doubled)
        rep = reflection_positive_check(ext, doubled, plus=[0])
        assert rep["reflection_positive"]

    def test_non_invariant_rejected(self):
        base = cyclic_group(3)
        phi = FormPDFunction(group=base,
                             values=scalar_values(1.0, 0.5 + 0.1j,
                                                  0.5 - 0.1j))
        doubled = TauDoubledGroup(base=base, tau=np.array([0, 2, 1]))
        with pytest.raises(NotTauInvariantError):
            tau_invariant_extend(phi, doubled)


class TestKernelCalculus:
    def test_product_of_scalar_psd_kernels(self):
        # Schur product of PSD kernels stays PSD
        rng = np.random.default_rng(2)
        p = 4
        B1 = rng.normal(size=(p, 2))
        B2 = rng.normal(size=(p, 3))
        K1 = (B1 @ B1.T)[:, :, None, None] + 0j
        K2 = (B2 @ B2.T)[:, :, None, None] + 0j
        K, rep = kernel_product(K1, K2)
        assert rep["is_psd"]
        assert np.abs(K[:, :, 0, 0] - (B1 @ B1.T) * (B2 @ B2.T)).max() \
            <= 1e-12

    def test_noncommuting_rejected(self):
        p = 1
        K1 = np.zeros((p, p, 2, 2), dtype=complex)
        K2 = np.zeros((p, p, 2, 2), dtype=complex)
        K1[0, 0] = np.array([[1.0, 0.0], [0.0, 0.0]])
        K2[0, 0] = np.array([[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(NonCommutingError):
            kernel_product(K1, K2)

    def test_split_two_point_kernel(self):
        A = np.array([[1.0, 0.3], [0.3, 1.0]])
        B = np.array([[0.0, 0.2], [-0.2, 0.0]])
        C, phi = split_complex_kernel(A, B)
        assert np.linalg.norm(C, 2) <= 1.0
        assert np.abs(phi.T @ phi - A).max() <= 1e-10
        assert np.abs(phi.T @ C @ phi - B).max() <= 1e-10

    def test_split_rejects_violation(self):
        # omega(v, w)^2 > gamma(v, v) gamma(w, w)
        A = np.array([[1.0, 0.0], [0.0, 1.0]])
        B = np.array([[0.0, 1.4], [-1.4, 0.0]])
        with pytest.raises(NotPositiveDefiniteError):
            split_complex_kernel(A, B)

    @pytest.mark.parametrize("seed", range(25))
    def test_random_accept(self, seed):
        rng = np.random.default_rng(seed)
        n = 3
        L = rng.normal(size=(n, n))
        A = L @ L.T + 0.05 * np.eye(n)
        S = rng.normal(size=(n, n))
        S = S - S.T
        R = np.linalg.cholesky(A)
        S *= 0.8 / np.linalg.norm(S, 2)
        B = R @ S @ R.T
        C, phi = split_complex_kernel(A, B)
        assert np.linalg.norm(C, 2) <= 1.0 + 1e-10
        assert np.abs(phi.T @ (np.eye(n) + 1j * C) @ phi
                      - (A + 1j * B)).max() <= 1e-9

    @pytest.mark.parametrize("seed", range(25))
    def test_random_reject(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n = 3
        L = rng.normal(size=(n, n))
        A = L @ L.T + 0.05 * np.eye(n)
        S = rng.normal(size=(n, n))
        S = S - S.T
        R = np.linalg.cholesky(A)
        S *= 1.5 / np.linalg.norm(S, 2)
        with pytest.raises(NotPositiveDefiniteError):
            split_complex_kernel(A, R @ S @ R.T)


class TestComplexExtension:
    def test_z2_commutant_is_trivial(self):
        base = cyclic_group(2)
        phi = FormPDFunction(group=base, values=scalar_values(1.0, 0.5))
        data = gns_build(phi)
        basis = commutant_skew_basis(data["rep"])
        assert len(basis) == 0  # only real extensions exist

    def test_z4_regular_rotation_extension(self):
        base = cyclic_group(4)
        phi = FormPDFunction(group=base, values=scalar_values(1, 0, 0, 0))
        data = gns_build(phi)
        basis = commutant_skew_basis(data["rep"])
        assert len(basis) >= 1
        C = basis[0]
        C *= 0.5 / np.linalg.norm(C, 2)
        ext = complex_extension(phi, C)
        # positive definite and Re phi_C = phi
        ok, _ = psd_check(ext.big_gram())
        assert ok
        for g in range(4):
            assert np.abs(ext.values[g].real - phi.values[g].real).max() \
                <= 1e-10

    def test_split_after_extend_identity(self):
        # splitting the complex Gram of the extension recovers it to 1e-9
        base = cyclic_group(4)
        phi = FormPDFunction(group=base, values=scalar_values(2, 1, 0, 1))
        data = gns_build(phi)
        basis = commutant_skew_basis(data["rep"])
        C = basis[0] * (0.6 / np.linalg.norm(basis[0], 2))
        ext = complex_extension(phi, C)
        K = ext.big_gram()
        C2, f2 = split_complex_kernel(K.real, K.imag)
        recon = f2.T @ (np.eye(len(C2)) + 1j * C2) @ f2
        assert np.abs(recon - K).max() <= 1e-9

    def test_non_contraction_rejected(self):
        base = cyclic_group(4)
        phi = FormPDFunction(group=base, values=scalar_values(1, 0, 0, 0))
        data = gns_build(phi)
        C = commutant_skew_basis(data["rep"])[0]
        C *= 1.5 / np.linalg.norm(C, 2)
        with pytest.raises(NotContractionError):
            complex_extension(phi, C)

    def test_non_commuting_rejected(self):
        base = cyclic_group(4)
        phi = FormPDFunction(group=base, values=scalar_values(1, 0, 0, 0))
        d = gns_build(phi)["dim"]
        C = np.zeros((d, d))
        C[0, 1], C[1, 0] = -0.5, 0.5  # generic skew, not in the commutant
        with pytest.raises(NotCommutingError):
            complex_extension(phi, C)


class TestJcInjectivity:
    def test_strict_pair_injective(self):
        assert jc_injectivity(np.eye(2), 0.7 * ROT)

    def test_norm_one_not_injective(self):
        assert not jc_injectivity(np.eye(2), 1.0 * ROT)
