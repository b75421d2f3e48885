"""Thermal positive definite functions on the strip."""

import numpy as np
import pytest

from kmsrp.kms import (DiscreteFormMeasure, KmsFunction, NegativeAtomError,
                       OutOfStripError, boundedness_check, kms_boundary_check,
                       kms_infinity, phi_operator_form, phi_periodic_extend,
                       psi_eval, spectral_measure, strip_kernel_check,
                       strip_realization_J1, translation_gram)
from kmsrp.subspace import ContractionOnV

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


@pytest.fixture
def fx1():
    """beta = 1, C_V = tanh(1/2) * rotation: frequencies exactly +-1."""
    return KmsFunction(beta=1.0,
                       contraction=ContractionOnV(matrix=np.tanh(0.5) * ROT))


def random_kms(seed, n=4, beta=1.0, norm=0.8):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    S = A - A.T
    S *= norm / np.linalg.norm(S, 2)
    return KmsFunction(beta=beta, contraction=ContractionOnV(matrix=S))


class TestPsiEval:
    def test_fx1_frequencies(self, fx1):
        assert np.allclose(np.sort(fx1.frequencies), [-1.0, 1.0], atol=1e-12)

    def test_fx1_diagonal_is_u_plus(self, fx1):
        # psi(it)(e1, e1) = (e^{-t} + e^{-(1-t)}) / (1 + e^{-1})
        for t in (0.0, 0.25, 0.5, 1.0):
            expected = (np.exp(-t) + np.exp(-(1 - t))) / (1 + np.exp(-1))
            F = psi_eval(fx1, 1j * t)
            assert F[0, 0] == pytest.approx(expected, abs=1e-12)
            assert F[1, 1] == pytest.approx(expected, abs=1e-12)

    def test_fx1_value_at_half_beta(self, fx1):
        F = psi_eval(fx1, 0.5j)
        assert F[0, 0] == pytest.approx(2 * np.exp(-0.5) / (1 + np.exp(-1)),
                                        abs=1e-9)
        assert F[0, 0] == pytest.approx(0.886819, abs=5e-7)

    def test_value_at_zero_is_gram_form(self, fx1):
        # psi(0) = 1 + iC: real part the metric, imaginary part the form
        expected = np.eye(2) + 1j * np.tanh(0.5) * ROT
        assert np.allclose(psi_eval(fx1, 0.0), expected, atol=1e-12)

    def test_outside_strip_rejected(self, fx1):
        with pytest.raises(OutOfStripError):
            psi_eval(fx1, -0.1j)
        with pytest.raises(OutOfStripError):
            psi_eval(fx1, 1.2j)

    def test_unitary_flow_oracle(self):
        # at real t, psi(t) = conj-basis matrix element of delta^{-it/beta}:
        # independent check through the modular operator of C_V itself
        from kmsrp.matfun import herm_fun
        k = random_kms(21)
        C = k.contraction.matrix
        delta = herm_fun(1j * C, lambda s: (1 - s) / (1 + s))
        for t in (-1.3, 0.4, 2.2):
            flow = herm_fun(delta, lambda lam: lam ** (-1j * t / k.beta))
            # <v, delta^{-it/b} (1 + iC)... the atom normalization gives
            # psi(t) = (1 + iC b)-weighted flow; use the spectral form
            w, U = np.linalg.eigh(1j * C)
            expected = U @ np.diag(
                (1 + w) * ((1 - w) / (1 + w)) ** (-1j * t)) @ U.conj().T
            assert np.abs(psi_eval(k, t) - expected).max() <= 1e-10


class TestKmsBoundary:
    def test_boundary_relation(self, fx1):
        grid = np.arange(-5.0, 5.0 + 1e-9, 0.1)
        assert kms_boundary_check(fx1, grid) <= 1e-9

    def test_boundary_relation_random(self):
        for seed in range(5):
            k = random_kms(seed)
            grid = np.linspace(-3, 3, 31)
            assert kms_boundary_check(k, grid) <= 1e-9


class TestSpectralMeasure:
    def test_fx1_atoms(self, fx1):
        measure = spectral_measure(fx1)
        lams = sorted(lam for lam, _ in measure.atoms)
        assert np.allclose(lams, [-1.0, 1.0], atol=1e-12)
        weights = {round(lam): M for lam, M in measure.atoms}
        wp = 1.0 / (1.0 + np.exp(-1.0))
        wm = np.exp(-1.0) / (1.0 + np.exp(-1.0))
        # scalar weight wp (resp. wm) on each basis direction, carried by
        # the rank-one eigenprojections of the rotation
        assert np.allclose(np.diag(weights[1]), wp * np.ones(2), atol=1e-12)
        assert np.allclose(np.diag(weights[-1]), wm * np.ones(2), atol=1e-12)
        assert np.allclose(weights[1], np.conj(weights[-1]) * np.exp(1.0),
                           atol=1e-12)

    def test_reflection_relation(self):
        for seed in range(5):
            k = random_kms(seed, beta=0.7)
            measure = spectral_measure(k)
            assert measure.reflection_defect(k.beta) <= 1e-9

    def test_resummation(self, fx1):
        measure = spectral_measure(fx1)
        for t in np.arange(-5.0, 5.0 + 1e-9, 0.1):
            assert np.abs(measure.eval(t) - psi_eval(fx1, t)).max() <= 1e-10

    def test_total_mass(self, fx1):
        measure = spectral_measure(fx1)
        assert np.abs(measure.total_mass() - psi_eval(fx1, 0.0)).max() \
            <= 1e-10

    def test_atoms_psd(self):
        assert spectral_measure(random_kms(3)).atoms_psd()

    def test_perturbed_atom_negative_control(self, fx1):
        # scaling one atom by 1.1 must break the KMS boundary relation
        measure = spectral_measure(fx1)
        atoms = list(measure.atoms)
        atoms[0] = (atoms[0][0], 1.1 * atoms[0][1])
        bad = DiscreteFormMeasure(atoms=tuple(atoms))
        defect = max(
            np.abs(bad.eval(t + 1j) - np.conj(bad.eval(t))).max()
            for t in np.arange(-5.0, 5.0, 0.1))
        assert defect > 1e-3
        assert bad.reflection_defect(1.0) > 1e-3


class TestPhiOperatorForm:
    def test_fx1_midpoint(self, fx1):
        F = phi_operator_form(fx1, 0.5)
        assert np.allclose(F, 0.8868188839700739 * np.eye(2), atol=1e-12)

    def test_matches_psi_on_imaginary_axis(self):
        k = random_kms(4)
        for t in np.linspace(0.0, k.beta, 9):
            assert np.abs(phi_operator_form(k, t)
                          - psi_eval(k, 1j * t)).max() <= 1e-9

    def test_real_at_half_beta(self):
        k = random_kms(5)
        assert np.abs(phi_operator_form(k, k.beta / 2).imag).max() <= 1e-10

    def test_periodic_extension(self, fx1):
        # phi(3/2) = conj(phi(1/2)) = phi(1/2), real at half beta
        a = phi_periodic_extend(fx1, 1.5)
        b = phi_periodic_extend(fx1, 0.5)
        assert np.abs(a - b).max() <= 1e-12
        for t in (-0.3, 0.4, 2.7):
            assert np.abs(phi_periodic_extend(fx1, t + 2.0)
                          - phi_periodic_extend(fx1, t)).max() <= 1e-12

    def test_outside_interval_rejected(self, fx1):
        from kmsrp.matfun import DomainError
        with pytest.raises(DomainError):
            phi_operator_form(fx1, 1.5)


class TestKernels:
    def test_strip_kernel_psd(self, fx1):
        pts = [0.0, 0.3, 0.25j, 0.7 + 0.5j, 0.5j]
        rep = strip_kernel_check(fx1, pts)
        assert rep["is_psd"]
        assert rep["min_eig"] >= -1e-9

    def test_translation_gram_psd(self):
        k = random_kms(6)
        assert translation_gram(k, np.linspace(-4, 4, 9))["is_psd"]

    def test_strip_point_outside_rejected(self, fx1):
        with pytest.raises(OutOfStripError):
            strip_kernel_check(fx1, [0.7j])

    def test_boundedness(self):
        k = random_kms(7)
        zs = [0.5 + 0.1j, -2.0 + 0.8j, 1.5 + 0.5j, 0.9j]
        assert boundedness_check(k, zs) <= 1e-9

    def test_j1_identity_fx1(self, fx1):
        etas = list(np.eye(2))
        zgrid = [0.1, 0.3 + 0.2j, 0.45j]
        assert strip_realization_J1(fx1, [0.0, 0.2], etas, zgrid) <= 1e-9

    def test_j1_identity_random(self):
        k = random_kms(8, beta=1.4)
        etas = list(np.eye(4))
        zgrid = [0.2, 0.5 + 0.3j * k.beta]
        assert strip_realization_J1(k, [0.0, -0.4], etas, zgrid) <= 1e-9


class TestKmsInfinity:
    def scalar_measure(self, *atoms):
        return DiscreteFormMeasure(
            atoms=tuple((lam, w * np.eye(1)) for lam, w in atoms))

    def test_two_atom_example(self):
        # f(t, tau) = e^{-|t|} + e^{-2|t|}: Gram on {0, 0.5, 1} PSD
        measure = self.scalar_measure((1.0, 1.0), (2.0, 1.0))
        rep = kms_infinity(measure, [0.0, 0.5, 1.0],
                           half_plane_points=[0.3 + 0.4j, 1.0j])
        assert rep["reflection_psd"]
        assert rep["boundedness_excess"] <= 1e-12

    def test_boundedness_50_samples(self):
        rng = np.random.default_rng(9)
        measure = self.scalar_measure((0.5, 0.7), (1.3, 0.4), (3.0, 0.2))
        pts = rng.normal(size=50) + 1j * np.abs(rng.normal(size=50))
        rep = kms_infinity(measure, np.linspace(0, 2, 6),
                           half_plane_points=pts)
        assert rep["boundedness_excess"] <= 1e-12
        assert rep["reflection_psd"]

    def test_negative_atom_rejected(self):
        measure = self.scalar_measure((1.0, 1.0), (-0.5, 0.3))
        with pytest.raises(NegativeAtomError):
            kms_infinity(measure, [0.0, 1.0])

    def test_matrix_atoms(self):
        M1 = np.array([[1.0, 0.2], [0.2, 0.5]])
        M2 = np.array([[0.3, 0.0], [0.0, 0.8]])
        measure = DiscreteFormMeasure(atoms=((0.5, M1 + 0j), (2.0, M2 + 0j)))
        rep = kms_infinity(measure, np.linspace(0, 3, 7),
                           half_plane_points=[0.2 + 0.9j])
        assert rep["reflection_psd"]
