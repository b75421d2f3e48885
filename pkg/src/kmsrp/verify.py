"""Named verification suites over instance payloads.

Each suite returns a list of check dicts {"name", "value", "tol",
"passed"}; the CLI renders them and derives its exit code, and the tests
drive them directly.
"""

import numpy as np

from . import gns as gnsmod
from . import kms as kmsmod
from . import rpext, resolvent, subspace
from .matfun import herm_fun
from .serialize import MalformedInstanceError, matrix_from_json


def _check(name, value, tol=None, passed=None):
    if passed is None:
        passed = bool(value <= tol)
    return {"name": name, "value": value, "tol": tol, "passed": bool(passed)}


# ---------------------------------------------------------------------------
# payload -> objects
# ---------------------------------------------------------------------------

def subspace_from_payload(payload):
    try:
        C = matrix_from_json(payload["C"])
    except KeyError as exc:
        raise MalformedInstanceError("contraction payload needs 'C'") from exc
    try:
        return subspace.StandardSubspaceE(C_E=C)
    except ValueError as exc:
        raise MalformedInstanceError(str(exc)) from exc


def kms_from_payload(payload):
    try:
        beta = float(payload["beta"])
        C = matrix_from_json(payload["C"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInstanceError(f"bad kms payload: {exc}") from exc
    jmap = None
    if "jmap" in payload:
        jmap = matrix_from_json(payload["jmap"]).real
    try:
        return kmsmod.KmsFunction(
            beta=beta, contraction=subspace.ContractionOnV(matrix=C),
            jmap=jmap)
    except ValueError as exc:
        raise MalformedInstanceError(str(exc)) from exc


def rp_from_payload(kind, payload):
    if kind == "kms":
        return rpext.build_extension(kms_from_payload(payload))
    try:
        return rpext.RPFunction(
            beta=float(payload["beta"]),
            I=matrix_from_json(payload["I"]).real,
            absD=matrix_from_json(payload["absD"]).real)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInstanceError(f"bad rpfunction payload: {exc}") from exc


def group_from_payload(payload):
    try:
        base = gnsmod.FiniteGroup(table=np.asarray(payload["table"], int))
        doubled = gnsmod.TauDoubledGroup(
            base=base, tau=np.asarray(payload["tau"], int))
        values = tuple(matrix_from_json(v) for v in payload["values"])
        phi = gnsmod.FormPDFunction(group=doubled.group, values=values)
        plus = [int(s) for s in payload["plus"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInstanceError(f"bad finite-group payload: {exc}") from exc
    return doubled, phi, plus


def resolvent_from_payload(payload):
    try:
        return resolvent.ResolventSpace(
            beta=float(payload["beta"]), lam=float(payload["lambda"]),
            m=int(payload["m"]), I=matrix_from_json(payload["I"]).real)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInstanceError(f"bad resolvent payload: {exc}") from exc


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_modular(payload):
    s = subspace_from_payload(payload)
    checks = []
    report = subspace.check_standard(s)
    checks.append(_check("standard_conditions_agree", report["agree"],
                         passed=report["agree"]))
    if not s.is_strict():
        return checks
    mp = subspace.modular_from_contraction(s)
    delta_norm = np.linalg.norm(mp.delta, 2)
    inv = herm_fun(mp.delta, lambda lam: 1.0 / lam)
    checks.append(_check(
        "JdeltaJ_equals_inverse",
        float(np.linalg.norm(mp.jdj() - inv, 2)) / delta_norm, 1e-10))
    basis = subspace.fix_point_basis(mp)
    checks.append(_check(
        "fixed_space_matches_subspace",
        subspace.subspace_distance(basis, s.subspace_basis()), 1e-9))
    mp2 = subspace.modular_from_subspace(s.subspace_basis())
    checks.append(_check(
        "polar_roundtrip_delta",
        float(np.linalg.norm(mp2.delta - mp.delta, 2)), 1e-9))
    checks.append(_check(
        "polar_roundtrip_J_is_conjugation",
        float(np.linalg.norm(mp2.j_mat - np.eye(s.n), 2)), 1e-8))
    conv = subspace.contraction_on_V_from_modular(mp)
    sE = np.linalg.eigvalsh(1j * s.C_E)
    sV = np.linalg.eigvalsh(1j * conv.matrix)
    expected = np.sort(2.0 * sE / (1.0 + sE ** 2))
    checks.append(_check(
        "cayley_spectrum_roundtrip",
        float(np.abs(np.sort(sV) - expected).max(initial=0.0)), 1e-9))
    # Delta^{-it} leaves V invariant
    P = subspace.real_span_projector(basis)
    inv_defect = 0.0
    for t in (0.7, 1.3):
        moved = herm_fun(mp.delta, lambda lam: lam ** (-1j * t)) @ basis
        R = subspace.realify(moved)
        inv_defect = max(inv_defect,
                         float(np.abs(P @ R - R).max(initial=0.0)))
    checks.append(_check("delta_unitary_preserves_V", inv_defect, 1e-9))
    checks.append(_check("flow_generator_matches",
                         flow_generator_defect(mp, conv), 1e-8))
    rrp = subspace.real_reflection_positivity(s)
    checks.append(_check("sigma_form_real",
                         rrp["gamma_sigma_imag_defect"], 1e-10))
    checks.append(_check("sigma_form_psd", rrp["gamma_sigma_psd"],
                         passed=rrp["gamma_sigma_psd"]))
    checks.append(_check("F_isometry_identity", rrp["F_norm_defect"], 1e-9))
    checks.append(_check("F_conjugation_inverse",
                         rrp["F_inverse_defect"], 1e-9))
    return checks


def flow_generator_defect(mp, conv, ts=(0.3, 1.7)):
    """Defect of exp(tD) = Delta^{-it} on V, D = log((1-|C|)/(1+|C|)) I.

    Both sides are expressed in the gamma-orthonormal basis attached to
    ``conv``; the left side uses exp(tD) = cos(t|D|) - sin(t|D|) I with
    the polar data of C_V, the right side the spectral calculus of Delta.
    """
    from .matfun import polar_skew

    basis = conv.basis
    C = conv.matrix
    I, absC = polar_skew(C)
    absD = herm_fun(absC + 0j, lambda x: np.log((1.0 + x) / (1.0 - x))).real
    defect = 0.0
    for t in ts:
        lhs = (herm_fun(absD + 0j, lambda x: np.cos(t * x)).real
               - herm_fun(absD + 0j, lambda x: np.sin(t * x)).real @ I)
        moved = herm_fun(mp.delta, lambda lam: lam ** (-1j * t)) @ basis
        rhs = np.real(basis.conj().T @ moved)  # gamma-coordinates
        defect = max(defect, float(np.abs(lhs - rhs).max(initial=0.0)))
    return defect


def suite_kms(payload, grid=None):
    k = kms_from_payload(payload)
    beta = k.beta
    if grid is None:
        grid = np.arange(-5.0, 5.0 + 1e-9, 0.1)
    checks = []
    measure = kmsmod.spectral_measure(k)
    corrupt = payload.get("corrupt_atom")
    if corrupt is not None:
        atoms = list(measure.atoms)
        idx = int(corrupt.get("index", 0))
        atoms[idx] = (atoms[idx][0], atoms[idx][1]
                      * float(corrupt.get("factor", 1.1)))
        measure = kmsmod.DiscreteFormMeasure(atoms=tuple(atoms))
        defect = max(
            float(np.abs(measure.eval(t + 1j * beta)
                         - np.conj(measure.eval(t))).max(initial=0.0))
            for t in grid)
        checks.append(_check("kms_boundary", defect, 1e-9))
        checks.append(_check("measure_reflection_relation",
                             measure.reflection_defect(beta), 1e-9))
        return checks
    checks.append(_check("kms_boundary",
                         kmsmod.kms_boundary_check(k, grid), 1e-9))
    checks.append(_check("measure_reflection_relation",
                         measure.reflection_defect(beta), 1e-9))
    resum = max(float(np.abs(measure.eval(t) - kmsmod.psi_eval(k, t))
                      .max(initial=0.0)) for t in grid)
    checks.append(_check("measure_resummation", resum, 1e-10))
    checks.append(_check("measure_atoms_psd", measure.atoms_psd(),
                         passed=measure.atoms_psd()))
    mass = float(np.abs(measure.total_mass()
                        - kmsmod.psi_eval(k, 0.0)).max(initial=0.0))
    checks.append(_check("measure_total_mass", mass, 1e-10))
    ts = np.linspace(grid[0], grid[-1], 8)
    tk = kmsmod.translation_gram(k, ts)
    checks.append(_check("translation_kernel_psd", tk["is_psd"],
                         passed=tk["is_psd"]))
    pts = [0.0, 0.3, 0.25j * beta, 0.7 + 0.5j * beta, 0.5j * beta]
    sk = kmsmod.strip_kernel_check(k, pts)
    checks.append(_check("strip_kernel_psd", sk["is_psd"],
                         passed=sk["is_psd"]))
    herm = 0.0
    for z in (0.4 + 0.3j * beta, -1.0 + 0.9j * beta, 0.2j * beta):
        herm = max(herm, float(np.abs(
            kmsmod.psi_eval(k, -np.conj(z))
            - kmsmod.psi_eval(k, z).conj().T).max(initial=0.0)))
    checks.append(_check("strip_hermitian_symmetry", herm, 1e-10))
    zs = [0.5 + 0.1j * beta, -2.0 + 0.8j * beta, 1.5 + 0.5j * beta]
    checks.append(_check("strip_boundedness",
                         kmsmod.boundedness_check(k, zs), 1e-9))
    phigrid = np.linspace(0.0, beta, 11)
    agree = max(float(np.abs(kmsmod.phi_operator_form(k, t)
                             - kmsmod.psi_eval(k, 1j * t)).max(initial=0.0))
                for t in phigrid)
    checks.append(_check("phi_cayley_agreement", agree, 1e-9))
    mid = kmsmod.phi_operator_form(k, beta / 2.0)
    checks.append(_check("phi_real_at_half_beta",
                         float(np.abs(mid.imag).max(initial=0.0)), 1e-10))
    per = 0.0
    for t in (-0.7, 0.2, 1.9):
        per = max(per, float(np.abs(
            kmsmod.phi_periodic_extend(k, t + 2 * beta)
            - kmsmod.phi_periodic_extend(k, t)).max(initial=0.0)))
        per = max(per, float(np.abs(
            kmsmod.phi_periodic_extend(k, t + beta)
            - np.conj(kmsmod.phi_periodic_extend(k, t))).max(initial=0.0)))
    checks.append(_check("phi_periodicity", per, 1e-10))
    etas = list(np.eye(k.m))
    zgrid = [0.1, 0.3 + 0.2j * beta, 0.45j * beta]
    j1 = kmsmod.strip_realization_J1(k, [0.0, 0.2], etas, zgrid)
    checks.append(_check("strip_J1_involution", j1, 1e-9))
    return checks


def suite_rp(kind, payload):
    f = rp_from_payload(kind, payload)
    beta = f.beta
    checks = []
    rng = np.random.default_rng(2024)
    elements = [rpext.RTau(t, e) for t, e in zip(
        rng.uniform(-beta, beta, 12), [0, 1] * 6)]
    grp = rpext.check_positive_definite_group(f, elements)
    checks.append(_check("group_kernel_psd", grp["is_psd"],
                         passed=grp["is_psd"]))
    checks.append(_check("block_kernel_verdict_agrees",
                         grp["verdicts_agree"], passed=grp["verdicts_agree"]))
    grid = np.array([0.0, beta / 8, beta / 4, 3 * beta / 8, beta / 2])
    refl = rpext.check_reflection_positive(f, grid)
    checks.append(_check("reflection_kernel_psd", refl["is_psd"],
                         passed=refl["is_psd"]))
    per = 0.0
    for t in (0.1, 0.9, 1.7):
        for e in (0, 1):
            per = max(per, float(np.abs(
                rpext.f_eval(f, rpext.RTau(t + 2 * beta, e))
                - rpext.f_eval(f, rpext.RTau(t, e))).max(initial=0.0)))
        per = max(per, float(np.abs(
            rpext.f_eval(f, rpext.RTau(t + beta, 1))
            - np.conj(rpext.f_eval(f, rpext.RTau(t, 1)))).max(initial=0.0)))
    checks.append(_check("f_periodicity", per, 1e-10))
    atoms, recon = rpext.integral_representation(f)
    checks.append(_check("integral_representation", recon, 1e-10))
    if f.is_strict():
        odd = rpext.odd_reflection_gram(f, grid)
        checks.append(_check("odd_component_not_reflection_positive",
                             odd["is_psd"], passed=not odd["is_psd"]))
        gs = [rpext.RTau(t, e) for t, e in zip(
            rng.uniform(-2 * beta, 2 * beta, 20), [0, 1] * 10)]
        checks.append(_check("f_sharp_covariance",
                             rpext.check_f_sharp_covariance(f, gs), 1e-10))
        cmin = 0.0
        for n in range(0, 13):
            w = np.linalg.eigvalsh(rpext.matsubara_coeff(f.absD, beta, n))
            cmin = min(cmin, float(w[0]))
        checks.append(_check("matsubara_coefficients_psd", -cmin, 1e-12))
        k = rpext.recover_psi(f)
        agree = max(float(np.abs(
            rpext.f_eval(f, rpext.RTau(t, 1))
            - kmsmod.phi_operator_form(k, t)).max(initial=0.0))
            for t in np.linspace(0.0, beta, 13))
        checks.append(_check("f_tau_equals_cayley_phi", agree, 1e-9))
        ts = [0.0, beta / 8, beta / 4, 3 * beta / 8, beta / 2]
        space = rpext.extension_rp_space(f, ts)
        twisted = space.twisted_gram()
        m = f.m
        kern = 0.0
        for a, ta in enumerate(ts):
            for b, tb in enumerate(ts):
                blk = twisted[a * m:(a + 1) * m, b * m:(b + 1) * m]
                kern = max(kern, float(np.abs(
                    blk - kmsmod.psi_eval(k, 1j * (ta + tb)))
                    .max(initial=0.0)))
        checks.append(_check("os_gram_matches_kms_kernel", kern, 1e-9))
        try:
            q = rpext.os_quantize(space)
            checks.append(_check("os_quotient_psd", True, passed=True))
        except rpext.NotThetaPositiveError:
            checks.append(_check("os_quotient_psd", False, passed=False))
    return checks


def suite_gns(payload):
    doubled, phi, plus = group_from_payload(payload)
    checks = [_check("group_laws", True, passed=True)]
    rp = gnsmod.reflection_positive_check(phi, doubled, plus)
    checks.append(_check("rp1_positive_definite", rp["rp1"],
                         passed=rp["rp1"]))
    checks.append(_check("rp2_reflection_positive", rp["rp2"],
                         passed=rp["rp2"]))
    if rp["rp1"]:
        data = gnsmod.gns_build(phi)
        checks.append(_check("gns_reconstruction",
                             data["reconstruction_defect"], 1e-10))
        checks.append(_check("gns_unitarity", data["unitarity_defect"],
                             1e-10))
        checks.append(_check("gns_homomorphism",
                             data["homomorphism_defect"], 1e-10))
    params = payload.get("klein4_params")
    if params is not None:
        a, b, c, d = [complex(p[0], p[1]) for p in params]
        rep = rpext.klein4_analysis(a, b, c, d)
        order = ("1", "sigma", "tau", "sigma_tau")  # instance element order
        table_defect = max(
            abs(phi.values[i][0, 0] - rep["f"][g])
            for i, g in enumerate(order))
        checks.append(_check("klein4_closed_form_table",
                             float(table_defect), 1e-12))
        checks.append(_check("klein4_consistent", rep["consistent"],
                             passed=rep["consistent"]))
    return checks


def suite_resolvent(payload, nmax=2000):
    space = resolvent_from_payload(payload)
    checks = []
    g = resolvent.greens_identity_check(space, nmax)
    checks.append(_check("greens_coefficient_identity",
                         g["coefficient_defect"], 1e-12))
    checks.append(_check("greens_weak_pairing", g["pairing_defect"], 1e-6))
    rng = np.random.default_rng(7)
    sections = []
    for _ in range(3):
        coeffs = {}
        for n in range(-4, 5):
            vec = np.zeros(2 * space.m, dtype=complex)
            block = slice(0, space.m) if n % 2 == 0 else slice(
                space.m, 2 * space.m)
            vec[block] = rng.normal(size=space.m) + 1j * rng.normal(
                size=space.m)
            coeffs[n] = vec
        sections.append(resolvent.FourierSection(
            beta=space.beta, m=space.m, coeffs=coeffs))
    gs = [rpext.RTau(t, e) for t, e in zip(
        rng.uniform(-space.beta, space.beta, 6), [0, 1] * 3)]
    checks.append(_check(
        "action_unitary",
        resolvent.action_unitarity_defect(space, sections, gs), 1e-10))
    checks.append(_check(
        "action_representation",
        resolvent.representation_defect(space, sections, gs), 1e-10))
    quad = abs(resolvent.inner_product(space, sections[0], sections[1])
               - resolvent.inner_product_quadrature(
                   space, sections[0], sections[1]))
    checks.append(_check("inner_product_quadrature_agreement",
                         float(quad), 1e-6))
    basis = list(np.eye(2 * space.m))
    coeff_defect = 0.0
    for g_el in [rpext.RTau(t, e) for t, e in zip(
            rng.uniform(-space.beta, space.beta, 10), [0, 1] * 5)]:
        v = basis[int(rng.integers(0, 2 * space.m))]
        w = basis[int(rng.integers(0, 2 * space.m))]
        coeff_defect = max(coeff_defect, resolvent.matrix_coefficient_check(
            space, v, w, g_el, nmax))
    checks.append(_check("matrix_coefficients_match_f_sharp",
                         float(coeff_defect), 1e-3))
    rank, full = resolvent.cyclicity_rank(space, gs + [rpext.RTau(0.0, 0)])
    checks.append(_check("j_image_cyclic", rank == full,
                         passed=rank == full))
    ns = [250, 500, 1000, 2000]
    errs = []
    # at t = 0 the truncation tail is a monotone positive series ~ 1/N
    gslope = rpext.RTau(0.0, 0)
    v = basis[0]
    for N in ns:
        errs.append(max(resolvent.matrix_coefficient_check(
            space, v, v, gslope, N), 1e-300))
    slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    checks.append(_check("convergence_slope", float(slope),
                         passed=-2.0 <= slope <= -0.5))
    return checks


def run_suites(kind, payload, suites):
    """Dispatch the requested suites for an instance; returns all checks."""
    available = {
        "contraction": ("modular",),
        "kms": ("kms", "rp"),
        "rpfunction": ("rp",),
        "finite-group": ("gns",),
        "resolvent": ("resolvent",),
    }[kind]
    if "all" in suites:
        suites = available
    checks = []
    for s in suites:
        if s not in available:
            raise MalformedInstanceError(
                f"suite {s!r} does not apply to kind {kind!r}")
        if s == "modular":
            checks += suite_modular(payload)
        elif s == "kms":
            checks += suite_kms(payload)
        elif s == "rp":
            checks += suite_rp(kind, payload)
        elif s == "gns":
            checks += suite_gns(payload)
        elif s == "resolvent":
            checks += suite_resolvent(payload)
    return checks
