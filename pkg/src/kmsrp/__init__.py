"""Standard subspaces, KMS functions, and reflection positive extensions.

Finite-dimensional pipeline: skew contractions parametrize standard real
subspaces and their modular objects; these yield beta-KMS positive
definite matrix functions on a strip, which extend to reflection
positive functions on the line extended by a reflection; quantization of
the extension and an explicit resolvent-space realization close the
loop.
"""

from .gns import (FiniteGroup, FormPDFunction, TauDoubledGroup,
                  complex_extension, cyclic_group, gns_build, klein_four,
                  reflection_positive_check, tau_invariant_extend)
from .kms import (DiscreteFormMeasure, KmsFunction, NegativeAtomError,
                  OutOfStripError, kms_boundary_check, kms_infinity,
                  phi_operator_form, phi_periodic_extend, psi_eval,
                  spectral_measure, strip_kernel_check)
from .matfun import (DomainError, NonHermitianError, herm_eig, herm_fun,
                     polar_skew, psd_check)
from .resolvent import (FourierSection, ResolventSpace,
                        greens_identity_check, j_map,
                        matrix_coefficient_check)
from .rpext import (IllPosedError, NotThetaPositiveError,
                    ReflectionPositiveSpace, RPFunction, RTau,
                    build_extension, check_positive_definite_group,
                    check_reflection_positive, f_eval, f_sharp,
                    fourier_partial_sum, graph_operator, klein4_analysis,
                    matsubara_coeff, os_quantize, recover_psi, u_minus,
                    u_plus)
from .subspace import (ContractionOnV, DegenerateBasisError, ModularPair,
                       NotStandardError, NotStrictError, StandardSubspaceE,
                       check_standard, contraction_on_V_from_modular,
                       fix_point_basis, form_to_contraction,
                       modular_from_contraction, modular_from_subspace)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
