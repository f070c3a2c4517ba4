"""Exact computations with L-infinity algebras, their actions on graded
manifolds, gauge equivalences, extensions, modules and Lie algebroids."""

from .actions import (ActionDatum, ProductSpace, X_of_phi, build_Qtot, check_action_mc,
                      check_compatible, check_eta_related, phi_of_X, verify_equivalence_triple)
from .algebroids import (AlgebroidActionPair, PolyAlgebroid, algebroid_to_Q,
                         build_algebroid_extension, check_cdo_compatibility, twist_by_map,
                         verify_algebroid_iso_equivalence)
from .brackets import (MorphismFamily, SkewBrackets, SymBrackets, check_curved_morphism,
                       check_linfty1_jacobi, check_linfty_jacobi, check_morphism, decalage,
                       decalage_inv, split_curved_morphism)
from .errors import InputError, KernelError, NilpotencyError, NotADerivationError
from .extensions import (ExtensionStructure, NonabelianCocycle, build_extension,
                         check_nonabelian_cocycle, extension_from_cocycle,
                         extract_action_from_extension, is_semidirect)
from .fields import (CoordinateSystem, Poly, VectorField, brackets_to_field, derived_brackets,
                     is_homological, lie_bracket)
from .gauge import GaugeParameter, gauge_transform, isomorphism_from_gauge
from .graded import Element, GradedBasis, LinearMap, koszul_chi, koszul_epsilon, unshuffles
from .modules import (DGVectorSpace, ModuleStructure, RepUpToHomotopy, action_to_module,
                      adjoint_module, check_rephom, complete_lift, endo_to_linear_field,
                      module_to_action, module_to_rephom, rephom_to_module)
from .report import Report

__version__ = "0.1.0"

__all__ = [
    "action_to_module",
    "ActionDatum",
    "adjoint_module",
    "algebroid_to_Q",
    "AlgebroidActionPair",
    "brackets_to_field",
    "build_algebroid_extension",
    "build_extension",
    "build_Qtot",
    "check_action_mc",
    "check_cdo_compatibility",
    "check_compatible",
    "check_curved_morphism",
    "check_eta_related",
    "check_linfty1_jacobi",
    "check_linfty_jacobi",
    "check_morphism",
    "check_nonabelian_cocycle",
    "check_rephom",
    "complete_lift",
    "CoordinateSystem",
    "decalage",
    "decalage_inv",
    "derived_brackets",
    "DGVectorSpace",
    "Element",
    "endo_to_linear_field",
    "extension_from_cocycle",
    "ExtensionStructure",
    "extract_action_from_extension",
    "gauge_transform",
    "GaugeParameter",
    "GradedBasis",
    "InputError",
    "is_homological",
    "is_semidirect",
    "isomorphism_from_gauge",
    "KernelError",
    "koszul_chi",
    "koszul_epsilon",
    "lie_bracket",
    "LinearMap",
    "module_to_action",
    "module_to_rephom",
    "ModuleStructure",
    "MorphismFamily",
    "NilpotencyError",
    "NonabelianCocycle",
    "NotADerivationError",
    "phi_of_X",
    "Poly",
    "PolyAlgebroid",
    "ProductSpace",
    "rephom_to_module",
    "Report",
    "RepUpToHomotopy",
    "SkewBrackets",
    "split_curved_morphism",
    "SymBrackets",
    "twist_by_map",
    "unshuffles",
    "VectorField",
    "verify_algebroid_iso_equivalence",
    "verify_equivalence_triple",
    "X_of_phi",
]
