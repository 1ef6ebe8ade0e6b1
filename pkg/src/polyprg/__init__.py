"""polyprg: limited-independence generators for polytopes over the Boolean
cube, a brute-force verification lab, and deterministic 0/1-IP counting."""

from .algebra import (
    FieldElement,
    HashSpec,
    KWiseSpec,
    SeedStream,
    gf_mul,
    hash_eval,
    kwise_bits,
)
from .generators import (
    USE_PARAMS,
    CnfFoolerSpec,
    GeneratorParams,
    cnf_fooler_draw,
    derive_params,
    mz_generate,
    our_generate,
    seed_layout,
    seed_length,
)
from .mollifier import (
    ApproximatorPair,
    MollifierSpec,
    approximators,
    halfline,
    mollifier_value,
    sandwich_check,
    translation_identity_check,
)
from .polytope import (
    BoundaryClass,
    Polytope,
    RowDecomposition,
    StandardizedPolytope,
    classify,
    critical_index,
    head_tail_matrices,
    is_tau_regular,
    membership,
    standardize,
    zero_one_transform,
)

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "HashSpec",
    "KWiseSpec",
    "SeedStream",
    "gf_mul",
    "hash_eval",
    "kwise_bits",
    "USE_PARAMS",
    "CnfFoolerSpec",
    "GeneratorParams",
    "cnf_fooler_draw",
    "derive_params",
    "mz_generate",
    "our_generate",
    "seed_layout",
    "seed_length",
    "ApproximatorPair",
    "MollifierSpec",
    "approximators",
    "halfline",
    "mollifier_value",
    "sandwich_check",
    "translation_identity_check",
    "BoundaryClass",
    "Polytope",
    "RowDecomposition",
    "StandardizedPolytope",
    "classify",
    "critical_index",
    "head_tail_matrices",
    "is_tau_regular",
    "membership",
    "standardize",
    "zero_one_transform",
    "__version__",
]
