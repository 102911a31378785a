"""Finite buildings, random induced subcomplexes, and fibering certificates."""

from .flag_complex import FlagComplex, VertexSet
from .homology import (
    HomologyProfile,
    boundary_matrix,
    is_connected,
    is_k_acyclic,
    reduced_homology,
    smith_normal_form,
    top_homology_nontrivial,
)
from .building import Building, Subspace, build_typeA
from .coset_game import (
    FiberCertificate,
    MoveSystem,
    coset_members,
    coset_search,
    estimate_fraction,
    is_legal_state,
    is_sharply_legal_state,
    move_system_from_coloring,
    pigeonhole_check,
    verify_certificate,
)
from .davis_morse import (
    CayleyBall,
    HeightAssignment,
    asc_desc_link,
    assign_heights,
    commutator_additivity,
    racg_ball,
    superlevel_homology,
)
from .magic_cube import (
    MagicCube,
    avoidance_probability,
    brute_p_mn,
    cube_from_panels,
    independent_chambers,
    max_zero_block,
    opposite_spread,
    positive_diagonal,
    verify_magic,
)

__version__ = "0.1.0"

__all__ = [
    "Building",
    "CayleyBall",
    "FiberCertificate",
    "FlagComplex",
    "HeightAssignment",
    "HomologyProfile",
    "MagicCube",
    "MoveSystem",
    "Subspace",
    "VertexSet",
    "asc_desc_link",
    "assign_heights",
    "avoidance_probability",
    "boundary_matrix",
    "brute_p_mn",
    "build_typeA",
    "commutator_additivity",
    "coset_members",
    "coset_search",
    "cube_from_panels",
    "estimate_fraction",
    "independent_chambers",
    "is_connected",
    "is_k_acyclic",
    "is_legal_state",
    "is_sharply_legal_state",
    "max_zero_block",
    "move_system_from_coloring",
    "opposite_spread",
    "pigeonhole_check",
    "positive_diagonal",
    "racg_ball",
    "reduced_homology",
    "smith_normal_form",
    "superlevel_homology",
    "top_homology_nontrivial",
    "verify_certificate",
    "verify_magic",
]
