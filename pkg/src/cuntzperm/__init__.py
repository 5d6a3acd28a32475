"""Localized automorphisms of Cuntz algebras from permutations of words.

The public surface is re-exported here; see the submodules for details.
"""

from .algebra import (
    CycleParseError,
    DomainError,
    LevelError,
    Perm,
    Word,
    compose,
    conjugate_inner,
    convolve,
    convolve_power,
    embed,
    format_cycles,
    identity,
    inner_image,
    invert_perm,
    minimal_level,
    pad_to,
    parse_cycles,
    phi_r,
    reduce_level,
    shift,
    word,
)
from .closures import (
    ResourceCapExceeded,
    is_automorphism,
    is_diag_automorphism,
    psi_closure,
    ring_nilpotent_oracle,
    sigma_closure,
)
from .diagonal import ProjectionSum, act_on_projection, diag_table, lap_property_check
from .inverse import NotStabilized, invert_endo, is_square_free, u_product, verify_coupled, verify_necU
from .search import (
    ClassReport,
    SearchConfig,
    enumerate_automorphisms,
    inner_equivalent,
    inner_orbits,
    is_inner,
    match_named,
)
from .trees import aut_order, enumerate_shapes, extract_maps, is_rooted_tree, shape_of, to_dot

__version__ = "0.1.0"

__all__ = [
    "CycleParseError",
    "DomainError",
    "LevelError",
    "Perm",
    "Word",
    "compose",
    "conjugate_inner",
    "convolve",
    "convolve_power",
    "embed",
    "format_cycles",
    "identity",
    "inner_image",
    "invert_perm",
    "minimal_level",
    "pad_to",
    "parse_cycles",
    "phi_r",
    "reduce_level",
    "shift",
    "word",
    "ResourceCapExceeded",
    "is_automorphism",
    "is_diag_automorphism",
    "psi_closure",
    "ring_nilpotent_oracle",
    "sigma_closure",
    "ProjectionSum",
    "act_on_projection",
    "diag_table",
    "lap_property_check",
    "NotStabilized",
    "invert_endo",
    "is_square_free",
    "u_product",
    "verify_coupled",
    "verify_necU",
    "ClassReport",
    "SearchConfig",
    "enumerate_automorphisms",
    "inner_equivalent",
    "inner_orbits",
    "is_inner",
    "match_named",
    "aut_order",
    "enumerate_shapes",
    "extract_maps",
    "is_rooted_tree",
    "shape_of",
    "to_dot",
    "__version__",
]
