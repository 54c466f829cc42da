"""Exact computation of combinatorial Burnside groups of finite permutation groups."""

from .api import (
    bc,
    bc_prime,
    calculus,
    cd,
    class_order,
    filtration,
    filtration_surjective,
    formal_sum_from_dict,
    formal_sum_to_dict,
    max_element_order,
    product,
    product_prime_abelian,
    restrict,
    subgroup_of,
    symbol_from_dict,
    symbol_to_dict,
    verify_main,
)
from .groups import GroupError, PermutationGroup, catalog_group, parse_group
from .zlattice import AbelianInvariants

__version__ = "0.1.0"

__all__ = [
    "AbelianInvariants",
    "GroupError",
    "PermutationGroup",
    "bc",
    "bc_prime",
    "calculus",
    "catalog_group",
    "cd",
    "class_order",
    "filtration",
    "filtration_surjective",
    "formal_sum_from_dict",
    "formal_sum_to_dict",
    "max_element_order",
    "parse_group",
    "product",
    "product_prime_abelian",
    "restrict",
    "subgroup_of",
    "symbol_from_dict",
    "symbol_to_dict",
    "verify_main",
    "__version__",
]
