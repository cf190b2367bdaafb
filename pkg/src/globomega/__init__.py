"""Weak ω-groupoid structure on iterated path objects of finite groupoids."""

from __future__ import annotations

from .engine import EndTheoryHandle, certify_contractible, eval_algebra, glob_product_under, lift_parallel, synth_operation
from .glob_core import GlobularSet, TableOfDimensions, glob_sum, parallel_pair, validate_table
from .grpd import FiniteGroupoid, GroupoidBackend, GroupoidFunctor, bz, contractible, discrete
from .theta0 import check_product_preservation, theta0_hom
from .tower import PathTower, boundary, build_tower
from .wfs import DiscreteBackend, ITCategory, law_suite

__version__ = "0.1.0"

__all__ = [
    "DiscreteBackend",
    "EndTheoryHandle",
    "FiniteGroupoid",
    "GlobularSet",
    "GroupoidBackend",
    "GroupoidFunctor",
    "ITCategory",
    "PathTower",
    "TableOfDimensions",
    "boundary",
    "build_tower",
    "bz",
    "certify_contractible",
    "check_product_preservation",
    "contractible",
    "discrete",
    "eval_algebra",
    "glob_product_under",
    "glob_sum",
    "law_suite",
    "lift_parallel",
    "parallel_pair",
    "synth_operation",
    "theta0_hom",
    "validate_table",
]
