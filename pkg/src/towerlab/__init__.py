"""Power towers of purely inseparable subfields, their differential
operator algebras and the matching sequences of restricted Lie algebras,
all over K = F_p(x_1, ..., x_N) with exact arithmetic."""

from .arith import FieldSpec, MultiPoly, RatFunc, binom_mod_p, print_canonical, pth_power, pth_root
from .diffops import DiffOperator, algebra_of_tower, apply, compose, render, restrict, symbol
from .dsl import eval_expr, parse_expr, parse_script, print_expr, print_script
from .jacobson import (
    annihilator,
    extend_one_foliation,
    relative_tangent,
    sequence_to_tower,
    splitting_check,
    tower_to_sequence,
    unpack,
)
from .subfields import (
    SubfieldPresentation,
    build_tower,
    build_tower_explicit,
    first_integrals_probe,
    foliation_profile,
    realize,
)

__version__ = "0.1.0"
