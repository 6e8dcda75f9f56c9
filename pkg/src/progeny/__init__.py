"""Incentive-compatible selection mechanisms on directed forests."""

from .forest import (
    CycleDetected,
    Forest,
    ForestError,
    IndexOutOfRange,
    ProgenyTable,
    candidate_set,
    candidate_set_bruteforce,
    new_forest,
    progeny_table,
    remove_out_edge,
)
from .enumeration import CapExceeded, canonical_code, count_forests, enumerate_forests
from .families import ForestFamilySpec, InvalidSpec, build_family, parse_family, star_chains
from .forest_io import ForestSyntaxError, emit_forest, parse_forest
from .intervals import DegenerateInterval, piecewise_integral
from .mechanisms import (
    Distribution,
    Empty,
    ExactMechanism,
    FairMechanism,
    FunctionGenerated,
    GeneratorTable,
    IntervalShare,
    Mechanism,
    NumericalOverflow,
    SmoothedFairMechanism,
    Symmetrized,
    Uniform,
    ZeroDenominator,
    evaluate,
    extract_generator,
    fair_closed_form,
    function_generated,
    interval_share,
    parse_mechanism,
    symmetrize,
)

__version__ = "0.1.0"
