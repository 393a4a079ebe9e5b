"""Exact unit commitment with an aggregated EV fleet.

The charging flexibility of a large EV population is aggregated without
per-vehicle enumeration: the exact aggregate set is separated through
submodular function minimization, and violated border inequalities enter
the master dispatch problem as cutting planes.
"""

__version__ = "0.1.0"

from .model import (
    BoundOrderViolation,
    EmptyFlexibilitySet,
    EVProfile,
    EVProfileRaw,
    Instance,
    LengthMismatch,
    LinearRow,
    ProductionUnit,
    SubsetMask,
    TimeHorizon,
    ValidationError,
    reduce_profile,
    validate_instance,
    validate_profile,
)
from .gpoly import (
    BorderEvaluator,
    Cut,
    StructureViolation,
    check_structure,
    lower_border,
    naive_polytope,
    upper_border,
)
from .sfm import SfmOracle, brute_force_sfm, collect_cuts, greedy_vertex, min_norm_point
from .engine import (
    CutPool,
    SolveOptions,
    SolveReport,
    UcStatus,
    build_master,
    disaggregation_certificate,
    separation_oracle,
    solve_extensive,
    solve_uc,
)
from .io_cli import (
    GeneratorParams,
    generate_instance,
    load_instance,
    run_bench,
    run_cli,
    save_instance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
