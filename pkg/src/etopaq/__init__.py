"""Execution-time opacity checking and controller synthesis for timed
automata."""

from .ta import (
    Action,
    Atom,
    Clock,
    Edge,
    TimedAutomaton,
    TimedRun,
    add_tick_clock,
    build_run,
    classify_run,
    duplicate,
    make_finals_urgent,
    prepare,
    validate,
)
from .regions import Region, RegionContext, region_of
from .beliefs import BOTTOM, DEAD, BeliefSpace
from .strategies import (
    Bucket,
    ConcreteStrategy,
    MetaStrategy,
    UnitPlan,
    all_enabled,
    encountered_beliefs,
    is_feasible,
    meta_of,
    next_choice,
    run_admits,
    sample_strategy,
    satisfies,
    sigma_compatible,
)
from .game import (
    Mode,
    SolveResult,
    WinningWitness,
    check_exists,
    check_metastrategy,
    solve,
    witness_to_metastrategy,
)
from .oracle import oracle_buckets, oracle_verdict

__all__ = [
    "Action",
    "Atom",
    "BOTTOM",
    "BeliefSpace",
    "Bucket",
    "Clock",
    "ConcreteStrategy",
    "DEAD",
    "Edge",
    "MetaStrategy",
    "Mode",
    "Region",
    "RegionContext",
    "SolveResult",
    "TimedAutomaton",
    "TimedRun",
    "UnitPlan",
    "WinningWitness",
    "add_tick_clock",
    "all_enabled",
    "build_run",
    "check_exists",
    "check_metastrategy",
    "classify_run",
    "duplicate",
    "encountered_beliefs",
    "is_feasible",
    "make_finals_urgent",
    "meta_of",
    "next_choice",
    "oracle_buckets",
    "oracle_verdict",
    "prepare",
    "region_of",
    "run_admits",
    "sample_strategy",
    "satisfies",
    "sigma_compatible",
    "solve",
    "validate",
    "witness_to_metastrategy",
]

__version__ = "0.1.0"
