"""Random binary CSP laboratory.

Thin python surface over the compiled core: instance generation, exact solving
and counting, the satisfiability-changing tuple swap, moment analytics,
parameter feasibility checks, and CNF log-encoding.
"""

from ._core import (  # noqa: F401
    BudgetExceeded,
    Constraint,
    DomainError,
    FlipCertificate,
    FlipDirection,
    FlipPreconditionViolated,
    Instance,
    InvalidModel,
    NoFlipPairFound,
    ParseError,
    RBParams,
    SamplingExhausted,
    SizeError,
    SolveMode,
    SolveResult,
    SymmetricRelation,
    UnsupportedArity,
    Variant,
    closed_under_permutation,
    derive_params,
    enumerate_oracle,
    feasibility,
    find_near_miss,
    flip_sat_to_unsat,
    flip_unsat_to_sat,
    generate_original,
    generate_symmetric_relation,
    harness,
    instantiate_symmetric,
    moments,
    satenc,
    satisfies,
    satisfies_all,
    solve,
    verify_certificate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
