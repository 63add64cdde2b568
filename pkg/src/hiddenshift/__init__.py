"""Injectivization of non-injective hidden shift instances over Z_q^n."""
from .experiments import ExperimentConfig, ExperimentReport, run_experiment
from .group import GroupSpec, Subspace, enumerate_1dim_subspaces, make_group
from .influence import (
    InfluenceProfile,
    WalshSpectrum,
    influence_failure_bounds,
    influence_of,
    influence_profile,
    is_bent,
    is_periodic,
    walsh_spectrum,
)
from .injectivization import (
    InjectivizedTable,
    TupleV,
    brute_force_shifts,
    build_fV,
    exact_failure_rate,
    is_injective,
    make_tuple,
    random_function_failure_bound,
    sample_V_distinct,
    sample_V_uniform,
)
from .oracle import (
    CountingOracle,
    FunctionTable,
    make_mm_bent,
    make_random_function,
    make_random_nonperiodic,
    make_shifted,
    make_table,
    random_mm_bent,
)
from .simon import (
    SimonOracle,
    build_simon_oracle,
    end_to_end_hidden_shift,
    extract_shift,
    gf2_nullspace,
    recover_period,
    simon_sample,
)

__all__ = [
    "CountingOracle",
    "ExperimentConfig",
    "ExperimentReport",
    "FunctionTable",
    "GroupSpec",
    "InfluenceProfile",
    "InjectivizedTable",
    "SimonOracle",
    "Subspace",
    "TupleV",
    "WalshSpectrum",
    "brute_force_shifts",
    "build_fV",
    "build_simon_oracle",
    "end_to_end_hidden_shift",
    "enumerate_1dim_subspaces",
    "exact_failure_rate",
    "extract_shift",
    "gf2_nullspace",
    "influence_failure_bounds",
    "influence_of",
    "influence_profile",
    "is_bent",
    "is_injective",
    "is_periodic",
    "make_group",
    "make_mm_bent",
    "make_random_function",
    "make_random_nonperiodic",
    "make_shifted",
    "make_table",
    "make_tuple",
    "random_function_failure_bound",
    "random_mm_bent",
    "recover_period",
    "run_experiment",
    "sample_V_distinct",
    "sample_V_uniform",
    "simon_sample",
    "walsh_spectrum",
]

__version__ = "0.1.0"
