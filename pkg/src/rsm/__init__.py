"""Robust sequential submodular maximization against adversarial removals."""

from .attacks import RemovalOutcome, get_attacker, greedy_removal, random_removal, worst_case_removal
from .core import (
    BudgetError,
    Budgets,
    CapacityError,
    DegenerateInstanceError,
    ElementRef,
    GroundSets,
    NumericalError,
    ObjectiveContractError,
    ObjectiveHandle,
    RSMError,
    StructuralError,
    evaluate,
    make_sequence,
    marginal,
)
from .objectives import (
    CoverageSpec,
    LinearGaussianModel,
    ModularSpec,
    Sensor,
    make_batch_logdet,
    make_coverage,
    make_kalman_trace,
    make_modular,
)
from .solver import (
    EpisodeTrace,
    StepPlan,
    greedy_step,
    optimal_value,
    ram_step,
    random_step,
    run_episode,
)

__version__ = "0.1.0"
