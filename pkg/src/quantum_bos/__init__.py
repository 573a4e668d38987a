"""Quantized Battle of the Sexes: payoffs, Nash equilibria and dilemma resolution."""

from .core import (
    BilinearCoefficients,
    DensityMatrix,
    GamePayoffs,
    InitialState,
    PayoffPair,
    Player,
    StrategyProfile,
    bilinear_coefficients,
    final_density_closed_form,
    initial_density,
    make_initial_state,
    mw_channel,
    payoff_operator,
    payoffs_closed_form,
    payoffs_trace,
)
from .equilibria import (
    BestResponse,
    DilemmaVerdict,
    Equilibrium,
    EquilibriumKind,
    MaximinChoice,
    best_response,
    corner_payoff_matrix,
    dilemma_analysis,
    enumerate_equilibria,
    is_corner_nash,
    verify_equilibria_grid,
)
from .exceptions import (
    InvalidDensityMatrixError,
    InvalidPayoffsError,
    InvalidProfileError,
    InvalidStateError,
    QuantumGameError,
)
from .explorer import ScanRecord, find_resolving_states, reproduce, scan_simplex

__version__ = "0.1.0"
