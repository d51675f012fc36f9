"""
Circuit Parameter Optimizer

Derivative-free minimization of the energy E(θ̄) = ⟨0|U†(θ̄) H U(θ̄)|0⟩ with
COBYLA (scipy.optimize), run at every environment step.

Budget handling:
- every cost evaluation is counted; the evaluation that would exceed
  max_evaluations is refused and the best point seen so far is returned
- the first evaluation is always the initial point, so the returned cost
  never exceeds cost(initial_point)

Warm start: parameters carried over from the previous step start at their
previous optimum, new parameters start at 0.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize as scipy_minimize

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.grl_parameters import params
from grl_errors import InvalidConfigError, ParameterCountError
from models.circuit import Circuit
from models.hamiltonians import PauliHamiltonian
from models.statevector import CompiledCircuit

logger = logging.getLogger(__name__)


@dataclass
class OptimizerBudget:
    """
    Attributes:
        max_evaluations: Cost-function evaluation cap (>= 1)
        initial_point: Start point, zeros when None
        rng_seed: Seed for the restart points
        restarts: Extra random starts sharing the same budget
        rhobeg: Initial trust-region radius (radians)
        tol: Final trust-region radius
    """
    max_evaluations: int = params.optimizer_max_evaluations
    initial_point: Optional[Sequence[float]] = None
    rng_seed: int = 0
    restarts: int = 0
    rhobeg: float = params.optimizer_rhobeg
    tol: float = params.optimizer_tol

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise InvalidConfigError("max_evaluations must be >= 1")


@dataclass
class OptimizationResult:
    point: np.ndarray
    cost: float
    evaluations: int
    trace: List[float] = field(default_factory=list)  # best-so-far per evaluation


class _BudgetExhausted(Exception):
    pass


class _CountingCost:
    """Wraps the cost, counts evaluations and keeps the best point."""

    def __init__(self, cost: Callable[[np.ndarray], float], max_evaluations: int):
        self.cost = cost
        self.max_evaluations = max_evaluations
        self.evaluations = 0
        self.best_point: Optional[np.ndarray] = None
        self.best_cost = np.inf
        self.trace: List[float] = []

    def __call__(self, point: np.ndarray) -> float:
        if self.evaluations >= self.max_evaluations:
            raise _BudgetExhausted()
        self.evaluations += 1
        value = float(self.cost(np.asarray(point, dtype=float)))
        if value < self.best_cost or self.best_point is None:
            self.best_cost = value
            self.best_point = np.array(point, dtype=float)
        self.trace.append(self.best_cost)
        return value


def minimize(cost: Callable[[np.ndarray], float], dim: int,
             budget: Optional[OptimizerBudget] = None) -> OptimizationResult:
    """
    Minimize a real cost over R^dim with COBYLA.

    Args:
        cost: Pure function of a length-dim array
        dim: Number of parameters (0 allowed)
        budget: Evaluation cap, start point and seed

    Returns:
        OptimizationResult with the best point, its cost, evaluations used and
        the best-so-far trace
    """
    budget = budget or OptimizerBudget()
    if budget.initial_point is not None:
        start = np.asarray(budget.initial_point, dtype=float).reshape(-1)
        if start.shape[0] != dim:
            raise ParameterCountError(f"initial_point has {start.shape[0]} entries, dim is {dim}")
    else:
        start = np.zeros(dim)

    if dim == 0:
        value = float(cost(start))
        return OptimizationResult(start, value, 1, [value])

    counted = _CountingCost(cost, budget.max_evaluations)
    rng = np.random.default_rng(budget.rng_seed)
    starts = [start] + [rng.uniform(-np.pi, np.pi, dim) for _ in range(budget.restarts)]
    for x0 in starts:
        remaining = budget.max_evaluations - counted.evaluations
        if remaining < 1:
            break
        try:
            scipy_minimize(counted, x0, method="COBYLA", tol=budget.tol,
                           options={"rhobeg": budget.rhobeg, "maxiter": remaining})
        except _BudgetExhausted:
            logger.debug("COBYLA stopped at the evaluation cap (%d)", budget.max_evaluations)
            break

    logger.debug("minimize dim=%d: best=%.12g after %d evaluations",
                 dim, counted.best_cost, counted.evaluations)
    return OptimizationResult(counted.best_point, counted.best_cost,
                              counted.evaluations, counted.trace)


def warm_start_point(previous: Optional[Sequence[float]], dim: int) -> np.ndarray:
    """Previous optimum for carried-over parameters, zeros for new ones."""
    point = np.zeros(dim)
    if previous is not None:
        previous = np.asarray(previous, dtype=float).reshape(-1)[:dim]
        point[:previous.shape[0]] = previous
    return point


def energy_function(circuit: Circuit, hamiltonian: PauliHamiltonian) -> Callable[[np.ndarray], float]:
    """E(θ̄) for the circuit's free parameters, in parameter-list order."""
    return CompiledCircuit(circuit, hamiltonian).energy


def optimize_circuit(circuit: Circuit, hamiltonian: PauliHamiltonian,
                     budget: Optional[OptimizerBudget] = None) -> OptimizationResult:
    """Minimize the energy of a parameterized circuit."""
    return minimize(energy_function(circuit, hamiltonian), circuit.num_parameters, budget)
