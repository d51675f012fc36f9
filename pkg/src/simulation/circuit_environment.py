"""
Circuit Construction Environment

Episodic environment in which an agent builds a circuit gate by gate:

1. reset(): empty circuit, all-zero observation
2. step(a): append action a, re-optimize all free parameters with COBYLA
   (warm start), compute the cost C_t = |E_opt - μ|
3. reward (only three values):
   +r  if C_t < ζ                 (episode ends, success)
   -r  if t >= T_max and C_t >= ζ (episode ends, failure)
    0  otherwise

ζ comes from the curriculum controller, which is advanced once per finished
episode. The raw optimized energy E_opt is reported alongside the cost.

Action table order:
- two-qubit kinds: CZ over unordered pairs (i < j), CX over ordered pairs
- one-qubit kinds × qubits
- gadgets in acceptance order: one-qubit gadgets × qubits,
  two-qubit gadgets over ordered pairs
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.grl_parameters import (
    CurriculumParameters,
    EnvironmentSettings,
    OptimizerSettings,
    params,
)
from controllers.curriculum_controller import CurriculumController, EpisodeResult
from grl_errors import ActionIndexError, EpisodeFinishedError, QubitIndexError
from models.circuit import (
    GADGET,
    PARAMETERIZED_KINDS,
    Circuit,
    GadgetDefinition,
    GateInstruction,
    bind,
)
from models.encoding import CircuitObservation, EncodingSpec, encode, extend_for_gadgets
from models.hamiltonians import PauliHamiltonian, TfimSpec, build_tfim, fake_minimum_energy
from models.statevector import Statevector, expectation
from simulation.param_optimizer import OptimizerBudget, optimize_circuit, warm_start_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GateAction:
    kind: str
    qubits: Tuple[int, ...]
    gadget: Optional[GadgetDefinition] = None

    @property
    def label(self) -> str:
        name = self.gadget.gadget_id if self.gadget is not None else self.kind
        return f"{name}({','.join(str(q) for q in self.qubits)})"


def build_action_table(num_qubits: int, one_qubit_kinds: Sequence[str],
                       two_qubit_kinds: Sequence[str],
                       gadgets: Sequence[GadgetDefinition] = ()) -> Tuple[GateAction, ...]:
    """
    Enumerate every placeable (kind, qubits) pair exactly once.

    Returns:
        Ordered action table (see module docstring)
    """
    qubits = range(num_qubits)
    actions: List[GateAction] = []
    for kind in two_qubit_kinds:
        pairs = itertools.combinations(qubits, 2) if kind == "CZ" \
            else itertools.permutations(qubits, 2)
        actions.extend(GateAction(kind, pair) for pair in pairs)
    for kind in one_qubit_kinds:
        actions.extend(GateAction(kind, (q,)) for q in qubits)
    for gadget in gadgets:
        placements = [(q,) for q in qubits] if gadget.arity == 1 \
            else list(itertools.permutations(qubits, 2))
        actions.extend(GateAction(GADGET, placement, gadget) for placement in placements)
    return tuple(actions)


@dataclass
class EpisodeConfig:
    """
    Attributes:
        hamiltonian: Problem Hamiltonian H
        action_table: Placeable gate actions
        encoding: Observation layout (must know every action's kind)
        fake_min: Curriculum target μ
        t_max: Maximum steps per episode
        reward_magnitude: r
        optimizer: COBYLA settings per step
    """
    hamiltonian: PauliHamiltonian
    action_table: Tuple[GateAction, ...]
    encoding: EncodingSpec
    fake_min: float
    t_max: int
    reward_magnitude: float = params.reward_magnitude
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    @property
    def num_actions(self) -> int:
        return len(self.action_table)

    @property
    def gadgets(self) -> Tuple[GadgetDefinition, ...]:
        return self.encoding.gadget_kinds


def make_episode_config(spec: TfimSpec, environment: Optional[EnvironmentSettings] = None,
                        optimizer: Optional[OptimizerSettings] = None,
                        gadgets: Sequence[GadgetDefinition] = ()) -> EpisodeConfig:
    """EpisodeConfig for a TFIM instance under the configured gate set."""
    environment = environment or EnvironmentSettings()
    one_qubit, two_qubit = environment.gate_kinds()
    if spec.num_qubits < 2:
        two_qubit = ()
    t_max = environment.resolved_t_max(spec.num_qubits)
    base = EncodingSpec(spec.num_qubits, one_qubit, two_qubit, (), t_max)
    encoding = extend_for_gadgets(base, gadgets)
    return EpisodeConfig(
        hamiltonian=build_tfim(spec),
        action_table=build_action_table(spec.num_qubits, one_qubit, two_qubit, gadgets),
        encoding=encoding,
        fake_min=fake_minimum_energy(spec),
        t_max=t_max,
        reward_magnitude=environment.reward_magnitude,
        optimizer=optimizer or OptimizerSettings(),
    )


@dataclass(eq=False)
class StepOutcome:
    observation: CircuitObservation
    reward: float
    done: bool
    cost: float
    energy: float
    optimized_params: np.ndarray
    step: int = 0
    threshold: float = 0.0


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    steps: int
    final_cost: float
    final_energy: float
    threshold: float
    success: bool

    def to_dict(self) -> dict:
        return {
            "episode": self.episode,
            "steps": self.steps,
            "final_cost": self.final_cost,
            "final_energy": self.final_energy,
            "threshold": self.threshold,
            "success": self.success,
        }


@dataclass(frozen=True)
class EpisodeBest:
    """Lowest-cost step of an episode, with its bound circuit."""
    cost: float
    energy: float
    circuit: Circuit


class CircuitEnvironment:
    """
    Single-threaded episodic environment owned by one training loop.
    """

    def __init__(self, config: EpisodeConfig,
                 curriculum: Optional[CurriculumParameters] = None,
                 rng_seed: int = 0):
        self.config = config
        self.controller = CurriculumController(config.fake_min, curriculum)
        self.rng_seed = rng_seed
        self.episode = 0
        self.records: List[EpisodeRecord] = []
        self.circuit = Circuit(config.hamiltonian.num_qubits)
        self.angles = np.zeros(0)
        self.step_index = 0
        self.done = True
        self.best: Optional[EpisodeBest] = None
        self._episode_threshold = self.controller.threshold

    @property
    def threshold(self) -> float:
        return self.controller.threshold

    def _cost(self, energy: float) -> float:
        return abs(energy - self.config.fake_min)

    def reset(self) -> StepOutcome:
        """
        Start an episode with the empty circuit.

        Returns:
            Initial StepOutcome (reward 0, not done); cost and energy of |0...0⟩
        """
        n = self.config.hamiltonian.num_qubits
        self.episode += 1
        self.circuit = Circuit(n)
        self.angles = np.zeros(0)
        self.step_index = 0
        self.done = False
        self.best = None
        self._episode_threshold = self.controller.threshold
        energy = expectation(Statevector.zero(n), self.config.hamiltonian)
        return StepOutcome(encode(self.circuit, self.config.encoding), 0.0, False,
                           self._cost(energy), energy, self.angles.copy(), 0,
                           self._episode_threshold)

    def _gate_for(self, action: GateAction) -> Tuple[GateInstruction, Optional[GadgetDefinition]]:
        if any(q >= self.circuit.num_qubits for q in action.qubits):
            raise QubitIndexError(f"Action {action.label} is outside the register")
        if action.gadget is not None:
            symbols = self.circuit.fresh_symbols(action.gadget.angle_slots)
            return GateInstruction(GADGET, action.qubits, symbols,
                                   action.gadget.gadget_id), action.gadget
        if action.kind in PARAMETERIZED_KINDS:
            return GateInstruction(action.kind, action.qubits,
                                   self.circuit.fresh_symbols(1)), None
        return GateInstruction(action.kind, action.qubits), None

    def step(self, action_index: int) -> StepOutcome:
        """
        Append an action, optimize all parameters, and score the result.

        Args:
            action_index: Index into the action table

        Returns:
            StepOutcome after placement and optimization
        """
        if self.done:
            raise EpisodeFinishedError("step() called on a finished episode; call reset()")
        if not 0 <= action_index < self.config.num_actions:
            raise ActionIndexError(
                f"Action {action_index} outside table of size {self.config.num_actions}")

        gate, gadget = self._gate_for(self.config.action_table[action_index])
        self.circuit = self.circuit.append(gate, gadget)
        self.step_index += 1

        settings = self.config.optimizer
        start = warm_start_point(self.angles if settings.warm_start else None,
                                 self.circuit.num_parameters)
        budget = OptimizerBudget(max_evaluations=settings.max_evaluations,
                                 initial_point=start, rng_seed=self.rng_seed,
                                 rhobeg=settings.rhobeg, tol=settings.tol)
        result = optimize_circuit(self.circuit, self.config.hamiltonian, budget)
        self.angles = result.point
        energy = result.cost
        cost = self._cost(energy)

        if self.best is None or cost < self.best.cost:
            self.best = EpisodeBest(cost, energy, bind(self.circuit, self.angles))

        threshold = self._episode_threshold
        success = cost < threshold
        if success:
            reward, self.done = self.config.reward_magnitude, True
        elif self.step_index >= self.config.t_max:
            reward, self.done = -self.config.reward_magnitude, True
        else:
            reward = 0.0

        logger.debug("episode %d step %d: %s E=%.10f C=%.3e ζ=%.3e",
                     self.episode, self.step_index, gate, energy, cost, threshold)

        if self.done:
            self._finish_episode(success, cost, energy, threshold)

        return StepOutcome(encode(self.circuit, self.config.encoding), reward, self.done,
                           cost, energy, self.angles.copy(), self.step_index, threshold)

    def _finish_episode(self, success: bool, cost: float, energy: float, threshold: float):
        record = EpisodeRecord(self.episode, self.step_index, cost, energy, threshold, success)
        self.records.append(record)
        self.controller.update(EpisodeResult(success, self.best.cost))
