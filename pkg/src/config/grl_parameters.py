"""
GRL Parameters - Centralized Parameter Authority

This module contains ALL constants and hyperparameters of the gadget
reinforcement learning engine. Values fixed by the published method carry an
inline "(published)" note; values the method leaves open are marked
"(artifact default)" and are labelled as such in every emitted report.

Structure:
- GrlParameters: flat constants object (``params``), with print_summary()
  and validate_derived_values()
- Settings dataclasses grouped per concern (model, environment, optimizer,
  curriculum, agent, gadgets, schedule) assembled into a PipelineConfig
- Presets ``paper`` (published scale) and ``ci`` (down-scaled), overridable by a
  JSON config file

Environment:
- GRL_WORKERS: number of worker processes for independent seeds (default 1)
"""

import copy
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

import sys
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grl_errors import InvalidConfigError


class GrlParameters:
    """
    Centralized repository for all engine constants.
    """

    def __init__(self):
        # ===================================================================
        # MODEL PARAMETERS
        # ===================================================================
        self.coupling = 1.0  # J, fixed to 1 in every shipped experiment
        self.boundary = "open"  # (artifact default) N-1 bonds
        self.oracle_max_qubits = 12  # Dense diagonalization bound (4096 x 4096)
        self.regime_fields = (1e-3, 5e-2, 1.0)  # easy, intermediate, hard (published)

        # ===================================================================
        # ENVIRONMENT PARAMETERS
        # ===================================================================
        self.t_max_by_qubits = {2: 20, 3: 50}  # (published)
        self.reward_magnitude = 5.0  # r (artifact default), only its sign matters
        self.one_qubit_native = ("RZ", "SX", "X")
        self.two_qubit_native = ("CZ",)
        self.one_qubit_universal = ("RX", "RY", "RZ")
        self.two_qubit_universal = ("CX",)

        # ===================================================================
        # PARAMETER OPTIMIZER (COBYLA)
        # ===================================================================
        self.optimizer_max_evaluations = 1000  # per environment step (published)
        self.optimizer_rhobeg = 1.0  # initial trust radius (rad), scipy default
        self.optimizer_tol = 1e-9  # final trust radius (artifact default)
        self.warm_start = True

        # ===================================================================
        # CURRICULUM CONTROLLER
        # ===================================================================
        self.zeta_init = 5e-3  # ζ1 (published)
        self.amortization = 1e-4  # δ (published)
        self.amortization_step = 1e-5  # δ decrement (published)
        self.successes_per_step = 50  # successes between δ decrements (published)
        self.shift_radius = 500  # κ (artifact default)
        self.greedy_period = 2000  # G episodes (published)
        self.failure_streak_limit = 100  # backtrack trigger (artifact default)
        self.min_amortization = 0.0
        self.min_threshold = 1e-12  # threshold stays strictly positive

        # ===================================================================
        # AGENT HYPERPARAMETERS
        # ===================================================================
        self.batch_size = 1000  # (published)
        self.memory_capacity = 20000  # (published)
        self.hidden_layers = 5  # (published)
        self.neurons_per_layer = 1000  # (published)
        self.dropout = 0.0  # (published)
        self.learning_rate = 1e-4  # Adam (published)
        self.target_update_period = 500  # policy updates between syncs (published)
        self.gamma = 0.88  # (artifact default)
        self.gamma_final = 5e-3  # listed "final gamma" (published, ambiguous)
        self.epsilon_decay = 0.99995  # (published)
        self.epsilon_min = 5e-2  # (published)
        self.leaky_slope = 0.01
        self.adam_beta1 = 0.9
        self.adam_beta2 = 0.999
        self.adam_eps = 1e-8

        # ===================================================================
        # PROGRAM SYNTHESIS
        # ===================================================================
        self.k_top = 20  # corpus size (artifact default)
        self.max_new_gadgets = 2
        self.max_fragment_size = 6  # elementary gates (artifact default)
        self.max_arity = 2  # (published)
        self.pseudocount = 10.0  # (published)
        self.structure_penalty = 1.0  # λ (published)
        self.size_penalty = 1.0  # k (published)
        self.min_occurrences = 2

        # ===================================================================
        # PIPELINE
        # ===================================================================
        self.episode_budgets = (5000, 10000, 15000)  # (artifact default)
        self.seeds = (0, 1, 2)  # three initializations (published)
        self.log_every = 100  # episodes between progress lines

    def t_max_for(self, num_qubits: int) -> int:
        if num_qubits in self.t_max_by_qubits:
            return self.t_max_by_qubits[num_qubits]
        return 20 if num_qubits < 2 else 50

    def fake_minimum(self, num_qubits: int, coupling: float, field_strength: float) -> float:
        # μ = (N-1)(-J) + N(-h)
        return (num_qubits - 1) * (-coupling) + num_qubits * (-field_strength)

    def print_summary(self):
        """
        Print summary of all parameters for verification.
        """
        print("=" * 70)
        print("GRL PARAMETERS SUMMARY")
        print("=" * 70)

        print("\n--- MODEL ---")
        print(f"Coupling J: {self.coupling}")
        print(f"Boundary: {self.boundary}")
        print(f"Regime fields h: {self.regime_fields}")
        print(f"Oracle bound: N <= {self.oracle_max_qubits}")

        print("\n--- ENVIRONMENT ---")
        print(f"T_max by qubits: {self.t_max_by_qubits}")
        print(f"Reward magnitude r: {self.reward_magnitude}")
        print(f"Native set: {self.two_qubit_native + self.one_qubit_native}")

        print("\n--- OPTIMIZER ---")
        print(f"Max evaluations per step: {self.optimizer_max_evaluations}")
        print(f"rhobeg / tol: {self.optimizer_rhobeg} / {self.optimizer_tol}")

        print("\n--- CURRICULUM ---")
        print(f"ζ1: {self.zeta_init}")
        print(f"δ: {self.amortization} (step {self.amortization_step} per "
              f"{self.successes_per_step} successes)")
        print(f"κ: {self.shift_radius}")
        print(f"Greedy period G: {self.greedy_period}")
        print(f"Failure streak limit: {self.failure_streak_limit}")

        print("\n--- AGENT ---")
        print(f"Network: {self.hidden_layers} x {self.neurons_per_layer}")
        print(f"Batch / memory: {self.batch_size} / {self.memory_capacity}")
        print(f"Learning rate: {self.learning_rate}")
        print(f"Target update period: {self.target_update_period}")
        print(f"γ: {self.gamma} (final {self.gamma_final})")
        print(f"ε decay / min: {self.epsilon_decay} / {self.epsilon_min}")

        print("\n--- PROGRAM SYNTHESIS ---")
        print(f"k_top: {self.k_top}")
        print(f"Max fragment size: {self.max_fragment_size}")
        print(f"Pseudocount: {self.pseudocount}")
        print(f"λ / k: {self.structure_penalty} / {self.size_penalty}")

        print("=" * 70)

    def validate_derived_values(self):
        """
        Check derived quantities against their published values.

        Returns:
            True if every check passes
        """
        print("\n" + "=" * 70)
        print("VALIDATION AGAINST PUBLISHED VALUES")
        print("=" * 70)

        checks = [
            ("μ(N=2, J=1, h=1)", self.fake_minimum(2, 1.0, 1.0), -3.0),
            ("μ(N=3, J=1, h=1e-3)", self.fake_minimum(3, 1.0, 1e-3), -2.003),
            ("δ after 50 successes", self.amortization - self.amortization_step, 9e-5),
            ("ε floor", max(self.epsilon_min, self.epsilon_decay ** 10 ** 6), 0.05),
        ]
        all_valid = True
        for name, value, expected in checks:
            if math.isclose(value, expected, rel_tol=1e-9, abs_tol=1e-12):
                print(f"✓ {name}: {value}")
            else:
                print(f"✗ {name}: {value} (expected {expected})")
                all_valid = False

        print("=" * 70)
        return all_valid


# Global instance for easy import
params = GrlParameters()


# ===================================================================
# SETTINGS DATACLASSES
# ===================================================================

@dataclass
class ModelSettings:
    num_qubits: int = 2
    coupling: float = params.coupling
    boundary: str = params.boundary

    def validate(self):
        if self.num_qubits < 1:
            raise InvalidConfigError("model.num_qubits must be >= 1")
        if self.coupling < 0:
            raise InvalidConfigError("model.coupling must be >= 0")
        if self.boundary not in ("open", "periodic"):
            raise InvalidConfigError("model.boundary must be 'open' or 'periodic'")
        if self.num_qubits > params.oracle_max_qubits:
            raise InvalidConfigError(
                f"model.num_qubits exceeds the oracle bound {params.oracle_max_qubits}")


@dataclass
class EnvironmentSettings:
    t_max: Optional[int] = None  # None selects the per-size default
    reward_magnitude: float = params.reward_magnitude
    gate_set: str = "native"

    def validate(self):
        if self.t_max is not None and self.t_max < 1:
            raise InvalidConfigError("environment.t_max must be >= 1")
        if self.reward_magnitude <= 0:
            raise InvalidConfigError("environment.reward_magnitude must be positive")
        if self.gate_set not in ("native", "universal"):
            raise InvalidConfigError("environment.gate_set must be 'native' or 'universal'")

    def resolved_t_max(self, num_qubits: int) -> int:
        return self.t_max if self.t_max is not None else params.t_max_for(num_qubits)

    def gate_kinds(self) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        """(one-qubit kinds, two-qubit kinds) of the selected gate set."""
        if self.gate_set == "universal":
            return params.one_qubit_universal, params.two_qubit_universal
        return params.one_qubit_native, params.two_qubit_native


@dataclass
class OptimizerSettings:
    max_evaluations: int = params.optimizer_max_evaluations
    rhobeg: float = params.optimizer_rhobeg
    tol: float = params.optimizer_tol
    warm_start: bool = params.warm_start

    def validate(self):
        if self.max_evaluations < 1:
            raise InvalidConfigError("optimizer.max_evaluations must be >= 1")
        if self.rhobeg <= 0 or self.tol <= 0:
            raise InvalidConfigError("optimizer.rhobeg and optimizer.tol must be positive")


@dataclass
class CurriculumParameters:
    zeta_init: float = params.zeta_init
    amortization: float = params.amortization
    amortization_step: float = params.amortization_step
    successes_per_step: int = params.successes_per_step
    shift_radius: float = params.shift_radius
    greedy_period: int = params.greedy_period
    failure_streak_limit: int = params.failure_streak_limit
    min_amortization: float = params.min_amortization
    min_threshold: float = params.min_threshold

    def validate(self):
        if self.zeta_init <= 0:
            raise InvalidConfigError("curriculum.zeta_init must be positive")
        if self.amortization < 0 or self.amortization_step < 0:
            raise InvalidConfigError("curriculum amortization values must be >= 0")
        if self.shift_radius <= 0:
            raise InvalidConfigError("curriculum.shift_radius must be positive")
        for name in ("successes_per_step", "greedy_period", "failure_streak_limit"):
            if getattr(self, name) < 1:
                raise InvalidConfigError(f"curriculum.{name} must be >= 1")
        if self.min_threshold <= 0:
            raise InvalidConfigError("curriculum.min_threshold must be positive")


@dataclass
class AgentConfig:
    batch_size: int = params.batch_size
    memory_capacity: int = params.memory_capacity
    hidden_layers: int = params.hidden_layers
    neurons_per_layer: int = params.neurons_per_layer
    dropout: float = params.dropout
    learning_rate: float = params.learning_rate
    target_update_period: int = params.target_update_period
    gamma: float = params.gamma
    gamma_mode: str = "fixed"
    gamma_final: float = params.gamma_final
    gamma_decay: float = params.epsilon_decay
    epsilon_decay: float = params.epsilon_decay
    epsilon_min: float = params.epsilon_min
    leaky_slope: float = params.leaky_slope
    rng_seed: int = 0

    def validate(self):
        for name in ("batch_size", "memory_capacity", "hidden_layers",
                     "neurons_per_layer", "target_update_period"):
            if getattr(self, name) < 1:
                raise InvalidConfigError(f"agent.{name} must be >= 1")
        if self.batch_size > self.memory_capacity:
            raise InvalidConfigError("agent.batch_size cannot exceed agent.memory_capacity")
        if self.dropout != 0.0:
            raise InvalidConfigError("agent.dropout other than 0 is not supported")
        if self.learning_rate <= 0:
            raise InvalidConfigError("agent.learning_rate must be positive")
        if not 0.0 <= self.gamma <= 1.0 or not 0.0 <= self.gamma_final <= 1.0:
            raise InvalidConfigError("agent discount values must lie in [0, 1]")
        if self.gamma_mode not in ("fixed", "annealed"):
            raise InvalidConfigError("agent.gamma_mode must be 'fixed' or 'annealed'")
        if not 0.0 < self.epsilon_decay <= 1.0 or not 0.0 < self.gamma_decay <= 1.0:
            raise InvalidConfigError("agent decay factors must lie in (0, 1]")
        if not 0.0 <= self.epsilon_min <= 1.0:
            raise InvalidConfigError("agent.epsilon_min must lie in [0, 1]")


@dataclass
class GadgetSettings:
    enabled: bool = True
    k_top: int = params.k_top
    max_new: int = params.max_new_gadgets
    max_fragment_size: int = params.max_fragment_size
    max_arity: int = params.max_arity
    pseudocount: float = params.pseudocount
    structure_penalty: float = params.structure_penalty
    size_penalty: float = params.size_penalty
    min_occurrences: int = params.min_occurrences
    library_file: Optional[str] = None

    def validate(self):
        if self.k_top < 1 or self.max_new < 0:
            raise InvalidConfigError("gadgets.k_top must be >= 1 and gadgets.max_new >= 0")
        if self.max_fragment_size < 2:
            raise InvalidConfigError("gadgets.max_fragment_size must be >= 2")
        if not 1 <= self.max_arity <= 2:
            raise InvalidConfigError("gadgets.max_arity must be 1 or 2")
        if self.pseudocount <= 0:
            raise InvalidConfigError("gadgets.pseudocount must be positive")
        if self.min_occurrences < 1:
            raise InvalidConfigError("gadgets.min_occurrences must be >= 1")


@dataclass
class RegimeSpec:
    field_strength: float
    episodes: int
    extract: bool = False

    def label(self) -> str:
        return f"h={self.field_strength:g}"


@dataclass
class RegimeSchedule:
    regimes: List[RegimeSpec] = field(default_factory=list)
    seeds: List[int] = field(default_factory=lambda: list(params.seeds))

    def validate(self):
        if not self.regimes:
            raise InvalidConfigError("schedule.regimes must not be empty")
        if not self.seeds:
            raise InvalidConfigError("schedule.seeds must not be empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise InvalidConfigError("schedule.seeds must be distinct")
        previous = -math.inf
        for regime in self.regimes:
            if regime.field_strength < 0:
                raise InvalidConfigError("regime field strengths must be >= 0")
            if regime.field_strength <= previous:
                raise InvalidConfigError("regime field strengths must be strictly increasing")
            if regime.episodes < 1:
                raise InvalidConfigError("regime episode budgets must be >= 1")
            previous = regime.field_strength


@dataclass
class PipelineConfig:
    preset: str = "paper"
    model: ModelSettings = field(default_factory=ModelSettings)
    environment: EnvironmentSettings = field(default_factory=EnvironmentSettings)
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    curriculum: CurriculumParameters = field(default_factory=CurriculumParameters)
    agent: AgentConfig = field(default_factory=AgentConfig)
    gadgets: GadgetSettings = field(default_factory=GadgetSettings)
    schedule: RegimeSchedule = field(default_factory=RegimeSchedule)
    output_dir: str = "runs/default"
    log_every: int = params.log_every

    def validate(self) -> "PipelineConfig":
        for section in (self.model, self.environment, self.optimizer, self.curriculum,
                        self.agent, self.gadgets, self.schedule):
            section.validate()
        if self.log_every < 1:
            raise InvalidConfigError("log_every must be >= 1")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def artifact_defaults(self) -> Dict[str, Any]:
        """Values chosen by this artifact rather than fixed by the published method."""
        return {
            "episode_budgets": [r.episodes for r in self.schedule.regimes],
            "k_top": self.gadgets.k_top,
            "shift_radius": self.curriculum.shift_radius,
            "failure_streak_limit": self.curriculum.failure_streak_limit,
            "reward_magnitude": self.environment.reward_magnitude,
            "gamma": self.agent.gamma,
            "gamma_mode": self.agent.gamma_mode,
            "boundary": self.model.boundary,
        }


# ===================================================================
# PRESETS
# ===================================================================

def _default_regimes(budgets) -> List[Dict[str, Any]]:
    return [
        {"field_strength": h, "episodes": n, "extract": i < len(budgets) - 1}
        for i, (h, n) in enumerate(zip(params.regime_fields, budgets))
    ]


PRESETS: Dict[str, Dict[str, Any]] = {
    "paper": {
        "preset": "paper",
        "schedule": {"regimes": _default_regimes(params.episode_budgets)},
    },
    "ci": {
        "preset": "ci",
        "optimizer": {"max_evaluations": 200},
        "agent": {
            "batch_size": 64,
            "memory_capacity": 5000,
            "hidden_layers": 2,
            "neurons_per_layer": 64,
            "learning_rate": 1e-3,
            "target_update_period": 100,
            "epsilon_decay": 0.9995,
        },
        "schedule": {"regimes": _default_regimes((250, 500, 750))},
        "log_every": 25,
    },
}


def _merge(base: Dict[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _build(cls, mapping: Mapping[str, Any], section: str):
    if not isinstance(mapping, Mapping):
        raise InvalidConfigError(f"{section} must be an object")
    known = {f.name: f for f in fields(cls)}
    unknown = set(mapping) - set(known)
    if unknown:
        raise InvalidConfigError(f"Unknown key(s) in {section}: {sorted(unknown)}")
    kwargs = {}
    for name, value in mapping.items():
        default = known[name].default_factory() if callable(known[name].default_factory) \
            else known[name].default
        if is_dataclass(default):
            kwargs[name] = _build(type(default), value, f"{section}.{name}")
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise InvalidConfigError(f"Invalid {section}: {exc}") from exc


def config_from_dict(mapping: Mapping[str, Any]) -> PipelineConfig:
    mapping = dict(mapping)
    schedule = mapping.pop("schedule", None)
    config = _build(PipelineConfig, mapping, "config")
    if schedule is not None:
        if not isinstance(schedule, Mapping):
            raise InvalidConfigError("schedule must be an object")
        unknown = set(schedule) - {"regimes", "seeds"}
        if unknown:
            raise InvalidConfigError(f"Unknown key(s) in schedule: {sorted(unknown)}")
        regimes = [_build(RegimeSpec, r, "schedule.regimes[]") for r in schedule.get("regimes", [])]
        seeds = [int(s) for s in schedule.get("seeds", params.seeds)]
        config.schedule = RegimeSchedule(regimes=regimes, seeds=seeds)
    return config.validate()


def load_config(path: Optional[str] = None, preset: Optional[str] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> PipelineConfig:
    """
    Assemble a PipelineConfig from a preset, an optional JSON file and overrides.

    Args:
        path: JSON config file; its "preset" key is used when preset is None
        preset: "paper" or "ci"
        overrides: Extra nested values applied last (e.g. from CLI flags)

    Returns:
        Validated PipelineConfig
    """
    file_values: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                file_values = json.load(handle)
        except FileNotFoundError as exc:
            raise InvalidConfigError(f"Config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(file_values, dict):
            raise InvalidConfigError(f"Config file {path} must hold a JSON object")

    name = preset or file_values.get("preset", "paper")
    if name not in PRESETS:
        raise InvalidConfigError(f"Unknown preset {name!r}; choose from {sorted(PRESETS)}")
    merged = _merge(PRESETS[name], file_values)
    merged["preset"] = name
    if overrides:
        merged = _merge(merged, overrides)
    return config_from_dict(merged)


def worker_count() -> int:
    raw = os.environ.get("GRL_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError as exc:
        raise InvalidConfigError(f"GRL_WORKERS must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise InvalidConfigError(f"GRL_WORKERS must be >= 1, got {workers}")
    return workers


if __name__ == "__main__":
    # Print parameter summary when run directly
    params.print_summary()
    params.validate_derived_values()
