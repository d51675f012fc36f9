"""
Gadget Reinforcement Learning Pipeline

Regimes run in order from easy to hard (increasing transverse field h).
For each regime:

1. every seed trains an agent on the TFIM at that h, with the action table
   extended by the gadget library accumulated so far; from the second regime
   on, the seed's agent is reinitialized through extend_action_space
2. the seeds' best circuits are merged into the regime's top-k store
3. if the regime is marked for extraction, gadgets are extracted from the
   top-k corpus and appended to the library used by the next regime

Seeds of one regime are independent and may run in worker processes
(GRL_WORKERS). Results are merged in seed order, so the outcome does not
depend on completion order.

Run directory layout:

    <out>/config.json
    <out>/gadgets.json                    final gadget library
    <out>/topk.json                       cumulative top-k
    <out>/regime_<i>/topk.json            regime top-k (extraction corpus)
    <out>/regime_<i>/library.json         library after this regime
    <out>/regime_<i>/seed_<s>/            trainer artifacts + complete.json
"""

import dataclasses
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import sys
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from agents.ddqn_agent import DDQNAgent
from communication.protocol_definition import (
    CircuitRecord,
    GadgetProvenance,
    ensure_dir,
    load_gadget_library,
    load_gadget_provenance,
    read_json,
    save_gadget_library,
    write_json,
)
from config.grl_parameters import GadgetSettings, PipelineConfig, RegimeSpec, worker_count
from models.circuit import GadgetDefinition
from models.hamiltonians import TfimSpec
from pipeline.topk_store import TopKStore
from pipeline.trainer import TOPK_FILE, train_agent, write_training_artifacts
from simulation.circuit_environment import CircuitEnvironment, EpisodeConfig, make_episode_config
from synthesis.fragments import ScoredCorpus, fragment_from_gadget
from synthesis.grammar import ExtractionResult, Grammar, extract_gadgets

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.json"
LIBRARY_FILE = "gadgets.json"
REGIME_LIBRARY_FILE = "library.json"
COMPLETE_FILE = "complete.json"


def regime_dir(out_dir: str, index: int) -> str:
    return os.path.join(out_dir, f"regime_{index}")


def seed_dir(out_dir: str, index: int, seed: int) -> str:
    return os.path.join(regime_dir(out_dir, index), f"seed_{seed}")


@dataclass
class SeedTask:
    """Everything one worker needs to train one seed on one regime."""
    config: PipelineConfig
    regime_index: int
    regime: RegimeSpec
    seed: int
    gadgets: Tuple[GadgetDefinition, ...]
    directory: str
    resume: bool = False
    previous_gadgets: Optional[Tuple[GadgetDefinition, ...]] = None


@dataclass
class SeedOutcome:
    regime_index: int
    regime: str
    field_strength: float
    seed: int
    episodes: int
    successes: int
    best_cost: float
    best_energy: float
    records: List[CircuitRecord] = field(default_factory=list)
    resumed: bool = False

    def summary(self) -> Dict:
        return {
            "regime_index": self.regime_index,
            "regime": self.regime,
            "field_strength": self.field_strength,
            "seed": self.seed,
            "episodes": self.episodes,
            "successes": self.successes,
            "best_cost": self.best_cost,
            "best_energy": self.best_energy,
        }


@dataclass
class RegimeOutcome:
    index: int
    regime: RegimeSpec
    seeds: List[SeedOutcome]
    store: TopKStore
    new_gadgets: List[GadgetDefinition] = field(default_factory=list)


@dataclass
class PipelineResult:
    regimes: List[RegimeOutcome]
    gadgets: List[GadgetDefinition]
    store: TopKStore
    provenance: Dict[str, GadgetProvenance] = field(default_factory=dict)


def tfim_for(config: PipelineConfig, field_strength: float) -> TfimSpec:
    model = config.model
    return TfimSpec(model.num_qubits, model.coupling, field_strength, model.boundary)


def _load_completed(task: SeedTask) -> Optional[SeedOutcome]:
    marker = os.path.join(task.directory, COMPLETE_FILE)
    if not (task.resume and os.path.exists(marker)):
        return None
    summary = read_json(marker)
    store = TopKStore.load(os.path.join(task.directory, TOPK_FILE))
    logger.warning("Resuming: %s seed %d already complete, skipping",
                   task.regime.label(), task.seed)
    return SeedOutcome(summary["regime_index"], summary["regime"], summary["field_strength"],
                       summary["seed"], summary["episodes"], summary["successes"],
                       summary["best_cost"], summary["best_energy"], store.entries, True)


def regime_agent(task: SeedTask, spec: TfimSpec, episode_config: EpisodeConfig) -> DDQNAgent:
    """
    Agent for one seed of one regime.

    After the first regime the seed's agent is carried over through
    extend_action_space, which re-creates it for the enlarged action table.
    """
    config = task.config
    agent_config = dataclasses.replace(config.agent, rng_seed=task.seed)
    observation_size = episode_config.encoding.observation_size
    if task.previous_gadgets is None:
        return DDQNAgent(observation_size, episode_config.num_actions, agent_config)
    previous = make_episode_config(spec, config.environment, config.optimizer,
                                   task.previous_gadgets)
    agent = DDQNAgent(previous.encoding.observation_size, previous.num_actions, agent_config)
    return agent.extend_action_space(observation_size, episode_config.num_actions)


def run_seed(task: SeedTask) -> SeedOutcome:
    """
    Train one agent on one regime and persist its artifacts.

    Module-level so it can be shipped to worker processes.
    """
    completed = _load_completed(task)
    if completed is not None:
        return completed

    config = task.config
    spec = tfim_for(config, task.regime.field_strength)
    episode_config = make_episode_config(spec, config.environment, config.optimizer,
                                         task.gadgets)
    environment = CircuitEnvironment(episode_config, config.curriculum, rng_seed=task.seed)
    agent = regime_agent(task, spec, episode_config)
    logger.info("Training %s seed %d: %d actions (%d gadgets), %d episodes",
                task.regime.label(), task.seed, episode_config.num_actions,
                len(task.gadgets), task.regime.episodes)

    result = train_agent(agent, environment, task.regime.episodes,
                         TopKStore(config.gadgets.k_top), task.regime.label(),
                         task.seed, config.log_every)
    write_training_artifacts(result, task.directory, agent)

    best = result.best()
    outcome = SeedOutcome(task.regime_index, task.regime.label(),
                          task.regime.field_strength, task.seed, len(result.records),
                          result.successes, best.cost, best.energy, result.store.entries)
    write_json(os.path.join(task.directory, COMPLETE_FILE), outcome.summary())
    return outcome


def run_seeds(tasks: Sequence[SeedTask], workers: Optional[int] = None) -> List[SeedOutcome]:
    """Run independent seed tasks, in-process or in a process pool; results keep task order."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [run_seed(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as executor:
        return list(executor.map(run_seed, tasks))


def grammar_primitives(config: PipelineConfig) -> Tuple[str, ...]:
    one_qubit, two_qubit = config.environment.gate_kinds()
    return tuple(sorted(set(one_qubit) | set(two_qubit)))


def extract_library(store: TopKStore, library: Sequence[GadgetDefinition],
                    settings: GadgetSettings, primitives: Sequence[str],
                    max_new: Optional[int] = None) -> Tuple[List[GadgetDefinition], ExtractionResult]:
    """
    Grow a gadget library from a top-k store.

    Args:
        store: Corpus source (bound circuits with energies)
        library: Gadgets already in use; their fragments seed the grammar
        settings: Extraction limits and penalties
        primitives: Elementary gate kinds of the gate set
        max_new: Override of settings.max_new

    Returns:
        (new gadgets named g<index> in acceptance order, the extraction result)
    """
    records = store.entries
    corpus = ScoredCorpus.from_energies([r.circuit for r in records],
                                        [r.energy for r in records])
    kinds = set(primitives) | {g.kind for c in corpus.circuits for g in c.instructions}
    base = Grammar.base(sorted(kinds), settings)
    for gadget in library:
        base = base.with_fragment(fragment_from_gadget(gadget))
    result = extract_gadgets(corpus, settings.max_new if max_new is None else max_new,
                             settings, base=base)
    new_gadgets = [accepted.fragment.to_gadget(f"g{len(library) + i}")
                   for i, accepted in enumerate(result.accepted)]
    for gadget in new_gadgets:
        logger.info("New gadget %s: %s", gadget.gadget_id, gadget.program)
    return new_gadgets, result


def accepted_provenance(new_gadgets: Sequence[GadgetDefinition], result: ExtractionResult,
                        field_strength: Optional[float]) -> Dict[str, GadgetProvenance]:
    return {gadget.gadget_id: GadgetProvenance(field_strength, accepted.score_delta)
            for gadget, accepted in zip(new_gadgets, result.accepted)}


def initial_library(config: PipelineConfig) -> Tuple[List[GadgetDefinition],
                                                     Dict[str, GadgetProvenance]]:
    path = config.gadgets.library_file
    if path is None:
        return [], {}
    library = load_gadget_library(path)
    logger.info("Preloaded %d gadget(s) from %s", len(library), path)
    return library, load_gadget_provenance(path)


def run_pipeline(config: PipelineConfig, resume: bool = False,
                 workers: Optional[int] = None) -> PipelineResult:
    """
    Run every regime of the schedule and persist all artifacts.

    Args:
        config: Validated pipeline configuration
        resume: Skip seeds whose completion marker exists in config.output_dir
        workers: Worker processes (GRL_WORKERS when omitted)

    Returns:
        PipelineResult with per-regime outcomes, final library and cumulative store
    """
    config.validate()
    out_dir = ensure_dir(config.output_dir)
    write_json(os.path.join(out_dir, CONFIG_FILE), config.to_dict())

    library, provenance = initial_library(config)
    cumulative = TopKStore(config.gadgets.k_top)
    outcomes: List[RegimeOutcome] = []
    primitives = grammar_primitives(config)
    previous: Optional[Tuple[GadgetDefinition, ...]] = None

    for index, regime in enumerate(config.schedule.regimes):
        logger.info("=== Regime %d: %s, %d episodes, %d seed(s) ===", index, regime.label(),
                    regime.episodes, len(config.schedule.seeds))
        in_use = tuple(library)
        tasks = [SeedTask(config, index, regime, seed, in_use,
                          seed_dir(out_dir, index, seed), resume, previous)
                 for seed in config.schedule.seeds]
        seeds = run_seeds(tasks, workers)
        previous = in_use

        store = TopKStore(config.gadgets.k_top)
        for outcome in seeds:
            store.merge(outcome.records)
        cumulative.merge(store.entries)
        directory = regime_dir(out_dir, index)
        store.save(os.path.join(directory, TOPK_FILE))

        new_gadgets: List[GadgetDefinition] = []
        library_path = os.path.join(directory, REGIME_LIBRARY_FILE)
        if regime.extract and config.gadgets.enabled:
            if resume and os.path.exists(library_path):
                stored = load_gadget_library(library_path)
                new_gadgets = stored[len(library):]
                provenance.update(load_gadget_provenance(library_path))
            else:
                new_gadgets, result = extract_library(store, library, config.gadgets, primitives)
                provenance.update(accepted_provenance(new_gadgets, result,
                                                      regime.field_strength))
            library = library + new_gadgets
        save_gadget_library(library_path, library, provenance)

        outcomes.append(RegimeOutcome(index, regime, seeds, store, new_gadgets))
        logger.info("Regime %s finished: best C=%.3e, library size %d",
                    regime.label(), store.best().cost, len(library))

    save_gadget_library(os.path.join(out_dir, LIBRARY_FILE), library, provenance)
    cumulative.save(os.path.join(out_dir, TOPK_FILE))
    return PipelineResult(outcomes, library, cumulative, provenance)


def solve(config: PipelineConfig, field_strength: float, episodes: int, seed: int = 0,
          gadgets: Sequence[GadgetDefinition] = ()) -> SeedOutcome:
    """Single regime, single seed; artifacts go to <output_dir>/regime_0/seed_<seed>."""
    config.validate()
    regime = RegimeSpec(field_strength, episodes, extract=False)
    out_dir = ensure_dir(config.output_dir)
    write_json(os.path.join(out_dir, CONFIG_FILE), config.to_dict())
    task = SeedTask(config, 0, regime, seed, tuple(gadgets), seed_dir(out_dir, 0, seed))
    return run_seed(task)
