"""
DDQN Training Loop

For each episode:
    1. reset the environment (empty circuit)
    2. until done: ε-greedy action, environment step (place gate, optimize
       angles, reward), store the transition, one learning update
    3. offer the episode's best bound circuit to the top-k store
    4. record loss, ε, threshold and cost for the training curves

The curriculum threshold advances inside the environment when an episode
finishes; the trainer only reads it.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

import sys
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from agents.ddqn_agent import DDQNAgent
from agents.replay_memory import ReplayTransition
from communication.protocol_definition import (
    CircuitRecord,
    CurveRow,
    append_jsonl,
    ensure_dir,
    write_csv,
)
from config.grl_parameters import params
from pipeline.topk_store import TopKStore
from simulation.circuit_environment import CircuitEnvironment, EpisodeRecord

logger = logging.getLogger(__name__)

CURVES_FILE = "curves.csv"
EPISODES_FILE = "episodes.jsonl"
THRESHOLDS_FILE = "thresholds.csv"
CHECKPOINT_FILE = "agent.npz"
TOPK_FILE = "topk.json"


@dataclass
class TrainingResult:
    """
    Attributes:
        records: One EpisodeRecord per finished episode
        curves: Per-episode training signals
        thresholds: Curriculum threshold after each episode
        store: Best circuits of this run
    """
    records: List[EpisodeRecord] = field(default_factory=list)
    curves: List[CurveRow] = field(default_factory=list)
    thresholds: List[float] = field(default_factory=list)
    store: Optional[TopKStore] = None

    @property
    def successes(self) -> int:
        return sum(1 for r in self.records if r.success)

    def best(self) -> Optional[CircuitRecord]:
        return self.store.best() if self.store is not None else None


def run_episode(agent: DDQNAgent, environment: CircuitEnvironment) -> List[float]:
    """
    Play one episode, learning after every step.

    Returns:
        Losses of the updates performed during the episode
    """
    outcome = environment.reset()
    observation = outcome.observation.flat()
    losses = []
    done = False
    while not done:
        action = agent.act(observation)
        outcome = environment.step(action)
        next_observation = outcome.observation.flat()
        done = outcome.done
        agent.remember(ReplayTransition(observation, action, outcome.reward,
                                        next_observation, done))
        loss = agent.learn()
        if loss is not None:
            losses.append(loss)
        observation = next_observation
    return losses


def train_agent(agent: DDQNAgent, environment: CircuitEnvironment, episodes: int,
                store: Optional[TopKStore] = None, regime: str = "", seed: int = 0,
                log_every: int = params.log_every) -> TrainingResult:
    """
    Train for a fixed number of episodes.

    Args:
        agent: DDQN agent sized for the environment's action table
        environment: Circuit construction environment
        episodes: Episode budget
        store: Top-k store receiving each episode's best circuit
        regime: Regime label stored with every circuit
        seed: Seed stored with every circuit
        log_every: Episodes between INFO progress lines

    Returns:
        TrainingResult with curves, thresholds and the store
    """
    store = store if store is not None else TopKStore()
    result = TrainingResult(store=store)
    for episode in range(1, episodes + 1):
        losses = run_episode(agent, environment)
        record = environment.records[-1]
        best = environment.best
        store.offer(CircuitRecord(best.circuit, best.energy, best.cost, regime, seed))

        result.records.append(record)
        result.thresholds.append(environment.threshold)
        result.curves.append(CurveRow(
            episode=record.episode,
            loss=float(np.mean(losses)) if losses else None,
            epsilon=agent.epsilon,
            threshold=record.threshold,
            cost=best.cost,
            energy=best.energy,
            steps=record.steps,
            success=record.success,
        ))

        if episode % log_every == 0 or episode == episodes:
            window = result.records[-log_every:]
            logger.info("%s seed %d | episode %d/%d | success %d/%d | best C=%.3e | "
                        "ζ=%.3e | ε=%.4f | memory %d",
                        regime, seed, episode, episodes,
                        sum(1 for r in window if r.success), len(window),
                        store.best().cost, environment.threshold, agent.epsilon,
                        len(agent.memory))
    return result


def write_training_artifacts(result: TrainingResult, directory: str,
                             agent: Optional[DDQNAgent] = None):
    """curves.csv, episodes.jsonl, thresholds.csv, topk.json and the agent checkpoint."""
    ensure_dir(directory)
    write_csv(os.path.join(directory, CURVES_FILE), CurveRow.HEADER,
              (row.as_row() for row in result.curves))
    episodes_path = os.path.join(directory, EPISODES_FILE)
    if os.path.exists(episodes_path):
        os.remove(episodes_path)
    append_jsonl(episodes_path, (r.to_dict() for r in result.records))
    write_csv(os.path.join(directory, THRESHOLDS_FILE), ("episode", "threshold"),
              ((i + 1, t) for i, t in enumerate(result.thresholds)))
    if result.store is not None:
        result.store.save(os.path.join(directory, TOPK_FILE))
    if agent is not None:
        agent.save(os.path.join(directory, CHECKPOINT_FILE))
        logger.info("Checkpoint written to %s", os.path.join(directory, CHECKPOINT_FILE))
