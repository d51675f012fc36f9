"""
Curriculum Threshold Controller

Feedback-driven controller of the success threshold ζ on the cost
C = |E - μ|, with μ the fake minimum energy.

Controller state:
- ζ (threshold): starts at ζ1 = 5×10⁻³
- ζ2 (zeta_best): lowest cost observed so far, as a cost distance
- δ (amortization): 10⁻⁴, reduced by 10⁻⁵ every 50 successful episodes
- κ (shift radius): per-success decrement is δ/κ
- G (greedy period): every G episodes the threshold is set to ζ2 exactly

Per finished episode, in order:
1. success: ζ ← ζ - δ/κ; every 50th success δ ← δ - 10⁻⁵
   failure: failure streak + 1
2. new lowest cost: ζ2 ← cost, ζ ← ζ2 + δ, greedy shift cleared
3. episode count multiple of G: ζ ← ζ2 (greedy shift)
   otherwise, greedy shift active and failure streak ≥ limit:
   ζ ← ζ2 + δ (backtrack)
4. floors: δ ≥ min_amortization, ζ ≥ min_threshold

The controller is a deterministic state machine: the threshold trace is
reproducible from the sequence of (success, lowest cost) episode results.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.grl_parameters import CurriculumParameters

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpisodeResult:
    success: bool
    min_cost: float


@dataclass(frozen=True)
class CurriculumState:
    zeta_init: float
    zeta_best: float
    fake_min: float
    amortization: float
    amortization_step: float
    shift_radius: float
    greedy_period: int
    success_count: int = 0
    failure_streak: int = 0
    current_threshold: float = 0.0
    episodes: int = 0
    greedy_active: bool = False

    @classmethod
    def initial(cls, fake_min: float,
                parameters: Optional[CurriculumParameters] = None) -> "CurriculumState":
        parameters = parameters or CurriculumParameters()
        return cls(
            zeta_init=parameters.zeta_init,
            zeta_best=math.inf,
            fake_min=fake_min,
            amortization=parameters.amortization,
            amortization_step=parameters.amortization_step,
            shift_radius=parameters.shift_radius,
            greedy_period=parameters.greedy_period,
            current_threshold=parameters.zeta_init,
        )


def curriculum_update(state: CurriculumState, result: EpisodeResult,
                      parameters: Optional[CurriculumParameters] = None) -> CurriculumState:
    """
    Advance the controller by one finished episode.

    Args:
        state: Controller state before the episode result
        result: Whether the episode succeeded and its lowest cost
        parameters: Period and floor settings (defaults when omitted)

    Returns:
        New CurriculumState
    """
    parameters = parameters or CurriculumParameters()
    episodes = state.episodes + 1
    threshold = state.current_threshold
    amortization = state.amortization
    successes = state.success_count
    streak = state.failure_streak
    zeta_best = state.zeta_best
    greedy = state.greedy_active

    if result.success:
        successes += 1
        streak = 0
        threshold -= amortization / state.shift_radius
        if successes % parameters.successes_per_step == 0:
            amortization = max(amortization - state.amortization_step,
                               parameters.min_amortization)
    else:
        streak += 1

    if result.min_cost < zeta_best:
        zeta_best = result.min_cost
        threshold = zeta_best + amortization
        greedy = False

    if episodes % state.greedy_period == 0 and math.isfinite(zeta_best):
        threshold = zeta_best
        greedy = True
        streak = 0
    elif greedy and streak >= parameters.failure_streak_limit:
        threshold = zeta_best + amortization
        greedy = False
        streak = 0

    threshold = max(threshold, parameters.min_threshold)
    return replace(state, zeta_best=zeta_best, amortization=amortization,
                   success_count=successes, failure_streak=streak,
                   current_threshold=threshold, episodes=episodes, greedy_active=greedy)


class CurriculumController:
    """
    Owns a CurriculumState and records the threshold trace.
    """

    def __init__(self, fake_min: float, parameters: Optional[CurriculumParameters] = None):
        self.parameters = parameters or CurriculumParameters()
        self.state = CurriculumState.initial(fake_min, self.parameters)
        self.trace: List[float] = []

    @property
    def threshold(self) -> float:
        return self.state.current_threshold

    def update(self, result: EpisodeResult) -> CurriculumState:
        previous = self.state
        self.state = curriculum_update(previous, result, self.parameters)
        self.trace.append(self.state.current_threshold)
        if self.state.greedy_active and not previous.greedy_active:
            logger.info("Greedy shift at episode %d: ζ = %.3e",
                        self.state.episodes, self.state.current_threshold)
        elif previous.greedy_active and not self.state.greedy_active \
                and self.state.zeta_best == previous.zeta_best:
            logger.info("Backtrack at episode %d after %d failures: ζ = %.3e",
                        self.state.episodes, self.parameters.failure_streak_limit,
                        self.state.current_threshold)
        return self.state

    def reset(self):
        self.state = CurriculumState.initial(self.state.fake_min, self.parameters)
        self.trace = []
