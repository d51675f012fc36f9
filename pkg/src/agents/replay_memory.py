"""
Experience replay: a FIFO ring of transitions sampled uniformly without
replacement.
"""

from collections import deque
from dataclasses import dataclass
from typing import List

import numpy as np

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grl_errors import InsufficientMemoryError


@dataclass(frozen=True, eq=False)
class ReplayTransition:
    observation: np.ndarray
    action_index: int
    reward: float
    next_observation: np.ndarray
    done: bool


class ReplayMemory:
    def __init__(self, capacity: int, rng: np.random.Generator):
        self.capacity = capacity
        self.rng = rng
        self.buffer = deque(maxlen=capacity)

    def __len__(self):
        return len(self.buffer)

    def push(self, transition: ReplayTransition):
        self.buffer.append(transition)

    def can_sample(self, batch_size: int) -> bool:
        return len(self.buffer) >= batch_size

    def sample(self, batch_size: int) -> List[ReplayTransition]:
        if not self.can_sample(batch_size):
            raise InsufficientMemoryError(
                f"Replay memory holds {len(self.buffer)} transitions, batch needs {batch_size}")
        indices = self.rng.choice(len(self.buffer), size=batch_size, replace=False)
        snapshot = list(self.buffer)
        return [snapshot[i] for i in indices]

    def clear(self):
        self.buffer.clear()
