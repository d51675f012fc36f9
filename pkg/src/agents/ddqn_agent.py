"""
Double Deep Q-Network Agent

Behaviour policy (ε-greedy):
    ε_t = max(ε_min, ε_decay^t), t = number of actions taken
    with probability 1-ε: argmax_a Q_policy(s, a) (lowest index on ties)
    otherwise: uniform random action

Double-Q target (policy net selects, target net evaluates):
    Y = r + γ Q_target(s', argmax_a Q_policy(s', a))    (Y = r when done)

Update: one Adam step on mean smooth-L1(Q_policy(s, a) - Y); targets are held
constant. Every target_update_period updates the target net copies the
policy net.

Discount:
    fixed:    γ_t = γ
    annealed: γ_t = γ_final + (γ - γ_final) · gamma_decay^t, t = updates
"""

import logging
from typing import Optional, Sequence

import numpy as np

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from agents.q_network import AdamOptimizer, QNetwork, smooth_l1, smooth_l1_grad
from agents.replay_memory import ReplayMemory, ReplayTransition
from config.grl_parameters import AgentConfig
from grl_errors import ArtifactError

logger = logging.getLogger(__name__)


class DDQNAgent:
    """
    Policy/target network pair with replay memory and ε schedule.
    """

    def __init__(self, observation_size: int, num_actions: int,
                 config: Optional[AgentConfig] = None):
        self.config = config or AgentConfig()
        self.config.validate()
        self.observation_size = observation_size
        self.num_actions = num_actions
        self.rng = np.random.default_rng(self.config.rng_seed)

        sizes = [observation_size] + [self.config.neurons_per_layer] * self.config.hidden_layers \
            + [num_actions]
        self.policy = QNetwork.initialize(sizes, self.rng, self.config.leaky_slope)
        self.target = self.policy.copy()
        self.optimizer = AdamOptimizer(self.policy.parameters(), self.config.learning_rate)
        self.memory = ReplayMemory(self.config.memory_capacity, self.rng)
        self.actions_taken = 0
        self.updates = 0

    # -------------------------------------------------------------------
    # Schedules
    # -------------------------------------------------------------------

    def epsilon_at(self, t: int) -> float:
        return max(self.config.epsilon_min, self.config.epsilon_decay ** t)

    @property
    def epsilon(self) -> float:
        return self.epsilon_at(self.actions_taken)

    @property
    def gamma(self) -> float:
        if self.config.gamma_mode == "annealed":
            final = self.config.gamma_final
            return final + (self.config.gamma - final) * self.config.gamma_decay ** self.updates
        return self.config.gamma

    # -------------------------------------------------------------------
    # Acting
    # -------------------------------------------------------------------

    def q_values(self, observation: np.ndarray) -> np.ndarray:
        return self.policy.forward(np.asarray(observation, dtype=float).reshape(1, -1))[0]

    def select_action(self, observation: np.ndarray, epsilon: float,
                      rng: Optional[np.random.Generator] = None) -> int:
        """
        ε-greedy action.

        Args:
            observation: Flattened observation
            epsilon: Exploration probability in [0, 1]
            rng: Random generator (the agent's own when omitted)

        Returns:
            Action index
        """
        rng = rng or self.rng
        if rng.random() < epsilon:
            return int(rng.integers(self.num_actions))
        return int(np.argmax(self.q_values(observation)))

    def act(self, observation: np.ndarray) -> int:
        """select_action with the scheduled ε; advances the schedule."""
        action = self.select_action(observation, self.epsilon)
        self.actions_taken += 1
        return action

    def remember(self, transition: ReplayTransition):
        self.memory.push(transition)

    # -------------------------------------------------------------------
    # Learning
    # -------------------------------------------------------------------

    def ddqn_targets(self, rewards: np.ndarray, next_observations: np.ndarray,
                     dones: np.ndarray, gamma: Optional[float] = None) -> np.ndarray:
        gamma = self.gamma if gamma is None else gamma
        best_next = np.argmax(self.policy.forward(next_observations), axis=1)
        next_values = self.target.forward(next_observations)[np.arange(len(best_next)), best_next]
        return rewards + gamma * (1.0 - dones) * next_values

    def ddqn_target(self, transition: ReplayTransition, gamma: Optional[float] = None) -> float:
        """Y = r + γ Q_target(s', argmax_a Q_policy(s', a)), or r when done."""
        if transition.done:
            return float(transition.reward)
        next_observation = np.asarray(transition.next_observation, dtype=float).reshape(1, -1)
        return float(self.ddqn_targets(np.array([transition.reward], dtype=float),
                                       next_observation, np.array([0.0]), gamma)[0])

    def loss_and_gradients(self, observations: np.ndarray, actions: np.ndarray,
                           targets: np.ndarray):
        """Mean smooth-L1 loss and its gradients w.r.t. the policy parameters."""
        q, cache = self.policy.forward_cached(observations)
        rows = np.arange(len(actions))
        diff = q[rows, actions] - targets
        loss = float(np.mean(smooth_l1(diff)))
        d_out = np.zeros_like(q)
        d_out[rows, actions] = smooth_l1_grad(diff) / len(actions)
        grad_w, grad_b = self.policy.backward(cache, d_out)
        return loss, grad_w + grad_b

    def train_step(self, batch: Sequence[ReplayTransition]) -> float:
        """
        One gradient step on a batch of transitions.

        Returns:
            Mean smooth-L1 loss before the step
        """
        observations = np.stack([np.asarray(t.observation, dtype=float) for t in batch])
        next_observations = np.stack([np.asarray(t.next_observation, dtype=float) for t in batch])
        actions = np.array([t.action_index for t in batch], dtype=int)
        rewards = np.array([t.reward for t in batch], dtype=float)
        dones = np.array([float(t.done) for t in batch])

        targets = self.ddqn_targets(rewards, next_observations, dones)
        loss, gradients = self.loss_and_gradients(observations, actions, targets)
        self.optimizer.step(self.policy.parameters(), gradients)
        self.updates += 1
        if self.updates % self.config.target_update_period == 0:
            self.sync_target()
        return loss

    def learn(self) -> Optional[float]:
        """Sample a batch and train; None (with a debug note) while memory is short."""
        if not self.memory.can_sample(self.config.batch_size):
            logger.debug("Replay memory %d < batch %d; skipping update",
                         len(self.memory), self.config.batch_size)
            return None
        return self.train_step(self.memory.sample(self.config.batch_size))

    def sync_target(self):
        self.target.load_from(self.policy)

    # -------------------------------------------------------------------
    # Persistence and action-space growth
    # -------------------------------------------------------------------

    def save(self, path: str):
        self.policy.save(path)

    def load(self, path: str):
        network = QNetwork.load(path)
        if network.layer_sizes != self.policy.layer_sizes:
            raise ArtifactError(f"Checkpoint layers {network.layer_sizes} do not match "
                                f"{self.policy.layer_sizes}")
        self.policy.load_from(network)
        self.sync_target()

    def extend_action_space(self, observation_size: int, num_actions: int) -> "DDQNAgent":
        """
        Fresh agent for an enlarged observation/action space.

        Networks are re-initialized, replay memory is empty and the ε schedule
        restarts; the seed is reused.
        """
        logger.info("Reinitializing agent: observation %d → %d, actions %d → %d",
                    self.observation_size, observation_size, self.num_actions, num_actions)
        return DDQNAgent(observation_size, num_actions, self.config)
