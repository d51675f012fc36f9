"""
Circuit Environment Tests

Action tables, the three reward values, episode termination and the
curriculum hand-off.
"""

import unittest
import numpy as np
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from config.grl_parameters import EnvironmentSettings, OptimizerSettings
from grl_errors import ActionIndexError, EpisodeFinishedError
from models.circuit import GadgetDefinition, GateInstruction
from models.hamiltonians import TfimSpec
from simulation.circuit_environment import (
    CircuitEnvironment,
    build_action_table,
    make_episode_config,
)


FAST = OptimizerSettings(max_evaluations=200)
SANDWICH = GadgetDefinition("g0", 1, 1, (GateInstruction("SX", (0,)),
                                         GateInstruction("RZ", (0,), ("a0",)),
                                         GateInstruction("SX", (0,))))
PAIR = GadgetDefinition("g1", 2, 0, (GateInstruction("CZ", (0, 1)), GateInstruction("X", (1,))))


class TestActionTable(unittest.TestCase):
    """
    Unit tests for build_action_table().
    """

    def test_native_sizes(self):
        self.assertEqual(len(build_action_table(2, ("RZ", "SX", "X"), ("CZ",))), 7)
        self.assertEqual(len(build_action_table(3, ("RZ", "SX", "X"), ("CZ",))), 12)

    def test_universal_cx_is_ordered(self):
        table = build_action_table(2, ("RX", "RY", "RZ"), ("CX",))
        self.assertEqual(len(table), 8)
        self.assertEqual([a.qubits for a in table[:2]], [(0, 1), (1, 0)])

    def test_gadget_placements(self):
        table = build_action_table(3, ("RZ", "SX", "X"), ("CZ",), [SANDWICH, PAIR])
        self.assertEqual(len(table), 12 + 3 + 6)
        self.assertEqual(table[12].label, "g0(0)")
        self.assertEqual(table[-1].label, "g1(2,1)")

    def test_single_qubit_register_has_no_two_qubit_actions(self):
        config = make_episode_config(TfimSpec(1, 1.0, 0.5), optimizer=FAST)
        self.assertEqual([a.label for a in config.action_table], ["RZ(0)", "SX(0)", "X(0)"])


class TestEpisodes(unittest.TestCase):
    """
    Unit tests for reset(), step() and rewards.
    """

    def test_reset_scores_zero_state(self):
        env = CircuitEnvironment(make_episode_config(TfimSpec(2, 1.0, 1.0), optimizer=FAST))
        outcome = env.reset()
        self.assertEqual(outcome.reward, 0.0)
        self.assertFalse(outcome.done)
        self.assertAlmostEqual(outcome.energy, -1.0, places=12)
        self.assertAlmostEqual(outcome.cost, 2.0, places=12)
        self.assertFalse(outcome.observation.flat().any())
        self.assertEqual(outcome.observation.flat().size, 20 * 5 * 2)

    def test_failure_at_t_max(self):
        config = make_episode_config(TfimSpec(2, 1.0, 1.0), EnvironmentSettings(t_max=2), FAST)
        env = CircuitEnvironment(config)
        env.reset()
        first = env.step(1)
        self.assertEqual((first.reward, first.done), (0.0, False))
        second = env.step(3)
        self.assertEqual((second.reward, second.done), (-5.0, True))
        # E0 = -sqrt(5) is far above the fake minimum -3
        self.assertGreater(second.cost, 0.7)
        self.assertFalse(env.records[-1].success)
        with self.assertRaises(EpisodeFinishedError):
            env.step(0)

    def test_success_ends_episode(self):
        # N=1: the fake minimum -h equals the ground energy of -h X
        env = CircuitEnvironment(make_episode_config(TfimSpec(1, 1.0, 0.5), optimizer=FAST))
        env.reset()
        self.assertEqual(env.step(1).reward, 0.0)
        outcome = env.step(0)
        self.assertEqual((outcome.reward, outcome.done), (5.0, True))
        self.assertLess(outcome.cost, 5e-3)
        self.assertAlmostEqual(outcome.energy, -0.5, places=5)
        self.assertTrue(env.best.circuit.is_bound)
        self.assertEqual(env.controller.state.success_count, 1)
        self.assertLess(env.threshold, 5e-3)

    def test_invalid_action(self):
        env = CircuitEnvironment(make_episode_config(TfimSpec(2, 1.0, 1.0), optimizer=FAST))
        env.reset()
        with self.assertRaises(ActionIndexError):
            env.step(7)
        with self.assertRaises(ActionIndexError):
            env.step(-1)

    def test_gadget_action_gets_fresh_symbols(self):
        config = make_episode_config(TfimSpec(2, 1.0, 1.0), optimizer=FAST, gadgets=[SANDWICH])
        env = CircuitEnvironment(config)
        env.reset()
        env.step(7)
        env.step(0)
        self.assertEqual(env.circuit.parameters, ("theta_0",))
        self.assertEqual(env.circuit.instructions[0].gadget_id, "g0")
        self.assertEqual(len(env.angles), 1)

    def test_steps_never_raise_best_cost(self):
        config = make_episode_config(TfimSpec(2, 1.0, 1.0), EnvironmentSettings(t_max=4), FAST)
        env = CircuitEnvironment(config)
        env.reset()
        costs = [env.step(a).cost for a in (3, 5, 0, 1)]
        self.assertEqual(env.best.cost, min(costs))
        self.assertTrue(np.isfinite(env.best.energy))


if __name__ == '__main__':
    unittest.main()
