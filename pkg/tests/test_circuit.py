"""
Circuit IR Unit Tests

Instruction validation, binding, gadget expansion, metrics and
serialization of the circuit intermediate representation.
"""

import itertools
import json
import unittest
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from hypothesis import given, settings, strategies as st

from grl_errors import (
    GadgetArityError,
    InvalidGateError,
    ParameterCountError,
    QubitIndexError,
    UnboundParameterError,
)
from models.circuit import (
    Circuit,
    GadgetDefinition,
    GateInstruction,
    bind,
    canonical_key,
    expand_gadgets,
    metrics,
    moment_schedule,
    require_bound,
)


def g(kind, qubits, *params):
    return GateInstruction(kind, tuple(qubits), tuple(params))


@st.composite
def short_circuits(draw):
    """At most six X/SX/CZ gates on up to three qubits."""
    n = draw(st.integers(min_value=1, max_value=3))
    gates = []
    for _ in range(draw(st.integers(min_value=0, max_value=6))):
        if n > 1 and draw(st.booleans()):
            pair = draw(st.permutations(list(range(n))))[:2]
            gates.append(g("CZ", pair))
        else:
            gates.append(g(draw(st.sampled_from(["X", "SX"])),
                           (draw(st.integers(min_value=0, max_value=n - 1)),)))
    return gates


def valid_schedule(gates, moments):
    """Gates sharing a qubit keep their order in strictly later moments."""
    for j, later in enumerate(gates):
        for i in range(j):
            if set(gates[i].qubits) & set(later.qubits) and moments[i] >= moments[j]:
                return False
    return True


def brute_force_depth(gates):
    for depth in range(len(gates) + 1):
        for moments in itertools.product(range(depth), repeat=len(gates)):
            if valid_schedule(gates, moments):
                return depth
    raise AssertionError("no schedule found")


SANDWICH = GadgetDefinition("g0", 1, 1, (g("SX", (0,)), g("RZ", (0,), "a0"), g("SX", (0,))))
ENTANGLER = GadgetDefinition("g1", 2, 0, (g("CZ", (0, 1)), g("SX", (1,))))


class TestGateInstruction(unittest.TestCase):
    """
    Unit tests for per-kind arity and parameter rules.
    """

    def test_valid_gates(self):
        self.assertTrue(g("RZ", (0,), 0.5).is_bound)
        self.assertFalse(g("RX", (1,), "theta_0").is_bound)
        self.assertTrue(g("CZ", (0, 1)).is_two_qubit)

    def test_wrong_arity_or_params(self):
        with self.assertRaises(InvalidGateError):
            g("CZ", (0,))
        with self.assertRaises(InvalidGateError):
            g("X", (0,), 0.1)
        with self.assertRaises(InvalidGateError):
            g("RZ", (0,))
        with self.assertRaises(InvalidGateError):
            g("CX", (1, 1))
        with self.assertRaises(InvalidGateError):
            g("H", (0,))

    def test_negative_qubit(self):
        with self.assertRaises(QubitIndexError):
            g("X", (-1,))

    def test_gadget_arity_limit(self):
        with self.assertRaises(GadgetArityError):
            GateInstruction("GADGET", (0, 1, 2), (), "g9")
        with self.assertRaises(GadgetArityError):
            GadgetDefinition("g9", 3, 0, (g("X", (0,)),))

    def test_dict_layout(self):
        self.assertEqual(g("RZ", (1,), "theta_0").to_dict(),
                         {"kind": "RZ", "qubits": [1], "param": {"symbol": "theta_0"}})
        self.assertEqual(g("CZ", (0, 1)).to_dict(),
                         {"kind": "CZ", "qubits": [0, 1], "param": None})


class TestCircuit(unittest.TestCase):
    """
    Unit tests for Circuit construction and binding.
    """

    def test_from_gates_orders_parameters_by_first_use(self):
        circuit = Circuit.from_gates(2, [g("RZ", (0,), "b"), g("RX", (1,), "a"),
                                         g("RZ", (1,), "b")])
        self.assertEqual(circuit.parameters, ("b", "a"))

    def test_out_of_register_qubit(self):
        with self.assertRaises(QubitIndexError):
            Circuit.from_gates(2, [g("X", (2,))])

    def test_undeclared_symbol(self):
        with self.assertRaises(ParameterCountError):
            Circuit(1, (g("RZ", (0,), "theta_0"),), ())

    def test_unknown_gadget(self):
        with self.assertRaises(InvalidGateError):
            Circuit.from_gates(1, [GateInstruction("GADGET", (0,), (0.1,), "g0")])

    def test_bind_replaces_every_symbol(self):
        circuit = Circuit.from_gates(2, [g("RZ", (0,), "theta_0"), g("CZ", (0, 1)),
                                         g("RY", (1,), "theta_1")])
        bound = bind(circuit, [0.1, 0.2])
        self.assertTrue(bound.is_bound)
        self.assertEqual([gate.param for gate in bound.instructions], [0.1, None, 0.2])

    def test_bind_wrong_count(self):
        circuit = Circuit.from_gates(1, [g("RZ", (0,), "theta_0")])
        with self.assertRaises(ParameterCountError):
            bind(circuit, [])

    def test_require_bound(self):
        with self.assertRaises(UnboundParameterError):
            require_bound(Circuit.from_gates(1, [g("RZ", (0,), "theta_0")]))

    def test_append_declares_new_symbols_and_gadgets(self):
        circuit = Circuit(2)
        symbols = circuit.fresh_symbols(1)
        circuit = circuit.append(GateInstruction("GADGET", (1,), symbols, "g0"), SANDWICH)
        circuit = circuit.append(g("RZ", (0,), *circuit.fresh_symbols(1)))
        self.assertEqual(circuit.parameters, ("theta_0", "theta_1"))
        self.assertEqual([d.gadget_id for d in circuit.gadgets], ["g0"])


class TestGadgets(unittest.TestCase):
    """
    Unit tests for gadget expansion.
    """

    def test_expand_maps_qubits_and_angles(self):
        circuit = Circuit.from_gates(
            2, [GateInstruction("GADGET", (1, 0), (), "g1"),
                GateInstruction("GADGET", (1,), ("theta_0",), "g0")], [SANDWICH, ENTANGLER])
        expanded = expand_gadgets(circuit)
        self.assertEqual([str(gate) for gate in expanded.instructions],
                         ["CZ(1,0)", "SX(0)", "SX(1)", "RZ(theta_0;1)", "SX(1)"])
        self.assertEqual(expanded.parameters, ("theta_0",))
        self.assertEqual(expanded.gadgets, ())

    def test_signature_mismatch(self):
        with self.assertRaises(InvalidGateError):
            Circuit.from_gates(2, [GateInstruction("GADGET", (0,), (), "g0")], [SANDWICH])

    def test_body_slot_must_exist(self):
        with self.assertRaises(InvalidGateError):
            GadgetDefinition("g2", 1, 0, (g("RZ", (0,), "a0"),))


class TestMetrics(unittest.TestCase):
    """
    Unit tests for gate counts and moment depth.
    """

    def test_parallel_gates_share_a_moment(self):
        gates = [g("X", (0,)), g("SX", (1,)), g("CZ", (0, 1)), g("X", (0,))]
        self.assertEqual(moment_schedule(gates), [0, 0, 1, 2])
        result = metrics(Circuit.from_gates(2, gates))
        self.assertEqual(result.depth, 3)
        self.assertEqual(result.total_gates, 4)
        self.assertEqual(result.two_qubit_gates, 1)
        self.assertEqual(result.counts, {"CZ": 1, "SX": 1, "X": 2})

    def test_empty_circuit(self):
        result = metrics(Circuit(3))
        self.assertEqual((result.total_gates, result.depth), (0, 0))

    def test_gadgets_counted_by_body(self):
        circuit = Circuit.from_gates(1, [GateInstruction("GADGET", (0,), (0.3,), "g0")],
                                     [SANDWICH])
        result = metrics(circuit)
        self.assertEqual(result.total_gates, 3)
        self.assertEqual(result.count("SX"), 2)

    @settings(max_examples=100, deadline=None)
    @given(gates=short_circuits())
    def test_greedy_depth_is_minimal(self, gates):
        moments = moment_schedule(gates)
        self.assertTrue(valid_schedule(gates, moments))
        depth = (max(moments) + 1) if moments else 0
        self.assertEqual(depth, brute_force_depth(gates))


class TestSerialization(unittest.TestCase):
    """
    Unit tests for the JSON layout and canonical keys.
    """

    def test_round_trip_with_gadgets(self):
        circuit = Circuit.from_gates(
            2, [g("SX", (0,)), GateInstruction("GADGET", (0, 1), (), "g1"),
                g("RZ", (1,), 0.125)], [ENTANGLER])
        restored = Circuit.from_dict(json.loads(json.dumps(circuit.to_dict())))
        self.assertEqual(restored, circuit)
        self.assertIn("gadgets", circuit.to_dict())

    def test_canonical_key_ignores_angles(self):
        a = Circuit.from_gates(1, [g("RZ", (0,), 0.1), g("SX", (0,))])
        b = Circuit.from_gates(1, [g("RZ", (0,), 2.0), g("SX", (0,))])
        c = Circuit.from_gates(1, [g("SX", (0,)), g("RZ", (0,), 0.1)])
        self.assertEqual(canonical_key(a), canonical_key(b))
        self.assertNotEqual(canonical_key(a), canonical_key(c))


if __name__ == '__main__':
    unittest.main()
