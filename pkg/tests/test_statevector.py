"""
Statevector Simulator Unit and Property Tests

Checks gate matrices, simulation, Pauli expectation values, the exact
ground-state oracle and the compiled parameterized evolution.
"""

import unittest
import numpy as np
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from hypothesis import given, settings, strategies as st

from grl_errors import (
    ImaginaryResidueError,
    InvalidHamiltonianError,
    OracleBoundError,
    ParameterCountError,
    QubitCountMismatchError,
    QubitIndexError,
    UnboundParameterError,
)
from models.circuit import Circuit, GadgetDefinition, GateInstruction, bind
from models.hamiltonians import PauliHamiltonian, PauliString, TfimSpec, build_tfim
from models.statevector import (
    SX_MATRIX,
    X_MATRIX,
    CompiledCircuit,
    Statevector,
    apply_gate,
    circuit_unitary,
    expectation,
    gate_matrix,
    ground_state_oracle,
    materialize,
    simulate,
)


ANGLES = st.floats(min_value=-2 * np.pi, max_value=2 * np.pi,
                   allow_nan=False, allow_infinity=False)


@st.composite
def bound_circuits(draw, num_qubits=None, max_gates=12):
    """Random bound circuits over both gate sets."""
    n = num_qubits or draw(st.integers(min_value=1, max_value=3))
    kinds = ["RZ", "SX", "X", "RX", "RY"] + (["CZ", "CX"] if n > 1 else [])
    gates = []
    for _ in range(draw(st.integers(min_value=0, max_value=max_gates))):
        kind = draw(st.sampled_from(kinds))
        if kind in ("CZ", "CX"):
            pair = draw(st.permutations(list(range(n))))[:2]
            gates.append(GateInstruction(kind, tuple(pair)))
        else:
            q = draw(st.integers(min_value=0, max_value=n - 1))
            params = (draw(ANGLES),) if kind in ("RZ", "RX", "RY") else ()
            gates.append(GateInstruction(kind, (q,), params))
    return Circuit.from_gates(n, gates)


@st.composite
def pauli_hamiltonians(draw, num_qubits):
    terms = []
    for _ in range(draw(st.integers(min_value=1, max_value=5))):
        ops = "".join(draw(st.lists(st.sampled_from("IXYZ"), min_size=num_qubits,
                                    max_size=num_qubits)))
        coefficient = draw(st.floats(min_value=-2.0, max_value=2.0, allow_nan=False))
        terms.append(PauliString(ops, coefficient))
    return PauliHamiltonian(num_qubits, tuple(terms))


class TestGateMatrices(unittest.TestCase):
    """
    Unit tests for the elementary gate matrices.
    """

    def test_sx_squared_is_x(self):
        np.testing.assert_allclose(SX_MATRIX @ SX_MATRIX, X_MATRIX, atol=1e-12)

    def test_rotations_are_unitary(self):
        for kind in ("RZ", "RX", "RY"):
            m = gate_matrix(kind, 0.731)
            np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-12)

    def test_rz_convention(self):
        np.testing.assert_allclose(gate_matrix("RZ", np.pi),
                                   np.diag([-1j, 1j]), atol=1e-12)

    def test_symbolic_angle_rejected(self):
        with self.assertRaises(UnboundParameterError):
            gate_matrix("RZ", "theta_0")


class TestSimulation(unittest.TestCase):
    """
    Unit tests for simulate(), apply_gate() and circuit_unitary().
    """

    def test_x_on_qubit_zero_flips_msb(self):
        state = simulate(Circuit.from_gates(2, [GateInstruction("X", (0,))]))
        np.testing.assert_allclose(state.amplitudes, [0, 0, 1, 0], atol=1e-12)

    def test_cx_control_first(self):
        circuit = Circuit.from_gates(2, [GateInstruction("X", (0,)),
                                         GateInstruction("CX", (0, 1))])
        np.testing.assert_allclose(simulate(circuit).amplitudes, [0, 0, 0, 1], atol=1e-12)

    def test_bell_state_from_native_gates(self):
        # H = RZ(π/2) SX RZ(π/2) up to phase
        gates = [GateInstruction("RZ", (0,), (np.pi / 2,)), GateInstruction("SX", (0,)),
                 GateInstruction("RZ", (0,), (np.pi / 2,)), GateInstruction("CX", (0, 1))]
        probabilities = simulate(Circuit.from_gates(2, gates)).probabilities()
        np.testing.assert_allclose(probabilities, [0.5, 0, 0, 0.5], atol=1e-12)

    def test_unbound_circuit_rejected(self):
        circuit = Circuit.from_gates(1, [GateInstruction("RZ", (0,), ("theta_0",))])
        with self.assertRaises(UnboundParameterError):
            simulate(circuit)

    def test_qubit_mismatch_rejected(self):
        with self.assertRaises(QubitCountMismatchError):
            simulate(Circuit(2), Statevector.zero(3))
        with self.assertRaises(QubitIndexError):
            apply_gate(Statevector.zero(1), GateInstruction("X", (1,)))

    def test_gadget_expanded_during_simulation(self):
        body = (GateInstruction("SX", (0,)), GateInstruction("RZ", (0,), ("a0",)),
                GateInstruction("SX", (0,)))
        gadget = GadgetDefinition("g0", 1, 1, body)
        with_gadget = Circuit.from_gates(
            1, [GateInstruction("GADGET", (0,), (0.4,), "g0")], [gadget])
        plain = Circuit.from_gates(1, [GateInstruction("SX", (0,)),
                                       GateInstruction("RZ", (0,), (0.4,)),
                                       GateInstruction("SX", (0,))])
        self.assertAlmostEqual(simulate(with_gadget).fidelity(simulate(plain)), 1.0, places=12)

    @settings(max_examples=200, deadline=None)
    @given(circuit=bound_circuits())
    def test_unitarity_and_norm(self, circuit):
        u = circuit_unitary(circuit)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)
        self.assertAlmostEqual(simulate(circuit).norm(), 1.0, places=10)

    @settings(max_examples=200, deadline=None)
    @given(circuit=bound_circuits())
    def test_simulate_matches_unitary_column(self, circuit):
        np.testing.assert_allclose(simulate(circuit).amplitudes, circuit_unitary(circuit)[:, 0],
                                   atol=1e-10)


class TestExpectation(unittest.TestCase):
    """
    Unit tests for Pauli-sum expectation values.
    """

    def test_zz_on_basis_states(self):
        ham = PauliHamiltonian(2, (PauliString("ZZ", 1.0),))
        self.assertAlmostEqual(expectation(Statevector.basis(2, 0), ham), 1.0)
        self.assertAlmostEqual(expectation(Statevector.basis(2, 1), ham), -1.0)

    def test_tfim_zero_state_energy(self):
        ham = build_tfim(TfimSpec(2, 1.0, 1.0))
        # ⟨00|H|00⟩ = -J, X terms vanish
        self.assertAlmostEqual(expectation(Statevector.zero(2), ham), -1.0, places=12)

    def test_mismatched_sizes_rejected(self):
        ham = PauliHamiltonian(3, (PauliString("ZZI", 1.0),))
        with self.assertRaises(QubitCountMismatchError):
            expectation(Statevector.zero(2), ham)

    def test_materialized_operator_is_hermitian(self):
        ham = PauliHamiltonian(2, (PauliString("XY", 0.5), PauliString("YX", -0.5),
                                   PauliString("ZI", 1.0)))
        self.assertTrue(materialize(ham).is_hermitian())

    @settings(max_examples=200, deadline=None)
    @given(data=st.data())
    def test_expectation_matches_dense_matrix(self, data):
        n = data.draw(st.integers(min_value=1, max_value=3))
        ham = data.draw(pauli_hamiltonians(n))
        state = simulate(data.draw(bound_circuits(num_qubits=n)))
        dense = materialize(ham).entries
        reference = np.vdot(state.amplitudes, dense @ state.amplitudes).real
        self.assertAlmostEqual(expectation(state, ham), reference, delta=1e-10)

    def test_y_expectation_on_y_eigenstate(self):
        # |+i⟩ = (|0⟩ + i|1⟩)/√2 has ⟨Y⟩ = 1
        ham = PauliHamiltonian(1, (PauliString("Y", 1.0),))
        state = Statevector(np.array([1.0, 1.0j]) / np.sqrt(2), 1)
        self.assertAlmostEqual(expectation(state, ham), 1.0, places=12)
        self.assertTrue(issubclass(ImaginaryResidueError, ArithmeticError))


class TestGroundStateOracle(unittest.TestCase):
    """
    Unit tests for exact diagonalization.
    """

    def test_two_qubit_tfim_ground_energy(self):
        result = ground_state_oracle(build_tfim(TfimSpec(2, 1.0, 1.0)))
        self.assertAlmostEqual(result.energy, -np.sqrt(5.0), delta=1e-12)
        print(f"✓ E0(N=2, h=1) = {result.energy:.12f}")

    def test_weak_field_is_nearly_degenerate(self):
        result = ground_state_oracle(build_tfim(TfimSpec(2, 1.0, 1e-3)))
        self.assertLess(result.gap, 1e-2)

    def test_oracle_bound(self):
        with self.assertRaises(OracleBoundError):
            ground_state_oracle(build_tfim(TfimSpec(5, 1.0, 1.0)), max_qubits=4)

    def test_single_qubit_field(self):
        result = ground_state_oracle(build_tfim(TfimSpec(1, 1.0, 0.5)))
        self.assertAlmostEqual(result.energy, -0.5, places=12)
        self.assertAlmostEqual(result.gap, 1.0, places=12)

    @settings(max_examples=200, deadline=None)
    @given(data=st.data())
    def test_no_circuit_goes_below_ground_energy(self, data):
        n = data.draw(st.integers(min_value=1, max_value=3))
        h = data.draw(st.floats(min_value=0.0, max_value=2.0, allow_nan=False))
        ham = build_tfim(TfimSpec(n, 1.0, h))
        ground = ground_state_oracle(ham).energy
        state = simulate(data.draw(bound_circuits(num_qubits=n)))
        self.assertGreaterEqual(expectation(state, ham), ground - 1e-10)


class TestCompiledCircuit(unittest.TestCase):
    """
    Unit tests for the fused parameterized evolution used by the optimizer.
    """

    def setUp(self):
        gates = [GateInstruction("RY", (0,), ("theta_0",)), GateInstruction("SX", (1,)),
                 GateInstruction("CZ", (0, 1)), GateInstruction("RZ", (1,), ("theta_1",)),
                 GateInstruction("RX", (0,), ("theta_2",)), GateInstruction("X", (1,))]
        self.circuit = Circuit.from_gates(2, gates)
        self.ham = build_tfim(TfimSpec(2, 1.0, 0.7))

    @settings(max_examples=200, deadline=None)
    @given(values=st.lists(ANGLES, min_size=3, max_size=3))
    def test_matches_bound_simulation(self, values):
        compiled = CompiledCircuit(self.circuit, self.ham)
        reference = simulate(bind(self.circuit, values))
        np.testing.assert_allclose(compiled.state(values), reference.amplitudes, atol=1e-10)
        self.assertAlmostEqual(compiled.energy(values), expectation(reference, self.ham),
                               delta=1e-10)

    def test_wrong_parameter_count(self):
        with self.assertRaises(ParameterCountError):
            CompiledCircuit(self.circuit, self.ham).state([0.1])

    def test_energy_needs_hamiltonian(self):
        with self.assertRaises(InvalidHamiltonianError):
            CompiledCircuit(self.circuit).energy([0.0, 0.0, 0.0])


if __name__ == '__main__':
    unittest.main()
