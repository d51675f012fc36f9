"""
Program Synthesis Tests

Program trees, fragment abstraction, corpus weights, the grammar score,
minimum-token parsing against a brute-force oracle, and gadget extraction
on planted and incompressible corpora.
"""

import math
import unittest
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from hypothesis import given, settings, strategies as st

from config.grl_parameters import GadgetSettings
from grl_errors import EmptyCorpusError, UncoveredGateKindError
from models.circuit import Circuit, GadgetDefinition, GateInstruction
from synthesis.fragments import (
    CorpusIndex,
    ScoredCorpus,
    abstract_window,
    enumerate_fragments,
    fragment_from_gadget,
)
from synthesis.grammar import (
    Grammar,
    extract_gadgets,
    fit_grammar,
    grammar_score,
    parse_circuit,
)
from synthesis.programs import format_program, linearize, to_program


PRIMITIVES = ["CZ", "RZ", "SX", "X"]


def g(kind, qubits, *params):
    return GateInstruction(kind, tuple(qubits), tuple(params))


def filler(name, q):
    if name == "CZ":
        return g("CZ", (0, 1))
    return g("X", (int(name[-1]),))


def planted_corpus():
    """Ten circuits filler + SX RZ SX + filler, equal energies."""
    layout = [("X0", 0, "X1"), ("X1", 0, "CZ"), ("CZ", 1, "X0"), ("X0", 1, "X1"),
              ("CZ", 0, "X0"), ("X1", 1, "CZ"), ("X0", 0, "CZ"), ("CZ", 1, "X1"),
              ("X1", 0, "X0"), ("X0", 1, "CZ")]
    circuits = []
    for prefix, q, suffix in layout:
        gates = [filler(prefix, q), g("SX", (q,)), g("RZ", (q,), 0.3), g("SX", (q,)),
                 filler(suffix, q)]
        circuits.append(Circuit.from_gates(2, gates))
    return ScoredCorpus.from_energies(circuits, [-1.0] * len(circuits))


@st.composite
def small_circuits(draw):
    gates = []
    for _ in range(draw(st.integers(min_value=1, max_value=7))):
        kind = draw(st.sampled_from(["CZ", "RZ", "SX", "X"]))
        if kind == "CZ":
            gates.append(g("CZ", tuple(draw(st.permutations([0, 1])))))
        else:
            q = draw(st.integers(min_value=0, max_value=1))
            gates.append(g(kind, (q,), 0.1) if kind == "RZ" else g(kind, (q,)))
    return Circuit.from_gates(2, gates)


def brute_force_lengths(windows, n):
    """Minimum token count; among minimal parses the lexicographically largest lengths."""
    best = None

    def walk(i, lengths):
        nonlocal best
        if i == n:
            key = (len(lengths), [-x for x in lengths])
            if best is None or key < best[0]:
                best = (key, list(lengths))
            return
        walk(i + 1, lengths + [1])
        for length in windows[i]:
            walk(i + length, lengths + [length])

    walk(0, [])
    return best[1]


def brute_force_score(corpus, primitives, fragments, pseudocount=10.0):
    """Score with every parse found by exhaustive segmentation; λ = k = 1."""
    names = {f: f.canonical for f in fragments}
    usage = {name: 0.0 for name in list(primitives) + list(names.values())}
    parses = []
    for circuit in corpus.circuits:
        gates = circuit.instructions
        matches = []
        for i in range(len(gates)):
            found = {}
            for length in range(2, min(6, len(gates) - i) + 1):
                fragment = abstract_window(gates[i:i + length], 2)
                if fragment in names:
                    found[length] = names[fragment]
            matches.append(found)
        tokens, i = [], 0
        for length in brute_force_lengths([list(m) for m in matches], len(gates)):
            tokens.append(gates[i].kind if length == 1 else matches[i][length])
            i += length
        parses.append(tokens)
    for weight, tokens in zip(corpus.weights, parses):
        for token in tokens:
            usage[token] += weight
    denominator = sum(u + pseudocount for u in usage.values())
    log_likelihood = sum(weight * sum(math.log((usage[t] + pseudocount) / denominator)
                                      for t in tokens)
                         for weight, tokens in zip(corpus.weights, parses))
    regularizer = (len(primitives) + len(fragments)) + \
        (len(primitives) + sum(f.size for f in fragments))
    return log_likelihood - regularizer


class TestPrograms(unittest.TestCase):
    """
    Unit tests for the program-tree view of circuits.
    """

    def test_format(self):
        circuit = Circuit.from_gates(2, [g("X", (0,)), g("CZ", (0, 1))])
        self.assertEqual(format_program(to_program(circuit)), "cz(x(I_2,0),0,1)")
        angled = Circuit.from_gates(1, [g("RZ", (0,), 0.5)])
        self.assertEqual(format_program(to_program(angled)), "rz(I_1,0.5,0)")
        self.assertEqual(format_program(to_program(Circuit(3))), "I_3")

    def test_linearize_inverts_to_program(self):
        gadget = GadgetDefinition("g0", 1, 0, (g("SX", (0,)), g("X", (0,))))
        circuit = Circuit.from_gates(2, [g("RZ", (1,), "theta_0"),
                                         GateInstruction("GADGET", (0,), (), "g0"),
                                         g("CZ", (1, 0))], [gadget])
        self.assertEqual(linearize(to_program(circuit), [gadget]), circuit)


class TestFragments(unittest.TestCase):
    """
    Unit tests for window abstraction and corpus weights.
    """

    def test_qubits_renamed_by_first_appearance(self):
        fragment = abstract_window([g("SX", (1,)), g("CZ", (1, 0)), g("RZ", (0,), 0.2)])
        self.assertEqual(fragment.canonical, "SX(0);CZ(0,1);RZ(1)")
        self.assertEqual((fragment.arity, fragment.angle_slots), (2, 1))

    def test_arity_limit(self):
        self.assertIsNone(abstract_window([g("X", (0,)), g("X", (1,))], max_arity=1))

    def test_gadget_round_trip(self):
        fragment = abstract_window([g("SX", (1,)), g("RZ", (1,), 0.4), g("SX", (1,))])
        gadget = fragment.to_gadget("g0")
        self.assertEqual(gadget.program, "λq0.λa0. sx(rz(sx(·,q0),a0,q0),q0)")
        self.assertEqual(fragment_from_gadget(gadget), fragment)

    def test_weights_follow_softmax_of_negative_energy(self):
        circuits = [Circuit.from_gates(1, [g("X", (0,))])] * 2
        corpus = ScoredCorpus.from_energies(circuits, [0.0, math.log(2.0)])
        self.assertAlmostEqual(corpus.weights[0], 4.0 / 3.0)
        self.assertAlmostEqual(corpus.weights[1], 2.0 / 3.0)
        self.assertAlmostEqual(sum(corpus.weights), 2.0)

    def test_empty_corpus(self):
        with self.assertRaises(EmptyCorpusError):
            ScoredCorpus.from_energies([], [])

    def test_enumeration_counts(self):
        candidates = {c.fragment.canonical: c for c in enumerate_fragments(planted_corpus())}
        self.assertEqual(candidates["SX(0);RZ(0);SX(0)"].occurrences, 10)
        self.assertEqual(candidates["SX(0);RZ(0)"].occurrences, 10)
        self.assertEqual(len(candidates["SX(0);RZ(0);SX(0)"].sources), 10)


class TestGrammarScore(unittest.TestCase):
    """
    Unit tests for the score S = L - λ|g| - kΣ|p|.
    """

    def test_hand_computed_score(self):
        corpus = ScoredCorpus.from_energies([Circuit.from_gates(1, [g("X", (0,)), g("X", (0,))])],
                                            [0.0])
        grammar = Grammar.base(["SX", "X"])
        # usage X=2, SX=0; p_X = 12/22; regularizer 2 + 2
        self.assertAlmostEqual(grammar_score(grammar, corpus), 2 * math.log(12 / 22) - 4.0)

    def test_regularizer_grows_with_fragment(self):
        corpus = ScoredCorpus.from_energies(
            [Circuit.from_gates(1, [g("X", (0,)), g("SX", (0,))])], [0.0])
        base = Grammar.base(PRIMITIVES)
        unused = abstract_window([g("RZ", (0,), 0.1), g("SX", (0,)), g("RZ", (0,), 0.1)])
        grown = base.with_fragment(unused)
        self.assertEqual(grown.regularizer() - base.regularizer(), 4.0)
        self.assertLess(grammar_score(grown, corpus), grammar_score(base, corpus))

    def test_uncovered_kind(self):
        corpus = ScoredCorpus.from_energies([Circuit.from_gates(1, [g("RY", (0,), 0.1)])], [0.0])
        with self.assertRaises(UncoveredGateKindError):
            fit_grammar(Grammar.base(PRIMITIVES), corpus)

    def test_fragment_replaces_tokens(self):
        corpus = planted_corpus()
        fragment = abstract_window([g("SX", (0,)), g("RZ", (0,), 0.1), g("SX", (0,))])
        fit = fit_grammar(Grammar.base(PRIMITIVES).with_fragment(fragment), corpus)
        self.assertTrue(all(len(tokens) == 3 for tokens in fit.parses))
        self.assertAlmostEqual(fit.usage[fragment.canonical], 10.0)
        self.assertEqual(fit.usage["SX"], 0.0)
        self.assertAlmostEqual(sum(fit.probabilities.values()), 1.0)

    @settings(max_examples=60, deadline=None)
    @given(circuit=small_circuits(), data=st.data())
    def test_parse_matches_brute_force(self, circuit, data):
        corpus = ScoredCorpus.from_energies([circuit], [0.0])
        index = CorpusIndex(corpus, 6, 2)
        gates = circuit.instructions
        fragments = []
        for _ in range(data.draw(st.integers(min_value=0, max_value=3))):
            if len(gates) < 2:
                break
            start = data.draw(st.integers(min_value=0, max_value=len(gates) - 2))
            length = data.draw(st.integers(min_value=2, max_value=min(6, len(gates) - start)))
            fragment = abstract_window(gates[start:start + length], 2)
            if fragment is not None and fragment not in fragments:
                fragments.append(fragment)
        grammar = Grammar.base(PRIMITIVES)
        for fragment in fragments:
            grammar = grammar.with_fragment(fragment)
        keys = {f: f.canonical for f in fragments}
        sizes = {f.canonical: f.size for f in fragments}

        tokens = parse_circuit(index, 0, grammar, keys)
        lengths = [sizes.get(token, 1) for token in tokens]
        windows = [[length for length, f in index.windows[0][i].items() if f in keys]
                   for i in range(len(gates))]
        self.assertEqual(lengths, brute_force_lengths(windows, len(gates)))

    @settings(max_examples=60, deadline=None)
    @given(circuits=st.lists(small_circuits(), min_size=1, max_size=3), data=st.data())
    def test_score_matches_brute_force(self, circuits, data):
        energies = data.draw(st.lists(st.floats(min_value=-3.0, max_value=0.0, allow_nan=False),
                                      min_size=len(circuits), max_size=len(circuits)))
        corpus = ScoredCorpus.from_energies(circuits, energies)
        fragments = []
        for _ in range(data.draw(st.integers(min_value=0, max_value=3))):
            gates = data.draw(st.sampled_from(circuits)).instructions
            if len(gates) < 2:
                continue
            start = data.draw(st.integers(min_value=0, max_value=len(gates) - 2))
            length = data.draw(st.integers(min_value=2, max_value=min(6, len(gates) - start)))
            fragment = abstract_window(gates[start:start + length], 2)
            if fragment is not None and fragment not in fragments:
                fragments.append(fragment)
        grammar = Grammar.base(PRIMITIVES)
        for fragment in fragments:
            grammar = grammar.with_fragment(fragment)
        self.assertAlmostEqual(grammar_score(grammar, corpus),
                               brute_force_score(corpus, PRIMITIVES, fragments), delta=1e-9)


class TestExtraction(unittest.TestCase):
    """
    Unit tests for extract_gadgets().
    """

    def test_planted_fragment_found_first(self):
        result = extract_gadgets(planted_corpus(), 1, GadgetSettings())
        self.assertEqual(len(result.accepted), 1)
        accepted = result.accepted[0]
        self.assertEqual(accepted.fragment.canonical, "SX(0);RZ(0);SX(0)")
        self.assertEqual(accepted.occurrences, 10)
        self.assertGreater(accepted.score_delta, 0.0)
        self.assertEqual(result.grammar.fragments, (accepted.fragment,))

    def test_incompressible_corpus(self):
        circuits = [Circuit.from_gates(2, [g("X", (0,)), g("SX", (0,)), g("RZ", (0,), 0.1)]),
                    Circuit.from_gates(2, [g("CZ", (0, 1)), g("X", (1,)), g("SX", (0,))]),
                    Circuit.from_gates(2, [g("RZ", (1,), 0.2), g("CZ", (0, 1)), g("X", (0,))])]
        corpus = ScoredCorpus.from_energies(circuits, [-1.0, -1.1, -1.2])
        result = extract_gadgets(corpus, 3, GadgetSettings(min_occurrences=1),
                                 primitives=PRIMITIVES)
        self.assertEqual(result.accepted, [])
        self.assertEqual(result.grammar.fragments, ())

    def test_scores_increase_along_acceptance(self):
        result = extract_gadgets(planted_corpus(), 3, GadgetSettings())
        scores = [result.base_score] + [a.score_after for a in result.accepted]
        self.assertTrue(all(b > a for a, b in zip(scores, scores[1:])))


if __name__ == '__main__':
    unittest.main()
