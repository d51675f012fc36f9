"""
Fragment Enumeration

A fragment is a contiguous run of 2..max_size elementary gates with its
qubit indices renamed by first appearance (q0, q1) and every angle replaced
by a fresh slot (a0, a1, ...). Two windows are the same fragment exactly when
their renamed bodies are equal, so the body itself is the canonical form.

Corpus weights: w_i = k · softmax(-E)_i over the k corpus circuits, so
lower-energy circuits count more and the weights sum to k.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import softmax

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.grl_parameters import params
from grl_errors import EmptyCorpusError
from models.circuit import (
    PARAMETERIZED_KINDS,
    Circuit,
    GadgetDefinition,
    GateInstruction,
    expand_gadgets,
    slot_name,
)


logger = logging.getLogger(__name__)

Body = Tuple[Tuple[str, Tuple[int, ...]], ...]


@dataclass(frozen=True)
class Fragment:
    """
    Attributes:
        body: (kind, local qubits) per gate; local qubits are 0..arity-1
        arity: Number of qubit variables
        angle_slots: Number of angle variables
    """
    body: Body
    arity: int
    angle_slots: int

    @property
    def size(self) -> int:
        return len(self.body)

    @property
    def canonical(self) -> str:
        return ";".join(f"{kind}({','.join(str(q) for q in qubits)})"
                        for kind, qubits in self.body)

    def instructions(self) -> Tuple[GateInstruction, ...]:
        gates = []
        slot = 0
        for kind, qubits in self.body:
            if kind in PARAMETERIZED_KINDS:
                gates.append(GateInstruction(kind, qubits, (slot_name(slot),)))
                slot += 1
            else:
                gates.append(GateInstruction(kind, qubits))
        return tuple(gates)

    def program(self) -> str:
        """Lambda form, e.g. λq0.λa0. sx(rz(sx(·,q0),a0,q0),q0)"""
        binders = [f"λq{i}." for i in range(self.arity)] + \
            [f"λ{slot_name(i)}." for i in range(self.angle_slots)]
        text = "·"
        for gate in self.instructions():
            args = [text] + list(gate.params) + [f"q{q}" for q in gate.qubits]
            text = f"{gate.kind.lower()}({','.join(args)})"
        return "".join(binders) + " " + text

    def to_gadget(self, gadget_id: str) -> GadgetDefinition:
        return GadgetDefinition(gadget_id, self.arity, self.angle_slots,
                                self.instructions(), self.program())


def abstract_window(gates: Sequence[GateInstruction],
                    max_arity: int = params.max_arity) -> Optional[Fragment]:
    """Rename qubits by first appearance; None when more than max_arity qubits are touched."""
    mapping: Dict[int, int] = {}
    body = []
    slots = 0
    for gate in gates:
        local = []
        for q in gate.qubits:
            if q not in mapping:
                if len(mapping) == max_arity:
                    return None
                mapping[q] = len(mapping)
            local.append(mapping[q])
        body.append((gate.kind, tuple(local)))
        if gate.kind in PARAMETERIZED_KINDS:
            slots += 1
    return Fragment(tuple(body), len(mapping), slots)


@dataclass(frozen=True)
class ScoredCorpus:
    """
    Attributes:
        circuits: Elementary-gate circuits
        energies: Achieved energy per circuit
        weights: Positive per-circuit weights
    """
    circuits: Tuple[Circuit, ...]
    energies: Tuple[float, ...]
    weights: Tuple[float, ...]

    @classmethod
    def from_energies(cls, circuits: Sequence[Circuit],
                      energies: Sequence[float]) -> "ScoredCorpus":
        if not circuits:
            raise EmptyCorpusError("A corpus needs at least one circuit")
        if len(circuits) != len(energies):
            raise EmptyCorpusError("Every corpus circuit needs an energy")
        energies = np.asarray(energies, dtype=float)
        weights = softmax(-energies) * len(circuits)
        return cls(tuple(expand_gadgets(c) for c in circuits),
                   tuple(float(e) for e in energies),
                   tuple(float(w) for w in weights))

    def __len__(self):
        return len(self.circuits)


@dataclass
class FragmentCandidate:
    fragment: Fragment
    occurrences: int = 0
    weighted_occurrences: float = 0.0
    sources: List[int] = field(default_factory=list)


class CorpusIndex:
    """
    Abstracted windows of every corpus circuit, computed once.

    windows[c][i] maps a window length L to the fragment formed by gates
    i..i+L-1 of circuit c (lengths whose window exceeds the arity are absent).
    """

    def __init__(self, corpus: ScoredCorpus, max_size: int = params.max_fragment_size,
                 max_arity: int = params.max_arity):
        self.corpus = corpus
        self.max_size = max_size
        self.max_arity = max_arity
        self.windows: List[List[Dict[int, Fragment]]] = []
        for circuit in corpus.circuits:
            gates = circuit.instructions
            per_position = []
            for i in range(len(gates)):
                lengths: Dict[int, Fragment] = {}
                for length in range(2, min(max_size, len(gates) - i) + 1):
                    fragment = abstract_window(gates[i:i + length], max_arity)
                    if fragment is None:
                        break
                    lengths[length] = fragment
                per_position.append(lengths)
            self.windows.append(per_position)


def enumerate_fragments(corpus: ScoredCorpus, max_size: int = params.max_fragment_size,
                        max_arity: int = params.max_arity,
                        index: Optional[CorpusIndex] = None) -> List[FragmentCandidate]:
    """
    All fragments of 2..max_size gates occurring in the corpus.

    Args:
        corpus: Weighted circuits
        max_size: Largest fragment, in elementary gates
        max_arity: Largest number of distinct qubits per fragment
        index: Precomputed window index (built when omitted)

    Returns:
        Candidates sorted by canonical form, with raw and weighted counts
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("Fragment enumeration needs a non-empty corpus")
    index = index or CorpusIndex(corpus, max_size, max_arity)
    candidates: Dict[Fragment, FragmentCandidate] = {}
    for c, per_position in enumerate(index.windows):
        weight = corpus.weights[c]
        for lengths in per_position:
            for fragment in lengths.values():
                candidate = candidates.setdefault(fragment, FragmentCandidate(fragment))
                candidate.occurrences += 1
                candidate.weighted_occurrences += weight
                if not candidate.sources or candidate.sources[-1] != c:
                    candidate.sources.append(c)
    ranked = sorted(candidates.values(), key=lambda cand: cand.fragment.canonical)
    logger.debug("Enumerated %d fragments from %d circuits", len(ranked), len(corpus))
    return ranked


def fragment_from_gadget(definition: GadgetDefinition) -> Fragment:
    """Fragment class of a stored gadget body."""
    return abstract_window(definition.body, max(definition.arity, 1))
