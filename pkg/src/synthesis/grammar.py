"""
Grammar Scoring and Gadget Extraction

Grammar g = elementary gate primitives + accepted fragments, each with a
usage probability. Score of g on a weighted corpus D:

    S_D(g) = L_g(D) - λ|g| - k Σ_{p∈g} |p|

- L_g(D) = Σ_i w_i Σ_{t ∈ parse_i} log p_t
- parse_i: minimum-token segmentation of circuit i into primitives and
  fragment matches; among minimal parses the one taking the longest token
  at each position (earliest first) is used
- p_t = (u_t + c) / Σ_j (u_j + c), u_t the weighted usage of token t across
  all parses, c the pseudocount (10)
- |g| counts components, |p| elementary gates per component (1 for a
  primitive), λ = k = 1

Extraction greedily adds the candidate with the highest score until
max_new fragments are accepted or no candidate improves the score.
Ties: smaller |p| first, then canonical form.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.grl_parameters import GadgetSettings
from grl_errors import EmptyCorpusError, UncoveredGateKindError
from synthesis.fragments import (
    CorpusIndex,
    Fragment,
    FragmentCandidate,
    ScoredCorpus,
    enumerate_fragments,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grammar:
    """
    Attributes:
        primitives: Elementary gate kinds
        fragments: Accepted fragments in acceptance order
        pseudocount: Additive smoothing per component
        structure_penalty: λ
        size_penalty: k
    """
    primitives: Tuple[str, ...]
    fragments: Tuple[Fragment, ...] = ()
    pseudocount: float = 10.0
    structure_penalty: float = 1.0
    size_penalty: float = 1.0

    @classmethod
    def base(cls, primitives: Sequence[str],
             settings: Optional[GadgetSettings] = None) -> "Grammar":
        settings = settings or GadgetSettings()
        return cls(tuple(primitives), (), settings.pseudocount,
                   settings.structure_penalty, settings.size_penalty)

    def with_fragment(self, fragment: Fragment) -> "Grammar":
        return Grammar(self.primitives, self.fragments + (fragment,), self.pseudocount,
                       self.structure_penalty, self.size_penalty)

    @property
    def num_components(self) -> int:
        return len(self.primitives) + len(self.fragments)

    @property
    def total_size(self) -> int:
        return len(self.primitives) + sum(f.size for f in self.fragments)

    def regularizer(self) -> float:
        """λ|g| + k Σ|p|"""
        return self.structure_penalty * self.num_components + self.size_penalty * self.total_size

    def components(self) -> List[str]:
        return list(self.primitives) + [f.canonical for f in self.fragments]


@dataclass
class GrammarFit:
    """Parses and usage statistics of a grammar on a corpus."""
    usage: Dict[str, float]
    probabilities: Dict[str, float]
    parses: List[List[str]]
    log_likelihood: float
    score: float


def _check_coverage(grammar: Grammar, corpus: ScoredCorpus):
    covered = set(grammar.primitives)
    for circuit in corpus.circuits:
        for gate in circuit.instructions:
            if gate.kind not in covered:
                raise UncoveredGateKindError(f"Grammar has no primitive for {gate.kind}")


def parse_circuit(index: CorpusIndex, c: int, grammar: Grammar,
                  fragment_keys: Dict[Fragment, str]) -> List[str]:
    """Minimum-token parse of corpus circuit c, longest token first on ties."""
    gates = index.corpus.circuits[c].instructions
    windows = index.windows[c]
    n = len(gates)
    best = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        count = 1 + best[i + 1]
        for length, fragment in windows[i].items():
            if fragment in fragment_keys:
                count = min(count, 1 + best[i + length])
        best[i] = count

    tokens = []
    i = 0
    while i < n:
        chosen_length, chosen = 1, gates[i].kind
        for length, fragment in windows[i].items():
            if fragment in fragment_keys and 1 + best[i + length] == best[i] \
                    and length > chosen_length:
                chosen_length, chosen = length, fragment_keys[fragment]
        tokens.append(chosen)
        i += chosen_length
    return tokens


def fit_grammar(grammar: Grammar, corpus: ScoredCorpus,
                index: Optional[CorpusIndex] = None) -> GrammarFit:
    """Parse the corpus and evaluate the score of a grammar."""
    if len(corpus) == 0:
        raise EmptyCorpusError("Scoring needs a non-empty corpus")
    _check_coverage(grammar, corpus)
    if index is None:
        longest = max([f.size for f in grammar.fragments], default=2)
        index = CorpusIndex(corpus, max(longest, 2), max([f.arity for f in grammar.fragments],
                                                         default=2))
    fragment_keys = {f: f.canonical for f in grammar.fragments}

    parses = [parse_circuit(index, c, grammar, fragment_keys) for c in range(len(corpus))]
    usage = {name: 0.0 for name in grammar.components()}
    for weight, tokens in zip(corpus.weights, parses):
        for token in tokens:
            usage[token] += weight

    denominator = sum(u + grammar.pseudocount for u in usage.values())
    probabilities = {name: (u + grammar.pseudocount) / denominator for name, u in usage.items()}
    log_likelihood = sum(weight * sum(math.log(probabilities[t]) for t in tokens)
                         for weight, tokens in zip(corpus.weights, parses))
    score = log_likelihood - grammar.regularizer()
    return GrammarFit(usage, probabilities, parses, log_likelihood, score)


def grammar_score(grammar: Grammar, corpus: ScoredCorpus,
                  index: Optional[CorpusIndex] = None) -> float:
    """S_D(g) = L_g(D) - λ|g| - k Σ|p|"""
    return fit_grammar(grammar, corpus, index).score


@dataclass
class AcceptedFragment:
    fragment: Fragment
    score_before: float
    score_after: float
    occurrences: int
    weighted_occurrences: float

    @property
    def score_delta(self) -> float:
        return self.score_after - self.score_before


@dataclass
class ExtractionResult:
    grammar: Grammar
    accepted: List[AcceptedFragment] = field(default_factory=list)
    base_score: float = 0.0


def extract_gadgets(corpus: ScoredCorpus, max_new: int,
                    settings: Optional[GadgetSettings] = None,
                    primitives: Optional[Sequence[str]] = None,
                    base: Optional[Grammar] = None) -> ExtractionResult:
    """
    Greedy library growth.

    Args:
        corpus: Weighted top-k circuits
        max_new: Maximum number of fragments to accept
        settings: Fragment size/arity limits, penalties and occurrence floor
        primitives: Elementary gate kinds (sorted corpus kinds when omitted)
        base: Grammar to grow, e.g. an existing gadget library

    Returns:
        ExtractionResult with accepted fragments in acceptance order
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("Gadget extraction needs a non-empty corpus")
    settings = settings or GadgetSettings()
    if base is None:
        if primitives is None:
            primitives = sorted({g.kind for c in corpus.circuits for g in c.instructions})
        base = Grammar.base(primitives, settings)
    grammar = base

    longest = max([settings.max_fragment_size] + [f.size for f in base.fragments])
    index = CorpusIndex(corpus, longest, settings.max_arity)
    candidates: List[FragmentCandidate] = [
        cand for cand in enumerate_fragments(corpus, settings.max_fragment_size,
                                             settings.max_arity, index)
        if cand.occurrences >= settings.min_occurrences
        and cand.fragment not in grammar.fragments
    ]
    current = grammar_score(grammar, corpus, index)
    result = ExtractionResult(grammar, [], current)
    logger.info("Extraction: %d candidates, base score %.4f", len(candidates), current)

    for _ in range(max_new):
        best_key = None
        best_candidate = None
        for candidate in candidates:
            score = grammar_score(grammar.with_fragment(candidate.fragment), corpus, index)
            key = (-score, candidate.fragment.size, candidate.fragment.canonical)
            if best_key is None or key < best_key:
                best_key, best_candidate = key, candidate
        if best_candidate is None or -best_key[0] <= current:
            break
        new_score = -best_key[0]
        result.accepted.append(AcceptedFragment(best_candidate.fragment, current, new_score,
                                                best_candidate.occurrences,
                                                best_candidate.weighted_occurrences))
        logger.info("Accepted fragment %s (|p|=%d, ΔS=%+.4f)",
                    best_candidate.fragment.canonical, best_candidate.fragment.size,
                    new_score - current)
        grammar = grammar.with_fragment(best_candidate.fragment)
        candidates = [c for c in candidates if c is not best_candidate]
        current = new_score

    result.grammar = grammar
    return result
