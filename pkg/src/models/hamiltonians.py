"""
Transverse-Field Ising Model Hamiltonians

H = -J Σ_⟨i,j⟩ Z_i Z_j - h Σ_i X_i

- ⟨i,j⟩ runs over nearest neighbours: (i, i+1) for an open chain, plus
  (N-1, 0) for a periodic chain with N >= 2
- The field strength h sets the difficulty: for h → 0 the ferromagnetic
  doublet |0...0⟩, |1...1⟩ is degenerate and easy to reach; the gap
  E1 - E0 opens as h grows

Fake minimum energy (curriculum target):
    μ = (N-1)(-J) + N(-h)
This is the sum of all coefficients, a heuristic target rather than the
ground energy.
"""

import csv
import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.grl_parameters import params
from grl_errors import InvalidHamiltonianError, QubitIndexError
from models.statevector import ground_state_oracle

logger = logging.getLogger(__name__)

PAULI_LABELS = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliString:
    """
    One weighted Pauli product.

    Attributes:
        ops: One label from {I, X, Y, Z} per qubit, qubit 0 first
        coefficient: Real weight
    """
    ops: str
    coefficient: float

    def __post_init__(self):
        ops = "".join(self.ops).upper()
        if not ops or set(ops) - PAULI_LABELS:
            raise InvalidHamiltonianError(f"Invalid Pauli string {self.ops!r}")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def num_qubits(self) -> int:
        return len(self.ops)

    @classmethod
    def from_sites(cls, num_qubits: int, sites: Iterable[Tuple[int, str]],
                   coefficient: float) -> "PauliString":
        labels = ["I"] * num_qubits
        for qubit, label in sites:
            if not 0 <= qubit < num_qubits:
                raise QubitIndexError(f"Pauli site {qubit} outside {num_qubits} qubits")
            labels[qubit] = label
        return cls("".join(labels), coefficient)


@dataclass(frozen=True)
class PauliHamiltonian:
    num_qubits: int
    terms: Tuple[PauliString, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.num_qubits < 1:
            raise InvalidHamiltonianError("A Hamiltonian needs at least one qubit")
        for term in self.terms:
            if term.num_qubits != self.num_qubits:
                raise InvalidHamiltonianError(
                    f"Term {term.ops} does not act on {self.num_qubits} qubits")

    def coefficient_sum(self) -> float:
        return sum(term.coefficient for term in self.terms)


@dataclass(frozen=True)
class TfimSpec:
    """
    Transverse-field Ising chain.

    Attributes:
        num_qubits: Chain length N
        coupling: J >= 0
        field: h >= 0
        boundary: "open" or "periodic"
    """
    num_qubits: int
    coupling: float = params.coupling
    field: float = 0.0
    boundary: str = params.boundary

    def __post_init__(self):
        if self.num_qubits < 1:
            raise InvalidHamiltonianError(f"TFIM needs N >= 1, got {self.num_qubits}")
        if self.coupling < 0 or self.field < 0:
            raise InvalidHamiltonianError("TFIM coupling and field must be >= 0")
        if self.boundary not in ("open", "periodic"):
            raise InvalidHamiltonianError(f"Unknown boundary {self.boundary!r}")

    def bonds(self) -> List[Tuple[int, int]]:
        bonds = [(i, i + 1) for i in range(self.num_qubits - 1)]
        if self.boundary == "periodic" and self.num_qubits >= 2:
            bonds.append((self.num_qubits - 1, 0))
        return bonds

    def with_field(self, field: float) -> "TfimSpec":
        return TfimSpec(self.num_qubits, self.coupling, field, self.boundary)


def build_tfim(spec: TfimSpec) -> PauliHamiltonian:
    """
    Build H = -J Σ Z_i Z_j - h Σ X_i.

    Args:
        spec: Chain description

    Returns:
        PauliHamiltonian with one ZZ term per bond and N X terms
    """
    n = spec.num_qubits
    terms = [PauliString.from_sites(n, [(i, "Z"), (j, "Z")], -spec.coupling)
             for i, j in spec.bonds()]
    terms += [PauliString.from_sites(n, [(i, "X")], -spec.field) for i in range(n)]
    return PauliHamiltonian(n, tuple(terms))


def fake_minimum_energy(spec: TfimSpec) -> float:
    """μ = (N-1)(-J) + N(-h)"""
    return params.fake_minimum(spec.num_qubits, spec.coupling, spec.field)


@dataclass(frozen=True)
class GapPoint:
    field: float
    ground_energy: float
    gap: float


def gap_scan(spec_base: TfimSpec, h_values: Sequence[float]) -> List[GapPoint]:
    """
    Exact ground energy and gap across field strengths.

    Args:
        spec_base: Chain whose field is replaced by each h
        h_values: Field strengths, each >= 0

    Returns:
        One GapPoint per h, in input order
    """
    points = []
    for h in h_values:
        energy, gap = ground_state_oracle(build_tfim(spec_base.with_field(float(h))))
        points.append(GapPoint(float(h), energy, gap))
        logger.debug("gap scan h=%g: E0=%.10f ΔE=%.3e", h, energy, gap)
    return points


def write_gap_csv(points: Sequence[GapPoint], path: str) -> None:
    """Columns: h, ground_energy, gap"""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["h", "ground_energy", "gap"])
        for point in points:
            writer.writerow([repr(point.field), repr(point.ground_energy), repr(point.gap)])
