"""
File Protocol Definition Module

Defines the structured-text records exchanged between pipeline stages and
the helpers that read and write them. Every artifact of a run is a file:

- JSON:  config.json, topk.json, gadgets.json, report.json, circuit files
- JSONL: episodes.jsonl (one EpisodeRecord per line)
- CSV:   curves.csv, report.csv, thresholds.csv, gap scans
- NPZ:   agent checkpoints (written by agents.q_network)

Schemas are pinned in docs/file_formats.md.
"""

import csv
import json
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import sys
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grl_errors import ArtifactError
from models.circuit import Circuit, GadgetDefinition


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def write_json(path: str, payload: Any):
    directory = os.path.dirname(path)
    if directory:
        ensure_dir(directory)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_json(path: str) -> Any:
    """
    Load a JSON artifact.

    Raises:
        ArtifactError: missing file or invalid JSON
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as exc:
        raise ArtifactError(f"Missing artifact: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"Malformed JSON in {path}: {exc}") from exc


def append_jsonl(path: str, rows: Iterable[Mapping[str, Any]]):
    with open(path, "a", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True) + "\n")


def read_jsonl(path: str) -> List[Dict[str, Any]]:
    if not os.path.exists(path):
        raise ArtifactError(f"Missing artifact: {path}")
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ArtifactError(f"Malformed line {number} in {path}: {exc}") from exc
    return rows


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    directory = os.path.dirname(path)
    if directory:
        ensure_dir(directory)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_value(v) for v in row])


def _csv_value(value: Any) -> Any:
    # repr keeps every float digit, so re-reading is exact
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return int(value)
    return value


def read_csv(path: str) -> List[Dict[str, str]]:
    if not os.path.exists(path):
        raise ArtifactError(f"Missing artifact: {path}")
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


@dataclass
class CircuitRecord:
    """
    A stored, fully bound circuit with the energy it achieved.
    """
    circuit: Circuit
    energy: float
    cost: float
    regime: str = ""
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "circuit": self.circuit.to_dict(),
            "energy": self.energy,
            "cost": self.cost,
            "regime": self.regime,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, entry: Mapping[str, Any]) -> "CircuitRecord":
        try:
            return cls(Circuit.from_dict(entry["circuit"]), float(entry["energy"]),
                       float(entry["cost"]), str(entry.get("regime", "")),
                       int(entry.get("seed", 0)))
        except (KeyError, TypeError) as exc:
            raise ArtifactError(f"Malformed circuit record: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, json_string: str) -> "CircuitRecord":
        return cls.from_dict(json.loads(json_string))


@dataclass
class CurveRow:
    """
    One line of curves.csv: per-episode training signals.
    """
    episode: int
    loss: Optional[float]
    epsilon: float
    threshold: float
    cost: float
    energy: float
    steps: int
    success: bool

    HEADER = ("episode", "loss", "epsilon", "threshold", "cost", "energy", "steps", "success")

    def as_row(self) -> List[Any]:
        return [self.episode, "" if self.loss is None else self.loss, self.epsilon,
                self.threshold, self.cost, self.energy, self.steps, self.success]

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, json_string: str) -> "CurveRow":
        return cls(**json.loads(json_string))


def load_circuit_file(path: str) -> Circuit:
    """
    Read a circuit file: either a bare circuit object or a CircuitRecord.

    Raises:
        ArtifactError: missing or malformed file
    """
    entry = read_json(path)
    if isinstance(entry, Mapping) and "circuit" in entry:
        entry = entry["circuit"]
    try:
        return Circuit.from_dict(entry)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ArtifactError(f"Malformed circuit file {path}: {exc}") from exc


@dataclass(frozen=True)
class GadgetProvenance:
    """
    Where a library gadget came from: the field strength h of the regime
    whose top-k corpus it was extracted from, and the score change its
    acceptance produced.
    """
    field_strength: Optional[float]
    score_delta: float

    def to_dict(self) -> Dict[str, Any]:
        return {"field_strength": self.field_strength, "score_delta": self.score_delta}

    @classmethod
    def from_dict(cls, entry: Mapping[str, Any]) -> "GadgetProvenance":
        field_strength = entry.get("field_strength")
        return cls(None if field_strength is None else float(field_strength),
                   float(entry["score_delta"]))


def save_gadget_library(path: str, gadgets: Sequence[GadgetDefinition],
                        provenance: Optional[Mapping[str, GadgetProvenance]] = None):
    provenance = provenance or {}
    entries = []
    for gadget in gadgets:
        entry = gadget.to_dict()
        if gadget.gadget_id in provenance:
            entry["provenance"] = provenance[gadget.gadget_id].to_dict()
        entries.append(entry)
    write_json(path, {"gadgets": entries})


def load_gadget_library(path: str) -> List[GadgetDefinition]:
    entry = read_json(path)
    try:
        return [GadgetDefinition.from_dict(g) for g in entry["gadgets"]]
    except (KeyError, TypeError) as exc:
        raise ArtifactError(f"Malformed gadget library {path}: {exc}") from exc


def load_gadget_provenance(path: str) -> Dict[str, GadgetProvenance]:
    """Provenance keyed by gadget id; gadgets saved without one are absent."""
    entry = read_json(path)
    try:
        return {g["id"]: GadgetProvenance.from_dict(g["provenance"])
                for g in entry["gadgets"] if "provenance" in g}
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactError(f"Malformed gadget provenance in {path}: {exc}") from exc
