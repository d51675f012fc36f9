"""
Top-k circuit store: the k lowest-cost bound circuits seen so far, one per
canonical structure. Offering a circuit whose structure is already stored
keeps whichever of the two has the lower cost.
"""

import logging
from typing import Dict, Iterable, List, Optional

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from communication.protocol_definition import CircuitRecord, read_json, write_json
from config.grl_parameters import params
from grl_errors import ArtifactError, InvalidConfigError
from models.circuit import canonical_key, require_bound

logger = logging.getLogger(__name__)


class TopKStore:
    def __init__(self, k_top: int = params.k_top):
        if k_top < 1:
            raise InvalidConfigError("k_top must be >= 1")
        self.k_top = k_top
        self._entries: Dict[str, CircuitRecord] = {}

    def __len__(self):
        return len(self._entries)

    @staticmethod
    def _order(record: CircuitRecord):
        return (record.cost, canonical_key(record.circuit))

    @property
    def entries(self) -> List[CircuitRecord]:
        """Stored records, cost ascending."""
        return sorted(self._entries.values(), key=self._order)

    def offer(self, record: CircuitRecord) -> bool:
        """
        Insert a record if it belongs among the k best.

        Returns:
            True when the store changed
        """
        require_bound(record.circuit)
        key = canonical_key(record.circuit)
        existing = self._entries.get(key)
        if existing is not None:
            if record.cost >= existing.cost:
                return False
            self._entries[key] = record
            return True
        if len(self._entries) >= self.k_top:
            worst = self.entries[-1]
            if self._order(record) >= self._order(worst):
                return False
            del self._entries[canonical_key(worst.circuit)]
        self._entries[key] = record
        return True

    def merge(self, records: Iterable[CircuitRecord]) -> int:
        return sum(1 for record in records if self.offer(record))

    def best(self) -> Optional[CircuitRecord]:
        entries = self.entries
        return entries[0] if entries else None

    def to_dict(self) -> dict:
        return {"k_top": self.k_top, "entries": [r.to_dict() for r in self.entries]}

    def save(self, path: str):
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path: str, k_top: Optional[int] = None) -> "TopKStore":
        entry = read_json(path)
        try:
            store = cls(k_top or int(entry["k_top"]))
            store.merge(CircuitRecord.from_dict(r) for r in entry["entries"])
        except (KeyError, TypeError) as exc:
            raise ArtifactError(f"Malformed top-k file {path}: {exc}") from exc
        return store
