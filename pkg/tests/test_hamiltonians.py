"""
TFIM Hamiltonian Unit Tests

Term structure, fake minimum energy and the gap scan.
"""

import csv
import math
import os
import sys
import tempfile
import unittest
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from hypothesis import given, settings, strategies as st

from grl_errors import InvalidHamiltonianError, QubitIndexError
from models.hamiltonians import (
    PauliString,
    TfimSpec,
    build_tfim,
    fake_minimum_energy,
    gap_scan,
    write_gap_csv,
)


class TestTfimConstruction(unittest.TestCase):
    """
    Unit tests for build_tfim().
    """

    def test_two_qubit_terms(self):
        ham = build_tfim(TfimSpec(2, 1.0, 0.5))
        terms = {(t.ops, t.coefficient) for t in ham.terms}
        self.assertEqual(terms, {("ZZ", -1.0), ("XI", -0.5), ("IX", -0.5)})

    def test_open_chain_bond_count(self):
        self.assertEqual(TfimSpec(4).bonds(), [(0, 1), (1, 2), (2, 3)])

    def test_periodic_chain_closes(self):
        self.assertEqual(TfimSpec(3, boundary="periodic").bonds(), [(0, 1), (1, 2), (2, 0)])

    def test_single_qubit_has_no_bonds(self):
        ham = build_tfim(TfimSpec(1, 1.0, 0.3))
        self.assertEqual([t.ops for t in ham.terms], ["X"])

    def test_invalid_specs(self):
        with self.assertRaises(InvalidHamiltonianError):
            TfimSpec(0)
        with self.assertRaises(InvalidHamiltonianError):
            TfimSpec(2, 1.0, -0.1)
        with self.assertRaises(InvalidHamiltonianError):
            TfimSpec(2, boundary="twisted")
        with self.assertRaises(InvalidHamiltonianError):
            PauliString("XQ", 1.0)
        with self.assertRaises(QubitIndexError):
            PauliString.from_sites(2, [(2, "Z")], 1.0)

    def test_fake_minimum_values(self):
        self.assertAlmostEqual(fake_minimum_energy(TfimSpec(2, 1.0, 1.0)), -3.0)
        self.assertAlmostEqual(fake_minimum_energy(TfimSpec(3, 1.0, 1e-3)), -2.003)

    @given(n=st.integers(min_value=1, max_value=6),
           h=st.floats(min_value=0.0, max_value=5.0, allow_nan=False))
    def test_fake_minimum_is_open_chain_coefficient_sum(self, n, h):
        spec = TfimSpec(n, 1.0, h)
        self.assertAlmostEqual(fake_minimum_energy(spec), build_tfim(spec).coefficient_sum(),
                               places=9)


class TestGapScan(unittest.TestCase):
    """
    Unit tests for gap_scan() and its CSV output.
    """

    def test_gap_opens_with_field(self):
        points = gap_scan(TfimSpec(2, 1.0), [1e-3, 1e-2, 1.0])
        self.assertLess(points[0].gap, 1e-2)
        self.assertLess(points[1].gap, 1e-2)
        self.assertGreater(points[2].gap, 0.5)
        self.assertAlmostEqual(points[2].ground_energy, -math.sqrt(5.0), delta=1e-12)

    def test_csv_columns(self):
        points = gap_scan(TfimSpec(2, 1.0), [0.1, 1.0])
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "gap.csv")
            write_gap_csv(points, path)
            with open(path, newline="", encoding="utf-8") as handle:
                rows = list(csv.DictReader(handle))
        self.assertEqual(list(rows[0].keys()), ["h", "ground_energy", "gap"])
        self.assertEqual(float(rows[1]["ground_energy"]), points[1].ground_energy)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(min_value=2, max_value=4),
           h=st.floats(min_value=0.0, max_value=2.0, allow_nan=False))
    def test_gap_is_continuous_in_field(self, n, h):
        here, nearby = gap_scan(TfimSpec(n, 1.0), [h, h + 1e-6])
        self.assertLess(abs(here.gap - nearby.gap), 1e-3)


if __name__ == '__main__':
    unittest.main()
