import math
import unittest
import numpy as np
from stochsched.guarantees import (ComparatorClass, MisspecifiedPolicy, ga_guarantee, gmux_crossing, gmux_guarantee,
                                   misspecified_guarantee, misspecified_table, nbue_guarantees, nbue_table,
                                   single_machine_table, unrelated_guarantees, unrelated_table)
from stochsched.variation import PHI


def _by_policy(rows):
    return {(row.policy, row.comparator): row.guarantee for row in rows}


class TestUnrelatedMachines(unittest.TestCase):

    def test_ga_guarantee(self) -> None:
        self.assertEqual(ga_guarantee(2, 0), (8, 8))
        self.assertEqual(ga_guarantee(2, 1), (12, 8))
        self.assertEqual(ga_guarantee(2, 2), (16, 8))

    def test_gmux(self) -> None:
        self.assertAlmostEqual(gmux_guarantee(0), 368 / 51, places=12)
        crossing = gmux_crossing()
        self.assertTrue(0 < crossing < 1)
        self.assertAlmostEqual(8 + 4 * crossing, gmux_guarantee(crossing), delta=1e-9)

    def test_rows(self) -> None:
        rows = _by_policy(unrelated_guarantees(0))
        self.assertEqual(len(rows), 9)
        self.assertEqual(rows[("ga-rsos", ComparatorClass.ALL)], 8)
        self.assertAlmostEqual(rows[("ga-dsos", ComparatorClass.ALL)], 4 * (PHI + 1), places=12)
        self.assertAlmostEqual(rows[("ga-rsos-fdelta", ComparatorClass.ALL)], 6.741, delta=2e-3)
        self.assertAlmostEqual(rows[("ga-sos-alpha-delta", ComparatorClass.FIXED_ASSIGNMENT)],
                               4 * (1 + math.sqrt(2)), places=9)

    def test_dominance(self) -> None:
        for delta in (0, 0.5, 1, 2):
            with self.subTest(delta=delta):
                rows = _by_policy(unrelated_guarantees(delta))
                for comparator in ComparatorClass:
                    self.assertLessEqual(rows[("ga-rsos-fdelta", comparator)], rows[("ga-rsos", comparator)] + 1e-9)
                    self.assertLessEqual(rows[("ga-sos-alpha-delta", comparator)],
                                         rows[("ga-dsos", comparator)] + 1e-9)

    def test_deterministic_optimized_below_golden_bound(self) -> None:
        for delta in np.linspace(0, 2, 201):
            rows = _by_policy(unrelated_guarantees(delta))
            self.assertLessEqual(rows[("ga-sos-alpha-delta", ComparatorClass.ALL)],
                                 (PHI + 1) * (4 + 2 * delta) - (5 - math.sqrt(5)) / 10 + 1e-12)

    def test_continuous_at_one(self) -> None:
        below = _by_policy(unrelated_guarantees(1 - 1e-9))
        above = _by_policy(unrelated_guarantees(1 + 1e-9))
        for key in ((policy, ComparatorClass.ALL) for policy in ("ga-sos-alpha-delta", "gmux")):
            self.assertAlmostEqual(below[key], above[key], delta=1e-6)

    def test_table_csv(self) -> None:
        table = unrelated_table([0, 1])
        lines = table.to_csv().splitlines()
        self.assertEqual(lines[0], "delta,policy,guarantee,class")
        self.assertEqual(len(lines), 1 + 18)
        self.assertEqual(table.value("ga-rsos"), [8, 12])


class TestSingleMachine(unittest.TestCase):

    def test_table(self) -> None:
        table = single_machine_table([0, 1])
        self.assertEqual(table.value("rsos"), [2, 2])
        self.assertEqual(table.value("dsos"), [PHI + 1, PHI + 1])
        np.testing.assert_allclose(table.value("sos-alpha-delta"), [1 + math.sqrt(2), 2.5])
        np.testing.assert_allclose(table.value("rsos-fdelta"), [1.6853, 1.839], atol=1e-3)


class TestMisspecification(unittest.TestCase):

    def test_sos_with_unbounded_variation(self) -> None:
        self.assertAlmostEqual(misspecified_guarantee(0, math.inf, MisspecifiedPolicy.SOS), 2 + 1 / math.sqrt(2),
                               places=9)

    def test_rsos_with_unbounded_variation(self) -> None:
        self.assertAlmostEqual(misspecified_guarantee(0, math.inf, MisspecifiedPolicy.RSOS), 2.223, delta=1e-3)

    def test_correct_prediction(self) -> None:
        self.assertAlmostEqual(misspecified_guarantee(1, 1, MisspecifiedPolicy.SOS), 2.5, places=9)

    def test_table(self) -> None:
        table = misspecified_table([0], [0, math.inf])
        lines = table.to_csv().splitlines()
        self.assertEqual(lines[0], "delta_bar,delta,policy,guarantee,class")
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[-1].startswith("0,inf,sos-alpha-delta,"))


class TestNbue(unittest.TestCase):

    def test_rows(self) -> None:
        rows = {row.policy: row.guarantee for row in nbue_guarantees(1)}
        self.assertAlmostEqual(rows["sos-nbue-cubic"], 2.452, delta=1e-3)
        self.assertAlmostEqual(rows["sos-via-delta"], 2.5, places=9)
        self.assertAlmostEqual(rows["rsos-via-delta"], 1.839, delta=1e-3)

    def test_cubic_beats_conversion(self) -> None:
        for nbue_delta in (1, 1.5, 3):
            with self.subTest(nbue_delta=nbue_delta):
                rows = {row.policy: row.guarantee for row in nbue_guarantees(nbue_delta)}
                self.assertLessEqual(rows["sos-nbue-cubic"], rows["sos-via-delta"] + 1e-9)

    def test_table(self) -> None:
        self.assertEqual(len(nbue_table([1, 2]).rows), 6)


if __name__ == "__main__":
    unittest.main()
