"""
Test cases for quadratic and alternating lattices over Z_(p)
"""
import random
import sys
import unittest
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from data.enums import DiscClass
from data.exceptions import (NotSymmetricError, NotLocalError, NotNearlyUnimodularError,
                             NotIsometricError, NotAnIsometryError, PreconditionError)
from data.lattice_forms import (GramForm, coradical, is_nearly_unimodular, jordan_split,
                                rational_class, isometric_rational, isometric_integral,
                                isometric_integral_nearly_unimodular, jordan_invariant_oracle,
                                oracle_to_json, count_nearly_unimodular_classes, hyperbolic,
                                orthogonal_sum_class, cancel_class, integral_similitude_factors,
                                rational_similitude_factors, symplectic_reduce,
                                isometric_alternating, isometric_alternating_rational,
                                alternating_witness, lift_isometry_with_trace, lift_isometry,
                                build_isometry_witness, verify_witness, describe)
from data.pmatrix import PMatrix
from utils.random_forms import hensel_instance, random_nearly_unimodular

SQ, NS = DiscClass.SQUARE, DiscClass.NONSQUARE


def diag(values, p=3):
    return GramForm.diagonal(values, p)


def alternating(scales, p=3):
    blocks = [PMatrix.from_rows([[0, p ** s], [-p ** s, 0]], p) for s in scales]
    return GramForm(PMatrix.block_diagonal(blocks, p), -1)


class TestGramForm(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(NotSymmetricError):
            GramForm.from_rows([[1, 2], [0, 1]], 3)
        with self.assertRaises(NotLocalError):
            GramForm.from_rows([["1/3", 0], [0, 1]], 3)
        with self.assertRaises(PreconditionError):
            GramForm(PMatrix.identity(2, 3), 0)

    def test_basic_properties(self):
        f = diag([1, 9])
        self.assertEqual(f.rank, 2)
        self.assertEqual(f.det(), Fraction(9))
        self.assertFalse(f.is_unimodular())
        self.assertTrue(diag([1, 2]).is_unimodular())
        self.assertEqual(describe(f), "<1,9>")

    def test_orthogonal_sum(self):
        self.assertEqual(diag([1]).orthogonal_sum(diag([3])), diag([1, 3]))


class TestCoradical(unittest.TestCase):
    def test_coradical_of_golden_form(self):
        profile = coradical(diag([1, 9]))
        self.assertEqual(profile.exponents, (2,))
        self.assertFalse(profile.is_semisimple)
        self.assertFalse(is_nearly_unimodular(diag([1, 9])))

    def test_nearly_unimodular(self):
        self.assertTrue(is_nearly_unimodular(diag([1, 3, -3])))
        self.assertEqual(coradical(diag([1, 3, -3])).exponents, (1, 1))
        self.assertEqual(coradical(diag([1, 1, -1])).exponents, ())

    def test_singular_form(self):
        f = GramForm.from_rows([[1, 1], [1, 1]], 3)
        profile = coradical(f)
        self.assertEqual(profile.rank_defect, 1)
        self.assertFalse(profile.is_semisimple)

    def test_coradical_is_basis_independent(self):
        rng = random.Random(11)
        for _ in range(10):
            f = random_nearly_unimodular(rng, 5, 3, mixed=False)
            mixed = f.congruent(PMatrix.from_rows([[1, 2, 0], [0, 1, 3], [1, 0, 1]], 5))
            self.assertEqual(coradical(f), coradical(mixed))


class TestClassification(unittest.TestCase):
    def test_rationally_equal_integrally_distinct(self):
        f, g = diag([1, 9]), diag([2, 18])
        self.assertTrue(isometric_rational(f, g))
        self.assertFalse(isometric_integral(f, g))

    def test_oracle_values(self):
        self.assertEqual(jordan_invariant_oracle(diag([1, 1, 9])), [(0, 2, SQ), (2, 1, SQ)])
        self.assertEqual(jordan_invariant_oracle(diag([1, 2, 18])), [(0, 2, NS), (2, 1, NS)])
        self.assertEqual(oracle_to_json([(0, 2, SQ)]), [[0, 2, "square"]])

    def test_nearly_unimodular_decision(self):
        f, g = diag([1, 1, -1]), diag([1, 3, -3])
        self.assertTrue(isometric_rational(f, g))
        self.assertFalse(isometric_integral_nearly_unimodular(f, g))
        self.assertTrue(isometric_integral_nearly_unimodular(diag([1, 3]), diag([3, 1])))

    def test_decision_requires_nearly_unimodular(self):
        with self.assertRaises(NotNearlyUnimodularError):
            isometric_integral_nearly_unimodular(diag([1, 9]), diag([1, 9]))

    def test_decision_agrees_with_oracle(self):
        rng = random.Random(3)
        for _ in range(30):
            p = rng.choice([3, 5, 7])
            n = rng.randint(1, 4)
            f = random_nearly_unimodular(rng, p, n)
            g = random_nearly_unimodular(rng, p, n)
            self.assertEqual(isometric_integral_nearly_unimodular(f, g), isometric_integral(f, g))

    def test_jordan_split_witness(self):
        f = GramForm.from_rows([[2, 3], [3, 9]], 3)
        split = jordan_split(f)
        self.assertTrue(split.witness.is_invertible_over_r())
        self.assertEqual(f.gram.congruent(split.witness), split.block_gram())

    def test_class_count(self):
        c = rational_class(diag([1, 5], 5))
        self.assertEqual(len(count_nearly_unimodular_classes(c)), 1)

    def test_hyperbolic_plane(self):
        h = hyperbolic(1, 1, 3)
        self.assertTrue(h.is_unimodular())
        self.assertTrue(isometric_rational(h, diag([1, -1])))
        self.assertTrue(isometric_integral(h, diag([1, -1])))


class TestClassArithmetic(unittest.TestCase):
    def test_sum_and_cancel(self):
        rng = random.Random(5)
        for _ in range(20):
            p = rng.choice([3, 5])
            a = diag([rng.choice([1, 2, p, 2 * p, -1]) for _ in range(rng.randint(1, 3))], p)
            b = diag([rng.choice([1, 2, p, 2 * p, -1]) for _ in range(rng.randint(1, 3))], p)
            total = rational_class(a.orthogonal_sum(b))
            self.assertEqual(orthogonal_sum_class(rational_class(a), rational_class(b)), total)
            self.assertEqual(cancel_class(total, rational_class(b)), rational_class(a))


class TestSimilitudes(unittest.TestCase):
    def test_integral_similitude(self):
        self.assertEqual(integral_similitude_factors(diag([1, 9]), diag([2, 18])), [Fraction(2)])
        self.assertEqual(integral_similitude_factors(diag([1, 1, 9]), diag([1, 2, 18])), [])

    def test_rational_similitude(self):
        factors = rational_similitude_factors(diag([1, 9]), diag([2, 18]))
        self.assertIn(Fraction(1), factors)
        self.assertNotIn(Fraction(3), factors)


class TestAlternating(unittest.TestCase):
    def test_symplectic_scales(self):
        scales, W = symplectic_reduce(alternating([1, 0]))
        self.assertEqual(scales, [0, 1])
        self.assertTrue(W.is_invertible_over_r())

    def test_isometry(self):
        f, g = alternating([1, 0]), alternating([0, 1])
        self.assertTrue(isometric_alternating(f, g))
        X = alternating_witness(f, g)
        self.assertEqual(f.gram.congruent(X), g.gram)
        self.assertTrue(X.is_invertible_over_r())

    def test_rational_but_not_integral(self):
        f, g = alternating([0, 0]), alternating([0, 1])
        self.assertFalse(isometric_alternating(f, g))
        self.assertTrue(isometric_alternating_rational(f, g))
        with self.assertRaises(NotIsometricError):
            alternating_witness(f, g)
        X = alternating_witness(f, g, integral=False)
        self.assertEqual(f.gram.congruent(X), g.gram)


class TestLifting(unittest.TestCase):
    def test_newton_steps_double_the_defect(self):
        rng = random.Random(2)
        for _ in range(10):
            p = rng.choice([3, 5, 7])
            G, Gt, X0 = hensel_instance(rng, p, rng.randint(1, 4))
            result = lift_isometry_with_trace(G, Gt, X0, 8)
            self.assertLessEqual(result.steps, 4)
            for before, after in zip(result.defect_history, result.defect_history[1:]):
                self.assertGreaterEqual(after, min(2 * before, 8))
            self.assertTrue(G.congruent(result.witness).congruent_mod(Gt, 8))

    def test_seed_must_be_residue_isometry(self):
        G = PMatrix.identity(2, 3)
        with self.assertRaises(NotAnIsometryError):
            lift_isometry(G, G, PMatrix.diagonal([1, 2], 3).scaled(3))

    def test_witness_for_isometric_forms(self):
        f, g = diag([1, 1]), diag([2, 2])
        X = build_isometry_witness(f, g, 8)
        self.assertTrue(verify_witness(f, g, X, 8))

    def test_witness_with_two_scales(self):
        f, g = diag([1, 3]), diag([3, 1])
        X = build_isometry_witness(f, g, 6)
        self.assertTrue(verify_witness(f, g, X, 6))

    def test_witness_refused_for_distinct_forms(self):
        with self.assertRaises(NotIsometricError):
            build_isometry_witness(diag([1, 1, -1]), diag([1, 3, -3]))


if __name__ == "__main__":
    unittest.main()
