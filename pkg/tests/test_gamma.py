"""
Test cases for Gamma-forms: group rings, hermitianization, coradicals and lifting
"""
import random
import sys
import unittest
from unittest import mock
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from data.exceptions import (PreconditionError, InvarianceError, NotNearlyUnimodularError,
                             NotUnimodularError, NotAnIsometryError)
import data.gamma
from data.gamma import (FiniteGroup, GroupRingElem, GammaLattice, cyclic_group, symmetric_group_3,
                        direct_product, sigma, trace_T, regular_action, character_action,
                        permutation_action, residue_characters, is_split_abelian, isotypic_multiplicities,
                        hermitianize, is_sesquilinear, corad_with_action, coradical_is_semisimple,
                        kgamma_iso_test, gamma_isometric_split_abelian, average_equivariant,
                        is_equivariant_mod, equivariant_lift_isometry, twist, orthogonal_sum,
                        random_gamma_form)
from data.pmatrix import PMatrix
from utils.campaigns import sign_coradical_pair
from utils.random_forms import random_gl


def regular_lattice(group, p):
    return GammaLattice(group, regular_action(group, p), PMatrix.identity(group.order, p))


class TestFiniteGroups(unittest.TestCase):
    def test_cyclic(self):
        c3 = cyclic_group(3)
        self.assertEqual(c3.order, 3)
        self.assertEqual(c3.identity, 0)
        self.assertEqual(c3.inverse(1), 2)
        self.assertEqual(c3.exponent, 3)
        self.assertTrue(c3.is_abelian())

    def test_symmetric_and_product(self):
        s3 = symmetric_group_3()
        self.assertEqual(s3.order, 6)
        self.assertFalse(s3.is_abelian())
        self.assertEqual(s3.exponent, 6)
        klein = direct_product(cyclic_group(2), cyclic_group(2))
        self.assertEqual(klein.order, 4)
        self.assertEqual(klein.exponent, 2)
        self.assertEqual(len(klein.generators()), 2)

    def test_invalid_table(self):
        with self.assertRaises(PreconditionError):
            FiniteGroup.from_table([[0, 1], [0, 1]])

    def test_split_abelian(self):
        self.assertFalse(is_split_abelian(cyclic_group(3), 5))
        self.assertTrue(is_split_abelian(cyclic_group(3), 7))
        self.assertFalse(is_split_abelian(symmetric_group_3(), 7))

    def test_residue_characters(self):
        self.assertEqual(sorted(residue_characters(cyclic_group(2), 5)), [(1, 1), (1, 4)])
        self.assertEqual(len(residue_characters(cyclic_group(3), 7)), 3)


class TestGroupRing(unittest.TestCase):
    def test_multiplication_and_sigma(self):
        c3 = cyclic_group(3)
        g = GroupRingElem.basis(c3, 7, 1)
        self.assertEqual(g * g, GroupRingElem.basis(c3, 7, 2))
        self.assertEqual(sigma(g), GroupRingElem.basis(c3, 7, 2))
        self.assertEqual(g * sigma(g), GroupRingElem.one(c3, 7))

    def test_trace(self):
        c3 = cyclic_group(3)
        x = GroupRingElem(c3, 7, (4, 1, 2))
        self.assertEqual(trace_T(x).value, 4)
        self.assertEqual(trace_T(sigma(x)).value, 4)


class TestGammaLattice(unittest.TestCase):
    def test_validation(self):
        c2 = cyclic_group(2)
        with self.assertRaises(InvarianceError):
            GammaLattice(c2, regular_action(c2, 5), PMatrix.diagonal([1, 2], 5))
        with self.assertRaises(PreconditionError):
            regular_lattice(cyclic_group(3), 3)
        with self.assertRaises(PreconditionError):
            character_action(c2, [1, 2], 5)

    def test_permutation_action(self):
        c2 = cyclic_group(2)
        self.assertEqual(permutation_action(c2, [[0, 1], [1, 0]], 5), regular_action(c2, 5))

    def test_hermitianization_of_regular_module(self):
        c2 = cyclic_group(2)
        L = regular_lattice(c2, 5)
        table = hermitianize(L)
        self.assertEqual(table[(0, 0)], GroupRingElem.one(c2, 5))
        self.assertEqual(table[(0, 1)], GroupRingElem.basis(c2, 5, 1))
        self.assertTrue(is_sesquilinear(L, table))

    def test_random_forms_round_trip(self):
        rng = random.Random(21)
        for group in (cyclic_group(2), cyclic_group(3), symmetric_group_3()):
            L = random_gamma_form(group, 7, rng, pieces=1)
            table = hermitianize(L)
            for (i, j), elem in table.items():
                self.assertEqual(trace_T(elem).value, L.gram[i, j])
            self.assertTrue(is_sesquilinear(L, table))

    def test_two_regular_s3_pieces_are_sesquilinear(self):
        s3 = symmetric_group_3()
        rng = random.Random(30)
        L = twist(orthogonal_sum([regular_lattice(s3, 7)] * 2), random_gl(rng, 12, 7))
        self.assertEqual(L.rank, 12)
        self.assertTrue(is_sesquilinear(L, hermitianize(L)))

    def test_twist_preserves_invariance(self):
        rng = random.Random(4)
        L = random_gamma_form(cyclic_group(2), 5, rng, twisted=False)
        X = random_gl(rng, L.rank, 5)
        M = twist(L, X)
        self.assertEqual(M.gram, L.gram.congruent(X))


class TestCoradicals(unittest.TestCase):
    def test_sign_and_trivial_coradicals(self):
        L, M = sign_coradical_pair(5)
        profile, trivial = corad_with_action(L)
        _, signed = corad_with_action(M)
        self.assertEqual(profile.exponents, (1,))
        self.assertEqual(trivial.matrix(1), [[1]])
        self.assertEqual(signed.matrix(1), [[4]])
        self.assertFalse(kgamma_iso_test(trivial, signed))
        self.assertTrue(coradical_is_semisimple(L))

    def test_isotypic_multiplicities(self):
        module = regular_lattice(cyclic_group(2), 5).residue_module()
        self.assertEqual(isotypic_multiplicities(module), {(1, 1): 1, (1, 4): 1})

    def test_requires_nearly_unimodular(self):
        c2 = cyclic_group(2)
        L = GammaLattice(c2, (PMatrix.identity(2, 5),) * 2, PMatrix.diagonal([1, 25], 5))
        with self.assertRaises(NotNearlyUnimodularError):
            corad_with_action(L)


class TestIsometry(unittest.TestCase):
    def test_twists_are_detected(self):
        rng = random.Random(9)
        for group, p in ((cyclic_group(2), 5), (cyclic_group(3), 7),
                         (direct_product(cyclic_group(2), cyclic_group(2)), 5)):
            L = random_gamma_form(group, p, rng)
            M = twist(L, random_gl(rng, L.rank, p))
            self.assertTrue(gamma_isometric_split_abelian(L, M))

    def test_coradical_separates_forms_with_equal_modules(self):
        c2 = cyclic_group(2)
        gram = PMatrix.diagonal([1, 5], 5)
        identity = PMatrix.identity(2, 5)
        L = GammaLattice(c2, (identity, PMatrix.diagonal([-1, 1], 5)), gram)
        M = GammaLattice(c2, (identity, PMatrix.diagonal([1, -1], 5)), gram)
        self.assertTrue(kgamma_iso_test(L.residue_module(), M.residue_module()))
        self.assertFalse(gamma_isometric_split_abelian(L, M))

    def test_sign_pair_is_not_isometric(self):
        self.assertFalse(gamma_isometric_split_abelian(*sign_coradical_pair(5)))

    def test_requires_split_abelian_group(self):
        L = regular_lattice(symmetric_group_3(), 5)
        with self.assertRaises(PreconditionError):
            gamma_isometric_split_abelian(L, L)


class TestEquivariantLifting(unittest.TestCase):
    def setUp(self):
        self.L = regular_lattice(cyclic_group(2), 5)

    def test_lift_from_residue_seed(self):
        X0 = PMatrix.from_rows([[1, 5], [5, 1]], 5)
        X = equivariant_lift_isometry(self.L, self.L, X0, 8)
        self.assertTrue(is_equivariant_mod(self.L, self.L, X, 8))
        self.assertTrue(X.is_invertible_over_r())
        self.assertTrue(PMatrix.identity(2, 5).congruent(X).congruent_mod(PMatrix.identity(2, 5), 8))

    def test_averaging_fixes_equivariant_maps(self):
        swap = PMatrix.from_rows([[0, 1], [1, 0]], 5)
        self.assertEqual(average_equivariant(self.L, self.L, swap), swap)

    def test_singular_lift_is_an_internal_fault(self):
        X0 = PMatrix.from_rows([[1, 5], [5, 1]], 5)
        with mock.patch.object(data.gamma, "average_equivariant",
                               side_effect=[X0, PMatrix.zeros(2, 2, 5)]):
            with self.assertRaises(InvarianceError):
                equivariant_lift_isometry(self.L, self.L, X0, 8)

    def test_seed_checks(self):
        with self.assertRaises(NotAnIsometryError):
            equivariant_lift_isometry(self.L, self.L, PMatrix.diagonal([1, -1], 5))
        L, _ = sign_coradical_pair(5)
        with self.assertRaises(NotUnimodularError):
            equivariant_lift_isometry(L, L, PMatrix.identity(2, 5))


if __name__ == "__main__":
    unittest.main()
