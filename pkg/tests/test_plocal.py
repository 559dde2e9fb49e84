"""
Test cases for p-local scalars, matrices and residue-field linear algebra
"""
import sys
import unittest
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from data.exceptions import InvalidPrimeError, NotAUnitError, ZeroArgumentError, DocumentError
from data.plocal import (INFINITY, check_prime, to_fraction, format_rational, valuation, unit_part,
                         residue, reduce_mod, legendre, hilbert_symbol, nonresidue, PLocalNumber)
from data.pmatrix import PMatrix
from data import residue_field as kfield


class TestScalars(unittest.TestCase):
    def test_check_prime(self):
        self.assertEqual(check_prime(5), 5)
        for bad in (2, 9, 1, True):
            with self.assertRaises(InvalidPrimeError):
                check_prime(bad)

    def test_valuation(self):
        self.assertEqual(valuation(18, 3), 2)
        self.assertEqual(valuation(Fraction(1, 9), 3), -2)
        self.assertEqual(valuation(Fraction(5, 7), 3), 0)
        self.assertEqual(valuation(0, 3), INFINITY)

    def test_unit_part(self):
        self.assertEqual(unit_part(Fraction(18, 5), 3), Fraction(2, 5))
        with self.assertRaises(ZeroArgumentError):
            unit_part(0, 3)

    def test_residue_and_reduction(self):
        self.assertEqual(residue(Fraction(1, 2), 5), 3)
        self.assertEqual(reduce_mod(-1, 3, 2), 8)
        with self.assertRaises(NotAUnitError):
            residue(Fraction(1, 3), 3)

    def test_parse_and_format(self):
        self.assertEqual(to_fraction("1/3"), Fraction(1, 3))
        self.assertEqual(to_fraction(-4), Fraction(-4))
        self.assertEqual(format_rational(Fraction(-2, 6)), "-1/3")
        self.assertEqual(format_rational(Fraction(7)), "7")
        for bad in ("x", "1/0", True, 1.5):
            with self.assertRaises(DocumentError):
                to_fraction(bad)

    def test_legendre(self):
        self.assertEqual(legendre(2, 3), -1)
        self.assertEqual(legendre(4, 5), 1)
        self.assertEqual(legendre(Fraction(1, 2), 7), 1)
        with self.assertRaises(NotAUnitError):
            legendre(3, 3)

    def test_hilbert_symbol(self):
        self.assertEqual(hilbert_symbol(3, 3, 3), -1)
        self.assertEqual(hilbert_symbol(-1, -3, 3), -1)
        self.assertEqual(hilbert_symbol(1, 3, 3), 1)
        self.assertEqual(hilbert_symbol(2, 5, 3), 1)
        with self.assertRaises(ZeroArgumentError):
            hilbert_symbol(0, 1, 3)

    def test_hilbert_symbol_is_symmetric(self):
        values = [1, 2, 3, 6, Fraction(1, 3), 9, -1, -3]
        for a in values:
            for b in values:
                self.assertEqual(hilbert_symbol(a, b, 3), hilbert_symbol(b, a, 3))

    def test_nonresidue(self):
        self.assertEqual(nonresidue(3), 2)
        self.assertEqual(nonresidue(7), 3)

    def test_plocal_number(self):
        x = PLocalNumber(Fraction(6, 5), 3)
        self.assertEqual(x.valuation, 1)
        self.assertTrue(x.is_integral())
        self.assertFalse(x.is_unit())


class TestPMatrix(unittest.TestCase):
    def test_arithmetic(self):
        A = PMatrix.from_rows([[1, 2], [3, 4]], 3)
        B = PMatrix.identity(2, 3)
        self.assertEqual(A @ B, A)
        self.assertEqual((A + B)[0, 0], Fraction(2))
        self.assertEqual(A.det(), Fraction(-2))
        self.assertEqual(A @ A.inverse(), B)

    def test_congruent(self):
        G = PMatrix.diagonal([1, 9], 3)
        T = PMatrix.from_rows([[1, 3], ["1/3", -1]], 3)
        self.assertEqual(G.congruent(T), PMatrix.diagonal([2, 18], 3))

    def test_valuation_helpers(self):
        M = PMatrix.from_rows([[3, "1/3"], [0, 9]], 3)
        self.assertEqual(M.min_valuation(), -1)
        self.assertFalse(M.is_integral())
        U = PMatrix.from_rows([[1, 3], [0, 2]], 3)
        self.assertTrue(U.is_invertible_over_r())
        self.assertFalse(PMatrix.diagonal([1, 3], 3).is_invertible_over_r())

    def test_reduction(self):
        M = PMatrix.from_rows([[10, -1], [4, "1/2"]], 3)
        self.assertEqual(M.residue_rows(), [[1, 2], [1, 2]])
        self.assertTrue(M.congruent_mod(M.reduced(2), 2))

    def test_column_space(self):
        M = PMatrix.from_rows([[1, 2], [2, 4]], 3)
        self.assertEqual(M.rank(), 1)
        self.assertEqual(M.column_space().ncols, 1)

    def test_to_json(self):
        self.assertEqual(PMatrix.from_rows([["2/6", 1]], 5).to_json(), [["1/3", "1"]])


class TestResidueField(unittest.TestCase):
    def test_rank_and_nullspace(self):
        rows = [[1, 2], [2, 4]]
        self.assertEqual(kfield.rank(rows, 5), 1)
        kernel = kfield.nullspace(rows, 2, 5)
        self.assertEqual(len(kernel), 1)
        v = kernel[0]
        self.assertEqual((v[0] + 2 * v[1]) % 5, 0)

    def test_inverse(self):
        rows = [[1, 1], [0, 1]]
        inv = kfield.inverse(rows, 3)
        self.assertEqual(kfield.matmul(rows, inv, 3), kfield.identity(2))
        self.assertTrue(kfield.determinant_nonzero(rows, 3))
        self.assertFalse(kfield.determinant_nonzero([[1, 2], [2, 1]], 3))


if __name__ == "__main__":
    unittest.main()
