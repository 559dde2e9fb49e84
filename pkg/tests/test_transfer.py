"""
Test cases for the transfer context, morphism triples and the descent experiment
"""
import random
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from data.enums import WitnessKind
from data.exceptions import PreconditionError, NotAnIsometryError
from data.lattice_forms import GramForm
from data.pmatrix import PMatrix
from data.transfer import (MorphismTriple, CongruenceInstance, build_context, transfer_form,
                           untransfer, tau_preserves_radical_powers, morphism_iso_test,
                           morphism_isomorphism, congruence_verify, random_unitary,
                           random_order_unit, claim9_violations, claim11_violations,
                           descent_experiment, congruence_class_invariants, tau_congruent)
from utils.random_forms import random_morphism, transported_morphism, random_transfer_diagonal


def context(values, p=3):
    return build_context(GramForm.diagonal(values, p))


class TestContext(unittest.TestCase):
    def test_build(self):
        ctx = context([1, 3])
        self.assertEqual((ctx.n0, ctx.n1), (1, 1))
        self.assertEqual(ctx.order.sizes, (1, 1))
        self.assertTrue(ctx.anisotropic)
        self.assertEqual(ctx.bound(0, 1), 1)
        self.assertEqual(ctx.bound(1, 0), 0)

    def test_single_block(self):
        ctx = context([1, 1])
        self.assertEqual(ctx.order.sizes, (2,))
        self.assertTrue(ctx.anisotropic)

    def test_isotropic_residue_form(self):
        self.assertFalse(context([1, -1]).anisotropic)

    def test_preconditions(self):
        for values in ([3, 1], [1, 9]):
            with self.assertRaises(PreconditionError):
                context(values)
        with self.assertRaises(PreconditionError):
            build_context(GramForm.from_rows([[1, 1], [1, 3]], 3))

    def test_tau_is_compatible_with_the_order(self):
        for values in ([1, 3], [1, 1, 3], [1, 2, 3, 6]):
            self.assertTrue(tau_preserves_radical_powers(context(values)))


class TestTransfer(unittest.TestCase):
    def setUp(self):
        self.ctx = context([1, 3])
        self.h = PMatrix.from_rows([[1, 3], [3, 3]], 3)

    def test_transfer_form(self):
        a = transfer_form(self.ctx, self.h)
        self.assertEqual(a, PMatrix.from_rows([[1, 3], [1, 1]], 3))
        self.assertTrue(self.ctx.is_tau_symmetric_unit(a))
        self.assertEqual(untransfer(self.ctx, a).gram, self.h)

    def test_congruence_classes(self):
        a = transfer_form(self.ctx, self.h)
        identity = PMatrix.identity(2, 3)
        self.assertTrue(tau_congruent(self.ctx, a, identity))
        self.assertEqual(congruence_class_invariants(self.ctx, identity),
                         congruence_class_invariants(self.ctx, a))

    def test_instance_requires_symmetric_unit(self):
        with self.assertRaises(PreconditionError):
            CongruenceInstance(self.ctx, PMatrix.from_rows([[1, 3], [0, 1]], 3),
                               PMatrix.identity(2, 3))

    def test_congruence_verify(self):
        identity = PMatrix.identity(2, 3)
        inst = CongruenceInstance(self.ctx, identity, identity)
        self.assertEqual(congruence_verify(inst), WitnessKind.INTEGRAL)
        wrong = CongruenceInstance(self.ctx, identity, identity.scaled(2))
        self.assertEqual(congruence_verify(wrong), WitnessKind.NOT_WITNESS)


class TestUnitaries(unittest.TestCase):
    def test_cayley_transform(self):
        ctx = context([1, 3])
        S = PMatrix.from_rows([[0, 1], [-1, 0]], 3)
        u = random_unitary(ctx, 0, antisymmetric=S)
        self.assertEqual(ctx.tau(u) @ u, PMatrix.identity(2, 3))

    def test_random_unitaries_are_unitary(self):
        ctx = context([1, 1, 3])
        for seed in range(5):
            u = random_unitary(ctx, seed)
            self.assertEqual(ctx.tau(u) @ u, PMatrix.identity(3, 3))

    def test_random_order_unit(self):
        ctx = context([1, 3, 6], 5)
        x = random_order_unit(ctx, random.Random(0))
        self.assertTrue(ctx.is_order_unit(x))


class TestDescent(unittest.TestCase):
    def test_anisotropic_contexts_descend(self):
        for values, p in (([1, 3], 3), ([1, 1, 3], 3), ([1, 2, 5, 10], 5)):
            report = descent_experiment(context(values, p), 8, seed=1)
            self.assertTrue(report.asserted)
            self.assertTrue(report.passed, report.failures)
            self.assertEqual(report.integral_witness_count, 8)
            self.assertEqual(report.claim9_violations, 0)
            self.assertEqual(report.claim11_violations, 0)

    def test_random_contexts(self):
        rng = random.Random(8)
        for _ in range(4):
            p = rng.choice([3, 5])
            report = descent_experiment(context(random_transfer_diagonal(rng, p), p), 4, seed=rng.randrange(100))
            self.assertTrue(report.passed)

    def test_isotropic_control_is_not_asserted(self):
        report = descent_experiment(context([1, -1]), 5, seed=0)
        self.assertFalse(report.asserted)
        self.assertTrue(report.passed)

    def test_large_constituent_rejected(self):
        with self.assertRaises(PreconditionError):
            descent_experiment(context([1, 1, 1]), 1, seed=0)

    def test_valuation_laws_on_order_units(self):
        ctx = context([1, 3])
        rng = random.Random(3)
        for _ in range(10):
            x = random_order_unit(ctx, rng)
            self.assertEqual(claim9_violations(ctx, x), 0)
            self.assertEqual(claim11_violations(ctx, x), 0)

    def test_reports_merge(self):
        ctx = context([1, 3])
        merged = descent_experiment(ctx, 3, seed=0).merge(descent_experiment(ctx, 2, seed=1))
        self.assertEqual(merged.trials, 5)
        self.assertEqual(merged.to_json()["integral_witness_count"], 5)


class TestMorphisms(unittest.TestCase):
    def test_known_pair(self):
        t = MorphismTriple.from_matrix(PMatrix.diagonal([3, 1], 3))
        u = MorphismTriple.from_matrix(PMatrix.diagonal([1, 3], 3))
        self.assertTrue(morphism_iso_test(t, u))
        phi, psi = morphism_isomorphism(t, u)
        self.assertEqual(psi @ t.map, u.map @ phi)

    def test_distinct_cokernels(self):
        t = MorphismTriple.from_matrix(PMatrix.diagonal([3, 1], 3))
        u = MorphismTriple.from_matrix(PMatrix.diagonal([9, 1], 3))
        self.assertFalse(morphism_iso_test(t, u))
        with self.assertRaises(NotAnIsometryError):
            morphism_isomorphism(t, u)

    def test_validation(self):
        with self.assertRaises(PreconditionError):
            MorphismTriple.from_matrix(PMatrix.from_rows([["1/3", 0]], 3))

    def test_transported_triples_are_isomorphic(self):
        rng = random.Random(12)
        for _ in range(20):
            t = random_morphism(rng, rng.choice([3, 5, 7]))
            u = transported_morphism(rng, t)
            self.assertTrue(morphism_iso_test(t, u))
            phi, psi = morphism_isomorphism(t, u)
            self.assertTrue(phi.is_invertible_over_r())
            self.assertTrue(psi.is_invertible_over_r())
            self.assertEqual(psi @ t.map, u.map @ phi)


if __name__ == "__main__":
    unittest.main()
