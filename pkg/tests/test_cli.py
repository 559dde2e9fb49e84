"""
Test cases for the command-line entry point: exit codes and JSON payloads
"""
import io
import json
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

import main
from tests.test_utils import write_test_document, remove_test_documents


def form(gram, p=3, epsilon=1):
    doc = {"p": p, "gram": gram}
    if epsilon != 1:
        doc["epsilon"] = epsilon
    return json.dumps(doc)


def gamma_form(action, gram, p=5):
    return json.dumps({"p": p, "group_table": [[0, 1], [1, 0]], "action": {"1": action}, "gram": gram})


SWAP = gamma_form([[0, 1], [1, 0]], [[1, 0], [0, 1]])


def run(*argv):
    stream = io.StringIO()
    code = main.main(list(argv), stream=stream)
    return code, json.loads(stream.getvalue())


class TestFormCommands(unittest.TestCase):
    def test_golden(self):
        code, payload = run("golden")
        self.assertEqual(code, 0)
        self.assertTrue(payload["passed"])
        self.assertEqual(payload["failed"], 0)

    def test_isom(self):
        code, payload = run("isom", "--form", form([[1, 0], [0, 3]]), "--form", form([[3, 0], [0, 1]]))
        self.assertEqual(code, 0)
        self.assertTrue(payload["isometric"])
        self.assertEqual(payload["method"], "nearly_unimodular")
        self.assertEqual(payload["differences"], {})

    def test_isom_distinct_forms(self):
        code, payload = run("isom", "--form", form([[1, 0], [0, 9]]), "--form", form([[2, 0], [0, 18]]))
        self.assertEqual(code, 0)
        self.assertFalse(payload["isometric"])
        self.assertTrue(payload["rational_isometric"])
        self.assertEqual(payload["method"], "jordan_oracle")
        self.assertIn("jordan", payload["differences"])

    def test_isom_witness(self):
        code, payload = run("isom", "--witness", "--precision", "6",
                            "--form", form([[1, 0], [0, 1]]), "--form", form([[2, 0], [0, 2]]))
        self.assertEqual(code, 0)
        self.assertEqual(payload["precision"], 6)
        self.assertEqual(len(payload["witness"]), 2)

    def test_refine(self):
        code, payload = run("refine", "--form", form([[1, 0], [0, 9]]))
        self.assertEqual(code, 0)
        self.assertEqual(payload["gram"], [["1", "0"], ["0", "1"]])
        self.assertEqual(payload["iterations"], 1)
        self.assertTrue(payload["nearly_unimodular"])

    def test_corad(self):
        code, payload = run("corad", "--form", form([[1, 0], [0, 9]]))
        self.assertEqual(code, 0)
        self.assertEqual(payload["coradical"], {"exponents": [2], "rank_defect": 0})
        self.assertFalse(payload["nearly_unimodular"])

    def test_classify_alternating(self):
        code, payload = run("classify", "--form", form([[0, 3], [-3, 0]], epsilon=-1))
        self.assertEqual(code, 0)
        self.assertEqual(payload["symplectic_scales"], [1])


class TestInputErrors(unittest.TestCase):
    def test_invalid_document(self):
        code, payload = run("corad", "--form", form([[1]], p=4))
        self.assertEqual(code, 2)
        self.assertEqual(payload["error"], "DocumentError")
        self.assertTrue(payload["issues"])

    def test_prime_mismatch(self):
        code, payload = run("corad", "--p", "5", "--form", form([[1]]))
        self.assertEqual(code, 2)

    def test_missing_file(self):
        code, payload = run("corad", "--json", str(Path(__file__).parent / "temp_files" / "none.json"))
        self.assertEqual(code, 2)

    def test_singular_isom(self):
        code, payload = run("isom", "--form", form([[1, 1], [1, 1]]), "--form", form([[1, 0], [0, 1]]))
        self.assertEqual(code, 2)
        self.assertEqual(payload["error"], "SingularFormError")

    def test_wrong_document_count(self):
        code, _ = run("isom", "--form", form([[1]]))
        self.assertEqual(code, 2)

    def test_unknown_command(self):
        with self.assertRaises(SystemExit) as ctx:
            main.main(["unknown"], stream=io.StringIO())
        self.assertEqual(ctx.exception.code, 2)

    def test_invalid_config(self):
        path = write_test_document("config.json", "{broken")
        try:
            code, payload = run("golden", "--config", path)
        finally:
            remove_test_documents()
        self.assertEqual(code, 2)


class TestOrdersCommand(unittest.TestCase):
    def test_radical_power(self):
        code, payload = run("orders", "radical-power", "--sizes", "1,1", "--n", "2")
        self.assertEqual(code, 0)
        self.assertEqual(payload["power"], [[1, 2], [1, 1]])
        self.assertEqual(payload["residue_dimension"], 2)

    def test_negative_power_uses_conductor_too(self):
        code, payload = run("orders", "radical-power", "--sizes", "1,2", "--n", "-2")
        self.assertEqual(code, 0)
        self.assertEqual(payload["power"], payload["conductor_power"])

    def test_star_violation(self):
        code, payload = run("orders", "star-check", "--pattern", "[[0,1,2],[0,0,1],[0,0,0]]",
                            "--L", "[[0,0,1],[-1,-1,0],[-1,-1,0]]")
        self.assertEqual(code, 0)
        self.assertFalse(payload["holds"])
        self.assertEqual(payload["violation"], [0, 2])

    def test_residue_unitary(self):
        code, payload = run("orders", "residue-unitary", "--p", "5", "--involution", "second")
        self.assertEqual(code, 0)
        self.assertEqual(payload["identity_component"], 4)
        code, _ = run("orders", "residue-unitary")
        self.assertEqual(code, 2)

    def test_decompose(self):
        code, payload = run("orders", "decompose", "--sizes", "2,1", "--idempotent",
                            "[[1,0,0],[0,0,0],[0,0,1]]")
        self.assertEqual(code, 0)
        self.assertEqual(payload["multiplicities"], [1, 1])


class TestTransferCommand(unittest.TestCase):
    def test_descent(self):
        code, payload = run("transfer-descent", "--form", form([[1, 0], [0, 3]]), "--trials", "5")
        self.assertEqual(code, 0)
        self.assertTrue(payload["passed"])
        self.assertEqual(payload["integral_witness_count"], 5)
        self.assertTrue(payload["tau_preserves_radical_powers"])

    def test_transferred_form(self):
        code, payload = run("transfer", "--form", form([[1, 0], [0, 3]]),
                            "--form", form([[1, 3], [3, 3]]), "--trials", "2")
        self.assertEqual(code, 0)
        self.assertEqual(payload["transferred"], [["1", "3"], ["1", "1"]])
        self.assertTrue(payload["in_unit_group"])
        self.assertIn("congruence_class", payload)

    def test_diagonal_form_shorthand(self):
        code, payload = run("transfer-descent", "--p", "3", "--form", "1,3", "--trials", "5")
        self.assertEqual(code, 0)
        self.assertTrue(payload["passed"])
        self.assertEqual(payload["integral_witness_count"], 5)
        code, payload = run("transfer-descent", "--form", "1,3")
        self.assertEqual(code, 2)
        self.assertEqual(payload["error"], "DocumentError")

    def test_output_is_reproducible(self):
        args = ("transfer-descent", "--form", form([[1, 0], [0, 3]]), "--trials", "3", "--seed", "7")
        first = io.StringIO()
        second = io.StringIO()
        main.main(list(args), stream=first)
        main.main(list(args), stream=second)
        self.assertEqual(first.getvalue(), second.getvalue())


class TestGammaCommand(unittest.TestCase):
    def test_roundtrip(self):
        code, payload = run("gamma", "roundtrip", "--form", SWAP)
        self.assertEqual(code, 0)
        self.assertTrue(payload["sesquilinear"])
        self.assertEqual(payload["group_order"], 2)

    def test_sign_pair_not_isometric(self):
        trivial = gamma_form([[1, 0], [0, 1]], [[1, 0], [0, 5]])
        signed = gamma_form([[1, 0], [0, -1]], [[1, 0], [0, 5]])
        code, payload = run("gamma", "isom", "--form", trivial, "--form", signed)
        self.assertEqual(code, 0)
        self.assertFalse(payload["isometric"])

    def test_corad(self):
        signed = gamma_form([[1, 0], [0, -1]], [[1, 0], [0, 5]])
        code, payload = run("gamma", "corad", "--form", signed)
        self.assertEqual(code, 0)
        self.assertTrue(payload["semisimple"])
        self.assertEqual(payload["module"]["dimension"], 1)

    def test_lift(self):
        code, payload = run("gamma", "lift", "--form", SWAP, "--form", SWAP,
                            "--x0", "[[1,5],[5,1]]", "--precision", "6")
        self.assertEqual(code, 0)
        self.assertEqual(payload["precision"], 6)
        code, _ = run("gamma", "lift", "--form", SWAP, "--form", SWAP)
        self.assertEqual(code, 2)


class TestSelftestCommand(unittest.TestCase):
    def test_deterministic_campaigns(self):
        code, payload = run("selftest", "--skip-golden", "--campaign", "residue_unitary",
                            "--campaign", "radical")
        self.assertEqual(code, 0)
        self.assertTrue(payload["passed"])
        self.assertEqual([c["campaign"] for c in payload["campaigns"]], ["residue_unitary", "radical"])

    def test_out_file_matches_stdout(self):
        out = write_test_document("golden_out.json", "")
        try:
            stream = io.StringIO()
            main.main(["golden", "--out", out], stream=stream)
            self.assertEqual(Path(out).read_text(encoding='utf-8'), stream.getvalue())
        finally:
            remove_test_documents()


if __name__ == "__main__":
    unittest.main()
