"""
Test cases for document validation, loading, invariant diffs and output
"""
import io
import json
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from data.exceptions import DocumentError
from data.lattice_forms import GramForm
from data.pmatrix import PMatrix
from ui.notifications import emit, error_payload, describe_differences
from utils.document_loader import (read_json, parse_lattice_document, load_lattice_document,
                                   parse_gamma_document, load_gamma_document, dump_json)
from utils.document_validator import (validate_lattice_document, validate_gamma_document,
                                      validate_documents)
from utils.invariant_diff import compare_forms, summarize_form
from tests.test_utils import write_test_document, remove_test_documents

GOLDEN = {"p": 3, "gram": [[1, 0], [0, 9]]}
SWAP = {"p": 5, "group_table": [[0, 1], [1, 0]], "action": {"1": [[0, 1], [1, 0]]},
        "gram": [[1, 0], [0, 1]]}


class TestLatticeValidation(unittest.TestCase):
    def test_valid_document(self):
        self.assertEqual(validate_lattice_document(GOLDEN), [])
        self.assertEqual(validate_lattice_document({"p": 3, "gram": [["1/9", 0], [0, 1]],
                                                    "basis": [[3, 0], [0, 1]]}), [])

    def test_invalid_documents(self):
        cases = [
            ({"p": 4, "gram": [[1]]}, "p:"),
            ({"p": 2, "gram": [[1]]}, "p:"),
            ({"gram": [[1]]}, "missing key 'p'"),
            ({"p": 3}, "missing key 'gram'"),
            ({"p": 3, "gram": [[1, 0], [0]]}, "rows have different lengths"),
            ({"p": 3, "gram": [[1, 0]]}, "not square"),
            ({"p": 3, "gram": [[True]]}, "gram[0][0]"),
            ({"p": 3, "gram": [["one"]]}, "cannot parse"),
            ({"p": 3, "gram": [[1]], "epsilon": 2}, "epsilon"),
            ({"p": 3, "gram": [[1]], "precision": 0}, "precision"),
            ({"p": 3, "gram": [[1]], "basis": [[1, 0], [0, 1]]}, "basis"),
        ]
        for doc, fragment in cases:
            issues = validate_lattice_document(doc)
            self.assertTrue(issues, doc)
            self.assertTrue(any(fragment in issue for issue in issues), (doc, issues))

    def test_not_an_object(self):
        self.assertEqual(validate_lattice_document([1, 2]), ["document must be a JSON object"])

    def test_summary(self):
        report = validate_documents([GOLDEN, {"p": 9, "gram": [[1]]}])
        self.assertEqual(report['valid'], 1)
        self.assertEqual(report['total'], 2)
        self.assertEqual(report['issues'][0]['document'], 1)


class TestGammaValidation(unittest.TestCase):
    def test_valid_document(self):
        self.assertEqual(validate_gamma_document(SWAP), [])

    def test_invalid_documents(self):
        bad_table = dict(SWAP, group_table=[[0, 2], [1, 0]])
        self.assertTrue(any("group_table[0]" in i for i in validate_gamma_document(bad_table)))
        bad_index = dict(SWAP, action={"7": [[1, 0], [0, 1]]})
        self.assertTrue(any("unknown element" in i for i in validate_gamma_document(bad_index)))
        no_action = {k: v for k, v in SWAP.items() if k != "action"}
        self.assertTrue(validate_gamma_document(no_action))
        report = validate_documents([SWAP, bad_table], kind="gamma")
        self.assertEqual(report['valid'], 1)


class TestLoading(unittest.TestCase):
    def tearDown(self):
        remove_test_documents()

    def test_parse_lattice_document(self):
        doc = parse_lattice_document({"p": 3, "gram": [["1/9", 0], [0, 1]], "precision": 4, "seed": 2})
        self.assertEqual(doc.prime, 3)
        self.assertEqual(doc.epsilon, 1)
        self.assertEqual(doc.precision, 4)
        self.assertEqual(doc.seed, 2)
        self.assertTrue(doc.ambient().restricted_gram().is_integral())
        self.assertEqual(doc.to_json()["gram"], [["1/9", "0"], ["0", "1"]])

    def test_invalid_document_carries_issues(self):
        with self.assertRaises(DocumentError) as ctx:
            parse_lattice_document({"p": 4, "gram": [[1]]})
        self.assertTrue(ctx.exception.issues)

    def test_load_from_files(self):
        path = write_test_document("golden.json", GOLDEN)
        doc = load_lattice_document(path)
        self.assertEqual(doc.form(), GramForm.diagonal([1, 9], 3))
        L = load_gamma_document(write_test_document("swap.json", SWAP))
        self.assertEqual(L.group.order, 2)
        self.assertEqual(L.action[0], PMatrix.identity(2, 5))

    def test_missing_and_malformed_files(self):
        with self.assertRaises(DocumentError):
            read_json(Path(__file__).parent / "temp_files" / "missing.json")
        with self.assertRaises(DocumentError):
            read_json(write_test_document("broken.json", "{not json"))

    def test_gamma_document_needs_every_action(self):
        doc = dict(SWAP, action={})
        with self.assertRaises(DocumentError):
            parse_gamma_document(doc)


class TestInvariantDiff(unittest.TestCase):
    def test_identical_forms(self):
        f = GramForm.diagonal([1, 9], 3)
        self.assertEqual(compare_forms(f, f), {})

    def test_rationally_equal_forms_differ_in_constituents(self):
        changes = compare_forms(GramForm.diagonal([1, 9], 3), GramForm.diagonal([2, 18], 3))
        self.assertEqual(set(changes), {"jordan"})
        self.assertEqual(changes["jordan"]["0"]["old"], [1, "square"])
        self.assertEqual(changes["jordan"]["0"]["new"], [1, "nonsquare"])
        self.assertIn("scale 0: changed", describe_differences(changes))

    def test_coradical_changes(self):
        changes = compare_forms(GramForm.diagonal([1, 3], 3), GramForm.diagonal([1, 9], 3))
        self.assertEqual(changes["coradical"]["exponents"], {"action": "changed", "old": [1], "new": [2]})

    def test_summary(self):
        summary = summarize_form(GramForm.diagonal([1, 9], 3))
        self.assertEqual(summary["rank"], 2)
        self.assertEqual(summary["jordan"], [[0, 1, "square"], [2, 1, "square"]])


class TestOutput(unittest.TestCase):
    def tearDown(self):
        remove_test_documents()

    def test_canonical_json(self):
        self.assertEqual(dump_json({"b": 1, "a": 2}), '{\n  "a": 2,\n  "b": 1\n}')

    def test_emit_writes_the_same_bytes(self):
        stream = io.StringIO()
        out = write_test_document("out.json", "")
        emit({"isometric": True}, out, stream=stream)
        self.assertEqual(Path(out).read_text(encoding='utf-8'), stream.getvalue())
        self.assertEqual(json.loads(stream.getvalue()), {"isometric": True})

    def test_error_payload(self):
        payload = error_payload(DocumentError("bad", ["p: not prime"]))
        self.assertEqual(payload, {"error": "DocumentError", "message": "bad",
                                   "issues": ["p: not prime"]})


if __name__ == "__main__":
    unittest.main()
