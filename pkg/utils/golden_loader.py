"""
Golden vector corpus for the lattice toolkit
Loads data/golden_corpus.json and checks every vector exactly
"""

import json
from pathlib import Path
import logging
from typing import Any, Dict, List, Optional

from data.enums import FindingStatus
from data.exceptions import DocumentError, LatticeError
from data.lattice_forms import (GramForm, coradical, is_nearly_unimodular, isometric_rational,
                                isometric_integral, isometric_integral_nearly_unimodular,
                                integral_similitude_factors)
from data.orders import ValuationIdeal, ValuationPattern, star_check, residue_unitary_enumerate
from data.pmatrix import PMatrix
from data.refine import AmbientForm, refine_with_trace
from utils.reports import Finding, finding

logger = logging.getLogger(__name__)


class GoldenCorpus:
    """Loads and runs the golden vectors"""

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path else Path(__file__).parent.parent / "data" / "golden_corpus.json"
        self.vectors: List[Dict[str, Any]] = []
        self.load()

    def load(self):
        """Load the corpus file"""
        if not self.path.exists():
            raise DocumentError(f"golden corpus not found: {self.path}")
        try:
            with open(self.path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise DocumentError(f"golden corpus is not valid JSON: {e}")
        self.vectors = data.get("vectors", [])
        logger.debug(f"Loaded {len(self.vectors)} golden vectors")

    def get_vector(self, vector_id: str) -> Optional[Dict[str, Any]]:
        return next((v for v in self.vectors if v.get("id") == vector_id), None)

    def run_all(self) -> List[Finding]:
        findings = []
        for vector in self.vectors:
            try:
                findings.extend(self.run_vector(vector))
            except LatticeError as e:
                logger.error(f"❌ Golden vector {vector.get('id')} raised {type(e).__name__}: {e}")
                findings.append(finding(vector.get("id", "?"), False, f"{type(e).__name__}: {e}"))
        return findings

    def run_vector(self, vector: Dict[str, Any]) -> List[Finding]:
        handlers = {
            "pair": self._check_pair,
            "witness": self._check_witness,
            "coradical": self._check_coradical,
            "refine": self._check_refine,
            "star": self._check_star,
            "residue_unitary": self._check_residue_unitary,
        }
        kind = vector.get("kind")
        if kind not in handlers:
            return [Finding(vector.get("id", "?"), FindingStatus.SKIPPED, f"unknown kind {kind!r}")]
        return handlers[kind](vector)

    # --- helpers ---------------------------------------------------------------

    @staticmethod
    def _matrix(entry: Dict[str, Any], p: int) -> PMatrix:
        if "diag" in entry:
            return PMatrix.diagonal(entry["diag"], p)
        return PMatrix.from_rows(entry["gram"], p)

    @staticmethod
    def _expect(vid: str, name: str, actual, expected) -> Finding:
        return finding(f"{vid}:{name}", actual == expected, f"expected {expected}, got {actual}")

    # --- kinds -----------------------------------------------------------------

    def _check_pair(self, v: Dict[str, Any]) -> List[Finding]:
        p, vid, expect = v["p"], v["id"], v["expect"]
        f = GramForm(self._matrix(v["f"], p))
        g = GramForm(self._matrix(v["g"], p))
        results = []
        if "rational_isometric" in expect:
            results.append(self._expect(vid, "rational", isometric_rational(f, g),
                                        expect["rational_isometric"]))
        if "integral_isometric" in expect:
            results.append(self._expect(vid, "integral", isometric_integral(f, g),
                                        expect["integral_isometric"]))
        if "nearly_unimodular" in expect:
            results.append(self._expect(vid, "nearly_unimodular",
                                        [is_nearly_unimodular(f), is_nearly_unimodular(g)],
                                        expect["nearly_unimodular"]))
        if "nearly_unimodular_decision" in expect:
            results.append(self._expect(vid, "decision", isometric_integral_nearly_unimodular(f, g),
                                        expect["nearly_unimodular_decision"]))
        if "integral_similitude" in expect:
            results.append(self._expect(vid, "similitude", bool(integral_similitude_factors(f, g)),
                                        expect["integral_similitude"]))
        return results

    def _check_witness(self, v: Dict[str, Any]) -> List[Finding]:
        p, vid, expect = v["p"], v["id"], v["expect"]
        F, G = self._matrix(v["f"], p), self._matrix(v["g"], p)
        T = PMatrix.from_rows(v["witness"], p)
        return [self._expect(vid, "exact", F.congruent(T) == G, expect["exact"]),
                self._expect(vid, "integral", T.is_invertible_over_r(), expect["integral"])]

    def _check_coradical(self, v: Dict[str, Any]) -> List[Finding]:
        p, vid, expect = v["p"], v["id"], v["expect"]
        f = GramForm(self._matrix(v["f"], p))
        return [self._expect(vid, "exponents", list(coradical(f).exponents), expect["exponents"]),
                self._expect(vid, "nearly_unimodular", is_nearly_unimodular(f),
                             expect["nearly_unimodular"])]

    def _check_refine(self, v: Dict[str, Any]) -> List[Finding]:
        p, vid, expect = v["p"], v["id"], v["expect"]
        result = refine_with_trace(AmbientForm.standard(self._matrix(v["f"], p)))
        gram = result.output.restricted_gram()
        return [self._expect(vid, "gram", gram, PMatrix.from_rows(expect["gram"], p)),
                self._expect(vid, "iterations", result.iterations, expect["iterations"])]

    def _check_star(self, v: Dict[str, Any]) -> List[Finding]:
        vid, expect = v["id"], v["expect"]
        check = star_check(ValuationPattern(v["p"], v["pattern"]), ValuationIdeal(v["L"]))
        results = [self._expect(vid, "holds", check.holds, expect["holds"])]
        if "violation" in expect:
            actual = list(check.violation) if check.violation else None
            results.append(self._expect(vid, "violation", actual, expect["violation"]))
        return results

    def _check_residue_unitary(self, v: Dict[str, Any]) -> List[Finding]:
        p, vid, expect = v["p"], v["id"], v["expect"]
        return [self._expect(vid, involution, list(residue_unitary_enumerate(p, involution=involution)),
                             expect[involution])
                for involution in ("first", "second")]


def run_golden(path: Optional[Path] = None) -> Dict[str, Any]:
    findings = GoldenCorpus(path).run_all()
    failed = [f for f in findings if not f.passed]
    if failed:
        logger.error(f"❌ {len(failed)} golden check(s) failed")
    else:
        logger.info(f"✅ All {len(findings)} golden checks passed")
    return {"checks": len(findings), "failed": len(failed), "passed": not failed,
            "findings": [f.to_json() for f in findings]}
