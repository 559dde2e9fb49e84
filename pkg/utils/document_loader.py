"""
Loads lattice and Gamma-form documents from JSON files
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import json
import logging

from data.exceptions import DocumentError
from data.gamma import FiniteGroup, GammaLattice
from data.lattice_forms import GramForm
from data.pmatrix import PMatrix
from data.refine import AmbientForm
from utils.document_validator import validate_lattice_document, validate_gamma_document

logger = logging.getLogger(__name__)


@dataclass
class LatticeDocument:
    """Parsed lattice document; gram may be rational when the document is a refine input"""
    prime: int
    epsilon: int
    gram: PMatrix
    basis: Optional[PMatrix] = None
    precision: Optional[int] = None
    seed: Optional[int] = None

    def form(self) -> GramForm:
        return GramForm(self.gram, self.epsilon)

    def ambient(self) -> AmbientForm:
        return AmbientForm.standard(self.gram, self.basis)

    def to_json(self) -> Dict[str, Any]:
        doc = {"p": self.prime, "epsilon": self.epsilon, "gram": self.gram.to_json()}
        if self.basis is not None:
            doc["basis"] = self.basis.to_json()
        return doc


def read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    if not path.exists():
        raise DocumentError(f"file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path} is not valid JSON: {e}")


def parse_lattice_document(doc: Any) -> LatticeDocument:
    issues = validate_lattice_document(doc)
    if issues:
        raise DocumentError(f"invalid lattice document: {issues[0]}", issues)
    p = doc["p"]
    basis = PMatrix.from_rows(doc["basis"], p) if "basis" in doc else None
    return LatticeDocument(p, doc.get("epsilon", 1), PMatrix.from_rows(doc["gram"], p), basis,
                           doc.get("precision"), doc.get("seed"))


def load_lattice_document(path: Union[str, Path]) -> LatticeDocument:
    document = parse_lattice_document(read_json(path))
    logger.debug(f"Loaded rank-{document.gram.nrows} lattice document from {path}")
    return document


def load_lattice_documents(paths: List[Union[str, Path]]) -> List[LatticeDocument]:
    return [load_lattice_document(p) for p in paths]


def parse_gamma_document(doc: Any) -> GammaLattice:
    issues = validate_gamma_document(doc)
    if issues:
        raise DocumentError(f"invalid Gamma-form document: {issues[0]}", issues)
    p = doc["p"]
    group = FiniteGroup.from_table(doc["group_table"])
    gram = PMatrix.from_rows(doc["gram"], p)
    identity = PMatrix.identity(gram.nrows, p)
    action = []
    for g in group.elements():
        rows = doc["action"].get(str(g))
        if rows is None:
            if g != group.identity:
                raise DocumentError(f"action of element {g} is missing")
            action.append(identity)
        else:
            action.append(PMatrix.from_rows(rows, p))
    return GammaLattice(group, tuple(action), gram)


def load_gamma_document(path: Union[str, Path]) -> GammaLattice:
    lattice = parse_gamma_document(read_json(path))
    logger.debug(f"Loaded Gamma-form of rank {lattice.rank} over a group of order {lattice.group.order}")
    return lattice


def dump_json(payload: Any) -> str:
    """Canonical output: sorted keys, fixed indentation"""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
