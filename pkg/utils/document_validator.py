"""
Schema checks for lattice and Gamma-form JSON documents
"""

import logging
from typing import Any, Dict, List

from data.exceptions import LatticeError
from data.plocal import check_prime, to_fraction

logger = logging.getLogger(__name__)


def validate_rational(value: Any, where: str) -> List[str]:
    """A rational is an int or a 'num/den' string"""
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        return [f"{where}: expected an integer or 'num/den' string, got {value!r}"]
    try:
        to_fraction(value)
    except (LatticeError, ValueError, ZeroDivisionError):
        return [f"{where}: cannot parse rational {value!r}"]
    return []


def validate_matrix(value: Any, where: str, square: bool = True) -> List[str]:
    """Non-empty list of equal-length rows of rationals"""
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        return [f"{where}: expected a non-empty list of rows"]
    issues = []
    widths = {len(r) for r in value}
    if len(widths) != 1:
        issues.append(f"{where}: rows have different lengths")
    elif square and widths != {len(value)}:
        issues.append(f"{where}: matrix is not square")
    for i, row in enumerate(value):
        for j, x in enumerate(row):
            issues.extend(validate_rational(x, f"{where}[{i}][{j}]"))
    return issues


def validate_prime(doc: Dict) -> List[str]:
    if "p" not in doc:
        return ["missing key 'p'"]
    p = doc["p"]
    if isinstance(p, bool) or not isinstance(p, int):
        return [f"p: expected an integer, got {p!r}"]
    try:
        check_prime(p)
    except LatticeError as e:
        return [f"p: {e}"]
    return []


def validate_lattice_document(doc: Any) -> List[str]:
    """Issues found in {"p", "epsilon"?, "gram", "basis"?, "precision"?, "seed"?}"""
    if not isinstance(doc, dict):
        return ["document must be a JSON object"]
    issues = validate_prime(doc)
    if doc.get("epsilon", 1) not in (1, -1):
        issues.append(f"epsilon: expected 1 or -1, got {doc.get('epsilon')!r}")
    if "gram" not in doc:
        issues.append("missing key 'gram'")
    else:
        issues.extend(validate_matrix(doc["gram"], "gram"))
    if "basis" in doc:
        issues.extend(validate_matrix(doc["basis"], "basis"))
        if not issues and len(doc["basis"]) != len(doc["gram"]):
            issues.append("basis: size differs from gram")
    for key in ("precision", "seed"):
        if key in doc and (isinstance(doc[key], bool) or not isinstance(doc[key], int)):
            issues.append(f"{key}: expected an integer")
    if "precision" in doc and isinstance(doc["precision"], int) and doc["precision"] < 1:
        issues.append("precision: must be at least 1")
    return issues


def validate_gamma_document(doc: Any) -> List[str]:
    """Issues found in {"p", "group_table", "action": {index: matrix}, "gram"}"""
    if not isinstance(doc, dict):
        return ["document must be a JSON object"]
    issues = validate_prime(doc)
    table = doc.get("group_table")
    if not isinstance(table, list) or not table or not all(isinstance(r, list) for r in table):
        issues.append("group_table: expected a non-empty list of rows")
        n = 0
    else:
        n = len(table)
        for i, row in enumerate(table):
            if len(row) != n or any(isinstance(x, bool) or not isinstance(x, int)
                                    or not 0 <= x < n for x in row):
                issues.append(f"group_table[{i}]: expected {n} indices in [0, {n})")
    if "gram" not in doc:
        issues.append("missing key 'gram'")
    else:
        issues.extend(validate_matrix(doc["gram"], "gram"))
    action = doc.get("action")
    if not isinstance(action, dict):
        issues.append("action: expected an object mapping element index to matrix")
        return issues
    for key, matrix in action.items():
        if not str(key).isdigit() or (n and int(key) >= n):
            issues.append(f"action: unknown element index {key!r}")
            continue
        issues.extend(validate_matrix(matrix, f"action[{key}]"))
    return issues


def validate_documents(docs: List[Any], kind: str = "lattice") -> Dict:
    """Summary report over several documents"""
    check = validate_gamma_document if kind == "gamma" else validate_lattice_document
    report = {'valid': 0, 'issues': [], 'total': len(docs)}
    for index, doc in enumerate(docs):
        issues = check(doc)
        if not issues:
            report['valid'] += 1
        else:
            report['issues'].append({'document': index, 'issues': issues})
    logger.debug(f"Validated {report['valid']}/{report['total']} {kind} documents")
    return report
