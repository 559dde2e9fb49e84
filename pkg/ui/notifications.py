"""
Output of command results: canonical JSON on stdout, optional copy to --out
"""
from pathlib import Path
from typing import Any, Dict, Optional
import logging
import sys

from utils.document_loader import dump_json

logger = logging.getLogger(__name__)


def emit(payload: Dict[str, Any], out: Optional[str] = None, stream=None):
    """Write the payload to stdout and, when requested, the same bytes to a file"""
    text = dump_json(payload) + "\n"
    (stream or sys.stdout).write(text)
    if out:
        Path(out).write_text(text, encoding='utf-8')
        logger.info(f"💾 Wrote result to {out}")


def error_payload(exc: BaseException) -> Dict[str, Any]:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    issues = getattr(exc, "issues", None)
    if issues:
        payload["issues"] = list(issues)
    return payload


def describe_differences(changes: Dict[str, Any]) -> str:
    """Human-readable lines for an invariant diff, for the log"""
    details = []
    if changes.get('coradical'):
        details.append("Coradical changes:")
        for key, change in changes['coradical'].items():
            details.append(f"- {key}: {change['old']} -> {change['new']}")

    if changes.get('rational_class'):
        details.append("Rational class changes:")
        for key, change in changes['rational_class'].items():
            details.append(f"- {key}: {change['old']} -> {change['new']}")

    if changes.get('jordan'):
        details.append("Jordan constituent changes:")
        for scale, change in changes['jordan'].items():
            details.append(f"- scale {scale}: {change['action']}")

    return "\n".join(details)
