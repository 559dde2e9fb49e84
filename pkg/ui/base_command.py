import argparse
import json
import re
from typing import Any, Dict, List, Optional, Tuple

from data.enums import ExitCode
from data.exceptions import DocumentError
from utils.document_loader import (LatticeDocument, load_lattice_document, parse_lattice_document,
                                   load_gamma_document, parse_gamma_document)
from utils.settings import ComputeConfig

CommandResult = Tuple[ExitCode, Dict[str, Any]]

DIAGONAL_FORM = re.compile(r"^\s*-?\d+(/\d+)?(\s*,\s*-?\d+(/\d+)?)*\s*$")


class BaseCommand:
    """One CLI subcommand: declares its arguments and returns (exit code, JSON payload)"""
    name = ""
    title = ""
    aliases: List[str] = []

    def add_arguments(self, parser: argparse.ArgumentParser):
        pass

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        raise NotImplementedError

    # --- document helpers ------------------------------------------------------

    @staticmethod
    def _inline(text: str) -> Any:
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentError(f"--form is not valid JSON: {e}")

    @staticmethod
    def _diagonal_form(text: str, prime: Optional[int]) -> Optional[Dict[str, Any]]:
        """`--form 1,3` is the diagonal form <1, 3> at --p"""
        if not DIAGONAL_FORM.match(text):
            return None
        if prime is None:
            raise DocumentError(f"--form {text!r} is a diagonal list and needs --p")
        values = [s.strip() for s in text.split(",")]
        gram = [[values[i] if i == j else 0 for j in range(len(values))] for i in range(len(values))]
        return {"p": prime, "gram": gram}

    def _lattice_inline(self, text: str, prime: Optional[int]) -> Any:
        diagonal = self._diagonal_form(text, prime)
        return diagonal if diagonal is not None else self._inline(text)

    def lattice_documents(self, args: argparse.Namespace) -> List[LatticeDocument]:
        """Documents from --json paths followed by inline --form values (JSON or a diagonal list)"""
        docs = [load_lattice_document(path) for path in (args.json or [])]
        docs += [parse_lattice_document(self._lattice_inline(text, args.p)) for text in (args.form or [])]
        if args.p is not None:
            for doc in docs:
                if doc.prime != args.p:
                    raise DocumentError(f"document prime {doc.prime} differs from --p {args.p}")
        return docs

    def require_documents(self, args: argparse.Namespace, count: int) -> List[LatticeDocument]:
        docs = self.lattice_documents(args)
        if len(docs) != count:
            raise DocumentError(f"{self.name} expects {count} document(s), got {len(docs)}")
        return docs

    def gamma_documents(self, args: argparse.Namespace, count: int):
        docs = [load_gamma_document(path) for path in (args.json or [])]
        docs += [parse_gamma_document(self._inline(text)) for text in (args.form or [])]
        if len(docs) != count:
            raise DocumentError(f"{self.name} expects {count} Gamma-form document(s), got {len(docs)}")
        return docs

    @staticmethod
    def require_prime(args: argparse.Namespace) -> int:
        if args.p is None:
            raise DocumentError("--p is required for this command")
        return args.p
