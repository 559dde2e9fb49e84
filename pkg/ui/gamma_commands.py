"""
The gamma command: hermitian round trip, coradical with action, isometry and lifting
"""
import argparse
import json
import logging

from data.enums import ExitCode
from data.exceptions import DocumentError
from data.gamma import (hermitianize, is_sesquilinear, corad_with_action, coradical_is_semisimple,
                        gamma_isometric_split_abelian, equivariant_lift_isometry,
                        isotypic_multiplicities, is_split_abelian)
from data.pmatrix import PMatrix
from ui.base_command import BaseCommand, CommandResult
from utils.settings import ComputeConfig

logger = logging.getLogger(__name__)

ACTIONS = ("roundtrip", "corad", "isom", "lift")


class GammaCommand(BaseCommand):
    name = "gamma"
    title = "Gamma-invariant forms and their hermitian counterparts"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument('action', choices=ACTIONS)
        parser.add_argument('--x0', help='Residue seed for lift, as JSON rows')

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        if args.action == "roundtrip":
            return ExitCode.SUCCESS, self._roundtrip(self.gamma_documents(args, 1)[0])
        if args.action == "corad":
            return ExitCode.SUCCESS, self._corad(self.gamma_documents(args, 1)[0])
        L, M = self.gamma_documents(args, 2)
        if args.action == "isom":
            isometric = gamma_isometric_split_abelian(L, M, args.seed, config.kgamma_exhaustive_limit,
                                                      config.kgamma_random_tries)
            return ExitCode.SUCCESS, {"p": L.prime, "isometric": isometric}
        return ExitCode.SUCCESS, self._lift(L, M, args, config)

    @staticmethod
    def _roundtrip(L):
        table = hermitianize(L)
        entries = [{"i": i, "j": j, "value": table[(i, j)].to_json()}
                   for (i, j) in sorted(table)]
        # hermitianize raises unless the trace recovers the Gram matrix
        return {"p": L.prime, "rank": L.rank, "group_order": L.group.order,
                "hermitian": entries, "trace_recovers_gram": True,
                "sesquilinear": is_sesquilinear(L, table)}

    @staticmethod
    def _corad(L):
        profile, module = corad_with_action(L)
        payload = {"p": L.prime, "coradical": profile.to_json(), "module": module.to_json(),
                   "semisimple": coradical_is_semisimple(L)}
        if is_split_abelian(L.group, L.prime):
            payload["isotypic"] = [{"character": list(chi), "multiplicity": m}
                                   for chi, m in sorted(isotypic_multiplicities(module).items())]
        return payload

    @staticmethod
    def _lift(L, M, args, config):
        if args.x0 is None:
            raise DocumentError("lift needs --x0")
        try:
            rows = json.loads(args.x0)
        except json.JSONDecodeError as e:
            raise DocumentError(f"--x0 is not valid JSON: {e}")
        precision = args.precision or config.precision
        X = equivariant_lift_isometry(L, M, PMatrix.from_rows(rows, L.prime), precision)
        return {"p": L.prime, "precision": precision, "witness": X.to_json()}
