"""
The orders command: radical powers, the star property and residue unitary groups
"""
import argparse
import json
import logging

from data.enums import ExitCode
from data.exceptions import DocumentError
from data.orders import (BlockOrder, ValuationIdeal, ValuationPattern, radical, radical_power,
                         radical_power_by_conductor, residue_dimension, star_check, star_scan,
                         largest_star_lattice, residue_unitary_enumerate, decompose_projective,
                         SUPPORTED_ORDER)
from data.pmatrix import PMatrix
from ui.base_command import BaseCommand, CommandResult
from utils.settings import ComputeConfig

logger = logging.getLogger(__name__)

ACTIONS = ("radical-power", "star-check", "star-scan", "residue-unitary", "decompose")


def parse_sizes(text: str):
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise DocumentError(f"--sizes must be a comma separated list of integers, got {text!r}")
    if not sizes:
        raise DocumentError("--sizes is empty")
    return sizes


def parse_json_flag(text: str, flag: str):
    if text is None:
        raise DocumentError(f"{flag} is required for this action")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{flag} is not valid JSON: {e}")


class OrdersCommand(BaseCommand):
    name = "orders"
    title = "Hereditary block orders and tiled valuation patterns"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument('action', choices=ACTIONS)
        parser.add_argument('--sizes', help='Block sizes, e.g. 1,2')
        parser.add_argument('--n', type=int, default=1, help='Exponent of the radical power')
        parser.add_argument('--pattern', help='Valuation pattern as a JSON integer matrix')
        parser.add_argument('--L', dest='lattice', help='Two-sided lattice bounds as a JSON integer matrix')
        parser.add_argument('--involution', default='first', choices=('first', 'second'))
        parser.add_argument('--order', default=SUPPORTED_ORDER, help='Order descriptor')
        parser.add_argument('--idempotent', help='Idempotent matrix as JSON rows')

    def _order(self, args: argparse.Namespace):
        p = args.p if args.p is not None else 3
        if args.pattern is not None:
            return ValuationPattern(p, parse_json_flag(args.pattern, "--pattern"))
        if args.sizes is None:
            raise DocumentError("one of --sizes or --pattern is required")
        return BlockOrder(p, parse_sizes(args.sizes))

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        handler = {
            "radical-power": self._radical_power,
            "star-check": self._star_check,
            "star-scan": self._star_scan,
            "residue-unitary": self._residue_unitary,
            "decompose": self._decompose,
        }[args.action]
        return ExitCode.SUCCESS, handler(args, config)

    def _radical_power(self, args, config):
        o = self._order(args)
        payload = {"order": o.to_json(), "n": args.n,
                   "radical": radical(o).to_json(),
                   "power": radical_power(o, args.n).to_json(),
                   "residue_dimension": residue_dimension(o)}
        if args.n < 0:
            payload["conductor_power"] = radical_power_by_conductor(o, args.n).to_json()
        return payload

    def _star_check(self, args, config):
        o = self._order(args)
        if args.lattice is None:
            L = largest_star_lattice(o)
        else:
            L = ValuationIdeal(parse_json_flag(args.lattice, "--L"))
        return {"order": o.to_json(), "L": L.to_json(), **star_check(o, L).to_json()}

    def _star_scan(self, args, config):
        o = self._order(args)
        result = star_scan(o, samples=config.star_scan_samples, seed=args.seed)
        return {"order": o.to_json(), **result}

    def _residue_unitary(self, args, config):
        p = self.require_prime(args)
        component, total = residue_unitary_enumerate(p, args.order, args.involution)
        return {"p": p, "order": args.order, "involution": args.involution,
                "identity_component": component, "total": total}

    def _decompose(self, args, config):
        o = self._order(args)
        if not isinstance(o, BlockOrder):
            raise DocumentError("decompose needs a block order given by --sizes")
        e = PMatrix.from_rows(parse_json_flag(args.idempotent, "--idempotent"), o.prime)
        return {"order": o.to_json(), "multiplicities": decompose_projective(o, e)}
