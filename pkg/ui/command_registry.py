"""
Registry of CLI subcommands and the argparse parser built from it
"""
import argparse
from typing import Dict, List

from ui.base_command import BaseCommand
from ui.forms_commands import CoradCommand, ClassifyCommand, IsomCommand, RefineCommand
from ui.gamma_commands import GammaCommand
from ui.golden_commands import GoldenCommand, SelftestCommand
from ui.orders_commands import OrdersCommand
from ui.transfer_commands import TransferDescentCommand


class CommandRegistry:
    def __init__(self):
        self.commands: List[BaseCommand] = [
            CoradCommand(),
            ClassifyCommand(),
            IsomCommand(),
            RefineCommand(),
            OrdersCommand(),
            TransferDescentCommand(),
            GammaCommand(),
            GoldenCommand(),
            SelftestCommand(),
        ]
        self.by_name: Dict[str, BaseCommand] = {}
        for command in self.commands:
            for key in [command.name, *command.aliases]:
                self.by_name[key] = command

    def get(self, name: str) -> BaseCommand:
        return self.by_name[name]

    def build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--p', type=int, help='Odd prime (must match the documents)')
        common.add_argument('--seed', type=int, default=0, help='Seed for randomized commands')
        common.add_argument('--trials', type=int, help='Override the trial count')
        common.add_argument('--precision', type=int, help='Target precision k for p-adic lifts')
        common.add_argument('--json', action='append', metavar='PATH', help='Input document (repeatable)')
        common.add_argument('--form', action='append', metavar='JSON', help='Inline input document (repeatable)')
        common.add_argument('--out', metavar='PATH', help='Also write the result JSON here')
        common.add_argument('--config', metavar='PATH', help='Alternative config.json')
        common.add_argument('--workers', type=int, help='Worker processes for campaigns')
        common.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR')

        parser = argparse.ArgumentParser(
            prog="padic-lattices",
            description="Exact computations with lattices over p-local rings and hereditary orders")
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
        subparsers.required = True
        for command in self.commands:
            sub = subparsers.add_parser(command.name, aliases=command.aliases, parents=[common],
                                        help=command.title, description=command.title)
            command.add_arguments(sub)
        return parser
