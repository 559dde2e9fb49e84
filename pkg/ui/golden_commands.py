"""
The golden and selftest commands
"""
import argparse
import logging

from data.enums import ExitCode
from data.exceptions import DocumentError
from ui.base_command import BaseCommand, CommandResult
from utils.campaigns import CAMPAIGNS, run_campaign
from utils.golden_loader import run_golden
from utils.settings import ComputeConfig

logger = logging.getLogger(__name__)


class GoldenCommand(BaseCommand):
    name = "golden"
    title = "Check the golden vector corpus"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument('--corpus', help='Path to an alternative corpus file')

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        result = run_golden(args.corpus)
        code = ExitCode.SUCCESS if result["passed"] else ExitCode.PROPERTY_VIOLATION
        return code, result


class SelftestCommand(BaseCommand):
    name = "selftest"
    title = "Run the property campaigns (small sizes unless --full)"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument('--full', action='store_true',
                            help='Use campaign_trials instead of selftest_trials')
        parser.add_argument('--campaign', action='append', choices=sorted(CAMPAIGNS),
                            help='Run only the named campaign (repeatable)')
        parser.add_argument('--skip-golden', action='store_true')

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        names = args.campaign or list(CAMPAIGNS)
        unknown = [n for n in names if n not in CAMPAIGNS]
        if unknown:
            raise DocumentError(f"unknown campaign(s): {', '.join(unknown)}")

        payload = {"seed": args.seed, "full": args.full, "campaigns": []}
        ok = True
        if not args.skip_golden:
            golden = run_golden()
            payload["golden"] = {"checks": golden["checks"], "failed": golden["failed"]}
            ok = golden["passed"]
        for name in names:
            trials = args.trials or config.trials_for(name, selftest=not args.full)
            report = run_campaign(name, trials, args.seed, config)
            payload["campaigns"].append(report.to_json())
            ok = ok and report.ok
        payload["passed"] = ok
        return (ExitCode.SUCCESS if ok else ExitCode.PROPERTY_VIOLATION), payload
