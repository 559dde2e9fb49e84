"""
The transfer-descent command
"""
import argparse
import logging

from data.enums import ExitCode
from data.exceptions import DocumentError
from data.lattice_forms import oracle_to_json
from data.transfer import (build_context, descent_experiment, transfer_form,
                           congruence_class_invariants, tau_preserves_radical_powers)
from ui.base_command import BaseCommand, CommandResult
from utils.settings import ComputeConfig

logger = logging.getLogger(__name__)


class TransferDescentCommand(BaseCommand):
    name = "transfer-descent"
    title = "Run the valuation descent experiment in the transfer context of a diagonal form"
    aliases = ["transfer"]

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        docs = self.lattice_documents(args)
        if len(docs) not in (1, 2):
            raise DocumentError(f"{self.name} expects a context form and optionally a second form")
        ctx = build_context(docs[0].form())
        trials = args.trials or config.trials_for("descent")
        report = descent_experiment(ctx, trials, args.seed, config.denominator_bound,
                                    config.max_retries)
        payload = {"context": ctx.to_json(), "seed": args.seed,
                   "tau_preserves_radical_powers": tau_preserves_radical_powers(ctx),
                   **report.to_json()}
        if len(docs) == 2:
            a = transfer_form(ctx, docs[1].form())
            payload["transferred"] = a.to_json()
            payload["in_unit_group"] = ctx.is_tau_symmetric_unit(a)
            if payload["in_unit_group"]:
                payload["congruence_class"] = oracle_to_json(congruence_class_invariants(ctx, a))

        if report.asserted and not report.passed:
            payload["failures"] = report.failures
            logger.error(f"❌ Descent experiment failed on {len(report.failures)} trial(s)")
            return ExitCode.PROPERTY_VIOLATION, payload
        logger.info(f"✅ Descent experiment: {report.integral_witness_count}/{report.trials} integral witnesses")
        return ExitCode.SUCCESS, payload
