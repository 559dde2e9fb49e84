"""
Commands on single lattices and pairs: corad, classify, isom, refine
"""
import argparse
import logging

from data.enums import ExitCode
from data.exceptions import PreconditionError, SingularFormError
from data.lattice_forms import (coradical, is_nearly_unimodular, rational_class, oracle_to_json,
                                count_nearly_unimodular_classes, symplectic_reduce,
                                isometric_rational, isometric_integral,
                                isometric_integral_nearly_unimodular, isometric_alternating,
                                isometric_alternating_rational, alternating_witness,
                                build_isometry_witness, integral_similitude_factors)
from data.plocal import format_rational
from data.refine import refine_with_trace
from ui.base_command import BaseCommand, CommandResult
from ui.notifications import describe_differences
from utils.invariant_diff import compare_forms, summarize_form
from utils.settings import ComputeConfig

logger = logging.getLogger(__name__)


class CoradCommand(BaseCommand):
    name = "corad"
    title = "Coradical of a lattice (elementary divisors of P*/f(P))"

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        doc = self.require_documents(args, 1)[0]
        f = doc.form()
        return ExitCode.SUCCESS, {"p": f.prime, "coradical": coradical(f).to_json(),
                                  "nearly_unimodular": is_nearly_unimodular(f)}


class ClassifyCommand(BaseCommand):
    name = "classify"
    title = "Rational and integral invariants of a lattice"

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        f = self.require_documents(args, 1)[0].form()
        payload = {"p": f.prime, "epsilon": f.epsilon}
        if f.epsilon == -1:
            scales, _ = symplectic_reduce(f)
            payload.update({"rank": f.rank, "symplectic_scales": scales,
                            "coradical": coradical(f).to_json()})
            return ExitCode.SUCCESS, payload
        payload.update(summarize_form(f))
        payload["nearly_unimodular"] = is_nearly_unimodular(f)
        if payload["nearly_unimodular"]:
            classes = count_nearly_unimodular_classes(rational_class(f))
            payload["nearly_unimodular_classes"] = [oracle_to_json(c) for c in classes]
        return ExitCode.SUCCESS, payload


class IsomCommand(BaseCommand):
    name = "isom"
    title = "Decide isometry of two lattices"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument('--witness', action='store_true',
                            help='Also construct an explicit isometry (mod p^precision for quadratic forms)')

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        first, second = self.require_documents(args, 2)
        f, g = first.form(), second.form()
        if f.epsilon != g.epsilon:
            raise PreconditionError("cannot compare symmetric and alternating forms")
        if f.is_singular() or g.is_singular():
            raise SingularFormError("isometry is decided for nonsingular forms")
        payload = {"p": f.prime}
        if f.epsilon == -1:
            payload.update({"method": "alternating",
                            "isometric": isometric_alternating(f, g),
                            "rational_isometric": isometric_alternating_rational(f, g)})
            if args.witness and payload["isometric"]:
                payload["witness"] = alternating_witness(f, g).to_json()
            return ExitCode.SUCCESS, payload

        if is_nearly_unimodular(f) and is_nearly_unimodular(g):
            payload["method"] = "nearly_unimodular"
            payload["isometric"] = isometric_integral_nearly_unimodular(f, g)
        else:
            payload["method"] = "jordan_oracle"
            payload["isometric"] = isometric_integral(f, g)
        payload["rational_isometric"] = f.rank == g.rank and isometric_rational(f, g)
        payload["integral_similitude_factors"] = [format_rational(x)
                                                  for x in integral_similitude_factors(f, g)]
        differences = compare_forms(f, g)
        payload["differences"] = differences
        if differences:
            logger.info(describe_differences(differences))
        if args.witness and payload["isometric"] and payload["method"] == "nearly_unimodular":
            precision = args.precision or config.precision
            payload["witness"] = build_isometry_witness(f, g, precision).to_json()
            payload["precision"] = precision
        return ExitCode.SUCCESS, payload


class RefineCommand(BaseCommand):
    name = "refine"
    title = "Refine a lattice in a rational quadratic space to a nearly unimodular one"

    def run(self, args: argparse.Namespace, config: ComputeConfig) -> CommandResult:
        doc = self.require_documents(args, 1)[0]
        result = refine_with_trace(doc.ambient())
        out = result.output
        return ExitCode.SUCCESS, {
            "p": out.prime,
            "gram": out.restricted_gram().to_json(),
            "basis": out.basis.to_json(),
            "iterations": result.iterations,
            "initial_colength": result.initial_colength,
            "trace": [step.to_json() for step in result.trace],
            "nearly_unimodular": is_nearly_unimodular(out.restricted_form()),
        }
