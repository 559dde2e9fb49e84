#!/usr/bin/env python3
"""
Command-line entry point: exact computations with lattices over p-local rings

stdout carries exactly one JSON object per run; logs go to stderr.
Exit codes: 0 success, 1 property violation, 2 input error.
"""
import json
import logging
import sys
from typing import List, Optional

from data.enums import ExitCode
from data.exceptions import LatticeError
from ui.command_registry import CommandRegistry
from ui.notifications import emit, error_payload
from utils.settings import load_config

logger = logging.getLogger(__name__)


def setup_logging(level: str):
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO),
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
                        stream=sys.stderr)


def main(argv: Optional[List[str]] = None, stream=None) -> int:
    registry = CommandRegistry()
    args = registry.build_parser().parse_args(argv)
    try:
        config = load_config(args.config).with_overrides(precision=args.precision,
                                                         workers=args.workers,
                                                         log_level=args.log_level)
    except LatticeError as e:
        setup_logging(args.log_level or "INFO")
        logger.error(f"❌ {e}")
        emit(error_payload(e), stream=stream)
        return ExitCode.INPUT_ERROR
    setup_logging(config.log_level)

    command = registry.get(args.command)
    logger.debug(f"Running {command.name} with seed {args.seed}")
    try:
        code, payload = command.run(args, config)
    except (LatticeError, FileNotFoundError, json.JSONDecodeError) as e:
        logger.error(f"❌ {command.name}: {type(e).__name__}: {e}")
        emit(error_payload(e), stream=stream)
        return ExitCode.INPUT_ERROR
    emit(payload, args.out, stream=stream)
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
