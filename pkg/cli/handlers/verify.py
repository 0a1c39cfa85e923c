"""
Команда verify: проверка контракта из CSV на собственных затратах и на векторах из C_b.
"""

import argparse
import logging
from pathlib import Path
from typing import TextIO

from core.exceptions import ArityMismatchError
from core.service import get_contract_service
from core.storage import get_contract_storage

from ..formatting import render, render_json
from .common import (
    EXIT_OK,
    EXIT_VIOLATIONS,
    add_bound_arguments,
    add_format_argument,
    add_instance_arguments,
    emit,
    load,
    resolve_bound,
)

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="проверить контракт на устойчивость к затратам")
    add_instance_arguments(parser)
    parser.add_argument("contract", type=Path, help="CSV файл контракта (outcome,payment)")
    add_bound_arguments(parser)
    parser.add_argument("--samples", type=int, default=None, help="число случайных векторов затрат")
    parser.add_argument("--seed", type=int, default=None, help="зерно генератора (по умолчанию 0)")
    add_format_argument(parser, choices=("text", "json"))
    parser.set_defaults(handler=cmd_verify)


def cmd_verify(args: argparse.Namespace, out: TextIO) -> int:
    """
    Проверяет контракт; код завершения 1, если найдено хотя бы одно нарушение IC.
    """
    instance = load(args)
    contract = get_contract_storage().load_contract(args.contract)
    if contract.m != instance.setting.m:
        raise ArityMismatchError(
            f"В контракте {contract.m} выплат, а в экземпляре {instance.setting.m} исходов"
        )

    report = get_contract_service().verify(
        instance.setting,
        contract,
        bound=resolve_bound(args, instance),
        samples=args.samples,
        seed=args.seed,
    )
    if args.format == "json":
        emit(out, render_json({"instance": instance.source, "passed": report.passed, "report": report}))
    else:
        emit(out, render(
            "verify.txt.j2",
            source=instance.source,
            names=instance.model_names,
            contract=contract,
            report=report,
        ))

    if not report.passed:
        logger.warning(f"Контракт не прошел проверку: {len(report.violations)} нарушений")
        return EXIT_VIOLATIONS
    return EXIT_OK
