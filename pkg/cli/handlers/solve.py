"""
Команды solve и robust: оптимальный контракт при известных затратах и b-устойчивый контракт.
"""

import argparse
import logging
from pathlib import Path
from typing import TextIO

from core.ingest import LoadedInstance
from core.models import Robustness
from core.service import SolveResult, get_contract_service

from ..formatting import render, render_csv_contract, render_json
from .common import (
    EXIT_OK,
    add_bound_arguments,
    add_format_argument,
    add_instance_arguments,
    add_solve_arguments,
    build_request,
    emit,
    load,
    resolve_bound,
    save_contract,
)

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    """Регистрирует команды solve и robust."""
    solve_parser = subparsers.add_parser("solve", help="оптимальный контракт при известных затратах")
    add_instance_arguments(solve_parser)
    add_solve_arguments(solve_parser)
    add_format_argument(solve_parser)
    solve_parser.add_argument("--output", type=Path, default=None, help="сохранить контракт в CSV")
    solve_parser.set_defaults(handler=cmd_solve)

    robust_parser = subparsers.add_parser("robust", help="контракт, устойчивый к затратам с разбросом до b")
    add_instance_arguments(robust_parser)
    add_solve_arguments(robust_parser)
    add_bound_arguments(robust_parser)
    add_format_argument(robust_parser)
    robust_parser.add_argument("--output", type=Path, default=None, help="сохранить контракт в CSV")
    robust_parser.set_defaults(handler=cmd_robust)


def _print_result(out: TextIO, args: argparse.Namespace, instance: LoadedInstance, result: SolveResult) -> None:
    if args.format == "csv":
        emit(out, render_csv_contract(result.contract, instance.outcome_labels))
    elif args.format == "json":
        emit(out, render_json({
            "instance": instance.source,
            "models": list(instance.model_names),
            "outcomes": list(instance.outcome_labels),
            "result": result,
        }))
    else:
        emit(out, render(
            "solve.txt.j2",
            source=instance.source,
            names=instance.model_names,
            labels=instance.outcome_labels,
            costs=instance.setting.costs,
            unit=instance.payment_unit,
            result=result,
        ))
    save_contract(args.output, result.contract, instance.outcome_labels)


def cmd_solve(args: argparse.Namespace, out: TextIO) -> int:
    """Решает экземпляр при известных затратах."""
    instance = load(args)
    request = build_request(args, instance)
    result = get_contract_service().solve(instance.setting, request)
    _print_result(out, args, instance, result)
    return EXIT_OK


def cmd_robust(args: argparse.Namespace, out: TextIO) -> int:
    """Решает экземпляр для всех векторов затрат с разбросом не больше b."""
    instance = load(args)
    bound = resolve_bound(args, instance)
    logger.info(f"Устойчивое решение {instance.source}: b = {bound:g}")
    request = build_request(args, instance, Robustness.robust(bound))
    result = get_contract_service().solve(instance.setting, request)
    _print_result(out, args, instance, result)
    return EXIT_OK
