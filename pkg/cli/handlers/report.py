"""
Команды report и sweep: сводная таблица по одному экземпляру и пакетное решение каталога.
"""

import argparse
from pathlib import Path
from typing import TextIO

from config.settings import get_settings
from core.models import ConstraintKind, Objective, Robustness, SolveRequest
from core.service import get_contract_service
from core.storage import get_contract_storage

from ..formatting import render, render_csv_report, render_csv_sweep, render_json
from .common import (
    EXIT_OK,
    add_bound_arguments,
    add_format_argument,
    add_instance_arguments,
    add_solve_arguments,
    emit,
    load,
    resolve_bound,
    resolve_margin,
    workers,
)


def register(subparsers) -> None:
    """Регистрирует команды report и sweep."""
    report_parser = subparsers.add_parser("report", help="сводная таблица: критерий × форма × режим")
    add_instance_arguments(report_parser)
    add_bound_arguments(report_parser)
    add_format_argument(report_parser)
    report_parser.add_argument("--workers", type=int, default=None, help="число потоков")
    report_parser.add_argument("--output", type=Path, default=None, help="сохранить таблицу в CSV")
    report_parser.set_defaults(handler=cmd_report)

    sweep_parser = subparsers.add_parser("sweep", help="решить все экземпляры каталога")
    sweep_parser.add_argument("directory", type=Path, help="каталог с *.json экземплярами")
    sweep_parser.add_argument(
        "--uniform-verbosity", action="store_true", default=None,
        help="считать многословность одинаковой у всех моделей",
    )
    sweep_parser.add_argument("--ic-margin", type=float, default=None, help="запас ε в ограничениях IC")
    add_solve_arguments(sweep_parser)
    add_bound_arguments(sweep_parser)
    add_format_argument(sweep_parser)
    sweep_parser.add_argument("--workers", type=int, default=None, help="число потоков")
    sweep_parser.set_defaults(handler=cmd_sweep)


def cmd_report(args: argparse.Namespace, out: TextIO) -> int:
    """Строит сводную таблицу; --output дополнительно сохраняет ее в CSV."""
    instance = load(args)
    bound = resolve_bound(args, instance)
    rows = get_contract_service().report(
        instance.setting,
        bound=bound,
        margin=resolve_margin(args, instance),
        workers=workers(args),
    )
    if args.format == "csv":
        emit(out, render_csv_report(rows))
    elif args.format == "json":
        emit(out, render_json({"instance": instance.source, "bound": bound, "rows": rows}))
    else:
        emit(out, render("report.txt.j2", source=instance.source, bound=bound, rows=rows))

    if args.output is not None:
        get_contract_storage().save_report(rows, args.output)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, out: TextIO) -> int:
    """Решает каталог экземпляров; ошибки отдельных файлов попадают в их строки."""
    robustness = Robustness.robust(args.bound) if args.bound is not None else Robustness.aware()
    request = SolveRequest(
        objective=Objective(args.objective) if args.objective else Objective.MIN_PAY,
        constraint=ConstraintKind(args.constraint) if args.constraint else ConstraintKind.UNCONSTRAINED,
        robustness=robustness,
        ic_margin=get_settings().ic_margin if args.ic_margin is None else args.ic_margin,
    )
    rows = get_contract_service().sweep(
        args.directory,
        request,
        from_costs=args.from_costs,
        uniform_verbosity=args.uniform_verbosity,
        workers=workers(args),
    )
    if args.format == "csv":
        emit(out, render_csv_sweep(rows))
    elif args.format == "json":
        emit(out, render_json({"directory": str(args.directory), "rows": rows}))
    else:
        emit(out, render("sweep.txt.j2", rows=rows))
    return EXIT_OK
