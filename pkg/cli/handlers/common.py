"""
Общие аргументы и вспомогательные функции обработчиков команд.
"""

import argparse
import logging
from pathlib import Path
from typing import Optional, TextIO

from config.settings import get_settings
from core.ingest import LoadedInstance, load_instance
from core.models import ConstraintKind, Objective, Robustness, SolveRequest
from core.storage import get_contract_storage

logger = logging.getLogger(__name__)

# Коды завершения (описаны в QUICK_START.md)
EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_NOT_IMPLEMENTABLE = 2
EXIT_INPUT_ERROR = 3
EXIT_SOLVER_ERROR = 4
EXIT_UNEXPECTED = 5
EXIT_USAGE = 64

OBJECTIVE_CHOICES = [objective.value for objective in Objective]
CONSTRAINT_CHOICES = [constraint.value for constraint in ConstraintKind]


def add_instance_arguments(parser: argparse.ArgumentParser) -> None:
    """Аргументы загрузки экземпляра: путь, тариф, общая многословность, запас IC."""
    parser.add_argument("instance", type=Path, help="JSON файл экземпляра")
    parser.add_argument(
        "--uniform-verbosity",
        action="store_true",
        default=None,
        help="считать многословность одинаковой у всех моделей (затраты в $ за 1M токенов)",
    )
    parser.add_argument("--energy-rate", type=float, default=None, help="тариф на электроэнергию, $/кВт·ч")
    parser.add_argument("--ic-margin", type=float, default=None, help="запас ε в ограничениях IC")


def add_format_argument(parser: argparse.ArgumentParser, choices=("text", "csv", "json")) -> None:
    parser.add_argument("--format", choices=list(choices), default="text", help="формат вывода")


def add_solve_arguments(parser: argparse.ArgumentParser) -> None:
    """Критерий и ограничение формы контракта (по умолчанию из экземпляра)."""
    parser.add_argument("--objective", choices=OBJECTIVE_CHOICES, default=None, help="критерий оптимальности")
    parser.add_argument("--constraint", choices=CONSTRAINT_CHOICES, default=None, help="ограничение формы")


def add_bound_arguments(parser: argparse.ArgumentParser) -> None:
    """Граница разброса затрат: явная --bound или --from-costs (b = c_n - c_1)."""
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--bound", type=float, default=None, help="граница разброса затрат b")
    group.add_argument("--from-costs", action="store_true", help="взять b = c_n - c_1 из затрат экземпляра")


def load(args: argparse.Namespace) -> LoadedInstance:
    """Загружает экземпляр с учетом флагов командной строки."""
    return load_instance(
        args.instance,
        uniform_verbosity=args.uniform_verbosity,
        energy_rate=args.energy_rate,
    )


def resolve_bound(args: argparse.Namespace, instance: LoadedInstance) -> float:
    """
    Граница b: флаг --bound, затем --from-costs, затем defaults.bound экземпляра, затем c_n - c_1.
    """
    if args.bound is not None:
        return args.bound
    if not args.from_costs and instance.default_bound is not None:
        return instance.default_bound
    return instance.setting.cost_spread


def resolve_margin(args: argparse.Namespace, instance: LoadedInstance) -> float:
    if args.ic_margin is not None:
        return args.ic_margin
    return instance.request.ic_margin


def build_request(
    args: argparse.Namespace,
    instance: LoadedInstance,
    robustness: Optional[Robustness] = None,
) -> SolveRequest:
    """Запрос решения: флаги перекрывают defaults экземпляра."""
    defaults = instance.request
    return SolveRequest(
        objective=Objective(args.objective) if args.objective else defaults.objective,
        constraint=ConstraintKind(args.constraint) if args.constraint else defaults.constraint,
        robustness=robustness or Robustness.aware(),
        ic_margin=resolve_margin(args, instance),
    )


def workers(args: argparse.Namespace) -> int:
    return args.workers or get_settings().workers


def emit(out: TextIO, text: str) -> None:
    out.write(text)
    out.flush()


def save_contract(path: Optional[Path], contract, labels) -> None:
    """Сохраняет контракт в CSV, если задан --output."""
    if path is None:
        return
    saved = get_contract_storage().save_contract(contract, path, labels)
    logger.info(f"Контракт записан в {saved}")
