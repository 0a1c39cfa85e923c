"""
Команда dual: наименее благоприятная смесь альтернатив.
"""

import argparse
from typing import TextIO

from core.service import get_contract_service

from ..formatting import render, render_json
from .common import EXIT_OK, add_bound_arguments, add_format_argument, add_instance_arguments, emit, load, resolve_bound


def register(subparsers) -> None:
    parser = subparsers.add_parser("dual", help="наименее благоприятная смесь и минимальный устойчивый бюджет")
    add_instance_arguments(parser)
    add_bound_arguments(parser)
    add_format_argument(parser, choices=("text", "json"))
    parser.set_defaults(handler=cmd_dual)


def cmd_dual(args: argparse.Namespace, out: TextIO) -> int:
    instance = load(args)
    mix = get_contract_service().dual(instance.setting, resolve_bound(args, instance))
    if args.format == "json":
        emit(out, render_json({"instance": instance.source, "models": list(instance.model_names), "mix": mix}))
    else:
        emit(out, render("dual.txt.j2", source=instance.source, names=instance.model_names, mix=mix))
    return EXIT_OK
