"""
Вывод результатов команд: текстовые таблицы на шаблонах Jinja2, CSV и JSON.
"""

import math
from pathlib import Path
from typing import Any, Dict, Optional

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from config.settings import get_settings
from core.storage import get_contract_storage

TEMPLATES_DIR = Path(__file__).parent / "templates"


def _fixed(value: Optional[float], precision: Optional[int] = None) -> str:
    """Фиксированное число знаков после запятой; None - прочерк."""
    if value is None:
        return "-"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    precision = get_settings().table_precision if precision is None else precision
    return f"{value:.{precision}f}"


def _percent(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:+.1f}%"


def _create_environment() -> Environment:
    env = Environment(
        loader=FileSystemLoader(str(TEMPLATES_DIR)),
        undefined=StrictUndefined,
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        autoescape=False,
    )
    env.filters["fixed"] = _fixed
    env.filters["percent"] = _percent
    return env


templates = _create_environment()


def render(template_name: str, **context: Any) -> str:
    """Рендерит текстовый шаблон из cli/templates."""
    return templates.get_template(template_name).render(**context)


def render_csv_contract(contract, labels) -> str:
    return get_contract_storage().contract_to_csv(contract, labels)


def render_csv_report(rows) -> str:
    return get_contract_storage().report_to_csv(rows)


def render_json(data: Dict[str, Any]) -> str:
    return get_contract_storage().to_json(data) + "\n"


def render_csv_sweep(rows) -> str:
    return get_contract_storage().sweep_to_csv(rows)
