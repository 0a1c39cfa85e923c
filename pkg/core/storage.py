"""
Модуль для работы с файлами контрактов и отчетов.

CSV контракта имеет колонки outcome,payment; все числа записываются
с 17 значащими цифрами, так что чтение восстанавливает значения точно.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel

from .exceptions import StorageError
from .models import Contract, ReportRow

logger = logging.getLogger(__name__)

CONTRACT_COLUMNS = ("outcome", "payment")
REPORT_COLUMNS = (
    "objective",
    "constraint",
    "robustness",
    "expected_pay",
    "budget",
    "stdev",
    "price_of_robustness_percent",
    "price_of_monotonicity_percent",
    "status",
)
SWEEP_COLUMNS = ("name", "status", "expected_pay", "budget", "stdev", "message")


def format_float(value: Optional[float]) -> str:
    """Полная точность для машинного чтения: 17 значащих цифр."""
    if value is None:
        return ""
    return f"{value:.17g}"


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, dict):
        return {key: _to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(item) for item in value]
    return value


class ContractStorage:
    """Чтение и запись контрактов и отчетов."""

    def __init__(self, base_path: Optional[Path] = None):
        """
        Инициализация хранилища.

        Args:
            base_path: Базовый путь для относительных имен файлов (по умолчанию текущая директория)
        """
        self.base_path = Path(base_path) if base_path is not None else Path.cwd()

    def _resolve(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.base_path / path

    def contract_to_csv(self, contract: Contract, labels: Optional[Sequence[str]] = None) -> str:
        """Сериализует контракт в CSV (outcome,payment)."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CONTRACT_COLUMNS)
        for j, payment in enumerate(contract.payments):
            label = labels[j] if labels is not None else str(j)
            writer.writerow([label, format_float(payment)])
        return buffer.getvalue()

    def report_to_csv(self, rows: Iterable[ReportRow]) -> str:
        """Сериализует строки сводной таблицы в CSV."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow([
                row.objective.value,
                row.constraint.value,
                row.robustness.value,
                format_float(row.expected_pay),
                format_float(row.budget),
                format_float(row.stdev),
                format_float(row.price_of_robustness_percent),
                format_float(row.price_of_monotonicity_percent),
                row.status,
            ])
        return buffer.getvalue()

    def sweep_to_csv(self, rows: Iterable[Any]) -> str:
        """Сериализует итоги пакетного решения (name,status,expected_pay,budget,stdev,message)."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([
                row.name,
                row.status,
                format_float(row.expected_pay),
                format_float(row.budget),
                format_float(row.stdev),
                row.message or "",
            ])
        return buffer.getvalue()

    def to_json(self, data: Any) -> str:
        """Сериализует модели и словари в JSON с фиксированным порядком ключей."""
        return json.dumps(_to_jsonable(data), ensure_ascii=False, indent=2, sort_keys=True)

    def save_contract(self, contract: Contract, path: Union[str, Path], labels: Optional[Sequence[str]] = None) -> Path:
        """
        Сохраняет контракт в CSV файл.

        Raises:
            StorageError: При ошибке записи файла
        """
        target = self._resolve(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(self.contract_to_csv(contract, labels), encoding="utf-8")
        except OSError as e:
            raise StorageError(f"Ошибка сохранения контракта в {target}: {e}")
        logger.info(f"Контракт сохранен в {target}")
        return target

    def load_contract(self, path: Union[str, Path]) -> Contract:
        """
        Загружает контракт из CSV файла.

        Raises:
            StorageError: Файл не читается или имеет неверный формат
            LimitedLiabilityError: В файле отрицательные выплаты
        """
        source = self._resolve(path)
        try:
            with open(source, "r", encoding="utf-8", newline="") as f:
                reader = csv.DictReader(f)
                if reader.fieldnames is None or "payment" not in reader.fieldnames:
                    raise StorageError(f"В {source} нет колонки payment")
                payments: List[float] = []
                for line, record in enumerate(reader, start=2):
                    try:
                        payments.append(float(record["payment"]))
                    except (TypeError, ValueError):
                        raise StorageError(f"{source}:{line}: некорректная выплата {record.get('payment')!r}")
        except OSError as e:
            raise StorageError(f"Ошибка чтения контракта из {source}: {e}")
        except UnicodeDecodeError as e:
            raise StorageError(f"Файл контракта {source} не в кодировке UTF-8: {e}")

        if not payments:
            raise StorageError(f"Файл {source} не содержит выплат")
        return Contract(payments=payments)

    def save_report(self, rows: Iterable[ReportRow], path: Union[str, Path]) -> Path:
        """Сохраняет сводную таблицу в CSV файл."""
        target = self._resolve(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(self.report_to_csv(rows), encoding="utf-8")
        except OSError as e:
            raise StorageError(f"Ошибка сохранения отчета в {target}: {e}")
        return target

    def save_json(self, data: Dict[str, Any], path: Union[str, Path]) -> Path:
        """Сохраняет данные в JSON файл."""
        target = self._resolve(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(self.to_json(data), encoding="utf-8")
        except OSError as e:
            raise StorageError(f"Ошибка сохранения JSON в {target}: {e}")
        return target


# Глобальный экземпляр хранилища
contract_storage = ContractStorage()


def get_contract_storage() -> ContractStorage:
    """Возвращает экземпляр хранилища контрактов."""
    return contract_storage
