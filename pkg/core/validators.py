# core/validators.py - проверки инвариантов задачи контракта

"""
Модуль валидации задач проектирования контрактов.

Структурные проверки (размерности, нормировка строк, знаки) выполняют сами
pydantic модели; здесь проверяются инварианты, которые зависят от всей пары (F, c).
"""

import logging
from typing import List, Sequence

import numpy as np

from .exceptions import (
    CostsNotNondecreasingError,
    DuplicateTargetDistributionError,
    InvalidCostError,
    TargetNotStrictlyCostliestError,
)
from .models import ContractSetting

logger = logging.getLogger(__name__)

# Поэлементный допуск совпадения строк матрицы F
DUPLICATE_ROW_TOL = 1e-12


class CostVectorValidator:
    """Валидатор вектора затрат."""

    def validate(self, costs: Sequence[float], strict_target: bool = True) -> List[str]:
        """
        Проверка вектора затрат.

        Args:
            costs: Затраты действий
            strict_target: Требовать строгое c_n > c_{n-1}

        Returns:
            List[str]: Список ошибок (пустой если все в порядке)
        """
        errors = []
        c = np.asarray(costs, dtype=float)

        if c.size < 2:
            errors.append(f"Нужно минимум 2 затраты, получено {c.size}")
            return errors
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            errors.append(f"Затраты должны быть неотрицательными числами: {tuple(costs)}")
            return errors

        drops = np.flatnonzero(np.diff(c) < 0)
        if drops.size:
            i = int(drops[0])
            errors.append(f"Затраты убывают между действиями {i} и {i + 1}: {c[i]:g} > {c[i + 1]:g}")

        if strict_target and not c[-1] > c[-2]:
            errors.append(f"Целевое действие должно быть строго дороже остальных: {c[-1]:g} <= {c[-2]:g}")

        return errors


class TargetValidator:
    """Проверка, что целевое действие последнее."""

    def validate(self, setting: ContractSetting) -> List[str]:
        if setting.target != setting.n - 1:
            return [f"Целевое действие должно быть последним (индекс {setting.n - 1}), получено {setting.target}"]
        return []


class DuplicateRowValidator:
    """Поиск альтернатив с распределением, совпадающим с целевым."""

    def find_duplicates(self, setting: ContractSetting) -> List[int]:
        """
        Возвращает индексы альтернатив, чье распределение совпадает с F_n.

        Args:
            setting: Задача контракта

        Returns:
            List[int]: Индексы более дешевых действий с той же строкой F
        """
        F = setting.matrix
        target = setting.target
        duplicates = []
        for i in setting.alternatives:
            if setting.costs[i] < setting.costs[target] and np.all(np.abs(F[i] - F[target]) <= DUPLICATE_ROW_TOL):
                duplicates.append(i)
        return duplicates


class SettingValidator:
    """Общий валидатор задачи контракта."""

    def __init__(self):
        self.cost_validator = CostVectorValidator()
        self.target_validator = TargetValidator()
        self.duplicate_validator = DuplicateRowValidator()

    def validate(self, setting: ContractSetting) -> ContractSetting:
        """
        Проверка всех инвариантов задачи.

        Порядок проверок фиксирован: затраты, целевое действие, совпадающие строки.

        Args:
            setting: Задача контракта

        Returns:
            ContractSetting: Та же задача (строки уже перенормированы моделью)

        Raises:
            CostsNotNondecreasingError: Затраты убывают
            TargetNotStrictlyCostliestError: Целевое действие не последнее или не строго дороже
            DuplicateTargetDistributionError: F_i = F_n для более дешевого действия
        """
        cost_errors = self.cost_validator.validate(setting.costs, strict_target=False)
        if cost_errors:
            raise CostsNotNondecreasingError("; ".join(cost_errors))

        target_errors = self.target_validator.validate(setting)
        if target_errors:
            raise TargetNotStrictlyCostliestError("; ".join(target_errors))
        if not setting.costs[-1] > setting.costs[-2]:
            raise TargetNotStrictlyCostliestError(
                f"Целевое действие должно быть строго дороже остальных: "
                f"{setting.costs[-1]:g} <= {setting.costs[-2]:g}"
            )

        duplicates = self.duplicate_validator.find_duplicates(setting)
        if duplicates:
            # Вырожденная смесь: весь вес на первом совпадающем действии
            certificate = [1.0 if i == duplicates[0] else 0.0 for i in setting.alternatives]
            raise DuplicateTargetDistributionError(
                f"Распределение действия {duplicates[0]} совпадает с целевым, "
                f"никакой контракт не реализует целевое действие",
                certificate=certificate,
            )

        logger.debug(f"Задача {setting.n}×{setting.m} прошла валидацию")
        return setting


_setting_validator = SettingValidator()


def validate_setting(setting: ContractSetting) -> ContractSetting:
    """Проверяет задачу контракта, см. SettingValidator.validate."""
    return _setting_validator.validate(setting)


def validate_costs(costs: Sequence[float], strict_target: bool = False) -> Sequence[float]:
    """
    Проверяет вектор затрат и возвращает его без изменений.

    Raises:
        InvalidCostError: Отрицательные или нечисловые затраты
        CostsNotNondecreasingError: Затраты убывают или целевое действие не строго дороже
    """
    c = np.asarray(costs, dtype=float)
    if not np.all(np.isfinite(c)) or np.any(c < 0):
        raise InvalidCostError(f"Затраты должны быть неотрицательными числами: {tuple(costs)}")
    errors = CostVectorValidator().validate(costs, strict_target=strict_target)
    if errors:
        raise CostsNotNondecreasingError("; ".join(errors))
    return costs
