"""
Кастомные исключения решателя контрактов.
"""

from typing import Optional, Sequence, Tuple


class ContractDesignError(Exception):
    """Базовое исключение для всех ошибок решателя."""
    pass


class ValidationError(ContractDesignError):
    """Ошибка валидации входных данных."""
    pass


class NonStochasticRowError(ValidationError):
    """Строка матрицы распределений не суммируется в 1."""
    pass


class InvalidDistributionError(ValidationError):
    """Отрицательные или нечисловые вероятности."""
    pass


class InvalidCostError(ValidationError):
    """Отрицательные или нечисловые затраты."""
    pass


class CostsNotNondecreasingError(ValidationError):
    """Затраты действий не упорядочены по неубыванию."""
    pass


class TargetNotStrictlyCostliestError(ValidationError):
    """Целевое действие не последнее или не строго самое дорогое."""
    pass


class ArityMismatchError(ValidationError):
    """Несовпадение размерностей векторов."""
    pass


class LimitedLiabilityError(ValidationError):
    """Контракт содержит отрицательные выплаты."""
    pass


class InvalidTestError(ValidationError):
    """Вероятности принятия теста вне отрезка [0, 1]."""
    pass


class InvalidBoundError(ValidationError):
    """Некорректная граница разброса затрат."""
    pass


class BoundsViolatedError(ValidationError):
    """Разности затрат выходят за заявленный отрезок [a, b]."""
    pass


class EmptyHistogramError(ValidationError):
    """Гистограмма оценок пуста."""
    pass


class SchemaError(ValidationError):
    """Ошибка схемы файла экземпляра."""

    def __init__(self, path: str, message: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if message else path)


class NotImplementableError(ContractDesignError):
    """Целевое действие невозможно реализовать никаким контрактом."""

    def __init__(self, message: str, certificate: Optional[Sequence[float]] = None):
        self.certificate: Optional[Tuple[float, ...]] = (
            tuple(float(x) for x in certificate) if certificate is not None else None
        )
        super().__init__(message)


class DuplicateTargetDistributionError(NotImplementableError):
    """Распределение целевого действия совпадает с распределением более дешевого."""
    pass


class NotSeparableError(NotImplementableError):
    """Целевая гипотеза неотделима от альтернатив (минимаксный риск равен 1)."""
    pass


class SolverError(ContractDesignError):
    """Ошибка численного решателя."""
    pass


class NumericalBreakdownError(SolverError):
    """Превышен лимит итераций или вырождение при поворотах."""
    pass


class NotPSDError(SolverError):
    """Матрица квадратичной формы не симметрична или не положительно полуопределена."""
    pass


class ProblemFormatError(SolverError):
    """Некорректно сформированная задача оптимизации."""
    pass


class DegenerateScaleError(ContractDesignError):
    """Знаменатель масштабного множителя теста близок к нулю."""
    pass


class ZeroContractError(ContractDesignError):
    """Контракт без положительных выплат нельзя превратить в тест."""
    pass


class StorageError(ContractDesignError):
    """Ошибка чтения или записи файлов."""
    pass


class OracleError(ContractDesignError):
    """Ошибка переборного оракула."""
    pass


class WindowExhaustedError(OracleError):
    """В окне поиска нет допустимого контракта."""
    pass


class TooManyOutcomesError(OracleError):
    """Размер задачи превышает предел переборного оракула."""
    pass


class ApproximationBoundError(ContractDesignError):
    """Нарушена гарантия аппроксимации b/a."""
    pass
