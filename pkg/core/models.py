# core/models.py - доменные типы задачи проектирования контрактов

"""
Pydantic модели для валидации и сериализации данных контрактов.

Все модели неизменяемы (frozen) и могут свободно передаваться между потоками.
Индексы действий в API нулевые: целевое действие n-действийной задачи имеет индекс n-1.
"""

import math
from enum import Enum
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import (
    ArityMismatchError,
    InvalidBoundError,
    InvalidCostError,
    InvalidDistributionError,
    InvalidTestError,
    LimitedLiabilityError,
    NonStochasticRowError,
    TargetNotStrictlyCostliestError,
    ValidationError,
)

# Допуск суммы вероятностей и порог перенормировки
PROBABILITY_TOL = 1e-9
RENORMALIZE_TOL = 1e-6
# Остаточная погрешность, при которой строка уже считается нормированной
_NORMALIZED_TOL = 1e-12
# Отрицательные выплаты решателя меньше этого порога округляются до нуля
_CLIP_TOL = 1e-9


def _to_float_tuple(value: Any) -> Tuple[float, ...]:
    """Приводит последовательность (в т.ч. numpy-массив) к кортежу float."""
    if isinstance(value, np.ndarray):
        return tuple(float(x) for x in value.ravel())
    if isinstance(value, (list, tuple)):
        return tuple(float(x) for x in value)
    return value


class Objective(str, Enum):
    """Критерий оптимальности контракта."""
    MIN_PAY = "pay"
    MIN_BUDGET = "budget"
    MIN_VARIANCE = "variance"


class ConstraintKind(str, Enum):
    """Ограничение на форму контракта."""
    UNCONSTRAINED = "none"
    MONOTONE = "monotone"
    THRESHOLD = "threshold"


class RobustnessKind(str, Enum):
    """Режим знания затрат."""
    COST_AWARE = "aware"
    COST_ROBUST = "robust"


class RiskKind(str, Enum):
    """Мера риска, по которой масштабируется статистический контракт."""
    SUM = "sum"
    RATIO = "ratio"


class OutcomeDistribution(BaseModel):
    """Распределение оценок (исходов) одного генератора."""
    model_config = ConfigDict(frozen=True)

    probs: Tuple[float, ...] = Field(..., min_length=1, description="Вероятности исходов")

    @field_validator('probs', mode='before')
    @classmethod
    def coerce_probs(cls, v):
        return _to_float_tuple(v)

    @field_validator('probs')
    @classmethod
    def validate_probs(cls, v):
        """Проверка неотрицательности и нормировки с перенормировкой округлений."""
        if any(not math.isfinite(p) for p in v):
            raise InvalidDistributionError(f"Вероятности должны быть конечными числами: {v}")
        if any(p < 0 for p in v):
            raise InvalidDistributionError(f"Вероятности не могут быть отрицательными: {v}")

        total = math.fsum(v)
        if abs(total - 1.0) > RENORMALIZE_TOL:
            raise NonStochasticRowError(f"Сумма вероятностей {total:.12g} отличается от 1 более чем на {RENORMALIZE_TOL:g}")
        if abs(total - 1.0) > _NORMALIZED_TOL:
            v = tuple(p / total for p in v)
        return v

    @property
    def m(self) -> int:
        """Число исходов."""
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)


DistributionLike = Union[OutcomeDistribution, Sequence[float], np.ndarray]


def as_probability_vector(dist: DistributionLike) -> np.ndarray:
    """Возвращает вектор вероятностей из распределения или последовательности."""
    if isinstance(dist, OutcomeDistribution):
        return dist.as_array()
    return np.asarray(dist, dtype=float)


class ContractSetting(BaseModel):
    """Задача проектирования контракта: пара (F, c) и целевое действие."""
    model_config = ConfigDict(frozen=True)

    distributions: Tuple[OutcomeDistribution, ...] = Field(..., description="Строки матрицы F")
    costs: Tuple[float, ...] = Field(..., description="Затраты действий за один ответ")
    target: int = Field(..., description="Индекс целевого действия")

    @model_validator(mode='before')
    @classmethod
    def fill_target(cls, data):
        """По умолчанию целевым считается последнее действие."""
        if isinstance(data, dict) and data.get('target') is None:
            data = dict(data)
            rows = data.get('distributions')
            data['target'] = (0 if rows is None else len(rows)) - 1
        return data

    @field_validator('distributions', mode='before')
    @classmethod
    def coerce_distributions(cls, v):
        """Строки матрицы можно передавать как последовательности чисел."""
        if isinstance(v, np.ndarray):
            v = list(v)
        rows = []
        for index, row in enumerate(v):
            if isinstance(row, OutcomeDistribution):
                rows.append(row)
                continue
            try:
                rows.append(OutcomeDistribution(probs=row))
            except NonStochasticRowError as e:
                raise NonStochasticRowError(f"Строка {index}: {e}") from e
            except InvalidDistributionError as e:
                raise InvalidDistributionError(f"Строка {index}: {e}") from e
        return tuple(rows)

    @field_validator('costs', mode='before')
    @classmethod
    def coerce_costs(cls, v):
        return _to_float_tuple(v)

    @field_validator('costs')
    @classmethod
    def validate_costs(cls, v):
        """Затраты конечны и неотрицательны."""
        if any(not math.isfinite(c) or c < 0 for c in v):
            raise InvalidCostError(f"Затраты должны быть неотрицательными числами: {v}")
        return v

    @model_validator(mode='after')
    def validate_shape(self):
        """Проверка размерностей: n >= 2, m >= 2, согласованные длины."""
        n = len(self.distributions)
        if n < 2:
            raise ValidationError(f"Нужно минимум 2 действия, получено {n}")
        m = self.distributions[0].m
        if m < 2:
            raise ValidationError(f"Нужно минимум 2 исхода, получено {m}")
        for index, dist in enumerate(self.distributions):
            if dist.m != m:
                raise ArityMismatchError(f"Строка {index} имеет {dist.m} исходов вместо {m}")
        if len(self.costs) != n:
            raise ArityMismatchError(f"Затрат {len(self.costs)}, а действий {n}")
        if not 0 <= self.target < n:
            raise TargetNotStrictlyCostliestError(f"Индекс целевого действия {self.target} вне диапазона [0, {n})")
        return self

    @property
    def n(self) -> int:
        """Число действий."""
        return len(self.distributions)

    @property
    def m(self) -> int:
        """Число исходов."""
        return self.distributions[0].m

    @property
    def matrix(self) -> np.ndarray:
        """Матрица распределений F размера n×m."""
        return np.array([d.probs for d in self.distributions], dtype=float)

    @property
    def cost_vector(self) -> np.ndarray:
        return np.asarray(self.costs, dtype=float)

    @property
    def alternatives(self) -> Tuple[int, ...]:
        """Индексы нецелевых действий."""
        return tuple(i for i in range(self.n) if i != self.target)

    @property
    def target_distribution(self) -> OutcomeDistribution:
        return self.distributions[self.target]

    @property
    def cost_spread(self) -> float:
        """Разброс затрат c_n - c_1."""
        return float(self.costs[self.target] - min(self.costs))

    def with_costs(self, costs: Sequence[float]) -> "ContractSetting":
        """Та же матрица F с другим вектором затрат."""
        return ContractSetting(distributions=self.distributions, costs=costs, target=self.target)


class Contract(BaseModel):
    """Контракт: неотрицательные выплаты по исходам."""
    model_config = ConfigDict(frozen=True)

    payments: Tuple[float, ...] = Field(..., min_length=1, description="Выплаты t_j за исход j")

    @field_validator('payments', mode='before')
    @classmethod
    def coerce_payments(cls, v):
        return _to_float_tuple(v)

    @field_validator('payments')
    @classmethod
    def validate_payments(cls, v):
        """Ограниченная ответственность: все выплаты неотрицательны."""
        if any(not math.isfinite(t) for t in v):
            raise LimitedLiabilityError(f"Выплаты должны быть конечными: {v}")
        if any(t < 0 for t in v):
            raise LimitedLiabilityError(f"Выплаты не могут быть отрицательными: {v}")
        return v

    @classmethod
    def from_solution(cls, values: Sequence[float]) -> "Contract":
        """Создает контракт из решения LP/QP, обнуляя погрешности округления около нуля."""
        cleaned = []
        for value in values:
            value = float(value)
            if -_CLIP_TOL <= value < 0:
                value = 0.0
            cleaned.append(value)
        return cls(payments=tuple(cleaned))

    @property
    def m(self) -> int:
        return len(self.payments)

    @property
    def budget(self) -> float:
        """Бюджет контракта B_t = max_j t_j."""
        return max(self.payments)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.payments, dtype=float)

    def _probabilities(self, dist: DistributionLike) -> np.ndarray:
        p = as_probability_vector(dist)
        if p.shape != (self.m,):
            raise ArityMismatchError(f"Распределение на {p.size} исходов, контракт на {self.m}")
        return p

    def expected_pay(self, dist: DistributionLike) -> float:
        """Ожидаемая выплата Σ_j p_j t_j."""
        return float(self._probabilities(dist) @ self.as_array())

    def variance(self, dist: DistributionLike) -> float:
        """Дисперсия выплаты при распределении dist."""
        p = self._probabilities(dist)
        t = self.as_array()
        mean = float(p @ t)
        return float(max(p @ (t - mean) ** 2, 0.0))

    def stdev(self, dist: DistributionLike) -> float:
        return math.sqrt(self.variance(dist))


class HypothesisTest(BaseModel):
    """Композитный (возможно рандомизированный) тест ψ ∈ [0,1]^m."""
    model_config = ConfigDict(frozen=True)

    accept_probs: Tuple[float, ...] = Field(..., min_length=1, description="Вероятность отвергнуть H0 при исходе j")

    @field_validator('accept_probs', mode='before')
    @classmethod
    def coerce_probs(cls, v):
        return _to_float_tuple(v)

    @field_validator('accept_probs')
    @classmethod
    def validate_probs(cls, v):
        """Значения теста лежат в [0, 1]; шум решателя в пределах 1e-9 отсекается."""
        cleaned = []
        for psi in v:
            if not math.isfinite(psi) or psi < -_CLIP_TOL or psi > 1 + _CLIP_TOL:
                raise InvalidTestError(f"Значения теста должны лежать в [0, 1]: {v}")
            cleaned.append(min(max(psi, 0.0), 1.0))
        return tuple(cleaned)

    @property
    def m(self) -> int:
        return len(self.accept_probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.accept_probs, dtype=float)


class RiskReport(BaseModel):
    """Ошибки теста по каждой альтернативе и агрегированные риски."""
    model_config = ConfigDict(frozen=True)

    alternatives: Tuple[int, ...] = Field(..., description="Индексы альтернатив")
    fp_per_alternative: Tuple[float, ...] = Field(..., description="FP_k для каждой альтернативы")
    fn_rate: float = Field(..., ge=0, le=1, description="Доля ложноотрицательных FN")
    tp_rate: float = Field(..., ge=0, le=1, description="Доля истинно положительных TP = 1 - FN")
    sum_risk: float = Field(..., description="R = max_k FP_k + FN")
    ratio_risk: float = Field(..., description="ρ = max_k FP_k / TP, +inf при TP = 0")

    @property
    def max_false_positive(self) -> float:
        return max(self.fp_per_alternative)

    @property
    def ratio_undefined(self) -> bool:
        return math.isinf(self.ratio_risk)


class Robustness(BaseModel):
    """Знание затрат: точные затраты или только граница разброса b."""
    model_config = ConfigDict(frozen=True)

    kind: RobustnessKind = RobustnessKind.COST_AWARE
    bound: Optional[float] = Field(default=None, description="Граница разброса затрат b")

    @model_validator(mode='after')
    def validate_bound(self):
        if self.kind == RobustnessKind.COST_ROBUST:
            if self.bound is None or not math.isfinite(self.bound) or self.bound <= 0:
                raise InvalidBoundError(f"Для устойчивого контракта нужна граница b > 0, получено {self.bound}")
        return self

    @classmethod
    def aware(cls) -> "Robustness":
        return cls(kind=RobustnessKind.COST_AWARE)

    @classmethod
    def robust(cls, bound: float) -> "Robustness":
        return cls(kind=RobustnessKind.COST_ROBUST, bound=bound)

    @property
    def is_robust(self) -> bool:
        return self.kind == RobustnessKind.COST_ROBUST


class SolveRequest(BaseModel):
    """Запрос на решение: критерий × ограничение × режим знания затрат."""
    model_config = ConfigDict(frozen=True)

    objective: Objective = Objective.MIN_PAY
    constraint: ConstraintKind = ConstraintKind.UNCONSTRAINED
    robustness: Robustness = Field(default_factory=Robustness.aware)
    ic_margin: float = Field(default=0.0, ge=0, description="Запас ε в ограничениях IC")


class BestResponse(BaseModel):
    """Наилучший ответ агента на контракт."""
    model_config = ConfigDict(frozen=True)

    action: int = Field(..., description="Выбранное действие (ничьи в пользу большего индекса)")
    utility: float = Field(..., description="Полезность агента в оптимуме")
    per_action_utilities: Tuple[float, ...] = Field(..., description="Полезность каждого действия")


class LeastFavorableMix(BaseModel):
    """Наименее благоприятная смесь альтернатив из двойственной задачи."""
    model_config = ConfigDict(frozen=True)

    alternatives: Tuple[int, ...] = Field(..., description="Индексы альтернатив")
    weights: Tuple[float, ...] = Field(..., description="Веса λ смеси альтернатив")
    slacks: Tuple[float, ...] = Field(..., description="Двойственные переменные μ_j")
    tv_distance: float = Field(..., description="TV(F_n, Σ λ_i F_i)")
    bound: float = Field(..., gt=0, description="Граница разброса затрат b")
    implied_budget: float = Field(..., description="b / TV")


class CutoffResult(BaseModel):
    """Результат перебора для одного порога пороговой схемы."""
    model_config = ConfigDict(frozen=True)

    cutoff: int
    feasible: bool
    budget: Optional[float] = None
    objective_value: Optional[float] = None


class ThresholdSolution(BaseModel):
    """Оптимальный пороговый контракт и полный протокол перебора порогов."""
    model_config = ConfigDict(frozen=True)

    contract: Contract
    cutoff: int = Field(..., description="Первый оплачиваемый исход j*")
    budget: float
    scan: Tuple[CutoffResult, ...]


class ApproximationReport(BaseModel):
    """Отношение бюджетов устойчивого и точного контрактов."""
    model_config = ConfigDict(frozen=True)

    lower_bound: float
    upper_bound: float
    aware_budget: float
    robust_budget: float
    ratio: float
    guarantee: float = Field(..., description="Гарантия b/a")

    @property
    def within_guarantee(self) -> bool:
        return self.ratio <= self.guarantee + 1e-7


class DeterministicTestBounds(BaseModel):
    """Минимаксные риски среди детерминированных тестов ψ ∈ {0,1}^m."""
    model_config = ConfigDict(frozen=True)

    sum_risk: float
    ratio_risk: float
    sum_test: Tuple[float, ...]
    ratio_test: Tuple[float, ...]


class ICViolation(BaseModel):
    """Вектор затрат, при котором контракт не реализует целевое действие."""
    model_config = ConfigDict(frozen=True)

    costs: Tuple[float, ...]
    alternative: int = Field(..., description="Альтернатива с наихудшим запасом IC")
    slack: float = Field(..., description="Запас u_n - u_i (отрицательный)")


class ReportRow(BaseModel):
    """Строка сводной таблицы: критерий × ограничение × режим знания затрат."""
    model_config = ConfigDict(frozen=True)

    objective: Objective
    constraint: ConstraintKind
    robustness: RobustnessKind
    expected_pay: Optional[float] = None
    budget: Optional[float] = None
    stdev: Optional[float] = None
    price_of_robustness_percent: Optional[float] = None
    price_of_monotonicity_percent: Optional[float] = None
    payments: Optional[Tuple[float, ...]] = None
    status: str = "ok"
    message: Optional[str] = None

    def objective_value(self) -> Optional[float]:
        """Значение собственного критерия строки (для variance это stdev)."""
        return {
            Objective.MIN_PAY: self.expected_pay,
            Objective.MIN_BUDGET: self.budget,
            Objective.MIN_VARIANCE: self.stdev,
        }[self.objective]
