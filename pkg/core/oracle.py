# core/oracle.py - переборные проверщики для тестов

"""
Независимые переборные оракулы для сверки с LP.

Оракулы намеренно простые и медленные; размеры задач ограничены предусловиями,
подвыборка сетки не выполняется.
"""

import logging
import math
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .exceptions import InvalidBoundError, TooManyOutcomesError, ValidationError, WindowExhaustedError
from .models import Contract, ContractSetting, DeterministicTestBounds
from .statistics import Distributions, distribution_matrix, tv_distance

logger = logging.getLogger(__name__)

MAX_GRID_OUTCOMES = 3
MAX_ENUMERATION_OUTCOMES = 20
# Предел числа точек сетки по первым m-1 координатам
MAX_GRID_POINTS = 50_000_000

_CHUNK = 1 << 16
_IC_TOL = 1e-9


def _search_window(setting: ContractSetting) -> float:
    """Окно выплат [0, 10·(c_n - c_1)/gap], gap - минимальное ненулевое TV до альтернатив."""
    target = setting.target_distribution
    distances = [tv_distance(setting.distributions[i], target) for i in setting.alternatives]
    positive = [d for d in distances if d > 1e-12]
    if not positive:
        raise WindowExhaustedError("Все альтернативы совпадают с целевым распределением")
    return 10.0 * setting.cost_spread / min(positive)


def _grid_points(levels: int, dims: int) -> Iterator[np.ndarray]:
    """Все точки {0..levels}^dims порциями по _CHUNK (в лексикографическом порядке)."""
    total = (levels + 1) ** dims
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        digits = np.empty((flat.size, dims), dtype=np.int64)
        for d in range(dims - 1, -1, -1):
            digits[:, d] = flat % (levels + 1)
            flat = flat // (levels + 1)
        yield digits


def _grid_search(setting: ContractSetting, grid_step: float, objective: str) -> Contract:
    """
    Полный перебор сетки с шагом grid_step по первым m-1 выплатам.

    Последняя выплата для каждой точки берется минимальной допустимой на сетке:
    обе целевые функции не убывают по ней, поэтому перебор остается точным.
    """
    if setting.m > MAX_GRID_OUTCOMES:
        raise TooManyOutcomesError(f"Сеточный оракул поддерживает m <= {MAX_GRID_OUTCOMES}, получено {setting.m}")
    if not math.isfinite(grid_step) or grid_step <= 0:
        raise ValidationError(f"Шаг сетки должен быть положительным, получено {grid_step}")

    window = _search_window(setting)
    levels = int(math.ceil(window / grid_step))
    dims = setting.m - 1
    if (levels + 1) ** dims > MAX_GRID_POINTS:
        raise TooManyOutcomesError(f"Сетка из {(levels + 1) ** dims} точек превышает предел {MAX_GRID_POINTS}")

    F = setting.matrix
    target = setting.target
    others = list(setting.alternatives)
    gaps = F[target] - F[others]
    need = setting.cost_vector[target] - setting.cost_vector[others]
    last_gap = gaps[:, -1]
    p = F[target]

    best_value, best_point = math.inf, None
    for digits in _grid_points(levels, dims):
        rest = digits * grid_step
        residual = need[None, :] - rest @ gaps[:, :-1].T

        lower = np.zeros(rest.shape[0])
        upper = np.full(rest.shape[0], window + grid_step)
        feasible = np.ones(rest.shape[0], dtype=bool)
        for i in range(len(others)):
            r, g = residual[:, i], last_gap[i]
            if g > 0:
                lower = np.maximum(lower, r / g)
            elif g < 0:
                upper = np.minimum(upper, r / g)
            else:
                feasible &= r <= _IC_TOL

        last = np.ceil(np.maximum(lower, 0.0) / grid_step - 1e-9) * grid_step
        feasible &= last <= upper + _IC_TOL
        feasible &= last <= window + grid_step
        if not np.any(feasible):
            continue

        points = np.hstack([rest, last[:, None]])[feasible]
        if objective == "budget":
            values = points.max(axis=1)
        else:
            values = points @ p
        index = int(np.argmin(values))
        if values[index] < best_value - 1e-15:
            best_value, best_point = float(values[index]), points[index]

    if best_point is None:
        raise WindowExhaustedError(f"В окне [0, {window:.6g}] нет допустимого контракта")
    logger.debug(f"Сеточный оракул ({objective}): значение {best_value:.10g}")
    return Contract(payments=best_point)


def grid_min_budget(setting: ContractSetting, grid_step: float = 1e-3) -> Contract:
    """
    Контракт минимального бюджета перебором сетки.

    Raises:
        TooManyOutcomesError: m > 3 или слишком большая сетка
        WindowExhaustedError: В окне поиска нет допустимого контракта
    """
    return _grid_search(setting, grid_step, "budget")


def grid_min_pay(setting: ContractSetting, grid_step: float = 1e-3) -> Contract:
    """Контракт минимальной ожидаемой выплаты перебором сетки."""
    return _grid_search(setting, grid_step, "pay")


def enumerate_tests(distributions: Distributions, target: Optional[int] = None) -> DeterministicTestBounds:
    """
    Минимаксные риски среди детерминированных тестов ψ ∈ {0,1}^m.

    Returns:
        DeterministicTestBounds: Лучшие суммарный и относительный риски и сами тесты

    Raises:
        TooManyOutcomesError: m > 20
    """
    F = distribution_matrix(distributions)
    n, m = F.shape
    if m > MAX_ENUMERATION_OUTCOMES:
        raise TooManyOutcomesError(f"Перебор тестов поддерживает m <= {MAX_ENUMERATION_OUTCOMES}, получено {m}")
    target = n - 1 if target is None else target
    others = [i for i in range(n) if i != target]

    best_sum, best_sum_code = math.inf, 0
    best_ratio, best_ratio_code = math.inf, 0
    shifts = np.arange(m - 1, -1, -1)
    total = 1 << m
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total))
        tests = ((codes[:, None] >> shifts[None, :]) & 1).astype(float)
        fp = (tests @ F[others].T).max(axis=1)
        tp = tests @ F[target]

        sums = fp + 1.0 - tp
        k = int(np.argmin(sums))
        if sums[k] < best_sum - 1e-15:
            best_sum, best_sum_code = float(sums[k]), int(codes[k])

        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(tp > 0, fp / np.where(tp > 0, tp, 1.0), np.inf)
        k = int(np.argmin(ratios))
        if ratios[k] < best_ratio - 1e-15:
            best_ratio, best_ratio_code = float(ratios[k]), int(codes[k])

    def decode(code: int) -> Tuple[float, ...]:
        return tuple(float((code >> s) & 1) for s in shifts)

    return DeterministicTestBounds(
        sum_risk=best_sum,
        ratio_risk=best_ratio,
        sum_test=decode(best_sum_code),
        ratio_test=decode(best_ratio_code),
    )


def sample_cost_vectors(bound: float, n: int, count: int, seed: int = 0) -> List[Tuple[float, ...]]:
    """
    Детерминированные векторы затрат из C_b.

    Первые два вектора - крайние точки (0, …, 0, b) и (b, …, b); остальные
    count - 2 случайные неубывающие векторы с разбросом c_n - c_1 <= b.

    Raises:
        InvalidBoundError: b <= 0
    """
    if not math.isfinite(bound) or bound <= 0:
        raise InvalidBoundError(f"Граница разброса затрат должна быть положительной, получено {bound}")
    if n < 2 or count < 1:
        raise ValidationError(f"Нужно n >= 2 и count >= 1, получено n = {n}, count = {count}")

    vectors: List[Tuple[float, ...]] = [
        tuple([0.0] * (n - 1) + [float(bound)]),
        tuple([float(bound)] * n),
    ]
    rng = np.random.default_rng(seed)
    for _ in range(count - 2):
        base = rng.uniform(0.0, bound)
        spread = rng.uniform(0.0, bound)
        inner = np.sort(rng.uniform(0.0, spread, size=n - 2))
        costs = base + np.concatenate([[0.0], inner, [spread]])
        vectors.append(tuple(float(c) for c in costs))
    return vectors
