"""
Генераторы случайных задач для тестов.

Все генераторы детерминированы зерном numpy.random.default_rng.
"""

from typing import List, Tuple

import numpy as np

from core.models import ContractSetting


def separable_rows(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """
    Матрица F, в которой целевая строка отделима от альтернатив.

    Альтернативы кладут на выделенный исход не больше 0.4 массы, цель - не меньше 0.5,
    так что TV до выпуклой оболочки альтернатив не меньше 0.1. Исходы затем
    перемешиваются одной перестановкой для всех строк.
    """
    rows = []
    for i in range(n):
        share = rng.uniform(0.5, 1.0) if i == n - 1 else rng.uniform(0.0, 0.4)
        body = rng.dirichlet(np.ones(m - 1))
        rows.append(np.concatenate([body * (1.0 - share), [share]]))
    F = np.vstack(rows)
    return F[:, rng.permutation(m)]


def increasing_costs(rng: np.random.Generator, n: int) -> np.ndarray:
    """Неубывающие затраты со строго наибольшей затратой цели."""
    alternatives = np.sort(rng.uniform(0.0, 1.0, size=n - 1))
    return np.concatenate([alternatives, [alternatives[-1] + rng.uniform(0.1, 1.0)]])


def random_setting(seed: int, n_range=(2, 5), m_range=(2, 8)) -> ContractSetting:
    """Случайная отделимая задача с n, m из заданных отрезков (включительно)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    return ContractSetting(distributions=separable_rows(rng, n, m), costs=increasing_costs(rng, n))


def mlr_rows(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """
    Матрица со строго монотонным отношением правдоподобия.

    F_ij ∝ p_j·exp(θ_i·s_j) при возрастающих s и θ: отношения F_ij / F_i'j
    возрастают по j для всех i > i'.
    """
    base = rng.dirichlet(np.ones(m))
    scores = np.sort(rng.uniform(-1.0, 1.0, size=m))
    thetas = np.sort(rng.uniform(0.0, 3.0, size=n))
    weights = base[None, :] * np.exp(thetas[:, None] * scores[None, :])
    return weights / weights.sum(axis=1, keepdims=True)


def random_binary_setting(seed: int) -> ContractSetting:
    """Задача с двумя исходами: доли успеха строго растут к цели."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    rates = np.sort(rng.uniform(0.0, 1.0, size=n))
    rates[-1] = min(rates[-1] + 0.05, 1.0)
    rows = [[1.0 - p, p] for p in rates]
    return ContractSetting(distributions=rows, costs=increasing_costs(rng, n))


def bounded_gap_setting(seed: int) -> Tuple[ContractSetting, float, float]:
    """
    Задача, в которой разности затрат c_n - c_i лежат в [a, b].

    Returns:
        Tuple[ContractSetting, float, float]: Задача, a и b
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    m = int(rng.integers(2, 6))
    target_cost = 3.0
    gaps = np.sort(rng.uniform(0.2, 2.0, size=n - 1))[::-1]
    costs = np.concatenate([target_cost - gaps, [target_cost]])
    return ContractSetting(distributions=separable_rows(rng, n, m), costs=costs), float(gaps.min()), float(gaps.max())


def seeds(count: int, start: int = 0) -> List[int]:
    return list(range(start, start + count))
