# core/statistics.py - минимаксные композитные тесты и их связь с контрактами

"""
Композитные тесты гипотез H0: исход от одной из альтернатив против H1: исход от F_n.

Тест ψ ∈ [0,1]^m отвергает H0 при исходе j с вероятностью ψ_j. Для него
FP_k = F_k·ψ, FN = 1 - F_n·ψ, суммарный риск R = max_k FP_k + FN и
относительный риск ρ = max_k FP_k / TP.
"""

import logging
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .convex import SolveStatus, solve_lp
from .exceptions import (
    ArityMismatchError,
    DegenerateScaleError,
    InvalidBoundError,
    NotSeparableError,
    SolverError,
    ValidationError,
    ZeroContractError,
)
from .models import (
    Contract,
    ContractSetting,
    DistributionLike,
    HypothesisTest,
    LeastFavorableMix,
    OutcomeDistribution,
    RiskKind,
    RiskReport,
    as_probability_vector,
)
from .programs import least_favorable_program, min_pay_program, statistical_program

logger = logging.getLogger(__name__)

# Минимаксный риск не ниже этого порога означает неотделимые гипотезы
SEPARABILITY_TOL = 1e-9
# Минимальный знаменатель масштабного множителя статистического контракта
SCALE_TOL = 1e-12
# Поэлементный допуск совпадения альтернатив при выборе веса смеси
_TWIN_TOL = 1e-12

Distributions = Union[ContractSetting, np.ndarray, Sequence[DistributionLike]]


def distribution_matrix(distributions: Distributions) -> np.ndarray:
    """
    Приводит набор распределений к матрице F с проверкой строк.

    Raises:
        NonStochasticRowError: Строка не нормирована
        ArityMismatchError: Строки разной длины
    """
    if isinstance(distributions, ContractSetting):
        return distributions.matrix
    rows = []
    for index, row in enumerate(distributions):
        dist = row if isinstance(row, OutcomeDistribution) else OutcomeDistribution(probs=row)
        if rows and dist.m != rows[0].size:
            raise ArityMismatchError(f"Строка {index} имеет {dist.m} исходов вместо {rows[0].size}")
        rows.append(dist.as_array())
    if len(rows) < 2:
        raise ValidationError(f"Нужно минимум 2 распределения, получено {len(rows)}")
    return np.vstack(rows)


def _resolve_target(F: np.ndarray, target: Optional[int]) -> int:
    n = F.shape[0]
    if target is None:
        return n - 1
    if not 0 <= target < n:
        raise ValidationError(f"Индекс целевого распределения {target} вне диапазона [0, {n})")
    return target


def _psi_vector(psi: Union[HypothesisTest, Sequence[float]], m: int) -> np.ndarray:
    if not isinstance(psi, HypothesisTest):
        psi = HypothesisTest(accept_probs=psi)
    if psi.m != m:
        raise ArityMismatchError(f"Тест на {psi.m} исходов, распределения на {m}")
    return psi.as_array()


def risk_report(
    distributions: Distributions,
    target: Optional[int],
    psi: Union[HypothesisTest, Sequence[float]],
) -> RiskReport:
    """
    Ошибки теста ψ по каждой альтернативе и агрегированные риски.

    Args:
        distributions: Строки матрицы F
        target: Индекс распределения H1 (по умолчанию последнее)
        psi: Тест

    Returns:
        RiskReport: FP_k, FN, TP, R и ρ (ρ = +inf при TP = 0)
    """
    F = distribution_matrix(distributions)
    target = _resolve_target(F, target)
    vector = _psi_vector(psi, F.shape[1])
    others = [i for i in range(F.shape[0]) if i != target]

    fp = np.clip(F[others] @ vector, 0.0, 1.0)
    tp = float(np.clip(F[target] @ vector, 0.0, 1.0))
    fn = 1.0 - tp
    max_fp = float(fp.max())
    ratio = max_fp / tp if tp > 0 else math.inf

    return RiskReport(
        alternatives=tuple(others),
        fp_per_alternative=tuple(float(x) for x in fp),
        fn_rate=fn,
        tp_rate=tp,
        sum_risk=max_fp + fn,
        ratio_risk=ratio,
    )


def mixture_distance(distributions: Distributions, target: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Решает двойственную LP: ближайшая по TV к F_n смесь альтернатив.

    Веса совпадающих альтернатив переносятся на альтернативу с меньшим индексом.

    Returns:
        Tuple[np.ndarray, np.ndarray, float]: веса λ, двойственные μ и TV(F_n, Σ λ_i F_i)
    """
    F = distribution_matrix(distributions)
    target = _resolve_target(F, target)
    others = [i for i in range(F.shape[0]) if i != target]
    k = len(others)

    outcome = solve_lp(least_favorable_program(F, target))
    if outcome.status != SolveStatus.OPTIMAL:
        # Задача всегда допустима и ограничена снизу нулем
        raise SolverError(f"Двойственная задача завершилась со статусом {outcome.status.value}")

    weights = np.clip(outcome.primal[:k], 0.0, None)
    weights = weights / weights.sum()
    for a in range(k):
        for b in range(a + 1, k):
            if weights[b] > 0 and np.all(np.abs(F[others[a]] - F[others[b]]) <= _TWIN_TOL):
                weights[a] += weights[b]
                weights[b] = 0.0

    mix = weights @ F[others]
    slacks = np.clip(F[target] - mix, 0.0, None)
    distance = tv_distance(F[target], mix)
    return weights, slacks, distance


def minimax_sum_test(
    distributions: Distributions, target: Optional[int] = None, monotone: bool = False
) -> Tuple[HypothesisTest, float]:
    """
    Минимаксный по суммарному риску тест ψ*_R.

    Args:
        distributions: Строки матрицы F
        target: Индекс распределения H1 (по умолчанию последнее)
        monotone: Ограничиться неубывающими тестами

    Returns:
        Tuple[HypothesisTest, float]: Тест и минимаксный риск R*

    Raises:
        NotSeparableError: R* >= 1 - 1e-9
    """
    F = distribution_matrix(distributions)
    target = _resolve_target(F, target)
    m = F.shape[1]

    outcome = solve_lp(statistical_program(F, target, monotone=monotone))
    if outcome.status != SolveStatus.OPTIMAL:
        raise NotSeparableError(f"LP минимаксного теста завершилась со статусом {outcome.status.value}")

    beta = float(outcome.primal[m])
    risk = 1.0 - beta
    if risk >= 1.0 - SEPARABILITY_TOL:
        # Веса смеси доказывают неотделимость только без ограничения монотонности
        weights = None if monotone else mixture_distance(F, target)[0]
        raise NotSeparableError(
            f"Целевое распределение неотделимо от альтернатив: R* = {risk:.12g}",
            certificate=weights,
        )

    psi = HypothesisTest(accept_probs=outcome.primal[:m])
    logger.debug(f"Минимаксный тест: R* = {risk:.10g}, ψ = {psi.accept_probs}")
    return psi, risk


def minimax_ratio_test(
    distributions: Distributions, target: Optional[int] = None, monotone: bool = False
) -> Tuple[HypothesisTest, float]:
    """
    Минимаксный по относительному риску тест ψ*_ρ.

    Вычисляется через MIN-PAY LP на затратах (0,…,0,1): ψ = t*/max t*, ρ* = 1 - 1/P*,
    где P* - ожидаемая выплата оптимального контракта.

    Raises:
        NotSeparableError: Нет теста с TP > FP
    """
    F = distribution_matrix(distributions)
    target = _resolve_target(F, target)
    n, m = F.shape
    costs = np.zeros(n)
    costs[target] = 1.0

    outcome = solve_lp(min_pay_program(F, costs, target, monotone=monotone))
    if outcome.status != SolveStatus.OPTIMAL:
        weights = None if monotone else mixture_distance(F, target)[0]
        raise NotSeparableError("Нет теста с TP > FP: целевое распределение неотделимо", certificate=weights)

    t = np.clip(outcome.primal, 0.0, None)
    pay = float(F[target] @ t)
    ratio = 1.0 - 1.0 / pay
    if ratio >= 1.0 - SEPARABILITY_TOL:
        raise NotSeparableError(f"Целевое распределение неотделимо: ρ* = {ratio:.12g}")

    psi = HypothesisTest(accept_probs=t / t.max())
    return psi, ratio


def test_to_contract(
    psi: Union[HypothesisTest, Sequence[float]],
    kind: RiskKind,
    bound: float,
    risk: RiskReport,
) -> Contract:
    """
    Статистический контракт по тесту ψ.

    Sum: b/(1 - R(ψ))·ψ; Ratio: b/(TP(ψ) - FP(ψ))·ψ.

    Args:
        psi: Тест
        kind: Мера риска
        bound: Граница разброса затрат b > 0
        risk: Отчет о рисках теста ψ

    Raises:
        DegenerateScaleError: Знаменатель <= 1e-12
    """
    if not math.isfinite(bound) or bound <= 0:
        raise InvalidBoundError(f"Граница b должна быть положительной, получено {bound}")
    if not isinstance(psi, HypothesisTest):
        psi = HypothesisTest(accept_probs=psi)
    vector = psi.as_array()

    if kind == RiskKind.SUM:
        denominator = 1.0 - risk.sum_risk
    else:
        denominator = risk.tp_rate - risk.max_false_positive

    if denominator <= SCALE_TOL:
        raise DegenerateScaleError(f"Знаменатель масштаба {denominator:.3e} для риска {kind.value}")
    return Contract.from_solution(bound / denominator * vector)


def contract_to_test(contract: Contract) -> HypothesisTest:
    """Контрактный тест ψ^t = t / max_j t_j."""
    budget = contract.budget
    if budget <= 0:
        raise ZeroContractError("Контракт без положительных выплат не задает тест")
    return HypothesisTest(accept_probs=contract.as_array() / budget)


def tv_distance(p: DistributionLike, q: DistributionLike) -> float:
    """Расстояние полной вариации ½ Σ_j |p_j - q_j|."""
    p_vec = as_probability_vector(p)
    q_vec = as_probability_vector(q)
    if p_vec.shape != q_vec.shape:
        raise ArityMismatchError(f"Распределения разной длины: {p_vec.size} и {q_vec.size}")
    return float(min(max(0.5 * np.abs(p_vec - q_vec).sum(), 0.0), 1.0))


def least_favorable_mix(
    distributions: Distributions, target: Optional[int], bound: float
) -> LeastFavorableMix:
    """
    Наименее благоприятная смесь альтернатив и минимальный бюджет b/TV.

    Raises:
        InvalidBoundError: b <= 0
        NotSeparableError: TV(F_n, смесь) <= 1e-9
    """
    if not math.isfinite(bound) or bound <= 0:
        raise InvalidBoundError(f"Граница b должна быть положительной, получено {bound}")
    F = distribution_matrix(distributions)
    target = _resolve_target(F, target)

    weights, slacks, distance = mixture_distance(F, target)
    if distance <= SEPARABILITY_TOL:
        raise NotSeparableError(
            "Целевое распределение лежит в выпуклой оболочке альтернатив",
            certificate=weights,
        )

    logger.info(f"Наименее благоприятная смесь: TV = {distance:.10g}, бюджет {bound / distance:.10g}")
    return LeastFavorableMix(
        alternatives=tuple(i for i in range(F.shape[0]) if i != target),
        weights=tuple(float(w) for w in weights),
        slacks=tuple(float(s) for s in slacks),
        tv_distance=distance,
        bound=bound,
        implied_budget=bound / distance,
    )


def check_mlr(distributions: Distributions) -> bool:
    """
    Проверка монотонного отношения правдоподобия.

    Для каждой пары i > i' отношение F_ij / F_i'j не убывает по j;
    0/0 продолжает предыдущее отношение, x/0 = +inf допустимо только в конце.
    """
    F = distribution_matrix(distributions)
    n, m = F.shape
    for i in range(n):
        for lower in range(i):
            previous = None
            for j in range(m):
                numerator, denominator = F[i, j], F[lower, j]
                if numerator == 0 and denominator == 0:
                    continue
                ratio = math.inf if denominator == 0 else numerator / denominator
                if previous is not None and ratio < previous * (1.0 - 1e-12) - 1e-15:
                    return False
                previous = ratio
    return True


def neyman_pearson_test(alternative: DistributionLike, target: DistributionLike) -> HypothesisTest:
    """
    Тест Неймана-Пирсона для одной альтернативы: ψ_j = 1[F_n,j > F_k,j].

    Его суммарный риск равен 1 - TV(F_k, F_n).
    """
    p = as_probability_vector(alternative)
    q = as_probability_vector(target)
    if p.shape != q.shape:
        raise ArityMismatchError(f"Распределения разной длины: {p.size} и {q.size}")
    return HypothesisTest(accept_probs=(q > p).astype(float))


def is_threshold_test(psi: Union[HypothesisTest, Sequence[float]], tol: float = 1e-9) -> bool:
    """Детерминированный неубывающий тест вида 1[j >= k]."""
    vector = psi.as_array() if isinstance(psi, HypothesisTest) else np.asarray(psi, dtype=float)
    binary = np.all((np.abs(vector) <= tol) | (np.abs(vector - 1.0) <= tol))
    return bool(binary and np.all(np.diff(vector) >= -tol))
