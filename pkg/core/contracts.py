# core/contracts.py - решатели оптимальных контрактов

"""
Оптимальные контракты для всех сочетаний критерия, ограничения формы и знания затрат,
а также наилучший ответ агента и проверка совместимости по стимулам (IC).
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .convex import SolveOutcome, SolveStatus, solve_lp, solve_qp
from .exceptions import (
    ApproximationBoundError,
    ArityMismatchError,
    BoundsViolatedError,
    InvalidBoundError,
    NotImplementableError,
    SolverError,
    ValidationError,
)
from .models import (
    ApproximationReport,
    BestResponse,
    ConstraintKind,
    Contract,
    ContractSetting,
    CutoffResult,
    DistributionLike,
    ICViolation,
    Objective,
    SolveRequest,
    ThresholdSolution,
)
from .programs import (
    face_pay_program,
    min_budget_program,
    min_pay_program,
    tail_masses,
    variance_program,
)
from .statistics import SEPARABILITY_TOL, minimax_sum_test, mixture_distance
from .validators import validate_setting

logger = logging.getLogger(__name__)

# Допуск слабых неравенств IC (ничьи в пользу принципала)
IC_TOL = 1e-9
# Допуск равенства затрат альтернатив для статистической формы
UNIFORM_COST_TOL = 1e-12
# Гарантия аппроксимации проверяется с этим запасом
APPROXIMATION_TOL = 1e-7


def _check_arity(setting: ContractSetting, contract: Contract):
    if contract.m != setting.m:
        raise ArityMismatchError(f"Контракт на {contract.m} исходов, задача на {setting.m}")


def per_action_utilities(setting: ContractSetting, contract: Contract) -> np.ndarray:
    """Полезности агента Σ_j F_ij t_j - c_i для всех действий."""
    _check_arity(setting, contract)
    return setting.matrix @ contract.as_array() - setting.cost_vector


def best_response(setting: ContractSetting, contract: Contract) -> BestResponse:
    """
    Наилучший ответ агента на контракт.

    Ничьи в пределах 1e-9 разрешаются в пользу действия с большим индексом.
    """
    utilities = per_action_utilities(setting, contract)
    best = float(utilities.max())
    action = int(np.flatnonzero(utilities >= best - IC_TOL)[-1])
    return BestResponse(
        action=action,
        utility=best,
        per_action_utilities=tuple(float(u) for u in utilities),
    )


def ic_slacks(setting: ContractSetting, contract: Contract) -> np.ndarray:
    """Запасы u_n - u_i по альтернативам (в порядке setting.alternatives)."""
    utilities = per_action_utilities(setting, contract)
    return utilities[setting.target] - utilities[list(setting.alternatives)]


def verify_ic(setting: ContractSetting, contract: Contract, margin: float = 0.0) -> bool:
    """True если целевое действие слабо лучше каждой альтернативы (допуск -1e-9)."""
    return bool(np.all(ic_slacks(setting, contract) >= margin - IC_TOL))


def verify_ic_for_costs(setting: ContractSetting, contract: Contract, costs: Sequence[float]) -> bool:
    """verify_ic для той же матрицы F с другим вектором затрат."""
    return verify_ic(setting.with_costs(costs), contract)


def robust_violations(
    setting: ContractSetting, contract: Contract, cost_vectors: Sequence[Sequence[float]]
) -> List[ICViolation]:
    """
    Проверяет контракт на наборе векторов затрат.

    Returns:
        List[ICViolation]: Нарушенные векторы с наихудшей альтернативой, в порядке входа
    """
    violations = []
    for costs in cost_vectors:
        slacks = ic_slacks(setting.with_costs(costs), contract)
        worst = int(np.argmin(slacks))
        if slacks[worst] < -IC_TOL:
            violations.append(ICViolation(
                costs=tuple(float(c) for c in costs),
                alternative=setting.alternatives[worst],
                slack=float(slacks[worst]),
            ))
    if violations:
        logger.info(f"Контракт нарушает IC на {len(violations)} из {len(cost_vectors)} векторов затрат")
    return violations


def implementability_certificate(setting: ContractSetting) -> Optional[Tuple[float, ...]]:
    """
    Сертификат нереализуемости: веса смеси альтернатив, совпадающей с F_n.

    Returns:
        Optional[Tuple[float, ...]]: Веса λ, если F_n лежит в выпуклой оболочке
        альтернатив, иначе None
    """
    weights, _, distance = mixture_distance(setting.matrix, setting.target)
    if distance <= SEPARABILITY_TOL:
        return tuple(float(w) for w in weights)
    return None


def _prepare(setting: ContractSetting) -> ContractSetting:
    """Валидация задачи и обнаружение нереализуемости до решения."""
    setting = validate_setting(setting)
    certificate = implementability_certificate(setting)
    if certificate is not None:
        raise NotImplementableError(
            "Целевое действие нереализуемо: F_n совпадает со смесью альтернатив",
            certificate=certificate,
        )
    return setting


def _primal_or_raise(outcome: SolveOutcome, what: str) -> np.ndarray:
    if outcome.status == SolveStatus.INFEASIBLE:
        raise NotImplementableError(f"{what}: ограничения несовместны", certificate=outcome.certificate)
    if outcome.status != SolveStatus.OPTIMAL:
        raise SolverError(f"{what}: неожиданный статус {outcome.status.value}")
    return outcome.primal


def uniform_alternative_cost(setting: ContractSetting) -> Optional[float]:
    """Общая затрата c' всех альтернатив или None, если затраты различны."""
    costs = [setting.costs[i] for i in setting.alternatives]
    if max(costs) - min(costs) <= UNIFORM_COST_TOL:
        return costs[0]
    return None


def min_pay_contract(setting: ContractSetting, monotone: bool = False, margin: float = 0.0) -> Contract:
    """
    Контракт минимальной ожидаемой выплаты (MIN-PAY LP).

    Args:
        setting: Задача контракта
        monotone: Добавить ограничения t_j <= t_{j+1}
        margin: Запас ε в строках IC

    Raises:
        NotImplementableError: LP недопустима
    """
    setting = _prepare(setting)
    lp = min_pay_program(setting.matrix, setting.cost_vector, setting.target, margin, monotone)
    t = _primal_or_raise(solve_lp(lp), "MIN-PAY LP")
    contract = Contract.from_solution(t)
    logger.info(f"Контракт min-pay: выплата {contract.expected_pay(setting.target_distribution):.10g}")
    return contract


def min_budget_contract(
    setting: ContractSetting,
    monotone: bool = False,
    margin: float = 0.0,
    statistical_form: Optional[bool] = None,
) -> Contract:
    """
    Контракт минимального бюджета.

    При равных затратах альтернатив (c', …, c', c_n) решение строится через
    минимаксный тест: (c_n - c' + ε)/(1 - R*)·ψ*_R. Иначе решается MIN-BUDGET LP.

    Args:
        setting: Задача контракта
        monotone: Добавить ограничения t_j <= t_{j+1}
        margin: Запас ε в строках IC
        statistical_form: None - выбор по затратам, True/False - принудительно

    Raises:
        NotImplementableError: LP недопустима
        ValidationError: Статистическая форма запрошена при различных затратах
    """
    setting = _prepare(setting)
    common_cost = uniform_alternative_cost(setting)
    if statistical_form is None:
        statistical_form = common_cost is not None
    if statistical_form and common_cost is None:
        raise ValidationError("Статистическая форма применима только при равных затратах альтернатив")

    if statistical_form:
        psi, risk = minimax_sum_test(setting.matrix, setting.target, monotone=monotone)
        scale = (setting.costs[setting.target] - common_cost + margin) / (1.0 - risk)
        contract = Contract.from_solution(scale * psi.as_array())
    else:
        lp = min_budget_program(setting.matrix, setting.cost_vector, setting.target, margin, monotone)
        t = _primal_or_raise(solve_lp(lp), "MIN-BUDGET LP")
        contract = Contract.from_solution(t[:setting.m])

    logger.info(f"Контракт min-budget: бюджет {contract.budget:.10g}")
    return contract


def min_variance_contract(setting: ContractSetting, monotone: bool = False, margin: float = 0.0) -> Contract:
    """
    Контракт минимальной дисперсии выплаты при F_n.

    Среди минимизаторов дисперсии (все они имеют одинаковое R·t) выбирается
    контракт минимальной ожидаемой выплаты вторичной LP на оптимальной грани.
    """
    setting = _prepare(setting)
    F, costs, target = setting.matrix, setting.cost_vector, setting.target

    qp = variance_program(F, costs, target, margin, monotone)
    t_star = _primal_or_raise(solve_qp(qp), "QP минимальной дисперсии")

    try:
        face = solve_lp(face_pay_program(F, costs, target, t_star, margin, monotone))
    except SolverError as e:
        logger.warning(f"Вторичная LP на грани минимизаторов: {e}, оставлен ответ QP")
        t = t_star
    else:
        if face.status == SolveStatus.OPTIMAL:
            t = face.primal
        else:
            logger.warning(f"Вторичная LP на грани минимизаторов: статус {face.status.value}, оставлен ответ QP")
            t = t_star

    contract = Contract.from_solution(t)
    logger.info(f"Контракт min-variance: stdev {contract.stdev(setting.target_distribution):.10g}")
    return contract


def _objective_of_threshold(objective: Objective, budget: float, target_tail: float) -> float:
    if objective == Objective.MIN_PAY:
        return budget * target_tail
    if objective == Objective.MIN_BUDGET:
        return budget
    return budget ** 2 * target_tail * (1.0 - target_tail)


def threshold_contract(
    setting: ContractSetting, objective: Objective = Objective.MIN_BUDGET, margin: float = 0.0
) -> ThresholdSolution:
    """
    Оптимальный пороговый контракт полным перебором порогов.

    Для порога k контракт t_j = B·1[j >= k], где B - минимальное значение,
    удовлетворяющее всем строкам IC: B·(S_n(k) - S_i(k)) >= c_n - c_i + ε.

    Args:
        setting: Задача контракта
        objective: Критерий выбора порога
        margin: Запас ε в строках IC

    Returns:
        ThresholdSolution: Контракт, порог (нулевой индекс) и протокол перебора

    Raises:
        NotImplementableError: Ни один порог недопустим
    """
    setting = _prepare(setting)
    S = tail_masses(setting.matrix)
    target = setting.target
    others = list(setting.alternatives)
    gaps = S[target] - S[others]
    rhs = setting.cost_vector[target] - setting.cost_vector[others] + margin

    scan: List[CutoffResult] = []
    for k in range(setting.m):
        lower, upper, feasible = 0.0, math.inf, True
        for delta, need in zip(gaps[:, k], rhs):
            if need > 0:
                if delta <= 0:
                    feasible = False
                    break
                lower = max(lower, need / delta)
            elif delta < 0:
                upper = min(upper, need / delta)
        if feasible and lower > upper * (1.0 + 1e-12) + 1e-15:
            feasible = False

        if not feasible:
            scan.append(CutoffResult(cutoff=k, feasible=False))
            continue
        tail = min(max(float(S[target, k]), 0.0), 1.0)
        scan.append(CutoffResult(
            cutoff=k,
            feasible=True,
            budget=lower,
            objective_value=_objective_of_threshold(objective, lower, tail),
        ))

    best: Optional[CutoffResult] = None
    for result in scan:
        if not result.feasible:
            continue
        if best is None or result.objective_value < best.objective_value * (1.0 - 1e-12) - 1e-15:
            best = result
    if best is None:
        raise NotImplementableError("Ни один пороговый контракт не реализует целевое действие")

    payments = [0.0] * best.cutoff + [best.budget] * (setting.m - best.cutoff)
    logger.info(f"Пороговый контракт: порог {best.cutoff}, бюджет {best.budget:.10g}")
    return ThresholdSolution(
        contract=Contract(payments=payments),
        cutoff=best.cutoff,
        budget=best.budget,
        scan=tuple(scan),
    )


def constrained_contract(
    setting: ContractSetting,
    objective: Objective,
    constraint: ConstraintKind = ConstraintKind.UNCONSTRAINED,
    margin: float = 0.0,
) -> Contract:
    """Оптимальный контракт для пары (критерий, ограничение формы)."""
    if constraint == ConstraintKind.THRESHOLD:
        return threshold_contract(setting, objective, margin).contract

    monotone = constraint == ConstraintKind.MONOTONE
    if objective == Objective.MIN_PAY:
        return min_pay_contract(setting, monotone=monotone, margin=margin)
    if objective == Objective.MIN_BUDGET:
        return min_budget_contract(setting, monotone=monotone, margin=margin)
    return min_variance_contract(setting, monotone=monotone, margin=margin)


def robust_surrogate(
    distributions: Union[ContractSetting, Sequence[DistributionLike]],
    bound: float,
    target: Optional[int] = None,
) -> ContractSetting:
    """
    Суррогатная задача (F, (0, …, 0, b)) для b-устойчивого контракта.

    Raises:
        InvalidBoundError: b <= 0
    """
    if not math.isfinite(bound) or bound <= 0:
        raise InvalidBoundError(f"Граница разброса затрат должна быть положительной, получено {bound}")
    if isinstance(distributions, ContractSetting):
        rows, target = distributions.distributions, distributions.target
    else:
        rows = tuple(distributions)
        target = len(rows) - 1 if target is None else target
    costs = [0.0] * len(rows)
    costs[target] = float(bound)
    return ContractSetting(distributions=rows, costs=costs, target=target)


def cost_robust_contract(
    distributions: Union[ContractSetting, Sequence[DistributionLike]],
    bound: float,
    objective: Objective = Objective.MIN_BUDGET,
    constraint: ConstraintKind = ConstraintKind.UNCONSTRAINED,
    margin: float = 0.0,
) -> Contract:
    """
    b-устойчивый контракт: реализует цель при любых неубывающих затратах с c_n - c_1 <= b.

    Решает выбранную задачу на суррогатных затратах (0, …, 0, b).
    """
    surrogate = robust_surrogate(distributions, bound)
    logger.info(f"Устойчивый контракт: b = {bound:g}, критерий {objective.value}, ограничение {constraint.value}")
    return constrained_contract(surrogate, objective, constraint, margin)


def solve_contract(setting: ContractSetting, request: SolveRequest) -> Contract:
    """Решает задачу по запросу: критерий × ограничение × знание затрат."""
    if request.robustness.is_robust:
        return cost_robust_contract(
            setting, request.robustness.bound, request.objective, request.constraint, request.ic_margin
        )
    return constrained_contract(setting, request.objective, request.constraint, request.ic_margin)


def approximation_certificate(setting: ContractSetting, lower_bound: float, upper_bound: float) -> ApproximationReport:
    """
    Отношение бюджетов b-устойчивого и точного min-budget контрактов.

    Args:
        setting: Задача с разностями затрат c_n - c_i ∈ [a, b]
        lower_bound: a > 0
        upper_bound: b >= a

    Raises:
        InvalidBoundError: Неверные границы
        BoundsViolatedError: Разность затрат вне [a, b]
        ApproximationBoundError: Отношение превышает b/a
    """
    if not (math.isfinite(lower_bound) and math.isfinite(upper_bound)) or not 0 < lower_bound <= upper_bound:
        raise InvalidBoundError(f"Нужно 0 < a <= b, получено a = {lower_bound}, b = {upper_bound}")
    setting = validate_setting(setting)

    target_cost = setting.costs[setting.target]
    for i in setting.alternatives:
        gap = target_cost - setting.costs[i]
        if gap < lower_bound - UNIFORM_COST_TOL or gap > upper_bound + UNIFORM_COST_TOL:
            raise BoundsViolatedError(
                f"Разность затрат c_n - c_{i} = {gap:g} вне отрезка [{lower_bound:g}, {upper_bound:g}]"
            )

    aware = min_budget_contract(setting).budget
    robust = cost_robust_contract(setting, upper_bound, Objective.MIN_BUDGET).budget
    guarantee = upper_bound / lower_bound
    ratio = robust / aware
    if ratio > guarantee + APPROXIMATION_TOL:
        raise ApproximationBoundError(f"Отношение бюджетов {ratio:.10g} превышает b/a = {guarantee:.10g}")

    return ApproximationReport(
        lower_bound=lower_bound,
        upper_bound=upper_bound,
        aware_budget=aware,
        robust_budget=robust,
        ratio=ratio,
        guarantee=guarantee,
    )


def is_threshold_contract(contract: Contract, tol: float = 1e-9) -> bool:
    """Контракт принимает ровно значения {0, B} и не убывает."""
    t = contract.as_array()
    budget = contract.budget
    two_valued = np.all((np.abs(t) <= tol) | (np.abs(t - budget) <= tol * max(1.0, budget)))
    return bool(two_valued and np.all(np.diff(t) >= -tol))
