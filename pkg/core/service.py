"""
Основная бизнес-логика: решение задач, проверка устойчивости, сводные таблицы и пакетная обработка.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from config.settings import Settings, get_settings

from .contracts import (
    best_response,
    robust_surrogate,
    robust_violations,
    solve_contract,
    threshold_contract,
    verify_ic,
)
from .exceptions import ContractDesignError, NotImplementableError, SolverError, ValidationError
from .ingest import load_instance
from .models import (
    BestResponse,
    ConstraintKind,
    Contract,
    ContractSetting,
    CutoffResult,
    ICViolation,
    LeastFavorableMix,
    Objective,
    ReportRow,
    Robustness,
    RobustnessKind,
    SolveRequest,
)
from .oracle import sample_cost_vectors
from .statistics import least_favorable_mix, minimax_ratio_test, minimax_sum_test
from .storage import get_contract_storage

# Настройка логирования
logger = logging.getLogger(__name__)

GRID_OBJECTIVES = (Objective.MIN_PAY, Objective.MIN_BUDGET, Objective.MIN_VARIANCE)
GRID_CONSTRAINTS = (ConstraintKind.UNCONSTRAINED, ConstraintKind.MONOTONE, ConstraintKind.THRESHOLD)
GRID_ROBUSTNESS = (RobustnessKind.COST_AWARE, RobustnessKind.COST_ROBUST)


class SolveResult(BaseModel):
    """Контракт вместе с диагностикой решения."""
    model_config = ConfigDict(frozen=True)

    request: SolveRequest
    contract: Contract
    expected_pay: float = Field(..., description="Ожидаемая выплата при F_n")
    budget: float
    stdev: float = Field(..., description="Стандартное отклонение выплаты при F_n")
    best_response: BestResponse
    cutoff: Optional[int] = None
    threshold_scan: Optional[Tuple[CutoffResult, ...]] = None
    sum_risk: Optional[float] = Field(default=None, description="R* для устойчивого решения")
    ratio_risk: Optional[float] = Field(default=None, description="ρ* для устойчивого решения")
    theoretical_budget: Optional[float] = Field(default=None, description="b/(1 - R*)")
    theoretical_pay: Optional[float] = Field(default=None, description="b/(1 - ρ*)")


class VerificationReport(BaseModel):
    """Результат проверки контракта на наборе векторов затрат."""
    model_config = ConfigDict(frozen=True)

    bound: float
    checked: int = Field(..., description="Число проверенных векторов затрат")
    own_costs_ok: bool
    best_response: BestResponse
    violations: Tuple[ICViolation, ...] = ()

    @property
    def passed(self) -> bool:
        return self.own_costs_ok and not self.violations


class SweepRow(BaseModel):
    """Итог решения одного экземпляра в пакетном режиме."""
    model_config = ConfigDict(frozen=True)

    name: str
    status: str
    message: Optional[str] = None
    expected_pay: Optional[float] = None
    budget: Optional[float] = None
    stdev: Optional[float] = None


def _price_percent(value: Optional[float], reference: Optional[float]) -> Optional[float]:
    if value is None or reference is None or reference <= 0:
        return None
    return 100.0 * (value / reference - 1.0)


class ContractService:
    """Сервис решения задач контрактов."""

    def __init__(self, settings: Optional[Settings] = None):
        """Инициализация сервиса."""
        self.settings = settings or get_settings()
        self.storage = get_contract_storage()

    def solve(self, setting: ContractSetting, request: SolveRequest) -> SolveResult:
        """
        Решает задачу по запросу и собирает диагностику.

        Args:
            setting: Задача контракта
            request: Критерий, ограничение и знание затрат

        Returns:
            SolveResult: Контракт, его характеристики при F_n и наилучший ответ агента

        Raises:
            NotImplementableError: Целевое действие нереализуемо
            ValidationError: Некорректные входные данные
            SolverError: Сбой численного решателя
        """
        logger.info(
            f"Решение задачи {setting.n}×{setting.m}: критерий {request.objective.value}, "
            f"ограничение {request.constraint.value}, режим {request.robustness.kind.value}"
        )

        try:
            cutoff, scan = None, None
            if request.constraint == ConstraintKind.THRESHOLD:
                problem = robust_surrogate(setting, request.robustness.bound) if request.robustness.is_robust else setting
                solution = threshold_contract(problem, request.objective, request.ic_margin)
                contract, cutoff, scan = solution.contract, solution.cutoff, solution.scan
            else:
                contract = solve_contract(setting, request)

            target = setting.target_distribution
            diagnostics: Dict[str, float] = {}
            if request.robustness.is_robust and request.constraint != ConstraintKind.THRESHOLD:
                diagnostics = self._robust_theory(setting, request)

            return SolveResult(
                request=request,
                contract=contract,
                expected_pay=contract.expected_pay(target),
                budget=contract.budget,
                stdev=contract.stdev(target),
                best_response=best_response(setting, contract),
                cutoff=cutoff,
                threshold_scan=scan,
                **diagnostics,
            )

        except Exception as e:
            logger.error(f"Ошибка решения задачи: {e}")
            if isinstance(e, ContractDesignError):
                raise
            raise SolverError(f"Неожиданная ошибка при решении задачи: {e}")

    def _robust_theory(self, setting: ContractSetting, request: SolveRequest) -> Dict[str, float]:
        """R*, ρ* и теоретические b/(1 - R*), b/(1 - ρ*) для сверки с решением."""
        bound = request.robustness.bound
        monotone = request.constraint == ConstraintKind.MONOTONE
        _, sum_risk = minimax_sum_test(setting.matrix, setting.target, monotone=monotone)
        _, ratio_risk = minimax_ratio_test(setting.matrix, setting.target, monotone=monotone)
        return {
            "sum_risk": sum_risk,
            "ratio_risk": ratio_risk,
            "theoretical_budget": bound / (1.0 - sum_risk),
            "theoretical_pay": bound / (1.0 - ratio_risk),
        }

    def robust(
        self,
        setting: ContractSetting,
        bound: Optional[float],
        objective: Objective = Objective.MIN_BUDGET,
        constraint: ConstraintKind = ConstraintKind.UNCONSTRAINED,
        margin: Optional[float] = None,
    ) -> SolveResult:
        """
        b-устойчивый контракт; без b граница берется из затрат: b = c_n - c_1.
        """
        if bound is None:
            bound = setting.cost_spread
            logger.info(f"Граница разброса затрат из экземпляра: b = {bound:g}")
        request = SolveRequest(
            objective=objective,
            constraint=constraint,
            robustness=Robustness.robust(bound),
            ic_margin=self.settings.ic_margin if margin is None else margin,
        )
        return self.solve(setting, request)

    def dual(self, setting: ContractSetting, bound: Optional[float] = None) -> LeastFavorableMix:
        """Наименее благоприятная смесь альтернатив и минимальный устойчивый бюджет."""
        bound = setting.cost_spread if bound is None else bound
        try:
            return least_favorable_mix(setting.matrix, setting.target, bound)
        except Exception as e:
            logger.error(f"Ошибка решения двойственной задачи: {e}")
            if isinstance(e, ContractDesignError):
                raise
            raise SolverError(f"Неожиданная ошибка двойственной задачи: {e}")

    def verify(
        self,
        setting: ContractSetting,
        contract: Contract,
        bound: Optional[float] = None,
        samples: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> VerificationReport:
        """
        Проверяет контракт на собственных затратах и на векторах из C_b.

        Проверяются обе крайние точки (0, …, 0, b), (b, …, b) и samples случайных векторов.
        """
        bound = setting.cost_spread if bound is None else bound
        samples = self.settings.verify_samples if samples is None else samples
        seed = self.settings.seed if seed is None else seed
        logger.info(f"Проверка контракта: b = {bound:g}, {samples} случайных векторов, seed = {seed}")

        vectors = sample_cost_vectors(bound, setting.n, samples + 2, seed)
        violations = robust_violations(setting, contract, vectors)
        return VerificationReport(
            bound=bound,
            checked=len(vectors),
            own_costs_ok=verify_ic(setting, contract),
            best_response=best_response(setting, contract),
            violations=tuple(violations),
        )

    def _solve_cell(self, setting: ContractSetting, bound: float, margin: float,
                    cell: Tuple[Objective, ConstraintKind, RobustnessKind]) -> ReportRow:
        objective, constraint, kind = cell
        robustness = Robustness.robust(bound) if kind == RobustnessKind.COST_ROBUST else Robustness.aware()
        request = SolveRequest(objective=objective, constraint=constraint, robustness=robustness, ic_margin=margin)
        try:
            if constraint == ConstraintKind.THRESHOLD:
                problem = robust_surrogate(setting, bound) if robustness.is_robust else setting
                contract = threshold_contract(problem, objective, margin).contract
            else:
                contract = solve_contract(setting, request)
        except NotImplementableError as e:
            logger.warning(f"Ячейка {objective.value}/{constraint.value}/{kind.value}: {e}")
            return ReportRow(objective=objective, constraint=constraint, robustness=kind,
                             status="not implementable", message=str(e))

        target = setting.target_distribution
        return ReportRow(
            objective=objective,
            constraint=constraint,
            robustness=kind,
            expected_pay=contract.expected_pay(target),
            budget=contract.budget,
            stdev=contract.stdev(target),
            payments=contract.payments,
        )

    def report(
        self,
        setting: ContractSetting,
        bound: Optional[float] = None,
        margin: Optional[float] = None,
        workers: Optional[int] = None,
    ) -> List[ReportRow]:
        """
        Сводная таблица: критерий × ограничение × {точные затраты, b-устойчивость}.

        Ячейки решаются в пуле потоков; порядок строк фиксирован порядком сетки.
        Устойчивые строки несут цену устойчивости, монотонные и пороговые - цену монотонности.
        """
        bound = setting.cost_spread if bound is None else bound
        margin = self.settings.ic_margin if margin is None else margin
        workers = workers or self.settings.workers
        cells = [(o, c, r) for o in GRID_OBJECTIVES for c in GRID_CONSTRAINTS for r in GRID_ROBUSTNESS]
        logger.info(f"Сводная таблица: {len(cells)} ячеек, b = {bound:g}, потоков {workers}")

        try:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(lambda cell: self._solve_cell(setting, bound, margin, cell), cells))
        except Exception as e:
            logger.error(f"Ошибка построения сводной таблицы: {e}")
            if isinstance(e, ContractDesignError):
                raise
            raise SolverError(f"Неожиданная ошибка при построении таблицы: {e}")

        by_cell = {(row.objective, row.constraint, row.robustness): row for row in rows}
        priced = []
        for row in rows:
            value = row.objective_value()
            robustness_price = None
            if row.robustness == RobustnessKind.COST_ROBUST:
                aware = by_cell[(row.objective, row.constraint, RobustnessKind.COST_AWARE)]
                robustness_price = _price_percent(value, aware.objective_value())
            monotonicity_price = None
            if row.constraint != ConstraintKind.UNCONSTRAINED:
                free = by_cell[(row.objective, ConstraintKind.UNCONSTRAINED, row.robustness)]
                monotonicity_price = _price_percent(value, free.objective_value())
            priced.append(row.model_copy(update={
                "price_of_robustness_percent": robustness_price,
                "price_of_monotonicity_percent": monotonicity_price,
            }))
        return priced

    def _sweep_one(self, path: Path, request: SolveRequest, from_costs: bool,
                   uniform_verbosity: Optional[bool]) -> SweepRow:
        try:
            instance = load_instance(path, uniform_verbosity=uniform_verbosity)
            if from_costs:
                request = request.model_copy(update={"robustness": Robustness.robust(instance.setting.cost_spread)})
            result = self.solve(instance.setting, request)
        except NotImplementableError as e:
            return SweepRow(name=path.name, status="not implementable", message=str(e))
        except ContractDesignError as e:
            return SweepRow(name=path.name, status="invalid", message=str(e))
        return SweepRow(
            name=path.name,
            status="ok",
            expected_pay=result.expected_pay,
            budget=result.budget,
            stdev=result.stdev,
        )

    def sweep(
        self,
        directory: Union[str, Path],
        request: SolveRequest,
        from_costs: bool = False,
        uniform_verbosity: Optional[bool] = None,
        workers: Optional[int] = None,
    ) -> List[SweepRow]:
        """
        Решает все *.json экземпляры каталога (в порядке имен файлов).

        Raises:
            ValidationError: Каталог не существует
        """
        directory = Path(directory)
        if not directory.is_dir():
            raise ValidationError(f"Каталог экземпляров не найден: {directory}")
        paths = sorted(directory.glob("*.json"), key=lambda p: p.name)
        workers = workers or self.settings.workers
        logger.info(f"Пакетное решение: {len(paths)} экземпляров в {directory}")

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(
                lambda path: self._sweep_one(path, request, from_costs, uniform_verbosity), paths
            ))


# Глобальный экземпляр сервиса
contract_service = ContractService()


def get_contract_service() -> ContractService:
    """Возвращает экземпляр сервиса контрактов."""
    return contract_service
