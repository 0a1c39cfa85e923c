# core/convex.py - плотный LP/QP движок

"""
Самодостаточный решатель линейных и выпуклых квадратичных задач.

LP решается двухфазным табличным симплекс-методом с правилом Бленда
(наименьший индекс входящей переменной, ничьи в тесте отношений - в пользу
наименьшего индекса базисной переменной), поэтому результат детерминирован.
QP решается прямым методом активных множеств с шагами в нулевом пространстве
рабочих ограничений; стартовая точка берется из LP с нулевой целевой функцией.

Соглашение о двойственных переменных: dual[i] - производная оптимального
значения по правой части строки i (для минимизации у строки <= она <= 0,
у строки >= она >= 0; при максимизации знаки противоположны).
"""

import logging
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .exceptions import NotPSDError, NumericalBreakdownError, ProblemFormatError

logger = logging.getLogger(__name__)

# Допуски движка (не настраиваются вызывающим кодом)
FEASIBILITY_TOL = 1e-8
OPTIMALITY_TOL = 1e-7
PIVOT_TOL = 1e-11
# Относительный порог ведущего элемента при выводе искусственных переменных
DRIVE_OUT_TOL = 1e-9
PSD_TOL = 1e-9

_ENTERING_TOL = 1e-10
_RATIO_TIE_TOL = 1e-12
_RANK_TOL = 1e-10


class RowSense(str, Enum):
    """Тип ограничения-строки."""
    LE = "<="
    GE = ">="
    EQ = "="


class SolveStatus(str, Enum):
    """Статус решения задачи оптимизации."""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _as_vector(value) -> np.ndarray:
    return np.array(value, dtype=float).ravel()


class LinearConstraint(BaseModel):
    """Ограничение coefficients · x (sense) bound."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coefficients: np.ndarray
    bound: float
    sense: RowSense = RowSense.LE

    @field_validator('coefficients', mode='before')
    @classmethod
    def coerce_coefficients(cls, v):
        return _as_vector(v)


class LinearProgram(BaseModel):
    """Линейная задача: min/max objective · x при ограничениях-строках и границах переменных."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    objective: np.ndarray
    rows: Tuple[LinearConstraint, ...] = ()
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    maximize: bool = False

    @field_validator('objective', mode='before')
    @classmethod
    def coerce_objective(cls, v):
        return _as_vector(v)

    @field_validator('lower', 'upper', mode='before')
    @classmethod
    def coerce_bounds(cls, v):
        return None if v is None else _as_vector(v)

    @model_validator(mode='after')
    def validate_shape(self):
        """Все строки и границы согласованы по размерности с целевой функцией."""
        d = self.objective.size
        if not np.all(np.isfinite(self.objective)):
            raise ProblemFormatError("Коэффициенты целевой функции должны быть конечными")
        for index, row in enumerate(self.rows):
            if row.coefficients.size != d:
                raise ProblemFormatError(f"Строка {index}: {row.coefficients.size} коэффициентов вместо {d}")
            if not np.all(np.isfinite(row.coefficients)) or not np.isfinite(row.bound):
                raise ProblemFormatError(f"Строка {index} содержит нечисловые значения")
        lower, upper = self.lower_bounds, self.upper_bounds
        if lower.size != d or upper.size != d:
            raise ProblemFormatError(f"Границы переменных должны иметь длину {d}")
        if np.any(lower == np.inf) or np.any(upper == -np.inf) or np.any(lower > upper):
            raise ProblemFormatError("Некорректные границы переменных")
        return self

    @classmethod
    def from_matrices(
        cls,
        objective: Sequence[float],
        blocks: Sequence[Tuple[np.ndarray, np.ndarray, RowSense]] = (),
        lower: Optional[Sequence[float]] = None,
        upper: Optional[Sequence[float]] = None,
        maximize: bool = False,
    ) -> "LinearProgram":
        """
        Собирает задачу из блоков (A, b, sense), по одной строке на строку A.

        Args:
            objective: Коэффициенты целевой функции
            blocks: Блоки ограничений A x (sense) b
            lower: Нижние границы (по умолчанию 0)
            upper: Верхние границы (по умолчанию +inf)
            maximize: Максимизировать вместо минимизации
        """
        rows: List[LinearConstraint] = []
        for A, b, sense in blocks:
            A = np.atleast_2d(np.asarray(A, dtype=float))
            b = np.asarray(b, dtype=float).ravel()
            if A.shape[0] == 0:
                continue
            if b.size != A.shape[0]:
                raise ProblemFormatError(f"Блок из {A.shape[0]} строк с {b.size} правыми частями")
            rows.extend(LinearConstraint(coefficients=a, bound=float(bi), sense=sense) for a, bi in zip(A, b))
        return cls(objective=objective, rows=tuple(rows), lower=lower, upper=upper, maximize=maximize)

    @property
    def num_variables(self) -> int:
        return self.objective.size

    @property
    def lower_bounds(self) -> np.ndarray:
        return np.zeros(self.num_variables) if self.lower is None else self.lower

    @property
    def upper_bounds(self) -> np.ndarray:
        return np.full(self.num_variables, np.inf) if self.upper is None else self.upper

    @property
    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.num_variables))
        return np.vstack([row.coefficients for row in self.rows])

    @property
    def rhs(self) -> np.ndarray:
        return np.array([row.bound for row in self.rows], dtype=float)

    @property
    def senses(self) -> Tuple[RowSense, ...]:
        return tuple(row.sense for row in self.rows)


class QuadraticProgram(BaseModel):
    """Выпуклая квадратичная задача: min xᵀVx + linear·x при линейных ограничениях."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    psd_matrix: np.ndarray
    linear: Optional[np.ndarray] = None
    rows: Tuple[LinearConstraint, ...] = ()
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    @field_validator('psd_matrix', mode='before')
    @classmethod
    def coerce_matrix(cls, v):
        return np.atleast_2d(np.array(v, dtype=float))

    @field_validator('linear', 'lower', 'upper', mode='before')
    @classmethod
    def coerce_vectors(cls, v):
        return None if v is None else _as_vector(v)

    @model_validator(mode='after')
    def validate_shape(self):
        d = self.psd_matrix.shape[0]
        if self.psd_matrix.shape != (d, d):
            raise ProblemFormatError(f"Матрица квадратичной формы должна быть квадратной: {self.psd_matrix.shape}")
        if self.linear is not None and self.linear.size != d:
            raise ProblemFormatError(f"Линейная часть должна иметь длину {d}")
        # Проверка строк и границ через эквивалентную LP
        self.feasibility_program()
        return self

    @property
    def num_variables(self) -> int:
        return self.psd_matrix.shape[0]

    @property
    def linear_term(self) -> np.ndarray:
        return np.zeros(self.num_variables) if self.linear is None else self.linear

    def feasibility_program(self) -> LinearProgram:
        """LP с нулевой целевой функцией и теми же ограничениями."""
        return LinearProgram(
            objective=np.zeros(self.num_variables),
            rows=self.rows,
            lower=self.lower,
            upper=self.upper,
        )


class SolveOutcome(BaseModel):
    """Результат решения LP/QP."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: SolveStatus
    primal: Optional[np.ndarray] = None
    dual: Optional[np.ndarray] = None
    objective_value: Optional[float] = None
    dual_objective: Optional[float] = None
    certificate: Optional[np.ndarray] = None
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL


class _StandardForm:
    """
    Задача min c·z, A z = b, z >= 0, b >= 0, полученная из LinearProgram.

    Исходные переменные восстанавливаются как x = offset + transform @ z[:num_structural].
    """

    def __init__(self, lp: LinearProgram):
        d = lp.num_variables
        lower, upper = lp.lower_bounds, lp.upper_bounds

        self.offset = np.zeros(d)
        columns: List[Tuple[int, float]] = []
        caps: List[Tuple[int, float]] = []
        for k in range(d):
            if np.isfinite(lower[k]):
                self.offset[k] = lower[k]
                columns.append((k, 1.0))
                if np.isfinite(upper[k]):
                    caps.append((len(columns) - 1, upper[k] - lower[k]))
            elif np.isfinite(upper[k]):
                self.offset[k] = upper[k]
                columns.append((k, -1.0))
            else:
                columns.append((k, 1.0))
                columns.append((k, -1.0))

        self.num_structural = len(columns)
        self.transform = np.zeros((d, self.num_structural))
        for j, (k, sign) in enumerate(columns):
            self.transform[k, j] = sign

        A_user = lp.matrix
        self.num_user_rows = A_user.shape[0]
        A_rows = A_user @ self.transform
        rhs = lp.rhs - A_user @ self.offset
        senses = list(lp.senses)
        if caps:
            cap_rows = np.zeros((len(caps), self.num_structural))
            for r, (j, cap) in enumerate(caps):
                cap_rows[r, j] = 1.0
            A_rows = np.vstack([A_rows, cap_rows])
            rhs = np.concatenate([rhs, [cap for _, cap in caps]])
            senses.extend([RowSense.LE] * len(caps))

        M = A_rows.shape[0]
        slack_count = sum(1 for s in senses if s != RowSense.EQ)
        A = np.zeros((M, self.num_structural + slack_count))
        A[:, :self.num_structural] = A_rows
        self.slack_of_row = np.full(M, -1)
        col = self.num_structural
        for i, sense in enumerate(senses):
            if sense == RowSense.EQ:
                continue
            A[i, col] = 1.0 if sense == RowSense.LE else -1.0
            self.slack_of_row[i] = col
            col += 1

        self.flipped = rhs < 0
        A[self.flipped] *= -1.0
        rhs = np.where(self.flipped, -rhs, rhs)

        self.A = A
        self.b = rhs
        sign = -1.0 if lp.maximize else 1.0
        self.cost = np.zeros(A.shape[1])
        self.cost[:self.num_structural] = sign * (lp.objective @ self.transform)
        self.constant = sign * float(lp.objective @ self.offset)
        self.sign = sign

    @property
    def shape(self) -> Tuple[int, int]:
        return self.A.shape

    def to_user(self, z: np.ndarray) -> np.ndarray:
        return self.offset + self.transform @ z[:self.num_structural]

    def direction_to_user(self, dz: np.ndarray) -> np.ndarray:
        return self.transform @ dz[:self.num_structural]


class _Tableau:
    """Симплекс-таблица B⁻¹A, B⁻¹b с текущим базисом."""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: List[int], iteration_limit: int):
        self.tab = A.copy()
        self.rhs = b.copy()
        self.basis = list(basis)
        self.iterations = 0
        self.iteration_limit = iteration_limit

    def pivot(self, r: int, j: int):
        pivot_value = self.tab[r, j]
        self.tab[r] /= pivot_value
        self.rhs[r] /= pivot_value
        factor = self.tab[:, j].copy()
        factor[r] = 0.0
        self.tab -= np.outer(factor, self.tab[r])
        self.rhs -= factor * self.rhs[r]
        self.tab[:, j] = 0.0
        self.tab[r, j] = 1.0
        # Шум округления не должен делать базис недопустимым
        self.rhs[(self.rhs < 0) & (self.rhs > -FEASIBILITY_TOL)] = 0.0
        self.basis[r] = j

    def run(self, cost: np.ndarray, allowed: np.ndarray) -> Tuple[SolveStatus, Optional[int]]:
        """
        Итерации симплекс-метода по правилу Бленда.

        Returns:
            (статус, индекс входящей переменной для неограниченного луча)
        """
        while True:
            reduced = cost - cost[self.basis] @ self.tab
            candidates = np.flatnonzero(allowed & (reduced < -_ENTERING_TOL))
            if candidates.size == 0:
                return SolveStatus.OPTIMAL, None

            j = int(candidates[0])
            column = self.tab[:, j]
            positive = np.flatnonzero(column > PIVOT_TOL)
            if positive.size == 0:
                return SolveStatus.UNBOUNDED, j

            ratios = self.rhs[positive] / column[positive]
            best = ratios.min()
            ties = positive[ratios <= best + _RATIO_TIE_TOL * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))

            self.pivot(r, j)
            self.iterations += 1
            if self.iterations > self.iteration_limit:
                raise NumericalBreakdownError(
                    f"Симплекс-метод не сошелся за {self.iteration_limit} итераций"
                )


def _basis_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"Вырожденная базисная матрица: {e}")


def solve_lp(lp: LinearProgram) -> SolveOutcome:
    """
    Решает линейную задачу двухфазным симплекс-методом.

    Args:
        lp: Линейная задача

    Returns:
        SolveOutcome: Optimal с прямым и двойственным решением; Infeasible с
        множителями Фаркаша (по строкам задачи); Unbounded с лучом неограниченности

    Raises:
        NumericalBreakdownError: Превышен лимит 10·(rows+cols)² итераций
    """
    form = _StandardForm(lp)
    M, N = form.shape
    iteration_limit = 10 * (M + N) ** 2 + 10

    # Стартовый базис: слэки строк <= с неотрицательной правой частью, иначе искусственные
    basis: List[int] = []
    artificial_rows: List[int] = []
    for i in range(M):
        slack = form.slack_of_row[i]
        if slack >= 0 and form.A[i, slack] > 0:
            basis.append(int(slack))
        else:
            basis.append(-1)
            artificial_rows.append(i)

    A_full = form.A
    if artificial_rows:
        artificial = np.zeros((M, len(artificial_rows)))
        for k, i in enumerate(artificial_rows):
            artificial[i, k] = 1.0
            basis[i] = N + k
        A_full = np.hstack([form.A, artificial])

    tableau = _Tableau(A_full, form.b, basis, iteration_limit)
    total = A_full.shape[1]
    active_rows = np.arange(M)

    if artificial_rows:
        phase1_cost = np.zeros(total)
        phase1_cost[N:] = 1.0
        tableau.run(phase1_cost, np.ones(total, dtype=bool))
        infeasibility = float(phase1_cost[tableau.basis] @ tableau.rhs)
        logger.debug(f"Фаза 1: невязка {infeasibility:.3e}, итераций {tableau.iterations}")

        if infeasibility > FEASIBILITY_TOL * max(1.0, float(np.abs(form.b).max(initial=0.0))):
            y = _basis_solve(A_full[:, tableau.basis].T, phase1_cost[tableau.basis])
            y = np.where(form.flipped, -y, y)
            return SolveOutcome(
                status=SolveStatus.INFEASIBLE,
                certificate=y[:form.num_user_rows],
                iterations=tableau.iterations,
            )

        # Вывод искусственных переменных из базиса, удаление избыточных строк
        redundant = []
        drive_out_tol = DRIVE_OUT_TOL * max(1.0, float(np.abs(form.A).max(initial=0.0)))
        for r in range(M):
            if tableau.basis[r] < N:
                continue
            row = np.abs(tableau.tab[r, :N])
            column = int(np.argmax(row)) if N else 0
            if N and row[column] > drive_out_tol:
                tableau.pivot(r, column)
            else:
                redundant.append(r)
        if redundant:
            logger.debug(f"Удалены линейно зависимые строки: {redundant}")
        keep = np.setdiff1d(np.arange(M), redundant)
        tableau.tab = tableau.tab[keep][:, :N]
        tableau.rhs = tableau.rhs[keep]
        tableau.basis = [tableau.basis[r] for r in keep]
        active_rows = keep

    status, entering = tableau.run(form.cost, np.ones(N, dtype=bool))
    if status == SolveStatus.UNBOUNDED:
        ray = np.zeros(N)
        ray[entering] = 1.0
        for r, j in enumerate(tableau.basis):
            ray[j] = -tableau.tab[r, entering]
        return SolveOutcome(
            status=SolveStatus.UNBOUNDED,
            certificate=form.direction_to_user(ray),
            iterations=tableau.iterations,
        )

    # Пересчет базисного решения и двойственных по исходной матрице
    B = form.A[active_rows][:, tableau.basis]
    z = np.zeros(N)
    z[tableau.basis] = _basis_solve(B, form.b[active_rows])
    z[(z < 0) & (z > -FEASIBILITY_TOL)] = 0.0

    y = np.zeros(M)
    y[active_rows] = _basis_solve(B.T, form.cost[tableau.basis])
    y = np.where(form.flipped, -y, y)

    x = form.to_user(z)
    objective_value = float(lp.objective @ x)
    rhs_all = np.where(form.flipped, -form.b, form.b)
    dual_objective = form.sign * (float(y @ rhs_all) + form.constant)
    dual = form.sign * y[:form.num_user_rows]

    logger.debug(
        f"LP {lp.num_variables}×{len(lp.rows)}: оптимум {objective_value:.10g}, "
        f"итераций {tableau.iterations}"
    )
    return SolveOutcome(
        status=SolveStatus.OPTIMAL,
        primal=x,
        dual=dual,
        objective_value=objective_value,
        dual_objective=dual_objective,
        iterations=tableau.iterations,
    )


def check_psd(matrix: np.ndarray) -> np.ndarray:
    """
    Проверяет симметричность и положительную полуопределенность.

    Returns:
        np.ndarray: Симметризованная матрица

    Raises:
        NotPSDError: Матрица несимметрична или λ_min < -PSD_TOL
    """
    V = np.asarray(matrix, dtype=float)
    scale = max(1.0, float(np.abs(V).max(initial=0.0)))
    if not np.allclose(V, V.T, rtol=0.0, atol=PSD_TOL * scale):
        raise NotPSDError("Матрица квадратичной формы несимметрична")
    V = 0.5 * (V + V.T)
    smallest = float(np.linalg.eigvalsh(V).min()) if V.size else 0.0
    if smallest < -PSD_TOL * scale:
        raise NotPSDError(f"Матрица не положительно полуопределена: λ_min = {smallest:.3e}")
    return V


class _ActiveSetConstraints:
    """Ограничения QP в форме a·x >= h (неравенства) и a·x = h (равенства)."""

    def __init__(self, qp: QuadraticProgram):
        d = qp.num_variables
        normals, levels, is_equality, user_row, user_sign = [], [], [], [], []

        for index, row in enumerate(qp.rows):
            sign = -1.0 if row.sense == RowSense.LE else 1.0
            normals.append(sign * row.coefficients)
            levels.append(sign * row.bound)
            is_equality.append(row.sense == RowSense.EQ)
            user_row.append(index)
            user_sign.append(sign)

        lower = np.zeros(d) if qp.lower is None else qp.lower
        upper = np.full(d, np.inf) if qp.upper is None else qp.upper
        for k in range(d):
            if np.isfinite(lower[k]):
                e = np.zeros(d)
                e[k] = 1.0
                normals.append(e)
                levels.append(lower[k])
                is_equality.append(False)
                user_row.append(-1)
                user_sign.append(1.0)
            if np.isfinite(upper[k]):
                e = np.zeros(d)
                e[k] = -1.0
                normals.append(e)
                levels.append(-upper[k])
                is_equality.append(False)
                user_row.append(-1)
                user_sign.append(1.0)

        self.G = np.vstack(normals) if normals else np.zeros((0, d))
        self.h = np.asarray(levels, dtype=float)
        self.is_equality = np.asarray(is_equality, dtype=bool)
        self.user_row = np.asarray(user_row, dtype=int)
        self.user_sign = np.asarray(user_sign, dtype=float)

    def __len__(self) -> int:
        return self.G.shape[0]


def _null_space(matrix: np.ndarray, d: int) -> np.ndarray:
    if matrix.shape[0] == 0:
        return np.eye(d)
    _, s, vt = np.linalg.svd(matrix)
    rank = int(np.sum(s > _RANK_TOL * max(1.0, s.max(initial=0.0))))
    return vt[rank:].T


def _initial_working_set(cons: _ActiveSetConstraints, x: np.ndarray) -> List[int]:
    """Равенства плюс линейно независимые активные неравенства (жадно, по возрастанию индекса)."""
    working: List[int] = []
    rank = 0
    slack = cons.G @ x - cons.h
    order = list(np.flatnonzero(cons.is_equality)) + [
        i for i in range(len(cons)) if not cons.is_equality[i] and abs(slack[i]) <= FEASIBILITY_TOL
    ]
    for i in order:
        candidate = working + [int(i)]
        new_rank = np.linalg.matrix_rank(cons.G[candidate], tol=_RANK_TOL) if candidate else 0
        if new_rank > rank:
            working = candidate
            rank = new_rank
    return working


def solve_qp(qp: QuadraticProgram) -> SolveOutcome:
    """
    Решает выпуклую QP min xᵀVx + q·x методом активных множеств.

    Рабочее множество ограничений поддерживается линейно независимым; шаг
    строится в нулевом пространстве рабочих ограничений: ньютоновский шаг по
    положительной кривизне, спуск по направлению нулевой кривизны иначе.

    Args:
        qp: Квадратичная задача

    Returns:
        SolveOutcome: Optimal с минимизатором и множителями по строкам задачи,
        Infeasible с сертификатом Фаркаша, Unbounded при неограниченном спуске

    Raises:
        NotPSDError: Матрица несимметрична или не положительно полуопределена
        NumericalBreakdownError: Превышен лимит итераций
    """
    V = check_psd(qp.psd_matrix)
    q = qp.linear_term
    d = qp.num_variables
    hessian = 2.0 * V

    start = solve_lp(qp.feasibility_program())
    if start.status != SolveStatus.OPTIMAL:
        return SolveOutcome(status=SolveStatus.INFEASIBLE, certificate=start.certificate, iterations=start.iterations)

    cons = _ActiveSetConstraints(qp)
    x = start.primal.copy()
    working = _initial_working_set(cons, x)
    iteration_limit = 10 * (len(cons) + d) ** 2 + 10
    iterations = 0
    grad_scale = 1.0

    while True:
        iterations += 1
        if iterations > iteration_limit:
            raise NumericalBreakdownError(f"Метод активных множеств не сошелся за {iteration_limit} итераций")

        gradient = hessian @ x + q
        grad_scale = max(1.0, float(np.abs(gradient).max(initial=0.0)))
        A_w = cons.G[working] if working else np.zeros((0, d))
        Z = _null_space(A_w, d)

        step = np.zeros(d)
        descent_ray = False
        if Z.shape[1] > 0:
            reduced_gradient = Z.T @ gradient
            eigenvalues, eigenvectors = np.linalg.eigh(Z.T @ hessian @ Z)
            coefficients = eigenvectors.T @ reduced_gradient
            curvature_tol = _RANK_TOL * max(1.0, float(np.abs(eigenvalues).max(initial=0.0)))
            flat = eigenvalues <= curvature_tol
            if np.any(flat & (np.abs(coefficients) > OPTIMALITY_TOL * 1e-2 * grad_scale)):
                step = -Z @ (eigenvectors[:, flat] @ coefficients[flat])
                descent_ray = True
            else:
                curved = ~flat
                step = -Z @ (eigenvectors[:, curved] @ (coefficients[curved] / eigenvalues[curved]))

        if np.linalg.norm(step) <= 1e-12 * (1.0 + np.linalg.norm(x)):
            # Стационарная точка на текущей грани: проверка знаков множителей
            if not working:
                break
            multipliers = np.linalg.lstsq(A_w.T, gradient, rcond=None)[0]
            inequality = ~cons.is_equality[working]
            negative = np.flatnonzero(inequality & (multipliers < -OPTIMALITY_TOL * grad_scale))
            if negative.size == 0:
                break
            drop = int(negative[np.argmin(multipliers[negative])])
            logger.debug(f"QP: ограничение {working[drop]} покидает рабочее множество")
            working.pop(drop)
            continue

        # Тест отношений по неактивным неравенствам
        in_working = np.zeros(len(cons), dtype=bool)
        in_working[working] = True
        rates = cons.G @ step
        slack = np.maximum(cons.G @ x - cons.h, 0.0)
        blocking = np.flatnonzero(~in_working & ~cons.is_equality & (rates < -1e-12))
        alpha = np.inf if descent_ray else 1.0
        blocker = -1
        for i in blocking:
            ratio = slack[i] / -rates[i]
            if ratio < alpha - 1e-14:
                alpha = ratio
                blocker = int(i)

        if not np.isfinite(alpha):
            return SolveOutcome(status=SolveStatus.UNBOUNDED, certificate=step, iterations=iterations)

        x = x + alpha * step
        if blocker >= 0:
            working.append(blocker)

    multipliers_full = np.zeros(len(cons))
    if working:
        A_w = cons.G[working]
        lam = np.linalg.lstsq(A_w.T, hessian @ x + q, rcond=None)[0]
        multipliers_full[working] = lam
        residual = float(np.linalg.norm(A_w.T @ lam - (hessian @ x + q)))
        if residual > OPTIMALITY_TOL * grad_scale:
            logger.warning(f"QP: невязка условий стационарности {residual:.3e}")

    dual = np.zeros(len(qp.rows))
    for i in range(len(cons)):
        if cons.user_row[i] >= 0:
            dual[cons.user_row[i]] = cons.user_sign[i] * multipliers_full[i]

    objective_value = float(x @ V @ x + q @ x)
    logger.debug(f"QP {d} переменных: оптимум {objective_value:.10g}, итераций {iterations}")
    return SolveOutcome(
        status=SolveStatus.OPTIMAL,
        primal=x,
        dual=dual,
        objective_value=objective_value,
        iterations=iterations,
    )
