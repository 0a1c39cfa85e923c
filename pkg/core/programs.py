# core/programs.py - формулировки LP/QP задачи контракта

"""
Построители линейных и квадратичных задач над матрицей распределений F.

Переменные контракта - выплаты t ∈ R^m_{>=0}. Все построители принимают
numpy-массивы (F размера n×m, вектор затрат, индекс цели) и не выполняют
проверок доменных инвариантов: это делает core.validators.
"""

from typing import List, Tuple

import numpy as np

from .convex import LinearProgram, QuadraticProgram, RowSense

Block = Tuple[np.ndarray, np.ndarray, RowSense]


def alternatives_of(F: np.ndarray, target: int) -> List[int]:
    return [i for i in range(F.shape[0]) if i != target]


def incentive_rows(F: np.ndarray, costs: np.ndarray, target: int, margin: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Строки IC: (F_n - F_i)·t >= c_n - c_i + margin для каждой альтернативы i.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Матрица (n-1)×m и правые части
    """
    others = alternatives_of(F, target)
    A = F[target] - F[others]
    b = costs[target] - costs[others] + margin
    return A, b


def monotone_rows(m: int, width: int) -> Tuple[np.ndarray, np.ndarray]:
    """Строки t_j - t_{j+1} <= 0 для первых m из width переменных."""
    A = np.zeros((m - 1, width))
    for j in range(m - 1):
        A[j, j] = 1.0
        A[j, j + 1] = -1.0
    return A, np.zeros(m - 1)


def _padded(A: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros((A.shape[0], width))
    out[:, :A.shape[1]] = A
    return out


def min_pay_program(
    F: np.ndarray, costs: np.ndarray, target: int, margin: float = 0.0, monotone: bool = False
) -> LinearProgram:
    """MIN-PAY LP: min F_n·t при IC и t >= 0."""
    m = F.shape[1]
    blocks: List[Block] = [(*incentive_rows(F, costs, target, margin), RowSense.GE)]
    if monotone:
        blocks.append((*monotone_rows(m, m), RowSense.LE))
    return LinearProgram.from_matrices(F[target], blocks)


def min_budget_program(
    F: np.ndarray, costs: np.ndarray, target: int, margin: float = 0.0, monotone: bool = False
) -> LinearProgram:
    """
    MIN-BUDGET LP над переменными (t, B): min B при IC, t_j <= B, t >= 0.

    Последняя переменная решения - бюджет B.
    """
    m = F.shape[1]
    width = m + 1
    A_ic, b_ic = incentive_rows(F, costs, target, margin)
    cap = np.hstack([np.eye(m), -np.ones((m, 1))])
    blocks: List[Block] = [
        (_padded(A_ic, width), b_ic, RowSense.GE),
        (cap, np.zeros(m), RowSense.LE),
    ]
    if monotone:
        blocks.append((*monotone_rows(m, width), RowSense.LE))
    objective = np.zeros(width)
    objective[m] = 1.0
    return LinearProgram.from_matrices(objective, blocks)


def statistical_program(F: np.ndarray, target: int, monotone: bool = False) -> LinearProgram:
    """
    LP минимаксного теста над (ψ, β): max β при (F_n - F_i)·ψ - β >= 0,
    ψ ∈ [0,1]^m, β ∈ [-1, 1]. Минимаксный суммарный риск R* = 1 - β*.
    """
    m = F.shape[1]
    width = m + 1
    others = alternatives_of(F, target)
    A = np.hstack([F[target] - F[others], -np.ones((len(others), 1))])
    blocks: List[Block] = [(A, np.zeros(len(others)), RowSense.GE)]
    if monotone:
        blocks.append((*monotone_rows(m, width), RowSense.LE))
    objective = np.zeros(width)
    objective[m] = 1.0
    lower = np.concatenate([np.zeros(m), [-1.0]])
    upper = np.ones(width)
    return LinearProgram.from_matrices(objective, blocks, lower=lower, upper=upper, maximize=True)


def least_favorable_program(F: np.ndarray, target: int) -> LinearProgram:
    """
    Двойственная LP над (λ, μ): min Σ_j μ_j при μ_j + Σ_i λ_i F_ij >= F_nj,
    Σ_i λ_i = 1, λ, μ >= 0. Оптимум равен min_λ TV(F_n, Σ λ_i F_i).
    """
    others = alternatives_of(F, target)
    k, m = len(others), F.shape[1]
    cover = np.hstack([F[others].T, np.eye(m)])
    simplex = np.concatenate([np.ones(k), np.zeros(m)])[None, :]
    objective = np.concatenate([np.zeros(k), np.ones(m)])
    return LinearProgram.from_matrices(
        objective,
        [(cover, F[target], RowSense.GE), (simplex, np.ones(1), RowSense.EQ)],
    )


def variance_matrix(p: np.ndarray) -> np.ndarray:
    """
    Матрица дисперсии V = RᵀR, R = diag(√p)(I - 1pᵀ), так что tᵀVt = Var_p(t).
    """
    p = np.asarray(p, dtype=float)
    R = variance_factor(p)
    return R.T @ R


def variance_factor(p: np.ndarray) -> np.ndarray:
    m = p.size
    return np.sqrt(p)[:, None] * (np.eye(m) - np.outer(np.ones(m), p))


def variance_program(
    F: np.ndarray, costs: np.ndarray, target: int, margin: float = 0.0, monotone: bool = False
) -> QuadraticProgram:
    """QP минимальной дисперсии: min tᵀVt при IC и t >= 0, V строится по F_n."""
    m = F.shape[1]
    blocks: List[Block] = [(*incentive_rows(F, costs, target, margin), RowSense.GE)]
    if monotone:
        blocks.append((*monotone_rows(m, m), RowSense.LE))
    rows = LinearProgram.from_matrices(np.zeros(m), blocks).rows
    return QuadraticProgram(psd_matrix=variance_matrix(F[target]), rows=rows)


def optimal_face_rows(p: np.ndarray, t_star: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Грань минимизаторов дисперсии {t : R t = R t*}: на носителе p контракт
    совпадает с t* с точностью до сдвига, т.е. t_j - t_r = t*_j - t*_r
    относительно первого исхода r носителя. Строки линейно независимы.
    """
    support = np.flatnonzero(p > 0)
    m = p.size
    reference, others = support[0], support[1:]
    A = np.eye(m)[others] - np.eye(m)[reference]
    b = t_star[others] - t_star[reference]
    return A, b


def face_pay_program(
    F: np.ndarray,
    costs: np.ndarray,
    target: int,
    t_star: np.ndarray,
    margin: float = 0.0,
    monotone: bool = False,
) -> LinearProgram:
    """Вторичная LP: минимальная ожидаемая выплата на грани минимизаторов дисперсии."""
    m = F.shape[1]
    blocks: List[Block] = [
        (*incentive_rows(F, costs, target, margin), RowSense.GE),
        (*optimal_face_rows(F[target], t_star), RowSense.EQ),
    ]
    if monotone:
        blocks.append((*monotone_rows(m, m), RowSense.LE))
    return LinearProgram.from_matrices(F[target], blocks)


def tail_masses(F: np.ndarray) -> np.ndarray:
    """S_i(k) = Σ_{j>=k} F_ij: массы хвостов для каждого порога k."""
    return np.cumsum(F[:, ::-1], axis=1)[:, ::-1]
