"""
Тесты LP/QP движка.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.convex import (
    LinearConstraint,
    LinearProgram,
    QuadraticProgram,
    RowSense,
    SolveStatus,
    check_psd,
    solve_lp,
    solve_qp,
)
from core.exceptions import NotPSDError, ProblemFormatError


class TestLinearProgram:
    """Тесты описания линейной задачи."""

    def test_from_matrices(self):
        """Тест сборки задачи из блоков."""
        lp = LinearProgram.from_matrices(
            [1.0, 1.0],
            [(np.eye(2), [1.0, 2.0], RowSense.GE), (np.ones((1, 2)), [5.0], RowSense.LE)],
        )

        assert lp.num_variables == 2
        assert lp.matrix.shape == (3, 2)
        assert lp.senses == (RowSense.GE, RowSense.GE, RowSense.LE)
        assert list(lp.lower_bounds) == [0.0, 0.0]
        assert np.all(np.isinf(lp.upper_bounds))

    def test_shape_mismatch(self):
        """Тест строки неверной длины."""
        with pytest.raises(ProblemFormatError):
            LinearProgram(objective=[1.0, 1.0], rows=(LinearConstraint(coefficients=[1.0], bound=1.0),))

    def test_inconsistent_bounds(self):
        with pytest.raises(ProblemFormatError):
            LinearProgram(objective=[1.0], lower=[2.0], upper=[1.0])


class TestSolveLP:
    """Тесты двухфазного симплекс-метода."""

    def test_minimize_with_ge_row(self):
        """Тест простой минимизации и знака двойственной переменной."""
        lp = LinearProgram.from_matrices([1.0, 1.0], [(np.ones((1, 2)), [1.0], RowSense.GE)])

        outcome = solve_lp(lp)

        assert outcome.status == SolveStatus.OPTIMAL
        assert outcome.objective_value == pytest.approx(1.0)
        assert outcome.dual_objective == pytest.approx(1.0)
        assert outcome.dual[0] == pytest.approx(1.0)

    def test_maximize(self):
        """Тест максимизации: двойственные равны производным по правым частям."""
        lp = LinearProgram.from_matrices(
            [1.0, 2.0],
            [(np.array([[1.0, 1.0], [0.0, 1.0]]), [4.0, 3.0], RowSense.LE)],
            maximize=True,
        )

        outcome = solve_lp(lp)

        assert outcome.is_optimal
        assert np.allclose(outcome.primal, [1.0, 3.0])
        assert outcome.objective_value == pytest.approx(7.0)
        assert np.allclose(outcome.dual, [1.0, 1.0])
        assert outcome.dual_objective == pytest.approx(7.0)

    def test_equality_and_free_variable(self):
        """Тест равенства и свободной переменной."""
        lp = LinearProgram.from_matrices(
            [1.0, 0.0],
            [(np.array([[1.0, -1.0]]), [-2.0], RowSense.EQ), (np.array([[0.0, 1.0]]), [0.0], RowSense.GE)],
            lower=[-np.inf, -np.inf],
        )

        outcome = solve_lp(lp)

        assert outcome.is_optimal
        assert np.allclose(outcome.primal, [-2.0, 0.0])

    def test_bounded_variables(self):
        """Тест переменных с конечными верхними границами."""
        lp = LinearProgram(objective=[-1.0, -1.0], lower=[0.0, -1.0], upper=[1.0, 2.0])

        outcome = solve_lp(lp)

        assert outcome.is_optimal
        assert np.allclose(outcome.primal, [1.0, 2.0])
        assert outcome.objective_value == pytest.approx(-3.0)

    def test_infeasible_certificate(self):
        """Тест сертификата Фаркаша для несовместной системы."""
        A = np.array([[1.0], [1.0]])
        b = np.array([2.0, 1.0])
        lp = LinearProgram(
            objective=[1.0],
            rows=(
                LinearConstraint(coefficients=A[0], bound=b[0], sense=RowSense.GE),
                LinearConstraint(coefficients=A[1], bound=b[1], sense=RowSense.LE),
            ),
        )

        outcome = solve_lp(lp)

        assert outcome.status == SolveStatus.INFEASIBLE
        y = outcome.certificate
        assert y[0] >= -1e-9
        assert y[1] <= 1e-9
        assert float(y @ A[:, 0]) <= 1e-9
        assert float(y @ b) > 0

    def test_unbounded_ray(self):
        """Тест луча неограниченности."""
        lp = LinearProgram.from_matrices(
            [-1.0, 0.0],
            [(np.array([[1.0, -1.0]]), [1.0], RowSense.LE)],
        )

        outcome = solve_lp(lp)

        assert outcome.status == SolveStatus.UNBOUNDED
        ray = outcome.certificate
        assert float(lp.objective @ ray) < 0
        assert np.all(ray >= -1e-12)
        assert float(lp.matrix @ ray) <= 1e-12

    def test_degenerate_problem_terminates(self):
        """Тест вырожденной задачи (правило Бланда не зацикливается)."""
        A = np.array([
            [0.5, -5.5, -2.5, 9.0],
            [0.5, -1.5, -0.5, 1.0],
            [1.0, 0.0, 0.0, 0.0],
        ])
        lp = LinearProgram.from_matrices(
            [-10.0, 57.0, 9.0, 24.0],
            [(A, [0.0, 0.0, 1.0], RowSense.LE)],
        )

        outcome = solve_lp(lp)

        assert outcome.is_optimal
        assert outcome.objective_value == pytest.approx(-1.0)

    def test_redundant_equalities(self):
        """Тест линейно зависимых равенств."""
        A = np.array([[1.0, 1.0], [2.0, 2.0]])
        lp = LinearProgram.from_matrices([1.0, 2.0], [(A, [1.0, 2.0], RowSense.EQ)])

        outcome = solve_lp(lp)

        assert outcome.is_optimal
        assert np.allclose(outcome.primal, [1.0, 0.0])

    def test_dependent_equalities_with_rounding(self):
        """Тест равенств (e_j - p)·t = t*_j - p·t*: их сумма равна нулю лишь с точностью округления."""
        p = np.array([0.137, 0.291, 0.572])
        t_star = np.array([0.3, 1.1, 2.0])
        A = np.eye(3) - p[None, :]
        lp = LinearProgram.from_matrices(p, [(A, t_star - p @ t_star, RowSense.EQ)])

        outcome = solve_lp(lp)

        assert outcome.is_optimal
        assert np.allclose(outcome.primal, [0.0, 0.8, 1.7], atol=1e-8)

    def test_deterministic(self):
        """Тест детерминированности: одинаковый вход дает одинаковый ответ."""
        lp = LinearProgram.from_matrices([1.0, 1.0, 1.0], [(np.ones((1, 3)), [1.0], RowSense.GE)])

        first, second = solve_lp(lp), solve_lp(lp)

        assert np.array_equal(first.primal, second.primal)

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_strong_duality(self, seed):
        """Свойство: для допустимой ограниченной LP значения прямой и двойственной совпадают."""
        rng = np.random.default_rng(seed)
        rows, cols = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        A = rng.uniform(0.0, 1.0, size=(rows, cols)) + 0.05
        b = rng.uniform(0.1, 1.0, size=rows)
        c = rng.uniform(0.1, 1.0, size=cols)
        lp = LinearProgram.from_matrices(c, [(A, b, RowSense.GE)])

        outcome = solve_lp(lp)

        assert outcome.is_optimal
        x, y = outcome.primal, outcome.dual
        assert np.all(A @ x >= b - 1e-8)
        assert np.all(y >= -1e-9)
        assert outcome.objective_value == pytest.approx(outcome.dual_objective, abs=1e-8)
        # Дополняющая нежесткость
        assert np.allclose(y * (A @ x - b), 0.0, atol=1e-8)


class TestSolveQP:
    """Тесты метода активных множеств."""

    def test_projection_onto_halfspace(self):
        """Тест минимума нормы на полупространстве."""
        qp = QuadraticProgram(
            psd_matrix=np.eye(2),
            rows=(LinearConstraint(coefficients=[1.0, 1.0], bound=1.0, sense=RowSense.GE),),
        )

        outcome = solve_qp(qp)

        assert outcome.is_optimal
        assert np.allclose(outcome.primal, [0.5, 0.5], atol=1e-8)
        assert outcome.objective_value == pytest.approx(0.5)
        assert outcome.dual[0] == pytest.approx(1.0, abs=1e-7)

    def test_linear_term(self):
        """Тест безусловного минимума внутри допустимой области."""
        qp = QuadraticProgram(psd_matrix=np.eye(2), linear=[-2.0, -4.0])

        outcome = solve_qp(qp)

        assert np.allclose(outcome.primal, [1.0, 2.0], atol=1e-8)
        assert outcome.objective_value == pytest.approx(-5.0)

    def test_singular_matrix_with_equality(self):
        """Тест вырожденной (полуопределенной) квадратичной формы."""
        V = np.array([[1.0, -1.0], [-1.0, 1.0]])
        qp = QuadraticProgram(
            psd_matrix=V,
            linear=[0.0, 1.0],
            rows=(LinearConstraint(coefficients=[1.0, 1.0], bound=2.0, sense=RowSense.EQ),),
        )

        outcome = solve_qp(qp)

        assert outcome.is_optimal
        x = outcome.primal
        assert x.sum() == pytest.approx(2.0)
        # Минимум (x1 - x2)² + x2 при x1 + x2 = 2: x = (1.125, 0.875)
        assert np.allclose(x, [1.125, 0.875], atol=1e-7)

    def test_infeasible_qp(self):
        qp = QuadraticProgram(
            psd_matrix=np.eye(1),
            rows=(LinearConstraint(coefficients=[1.0], bound=-1.0, sense=RowSense.GE),),
            upper=[-2.0],
            lower=[-np.inf],
        )

        assert solve_qp(qp).status == SolveStatus.INFEASIBLE

    def test_not_psd(self):
        """Тест неположительно определенной матрицы."""
        with pytest.raises(NotPSDError):
            check_psd(np.array([[1.0, 0.0], [0.0, -1.0]]))
        with pytest.raises(NotPSDError):
            check_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))
