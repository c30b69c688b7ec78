"""Evaluation criteria: single values, per-criterion optima, the matrix."""

import math

import pytest

from balregret.core import (
    BinarySolution,
    Budgets,
    InputError,
    Instance,
    enumerate_solutions,
    is_feasible,
)
from balregret.instances import SplitMix64, gen_selection
from balregret import evaluation
from conftest import rand_mrs


def _pick(indices, n=6):
    return BinarySolution.from_indices(indices, n)


class TestEvalCriterion:
    def test_unknown_criterion(self, example_two):
        with pytest.raises(InputError):
            evaluation.eval_criterion(example_two, _pick([0, 1, 2]), "XX")

    def test_infeasible_solution(self, example_two):
        with pytest.raises(InputError):
            evaluation.eval_criterion(example_two, _pick([0, 1]), "BC")

    def test_worked_example_values(self, example_two):
        # rows: the worst-case, regret, and balanced-regret optimizers
        rows = {
            "wc": _pick([3, 4, 5]),
            "reg": _pick([0, 1, 2]),
            "bal": _pick([2, 3, 4]),
        }
        table = {
            ("wc", "WC-G"): 12, ("wc", "R-G"): 6, ("wc", "BR"): 2,
            ("reg", "WC-G"): 14, ("reg", "R-G"): 3, ("reg", "BR"): 3,
            ("bal", "WC-G"): 13, ("bal", "R-G"): 4, ("bal", "BR"): 1,
        }
        for (row, crit), expect in table.items():
            got = evaluation.eval_criterion(example_two, rows[row], crit)
            assert got == expect, (row, crit, got)

    def test_criterion_orderings(self):
        rng = SplitMix64(9201)
        for trial in range(40):
            inst = rand_mrs(rng, n_lo=3, n_hi=7, name=f"ord{trial}")
            xs = enumerate_solutions(inst.feasible, 10**6)
            x = xs[rng.randint(0, len(xs) - 1)]
            vals = {c: evaluation.eval_criterion(inst, x, c)
                    for c in evaluation.CRITERIA}
            assert vals["BC"] <= vals["WC-G"] <= vals["WC-I"]
            assert vals["BR"] <= vals["R-G"]  # balancing can only help
            assert vals["R-G"] >= 0 and vals["BR"] >= 0
            assert vals["R-I"] >= 0


class TestOptimizeCriterion:
    def test_worked_example_rows(self, example_two):
        assert (sorted(evaluation.optimize_criterion(example_two, "WC-I").x
                       .indices()) == [3, 4, 5])
        assert (sorted(evaluation.optimize_criterion(example_two, "WC-G").x
                       .indices()) == [3, 4, 5])
        rg = evaluation.optimize_criterion(example_two, "R-G")
        assert sorted(rg.x.indices()) == [0, 1, 2] and rg.value == 3
        br = evaluation.optimize_criterion(example_two, "BR")
        assert sorted(br.x.indices()) == [2, 3, 4] and br.value == 1

    def test_optimum_beats_every_solution(self):
        rng = SplitMix64(9202)
        for trial in range(15):
            inst = rand_mrs(rng, n_lo=3, n_hi=6, name=f"opt{trial}")
            xs = enumerate_solutions(inst.feasible, 10**6)
            for crit in evaluation.CRITERIA:
                rep = evaluation.optimize_criterion(inst, crit)
                assert is_feasible(rep.x, inst.feasible)
                values = [evaluation.eval_criterion(inst, x, crit)
                          for x in xs]
                assert rep.value == min(values), (crit, inst)
                assert (evaluation.eval_criterion(inst, rep.x, crit)
                        == rep.value)


class TestCriteriaMatrix:
    def test_zero_diagonal_and_shape(self):
        batch = [gen_selection(6, s, gamma=2, gamma_prime=1)
                 for s in range(3)]
        matrix = evaluation.criteria_matrix(batch)
        assert matrix.rows == list(evaluation.CRITERIA)
        assert matrix.cols == list(evaluation.CRITERIA)
        assert matrix.instances == 3
        for i, crit in enumerate(matrix.rows):
            j = matrix.cols.index(crit)
            cell = matrix.mean[i][j]
            assert cell == pytest.approx(0.0) or math.isnan(cell)
            assert all(m >= -1e-12 for m in matrix.mean[i]
                       if not math.isnan(m))

    def test_gamma_prime_range_rows(self):
        batch = [gen_selection(6, 5, gamma=2, gamma_prime=1)]
        matrix = evaluation.criteria_matrix(batch, range(0, 3))
        assert matrix.rows[-3:] == ["BR(0)", "BR(1)", "BR(2)"]
        # the BR row at the instance budget matches the plain BR row
        i_br = matrix.rows.index("BR")
        i_gp = matrix.rows.index("BR(1)")
        assert matrix.mean[i_br] == pytest.approx(matrix.mean[i_gp])

    def test_csv_format(self):
        batch = [gen_selection(5, 1, gamma=1, gamma_prime=1)]
        text = evaluation.criteria_matrix(batch).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "solution,criterion,mean_rel_diff,excluded"
        assert len(lines) == 1 + len(evaluation.CRITERIA) ** 2

    def test_empty_batch_rejected(self):
        with pytest.raises(InputError):
            evaluation.criteria_matrix([])


def test_zero_optimum_handling():
    # with d == 0 every regret criterion collapses to zero
    inst = gen_selection(5, 3, gamma=2, gamma_prime=1)
    from balregret.core import ItemCosts

    flat = Instance(ItemCosts(inst.costs.c_hat, (0,) * inst.n),
                    Budgets(2, 1), inst.feasible)
    matrix = evaluation.criteria_matrix([flat])
    i_bc = matrix.rows.index("BC")
    j_br = matrix.cols.index("BR")
    assert matrix.mean[i_bc][j_br] == pytest.approx(0.0)
    assert matrix.excluded[i_bc][j_br] == 0
