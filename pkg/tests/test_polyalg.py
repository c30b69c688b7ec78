"""Polynomial special cases: the zero-balancing solver, zero-value check,
dominance reduction, and constant-vector instances."""

import math

import numpy as np
import pytest

from balregret.adversarial import adversarial_selection_dp
from balregret.core import (
    Budgets,
    InputError,
    Instance,
    ItemCosts,
    Knapsack,
    MultiRepSelection,
    enumerate_solutions,
)
from balregret.instances import SplitMix64
from balregret import master, polyalg
from conftest import rand_mrs


def _zero_balancing(inst: Instance) -> Instance:
    return Instance(inst.costs, Budgets(inst.budgets.gamma, 0),
                    inst.feasible, name=inst.name)


class TestRegretBudgetedMrs:
    def test_requires_multirep(self):
        inst = Instance(ItemCosts((1, 2), (1, 1)), Budgets(1, 0),
                        Knapsack((1, 1), 1))
        with pytest.raises(InputError):
            polyalg.solve_regret_budgeted_mrs(inst)

    def test_requires_zero_balancing_budget(self, example_one):
        with pytest.raises(InputError):
            polyalg.solve_regret_budgeted_mrs(example_one)

    def test_matches_bruteforce_on_random_instances(self):
        rng = SplitMix64(8101)
        for trial in range(120):
            inst = _zero_balancing(
                rand_mrs(rng, n_lo=3, n_hi=8, max_parts=3, name=f"p{trial}")
            )
            rep = polyalg.solve_regret_budgeted_mrs(inst)
            bf = master.solve_bruteforce(inst)
            assert rep.value == bf.value, inst
            assert inst.feasible.is_feasible(rep.x)
            # the returned solution really attains the claimed value
            assert adversarial_selection_dp(inst, rep.x).value == rep.value

    def test_scales_well(self):
        rng = SplitMix64(8102)
        inst = _zero_balancing(
            rand_mrs(rng, n_lo=40, n_hi=40, max_parts=4, cost_hi=100,
                     dev_hi=99, gamma_hi=10, name="big")
        )
        rep = polyalg.solve_regret_budgeted_mrs(inst)
        assert rep.value == adversarial_selection_dp(inst, rep.x).value


class TestZeroSolution:
    def test_requires_positive_budgets(self, example_one):
        inst = Instance(example_one.costs, Budgets(0, 1),
                        example_one.feasible)
        with pytest.raises(InputError):
            polyalg.check_zero_solution(inst)
        inst = Instance(example_one.costs, Budgets(1, 0),
                        example_one.feasible)
        with pytest.raises(InputError):
            polyalg.check_zero_solution(inst)

    def test_sound_and_complete(self):
        rng = SplitMix64(8103)
        hits = 0
        for trial in range(150):
            inst = rand_mrs(rng, n_lo=3, n_hi=7, max_parts=2, cost_hi=4,
                            dev_hi=3, name=f"z{trial}")
            if inst.budgets.gamma == 0 or inst.budgets.gamma_prime == 0:
                inst = Instance(inst.costs, Budgets(
                    max(1, inst.budgets.gamma),
                    max(1, inst.budgets.gamma_prime)), inst.feasible)
            x = polyalg.check_zero_solution(inst)
            optimum = master.solve_bruteforce(inst).value
            if x is None:
                assert optimum > 0
            else:
                hits += 1
                assert inst.feasible.is_feasible(x)
                assert adversarial_selection_dp(inst, x).value == 0
                assert optimum == 0
        assert hits > 10  # small cost ranges must produce zero instances


class TestDominance:
    def test_example_pair(self, example_two):
        res = polyalg.dominance_reduce(example_two)
        # item 2 costs no more nominally and no more under full deviation
        # than item 1, so some optimum prefers it
        assert (2, 1) in res.precedences

    def test_precedence_definition_holds(self):
        rng = SplitMix64(8104)
        for trial in range(40):
            inst = rand_mrs(rng, n_lo=4, n_hi=8, max_parts=2,
                            cost_hi=6, dev_hi=6, name=f"d{trial}")
            res = polyalg.dominance_reduce(inst)
            c, d = inst.costs.c_hat, inst.costs.d
            part_of = {}
            for l, part in enumerate(inst.feasible.partitions):
                for i in part:
                    part_of[i] = l
            for i, j in res.precedences:
                assert part_of[i] == part_of[j]
                assert c[i] <= c[j] and c[i] + d[i] <= c[j] + d[j]

    def test_forced_items_preserve_the_optimum(self):
        rng = SplitMix64(8105)
        for trial in range(40):
            inst = rand_mrs(rng, n_lo=4, n_hi=7, max_parts=2,
                            cost_hi=5, dev_hi=5, name=f"f{trial}")
            res = polyalg.dominance_reduce(inst)
            assert not (set(res.forced_in) & set(res.forced_out))
            optimum = master.solve_bruteforce(inst).value
            best = math.inf
            for x in enumerate_solutions(inst.feasible, 10**6):
                if any(x.x[i] == 0 for i in res.forced_in):
                    continue
                if any(x.x[i] == 1 for i in res.forced_out):
                    continue
                best = min(best,
                           adversarial_selection_dp(inst, x).value)
            assert best == optimum


class TestConstantCase:
    def test_constant_nominal_vector(self):
        rng = SplitMix64(8106)
        for trial in range(25):
            base = rand_mrs(rng, n_lo=3, n_hi=6, name=f"cn{trial}")
            costs = ItemCosts((7,) * base.n, base.costs.d)
            inst = Instance(costs, base.budgets, base.feasible)
            rep = polyalg.solve_constant_case(inst)
            assert rep is not None
            assert rep.value == master.solve_bruteforce(inst).value

    def test_constant_deviation_vector(self):
        rng = SplitMix64(8107)
        for trial in range(25):
            base = rand_mrs(rng, n_lo=3, n_hi=6, name=f"cd{trial}")
            costs = ItemCosts(base.costs.c_hat, (5,) * base.n)
            inst = Instance(costs, base.budgets, base.feasible)
            rep = polyalg.solve_constant_case(inst)
            assert rep is not None
            assert rep.value == master.solve_bruteforce(inst).value

    def test_general_instance_declined(self, example_one):
        assert polyalg.solve_constant_case(example_one) is None
