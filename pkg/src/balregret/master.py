"""Optimize the first-stage solution.

Three routes: full scenario enumeration, iterative scenario generation
(master relaxation gives lower bounds, the adversarial problem gives upper
bounds), and a compact MILP for multi-representative selection obtained by
enumerating the balancing dual's break points.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import milp
from .adversarial import (
    SGrid,
    adversarial_bruteforce,
    adversarial_milp,
    adversarial_selection_dp,
)
from .core import (
    ENUMERATION_GUARD,
    BinarySolution,
    Instance,
    InputError,
    MultiRepSelection,
    Scenario,
    ScaleError,
    ShortestPath,
    enumerate_solutions,
    nominal_solve,
)

DEFAULT_TIME_LIMIT = 1800.0

AdversaryFn = Callable[[Instance, BinarySolution], "object"]

ADVERSARY_METHODS: dict[str, AdversaryFn] = {
    "bruteforce": adversarial_bruteforce,
    "milp": adversarial_milp,
    "dp": adversarial_selection_dp,
}


@dataclass
class ScenarioPool:
    """A growing subset of the adversary's (solution, attack) pairs."""

    entries: list[tuple[BinarySolution, Scenario]] = field(default_factory=list)

    def __contains__(self, entry: tuple[BinarySolution, Scenario]) -> bool:
        return entry in self.entries

    def add(self, y: BinarySolution, delta: Scenario) -> bool:
        if (y, delta) in self.entries:
            return False
        self.entries.append((y, delta))
        return True

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class SolveReport:
    x: BinarySolution
    value: int
    iterations: int
    lower_bounds: list[float]
    upper_bounds: list[float]
    wall_time: float
    method: str
    optimal: bool = True

    @property
    def gap(self) -> float:
        if not self.lower_bounds or not self.upper_bounds:
            return math.inf
        return self.upper_bounds[-1] - self.lower_bounds[-1]

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "x": list(self.x.indices()),
            "iterations": self.iterations,
            "lower_bounds": self.lower_bounds,
            "upper_bounds": self.upper_bounds,
            "time": self.wall_time,
            "method": self.method,
            "optimal": self.optimal,
        }


def build_master(inst: Instance, pool: ScenarioPool) -> milp.MilpModel:
    """Master model over the current pool: one value variable, n binaries
    for x, and one balancing attack vector per scenario."""
    if not len(pool):
        raise InputError("scenario pool must be non-empty")
    n = inst.n
    c, d = inst.costs.c_hat, inst.costs.d
    gp = inst.budgets.gamma_prime

    model = milp.MilpModel()
    z = model.add_continuous(-milp.INF)
    x_vars = [model.add_binary() for _ in range(n)]
    model.set_objective("min", {z: 1.0})

    for coefs, sense, rhs in inst.feasible.linear_rows():
        model.add_constraint({x_vars[j]: a for j, a in coefs.items()}, sense, rhs)

    for y, delta in pool.entries:
        # Balancing variables only pay off on the adversary's items.
        eps_vars = {i: model.add_binary() for i in range(n) if y.x[i]}
        coefs: dict[int, float] = {z: 1.0}
        rhs = 0.0
        for i in range(n):
            coefs[x_vars[i]] = -float(c[i] + d[i] * delta.delta[i])
            if y.x[i]:
                coefs[eps_vars[i]] = float(d[i])
                rhs -= c[i] + d[i] * delta.delta[i]
        model.add_constraint(coefs, ">=", rhs)
        for i, v in eps_vars.items():
            model.add_constraint({v: 1.0, x_vars[i]: 1.0}, "<=", 1.0)
        model.add_constraint(
            {v: 1.0 for v in eps_vars.values()}, "<=", float(gp)
        )
    return model


def _extract_x(inst: Instance, assignment: list[float]) -> BinarySolution:
    """Read the first-stage solution out of a master assignment.

    Variable 0 is the value variable; x occupies the next n slots. For path
    sets, value-neutral cycles the flow encoding admits are stripped.
    """
    bits = [int(round(assignment[1 + i])) for i in range(inst.n)]
    x = BinarySolution(bits)
    f = inst.feasible
    if isinstance(f, ShortestPath) and not f.is_feasible(x):
        succ = {}
        for e in range(f.n):
            if bits[e]:
                succ.setdefault(f.edges[e][0], e)
        path = []
        node, seen = f.source, {f.source}
        while node != f.target:
            e = succ.get(node)
            if e is None or f.edges[e][1] in seen:
                raise InputError("master solution does not decompose to a path")
            path.append(e)
            node = f.edges[e][1]
            seen.add(node)
        x = BinarySolution.from_indices(path, f.n)
    if not f.is_feasible(x):
        raise InputError("master returned an infeasible first-stage solution")
    return x


def _initial_scenario(inst: Instance) -> tuple[BinarySolution, Scenario]:
    """Warm start: the robust nominal solution and a greedy attack on the
    largest deviations it leaves unpacked."""
    y0 = nominal_solve(inst.feasible, inst.costs.worst())
    d = inst.costs.d
    targets = [i for i in range(inst.n) if y0.x[i] == 0 and d[i] > 0]
    targets.sort(key=lambda i: (-d[i], i))
    delta = Scenario.from_indices(targets[: inst.budgets.gamma], inst.n)
    return y0, delta


def _pick_adversary(inst: Instance, adversary: Optional[str]) -> tuple[str, AdversaryFn]:
    if adversary is None:
        adversary = "dp" if isinstance(inst.feasible, MultiRepSelection) else "milp"
    if adversary not in ADVERSARY_METHODS:
        raise InputError(f"unknown adversary method {adversary!r}")
    return adversary, ADVERSARY_METHODS[adversary]


def solve_iterative(
    inst: Instance,
    adversary: Optional[str] = None,
    time_limit: float = DEFAULT_TIME_LIMIT,
) -> SolveReport:
    """Scenario generation: alternate the pool master (lower bound) with the
    adversarial evaluation of its solution (upper bound) until they meet."""
    name, adv = _pick_adversary(inst, adversary)
    start = time.monotonic()
    pool = ScenarioPool()
    y0, delta0 = _initial_scenario(inst)
    pool.add(y0, delta0)

    lower: list[float] = []
    upper: list[float] = []
    best_x: Optional[BinarySolution] = None
    best_value = math.inf

    # The adversary may copy the first stage, so zero bounds every value
    # from below; when the robust nominal solution already attains it the
    # loop is unnecessary.
    cert0 = adv(inst, y0)
    if cert0.value <= 0:
        return SolveReport(
            x=y0,
            value=0,
            iterations=0,
            lower_bounds=[0.0],
            upper_bounds=[0.0],
            wall_time=time.monotonic() - start,
            method=f"iterative/{name}",
            optimal=True,
        )
    best_x, best_value = y0, cert0.value
    pool.add(cert0.y, cert0.delta)

    iterations = 0
    optimal = False
    while True:
        iterations += 1
        model = build_master(inst, pool)
        res = milp.solve_milp(model, branch_only=range(1, inst.n + 1))
        if res.status != "optimal":
            raise ScaleError(f"master solve failed with status {res.status}")
        lb = res.value
        x = _extract_x(inst, res.assignment)
        cert = adv(inst, x)
        if cert.value < best_value:
            best_value = cert.value
            best_x = x
        lower.append(lb)
        upper.append(float(best_value))
        if best_value - lb <= 1e-6:
            optimal = True
            break
        if time.monotonic() - start > time_limit:
            break
        added = pool.add(cert.y, cert.delta)
        assert added, "regenerated a pooled scenario without convergence"
    assert best_x is not None
    return SolveReport(
        x=best_x,
        value=int(round(best_value)),
        iterations=iterations,
        lower_bounds=lower,
        upper_bounds=upper,
        wall_time=time.monotonic() - start,
        method=f"iterative/{name}",
        optimal=optimal,
    )


def _full_pool(inst: Instance) -> ScenarioPool:
    """Every adversary solution paired with its undominated attacks.

    Attacks on items the adversary packed are dropped (never helpful), as
    are attacks on zero-deviation items; among the rest only inclusion-
    maximal attack sets are kept, since a superset attack dominates its
    subsets for every first-stage solution.
    """
    d = inst.costs.d
    gamma = inst.budgets.gamma
    pool = ScenarioPool()
    count = 0
    for y in enumerate_solutions(inst.feasible, ENUMERATION_GUARD):
        targets = [i for i in range(inst.n) if y.x[i] == 0 and d[i] > 0]
        k = min(gamma, len(targets))
        for combo in itertools.combinations(targets, k):
            pool.add(y, Scenario.from_indices(combo, inst.n))
            count += 1
            if count > ENUMERATION_GUARD:
                raise ScaleError("scenario set too large to enumerate")
    return pool


def solve_enumeration(inst: Instance) -> SolveReport:
    """One-shot master over the full scenario set."""
    start = time.monotonic()
    pool = _full_pool(inst)
    model = build_master(inst, pool)
    # Balancing variables relax integrally once x is integral.
    res = milp.solve_milp(model, branch_only=range(1, inst.n + 1))
    if res.status != "optimal":
        raise ScaleError(f"enumeration master failed with status {res.status}")
    x = _extract_x(inst, res.assignment)
    value = int(round(res.value))
    elapsed = time.monotonic() - start
    return SolveReport(
        x=x,
        value=value,
        iterations=1,
        lower_bounds=[float(value)],
        upper_bounds=[float(value)],
        wall_time=elapsed,
        method="enumeration",
    )


def solve_compact_mrs(inst: Instance) -> SolveReport:
    """Compact MILP for multi-representative selection: dualize the
    adversary for each break point of the balancing dual."""
    f = inst.feasible
    if not isinstance(f, MultiRepSelection):
        raise InputError("compact formulation requires multi-representative selection")
    start = time.monotonic()
    n, L = inst.n, f.num_partitions
    c, d = inst.costs.c_hat, inst.costs.d
    gamma, gp = inst.budgets.gamma, inst.budgets.gamma_prime
    grid = SGrid.for_instance(inst).values

    model = milp.MilpModel()
    t = model.add_continuous(-milp.INF)
    x_vars = [model.add_binary() for _ in range(n)]
    model.set_objective("min", {t: 1.0})
    for coefs, sense, rhs in f.linear_rows():
        model.add_constraint({x_vars[j]: a for j, a in coefs.items()}, sense, rhs)

    part_of = {}
    for l, part in enumerate(f.partitions):
        for i in part:
            part_of[i] = l

    for s in grid:
        pi = model.add_continuous(0.0)
        rho = [model.add_continuous(0.0) for _ in range(n)]
        kappa = [model.add_continuous(-milp.INF) for _ in range(L)]
        # t >= sum c_i x_i + gamma*pi + sum rho_i - gp*s - sum p_l kappa_l
        coefs: dict[int, float] = {t: 1.0, pi: -float(gamma)}
        for i in range(n):
            coefs[x_vars[i]] = -float(c[i])
            coefs[rho[i]] = -1.0
        for l, quota in enumerate(f.quotas):
            coefs[kappa[l]] = float(quota)
        model.add_constraint(coefs, ">=", -float(gp * s))
        for i in range(n):
            model.add_constraint(
                {pi: 1.0, rho[i]: 1.0, x_vars[i]: -float(d[i])}, ">=", 0.0
            )
            bump = max(d[i] - s, 0)
            model.add_constraint(
                {
                    rho[i]: 1.0,
                    x_vars[i]: -float(bump),
                    kappa[part_of[i]]: -1.0,
                },
                ">=",
                -float(c[i] + bump),
            )

    res = milp.solve_milp(model, branch_only=x_vars)
    if res.status not in ("optimal", "node_limit") or not res.assignment:
        raise ScaleError(f"compact solve failed with status {res.status}")
    x = _extract_x(inst, res.assignment)
    value = int(round(res.value))
    return SolveReport(
        x=x,
        value=value,
        iterations=1,
        lower_bounds=[float(value)],
        upper_bounds=[float(value)],
        wall_time=time.monotonic() - start,
        method="compact",
        optimal=res.status == "optimal",
    )


def solve_bruteforce(inst: Instance) -> SolveReport:
    """Double loop: evaluate every feasible first-stage solution exactly."""
    import numpy as np

    from .adversarial import evaluate_against

    start = time.monotonic()
    candidates = enumerate_solutions(inst.feasible, ENUMERATION_GUARD)
    ys = np.array([y.x for y in candidates], dtype=np.int64)
    best_x: Optional[BinarySolution] = None
    best_value = math.inf
    for x in candidates:
        worst = int(evaluate_against(inst, x, ys).max())
        if worst < best_value:
            best_value = worst
            best_x = x
    assert best_x is not None
    value = int(best_value)
    return SolveReport(
        x=best_x,
        value=value,
        iterations=len(candidates),
        lower_bounds=[float(value)],
        upper_bounds=[float(value)],
        wall_time=time.monotonic() - start,
        method="bruteforce",
    )
