"""Evaluate a fixed first-stage solution: the adversarial problem.

Three interchangeable exact methods: full enumeration over the adversary's
solutions, a generic dualized MILP, and a combinatorial dynamic program for
multi-representative selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import milp
from .balancing import solve_balancing
from .core import (
    ENUMERATION_GUARD,
    AdversaryCertificate,
    BinarySolution,
    Instance,
    InputError,
    MultiRepSelection,
    Scenario,
    ScaleError,
    enumerate_solutions,
)

_OVERFLOW_LIMIT = 2**60


@dataclass(frozen=True)
class SGrid:
    """Candidate values for the balancing dual's break points."""

    values: tuple[int, ...]

    @classmethod
    def for_instance(cls, inst: Instance) -> "SGrid":
        return cls(tuple(sorted({0, *inst.costs.d})))


def _check_scale(inst: Instance) -> None:
    if sum(inst.costs.c_hat) + sum(inst.costs.d) > _OVERFLOW_LIMIT:
        raise ScaleError("instance data too large for exact integer arithmetic")


def _greedy_delta(
    inst: Instance, x: BinarySolution, y: BinarySolution
) -> Scenario:
    """Optimal adversary attack for fixed (x, y): the largest deviations
    among items we packed and the adversary did not."""
    d = inst.costs.d
    targets = [
        i for i in range(inst.n) if x.x[i] == 1 and y.x[i] == 0 and d[i] > 0
    ]
    targets.sort(key=lambda i: (-d[i], i))
    return Scenario.from_indices(targets[: inst.budgets.gamma], inst.n)


def _certificate_for(
    inst: Instance, x: BinarySolution, y: BinarySolution, optimal: bool = True
) -> AdversaryCertificate:
    delta = _greedy_delta(inst, x, y)
    eps, value = solve_balancing(
        inst.costs, inst.budgets.gamma_prime, x, delta, y
    )
    return AdversaryCertificate(
        value=value, y=y, delta=delta, epsilon=eps, optimal=optimal
    )


def _topk_masked(d_sorted: np.ndarray, masks: np.ndarray, k: int) -> np.ndarray:
    """Row-wise sum of the k largest d-values selected by each mask.

    ``d_sorted`` must be non-increasing and ``masks`` already permuted into
    the same order.
    """
    if k <= 0:
        return np.zeros(masks.shape[0], dtype=np.int64)
    ranks = np.cumsum(masks, axis=1)
    return ((ranks <= k) & masks) @ d_sorted


def evaluate_against(
    inst: Instance, x: BinarySolution, ys: np.ndarray
) -> np.ndarray:
    """Adversarial value of x against each candidate row of ``ys``."""
    c = np.asarray(inst.costs.c_hat, dtype=np.int64)
    d = np.asarray(inst.costs.d, dtype=np.int64)
    xv = np.asarray(x.x, dtype=np.int64)
    order = np.lexsort((np.arange(inst.n), -d))
    d_sorted = d[order]
    ys_o = ys[:, order].astype(bool)
    x_o = xv[order].astype(bool)
    base = (xv - ys) @ c
    attack = _topk_masked(d_sorted, x_o & ~ys_o, inst.budgets.gamma)
    balance = _topk_masked(d_sorted, ~x_o & ys_o, inst.budgets.gamma_prime)
    return base + attack - balance


def adversarial_bruteforce(
    inst: Instance,
    x: BinarySolution,
    candidates: Optional[Sequence[BinarySolution]] = None,
) -> AdversaryCertificate:
    """Exact adversarial value by enumerating every adversary solution.

    The attack is restricted, without loss, to items we packed that the
    adversary skipped; the balancing stage is solved greedily.
    ``candidates`` lets batch callers reuse one enumeration of the
    feasible set.
    """
    _check_scale(inst)
    if candidates is None:
        candidates = enumerate_solutions(inst.feasible, ENUMERATION_GUARD)
    ys = np.array([y.x for y in candidates], dtype=np.int64)
    values = evaluate_against(inst, x, ys)
    best = int(np.argmax(values))
    cert = _certificate_for(inst, x, candidates[best])
    assert cert.value == int(values[best])
    return cert


def adversarial_milp(
    inst: Instance, x: BinarySolution, node_limit: int = milp.DEFAULT_NODE_LIMIT
) -> AdversaryCertificate:
    """Exact adversarial value via the dualized mixed-integer program."""
    _check_scale(inst)
    n = inst.n
    c, d = inst.costs.c_hat, inst.costs.d
    gamma, gamma_prime = inst.budgets.gamma, inst.budgets.gamma_prime

    model = milp.MilpModel()
    y_vars = [model.add_binary() for _ in range(n)]
    delta_vars = [model.add_binary() for _ in range(n)]
    s_var = model.add_continuous(0.0)
    t_vars = [model.add_continuous(0.0) for _ in range(n)]

    obj: dict[int, float] = {s_var: -float(gamma_prime)}
    for i in range(n):
        obj[y_vars[i]] = -float(c[i])
        obj[delta_vars[i]] = float(d[i] * x.x[i])
        obj[t_vars[i]] = -1.0
    model.set_objective("max", obj)

    for i in range(n):
        # s + t_i >= d_i (y_i - x_i)
        model.add_constraint(
            {s_var: 1.0, t_vars[i]: 1.0, y_vars[i]: -float(d[i])},
            ">=",
            -float(d[i] * x.x[i]),
        )
        model.add_constraint({y_vars[i]: 1.0, delta_vars[i]: 1.0}, "<=", 1.0)
    model.add_constraint({delta_vars[i]: 1.0 for i in range(n)}, "<=", float(gamma))
    for coefs, sense, rhs in inst.feasible.linear_rows():
        model.add_constraint({y_vars[j]: a for j, a in coefs.items()}, sense, rhs)

    # For fixed integral y the attack relaxation has an integral optimum,
    # so branching is restricted to the adversary's packing variables.
    res = milp.solve_milp(model, node_limit, branch_only=y_vars)
    if res.status == "node_limit" and not res.assignment:
        raise ScaleError("adversarial MILP hit the node limit with no incumbent")
    optimal = res.status == "optimal"
    y_bits = [int(round(res.assignment[j])) for j in y_vars]
    y = _clean_y(inst, y_bits)
    const = sum(ci * xi for ci, xi in zip(c, x.x))
    cert = _certificate_for(inst, x, y, optimal=optimal)
    if optimal:
        milp_value = const + res.value
        assert abs(cert.value - milp_value) < 1e-5, (cert.value, milp_value)
    return cert


def _clean_y(inst: Instance, y_bits: list[int]) -> BinarySolution:
    """Round a MILP adversary solution; for path sets, strip value-neutral
    cycles so the result is a simple path."""
    y = BinarySolution(y_bits)
    f = inst.feasible
    if f.is_feasible(y):
        return y
    if hasattr(f, "edges"):
        succ = {}
        for e in range(f.n):
            if y.x[e]:
                succ.setdefault(f.edges[e][0], e)
        path = []
        node, seen = f.source, {f.source}
        while node != f.target:
            e = succ.get(node)
            if e is None:
                raise InputError("MILP solution does not reach the target")
            path.append(e)
            node = f.edges[e][1]
            if node in seen:
                raise InputError("MILP solution loops before the target")
            seen.add(node)
        return BinarySolution.from_indices(path, f.n)
    raise InputError("MILP returned an infeasible adversary solution")


def adversarial_selection_dp(
    inst: Instance, x: BinarySolution
) -> AdversaryCertificate:
    """Exact adversarial value for multi-representative selection.

    Loops over the break-point grid; for each grid value a per-partition
    dynamic program chooses, per item, to skip it, pick it for the
    adversary, or attack it, and partitions are combined by a convolution
    over the shared attack budget.
    """
    f = inst.feasible
    if not isinstance(f, MultiRepSelection):
        raise InputError("selection DP requires a multi-representative set")
    _check_scale(inst)
    c, d = inst.costs.c_hat, inst.costs.d
    gamma, gamma_prime = inst.budgets.gamma, inst.budgets.gamma_prime
    base = sum(ci * xi for ci, xi in zip(c, x.x))

    best_value: Optional[int] = None
    best_pick: Optional[tuple[list[int], list[int]]] = None
    for s in SGrid.for_instance(inst).values:
        total, picks = _dp_for_s(inst, x, s)
        value = base + total - gamma_prime * s
        if best_value is None or value > best_value:
            best_value = value
            best_pick = picks
    assert best_value is not None and best_pick is not None
    y_idx, _ = best_pick
    y = BinarySolution.from_indices(y_idx, inst.n)
    cert = _certificate_for(inst, x, y)
    assert cert.value == best_value, (cert.value, best_value)
    return cert


def _dp_for_s(
    inst: Instance, x: BinarySolution, s: int
) -> tuple[int, tuple[list[int], list[int]]]:
    """Best adversary gain for a fixed break point.

    Returns ``max over (y, delta)`` of attack gains minus discounted
    adversary costs, plus the maximizing item picks.
    """
    f = inst.feasible
    assert isinstance(f, MultiRepSelection)
    c, d = inst.costs.c_hat, inst.costs.d
    gamma = min(inst.budgets.gamma, inst.n)

    NEG = float("-inf")
    part_tables = []
    for part, quota in zip(f.partitions, f.quotas):
        items = list(part)
        width = min(gamma, sum(1 for i in items if x.x[i] == 1 and d[i] > 0))
        # dp[yc][ac] -> best value; moves[j] records the choice table.
        dp = [[NEG] * (width + 1) for _ in range(quota + 1)]
        dp[0][0] = 0
        moves: list[list[list[int]]] = []
        for i in items:
            cost = c[i] + max(d[i] * (1 - x.x[i]) - s, 0)
            attackable = x.x[i] == 1 and d[i] > 0
            nxt = [[NEG] * (width + 1) for _ in range(quota + 1)]
            mv = [[-1] * (width + 1) for _ in range(quota + 1)]
            for yc in range(quota + 1):
                for ac in range(width + 1):
                    cur = dp[yc][ac]
                    if cur == NEG:
                        continue
                    if cur > nxt[yc][ac]:  # skip
                        nxt[yc][ac] = cur
                        mv[yc][ac] = 0
                    if yc < quota and cur - cost > nxt[yc + 1][ac]:
                        nxt[yc + 1][ac] = cur - cost
                        mv[yc + 1][ac] = 1
                    if attackable and ac < width and cur + d[i] > nxt[yc][ac + 1]:
                        nxt[yc][ac + 1] = cur + d[i]
                        mv[yc][ac + 1] = 2
            dp = nxt
            moves.append(mv)
        part_tables.append((items, quota, width, dp[quota], moves))

    # Combine partitions over the shared attack budget.
    comb = [0] + [NEG] * gamma
    tracks: list[list[Optional[tuple[int, int]]]] = [
        [None] * (gamma + 1)
    ]
    for items, quota, width, final, moves in part_tables:
        nxt = [NEG] * (gamma + 1)
        track: list[Optional[tuple[int, int]]] = [None] * (gamma + 1)
        for a_total in range(gamma + 1):
            for a_here in range(min(width, a_total) + 1):
                prev = comb[a_total - a_here]
                here = final[a_here]
                if prev == NEG or here == NEG:
                    continue
                cand = prev + here
                if cand > nxt[a_total]:
                    nxt[a_total] = cand
                    track[a_total] = (a_here, a_total - a_here)
        comb = nxt
        tracks.append(track)

    best_a = 0
    for a in range(gamma + 1):
        if comb[a] > comb[best_a]:
            best_a = a
    total = comb[best_a]

    # Backtrack: split the budget, then replay each partition's DP.
    splits = []
    a = best_a
    for k in range(len(part_tables), 0, -1):
        a_here, a_prev = tracks[k][a]  # type: ignore[misc]
        splits.append(a_here)
        a = a_prev
    splits.reverse()

    y_idx: list[int] = []
    delta_idx: list[int] = []
    for (items, quota, width, final, moves), a_here in zip(part_tables, splits):
        yc, ac = quota, a_here
        for j in range(len(items) - 1, -1, -1):
            choice = moves[j][yc][ac]
            if choice == 1:
                y_idx.append(items[j])
                yc -= 1
            elif choice == 2:
                delta_idx.append(items[j])
                ac -= 1
    return int(total), (sorted(y_idx), sorted(delta_idx))
