"""Polynomial special cases for multi-representative selection.

Covers the regret problem without a balancing stage (gamma_prime = 0),
detection of zero-value solutions, dominance preprocessing, and the
constant-cost-vector shortcut.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .adversarial import adversarial_selection_dp
from .core import (
    BinarySolution,
    Instance,
    InputError,
    MultiRepSelection,
)
from .master import SolveReport


def _require_mrs(inst: Instance) -> MultiRepSelection:
    if not isinstance(inst.feasible, MultiRepSelection):
        raise InputError("multi-representative selection required")
    return inst.feasible


def _partition_values(c: np.ndarray, d: np.ndarray, quota: int,
                      pis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best dual value of one partition for each ``pi`` in a batch.

    For a fixed ``(pi, kappa)`` pair the items contribute
    ``max(kappa - c_i, 0)`` when left out and
    ``c_i + max(d_i - pi, kappa - c_i, 0)`` when packed, so the quota is
    filled with the items of smallest difference between the two.  The
    kappa candidates per pi are the kinks {0, c_i, c_i - pi, c_i + d_i - pi}
    clamped at zero; first candidate wins ties.  Returns the per-pi minima
    and the kappas attaining them.
    """
    P, T = len(pis), len(c)
    kap = np.empty((P, 3 * T + 1))
    kap[:, 0] = 0.0
    kap[:, 1:T + 1] = c[None, :]
    kap[:, T + 1:2 * T + 1] = c[None, :] - pis[:, None]
    kap[:, 2 * T + 1:] = c[None, :] + d[None, :] - pis[:, None]
    np.maximum(kap, 0.0, out=kap)
    slack = np.maximum(kap[:, :, None] - c[None, None, :], 0.0)
    delta = c[None, None, :] + np.maximum(d[None, None, :] - pis[:, None, None],
                                          slack) - slack
    take = np.partition(delta, quota - 1, axis=2)[:, :, :quota].sum(axis=2)
    totals = slack.sum(axis=2) + take - quota * kap
    best = np.argmin(totals, axis=1)
    rows = np.arange(P)
    return totals[rows, best], kap[rows, best]


def _partition_pick(c: np.ndarray, d: np.ndarray, quota: int, pi: float,
                    kappa: float) -> list[int]:
    """Quota-many item indices minimizing the packing delta, lowest index
    winning ties."""
    slack = np.maximum(kappa - c, 0.0)
    packed = c + np.maximum(np.maximum(d - pi, kappa - c), 0.0)
    order = np.argsort(packed - slack, kind="stable")
    return sorted(int(j) for j in order[:quota])


def solve_regret_budgeted_mrs(inst: Instance) -> SolveReport:
    """Exact min-max regret (no balancing stage) for selection variants.

    Enumerates the kink points of the piecewise-linear dual: a grid of
    ``pi`` values plus anchor pairs that tie ``pi`` to one partition's
    ``kappa``.  Every candidate pair is feasible for the dual, so each
    evaluation is an upper bound and the true optimum is in the grid.
    """
    f = _require_mrs(inst)
    if inst.budgets.gamma_prime != 0:
        raise InputError("regret algorithm requires gamma_prime = 0")
    start = time.monotonic()
    n = inst.n
    gamma = inst.budgets.gamma
    c_all = np.asarray(inst.costs.c_hat, dtype=float)
    d_all = np.asarray(inst.costs.d, dtype=float)
    parts = [np.array(p, dtype=int) for p in f.partitions]
    cs = [c_all[p] for p in parts]
    ds = [d_all[p] for p in parts]

    # Grid of pi values.  Besides the plain kinks {0, d_i}, the optimum may
    # sit where pi ties with one partition's kappa_j as c_k + d_k - kappa_j;
    # substituting the explicit kappa_j candidate superset for every anchor
    # item k turns that case into extra grid points, because the anchor's
    # own kappa_j = c_k + d_k - pi reappears among the per-partition kink
    # candidates once pi is fixed.
    anchors = c_all + d_all
    pair_diffs = np.concatenate(
        [(cs[l][:, None] - cs[l][None, :] - ds[l][None, :]).ravel()
         for l in range(f.num_partitions)]
    )
    grid = np.concatenate((
        [0.0], d_all, anchors, -pair_diffs,
        (anchors[:, None] - c_all[None, :]).ravel(),
    ))
    grid = np.unique(grid[grid >= 0.0])

    totals = np.full(len(grid), gamma, dtype=float) * grid
    kappas = np.empty((f.num_partitions, len(grid)))
    chunk = 256
    for lo in range(0, len(grid), chunk):
        pis = grid[lo:lo + chunk]
        for l, quota in enumerate(f.quotas):
            vals, kaps = _partition_values(cs[l], ds[l], quota, pis)
            totals[lo:lo + len(pis)] += vals
            kappas[l, lo:lo + len(pis)] = kaps

    at = int(np.argmin(totals))
    best_val = float(totals[at])
    best_pi = float(grid[at])
    best_kappa = [float(kappas[l, at]) for l in range(f.num_partitions)]

    picked: list[int] = []
    for l, quota in enumerate(f.quotas):
        local = _partition_pick(cs[l], ds[l], quota, best_pi, best_kappa[l])
        picked.extend(int(parts[l][j]) for j in local)
    x = BinarySolution.from_indices(picked, n)
    value = int(round(best_val))
    return SolveReport(
        x=x,
        value=value,
        iterations=1,
        lower_bounds=[float(value)],
        upper_bounds=[float(value)],
        wall_time=time.monotonic() - start,
        method="regret-poly",
    )


def check_zero_solution(inst: Instance) -> BinarySolution | None:
    """Return a first-stage solution of value zero if one exists.

    Only the per-partition cheapest items under c + d can reach zero, so a
    single candidate needs checking.  Requires attack budgets of at least
    one on both sides.
    """
    f = _require_mrs(inst)
    if inst.budgets.gamma < 1 or inst.budgets.gamma_prime < 1:
        raise InputError("zero check requires gamma >= 1 and gamma_prime >= 1")
    c, d = inst.costs.c_hat, inst.costs.d
    picked: list[int] = []
    for part, quota in zip(f.partitions, f.quotas):
        order = sorted(part, key=lambda i: (c[i] + d[i], c[i], i))
        picked.extend(order[:quota])
    candidate = BinarySolution.from_indices(picked, inst.n)
    cert = adversarial_selection_dp(inst, candidate)
    return candidate if cert.value == 0 else None


@dataclass
class DominanceResult:
    """Item-precedence cuts x_i >= x_j plus the memberships they force."""

    precedences: list[tuple[int, int]] = field(default_factory=list)
    forced_in: set[int] = field(default_factory=set)
    forced_out: set[int] = field(default_factory=set)


def dominance_reduce(inst: Instance) -> DominanceResult:
    """Precedence pairs within partitions: item i dominates j when it is no
    worse under both the nominal and the fully attacked cost (ties keep the
    lower index as dominator)."""
    f = _require_mrs(inst)
    c, d = inst.costs.c_hat, inst.costs.d
    out = DominanceResult()

    def dominates(i: int, j: int) -> bool:
        if c[i] > c[j] or c[i] + d[i] > c[j] + d[j]:
            return False
        if c[i] < c[j] or c[i] + d[i] < c[j] + d[j]:
            return True
        return i < j

    for part, quota in zip(f.partitions, f.quotas):
        below = {i: 0 for i in part}
        above = {i: 0 for i in part}
        for i in part:
            for j in part:
                if i != j and dominates(i, j):
                    out.precedences.append((i, j))
                    below[i] += 1
                    above[j] += 1
        for i in part:
            if len(part) - 1 - below[i] < quota:
                out.forced_in.add(i)
            if above[i] + 1 > quota:
                out.forced_out.add(i)
    return out


def solve_constant_case(inst: Instance) -> SolveReport | None:
    """Shortcut when one cost vector is constant: dominance makes the
    per-partition smallest entries of the other vector optimal."""
    f = _require_mrs(inst)
    c, d = inst.costs.c_hat, inst.costs.d
    start = time.monotonic()
    if len(set(c)) == 1:
        key = lambda i: (d[i], i)
    elif len(set(d)) == 1:
        key = lambda i: (c[i], i)
    else:
        return None
    picked: list[int] = []
    for part, quota in zip(f.partitions, f.quotas):
        picked.extend(sorted(part, key=key)[:quota])
    x = BinarySolution.from_indices(picked, inst.n)
    cert = adversarial_selection_dp(inst, x)
    return SolveReport(
        x=x,
        value=cert.value,
        iterations=1,
        lower_bounds=[float(cert.value)],
        upper_bounds=[float(cert.value)],
        wall_time=time.monotonic() - start,
        method="constant-case",
    )
