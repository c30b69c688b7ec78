"""Domain types shared by all solvers: instances, budgets, solutions, scenarios.

All types are immutable after construction and all operations are pure, so
shared instances are safe to use concurrently.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union


class InputError(ValueError):
    """Raised on malformed or dimension-mismatched inputs."""


class InfeasibleError(RuntimeError):
    """Raised when a feasible set admits no solution for a request."""


class ScaleError(RuntimeError):
    """Raised when an enumeration guard is exceeded."""


ENUMERATION_GUARD = 10**6


def _as_int_tuple(values: Sequence[int], what: str) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise InputError(f"{what} must be integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class ItemCosts:
    """Per-item nominal cost and worst-case deviation."""

    c_hat: tuple[int, ...]
    d: tuple[int, ...]

    def __init__(self, c_hat: Sequence[int], d: Sequence[int]):
        object.__setattr__(self, "c_hat", _as_int_tuple(c_hat, "c_hat"))
        object.__setattr__(self, "d", _as_int_tuple(d, "d"))
        if len(self.c_hat) != len(self.d):
            raise InputError("c_hat and d must have equal length")
        if not self.c_hat:
            raise InputError("need at least one item")
        if any(v < 0 for v in self.c_hat) or any(v < 0 for v in self.d):
            raise InputError("costs and deviations must be non-negative")

    @property
    def n(self) -> int:
        return len(self.c_hat)

    def worst(self) -> tuple[int, ...]:
        """Nominal-plus-deviation cost of every item."""
        return tuple(c + dv for c, dv in zip(self.c_hat, self.d))


@dataclass(frozen=True)
class Budgets:
    """Attack budgets: ``gamma`` for the adversary, ``gamma_prime`` for the
    balancing stage."""

    gamma: int
    gamma_prime: int

    def validate(self, n: int) -> None:
        if not (0 <= self.gamma <= n):
            raise InputError(f"gamma must be in [0, {n}], got {self.gamma}")
        if not (0 <= self.gamma_prime <= n):
            raise InputError(
                f"gamma_prime must be in [0, {n}], got {self.gamma_prime}"
            )


@dataclass(frozen=True)
class BinarySolution:
    """A 0/1 item vector."""

    x: tuple[int, ...]

    def __init__(self, x: Sequence[int]):
        vals = tuple(int(v) for v in x)
        if any(v not in (0, 1) for v in vals):
            raise InputError("solution entries must be 0 or 1")
        object.__setattr__(self, "x", vals)

    @classmethod
    def from_indices(cls, indices: Sequence[int], n: int) -> "BinarySolution":
        x = [0] * n
        for i in indices:
            x[i] = 1
        return cls(x)

    @property
    def n(self) -> int:
        return len(self.x)

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.x) if v)

    def __len__(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class Scenario:
    """A 0/1 attack-indicator vector."""

    delta: tuple[int, ...]

    def __init__(self, delta: Sequence[int]):
        vals = tuple(int(v) for v in delta)
        if any(v not in (0, 1) for v in vals):
            raise InputError("scenario entries must be 0 or 1")
        object.__setattr__(self, "delta", vals)

    @classmethod
    def from_indices(cls, indices: Sequence[int], n: int) -> "Scenario":
        d = [0] * n
        for i in indices:
            d[i] = 1
        return cls(d)

    @classmethod
    def empty(cls, n: int) -> "Scenario":
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self.delta)

    def size(self) -> int:
        return sum(self.delta)

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.delta) if v)


@dataclass(frozen=True)
class MultiRepSelection:
    """Pick exactly ``quotas[l]`` items from each partition ``partitions[l]``.

    The partitions must be pairwise disjoint and cover all items.
    """

    partitions: tuple[tuple[int, ...], ...]
    quotas: tuple[int, ...]

    def __init__(
        self, partitions: Sequence[Sequence[int]], quotas: Sequence[int]
    ):
        parts = tuple(tuple(int(i) for i in p) for p in partitions)
        qs = tuple(int(q) for q in quotas)
        if len(parts) != len(qs):
            raise InputError("one quota per partition required")
        seen: set[int] = set()
        for p, q in zip(parts, qs):
            if not p:
                raise InputError("empty partition")
            if not (1 <= q <= len(p)):
                raise InputError(f"quota {q} out of range for partition {p}")
            if seen & set(p):
                raise InputError("partitions must be disjoint")
            seen |= set(p)
        n = sum(len(p) for p in parts)
        if seen != set(range(n)):
            raise InputError("partitions must cover 0..n-1 exactly")
        object.__setattr__(self, "partitions", parts)
        object.__setattr__(self, "quotas", qs)

    @property
    def n(self) -> int:
        return sum(len(p) for p in self.partitions)

    @property
    def num_partitions(self) -> int:
        return len(self.partitions)

    def is_feasible(self, x: BinarySolution) -> bool:
        _check_dim(x.n, self.n)
        return all(
            sum(x.x[i] for i in part) == q
            for part, q in zip(self.partitions, self.quotas)
        )

    def nominal_solve(self, costs: Sequence[int]) -> BinarySolution:
        _check_dim(len(costs), self.n)
        chosen: list[int] = []
        for part, q in zip(self.partitions, self.quotas):
            ranked = sorted(part, key=lambda i: (costs[i], i))
            chosen.extend(ranked[:q])
        return BinarySolution.from_indices(chosen, self.n)

    def solution_count(self) -> int:
        count = 1
        for part, q in zip(self.partitions, self.quotas):
            count *= _comb(len(part), q)
        return count

    def enumerate_solutions(self) -> Iterator[BinarySolution]:
        pools = [
            itertools.combinations(part, q)
            for part, q in zip(self.partitions, self.quotas)
        ]
        for combo in itertools.product(*pools):
            idx = [i for group in combo for i in group]
            yield BinarySolution.from_indices(idx, self.n)

    def linear_rows(self) -> list[tuple[dict[int, float], str, float]]:
        """Linear encoding of the feasible set over the n item variables."""
        return [
            ({i: 1.0 for i in part}, "=", float(q))
            for part, q in zip(self.partitions, self.quotas)
        ]


@dataclass(frozen=True)
class Knapsack:
    """All packings with total weight at most ``capacity``."""

    weights: tuple[int, ...]
    capacity: int

    def __init__(self, weights: Sequence[int], capacity: int):
        w = _as_int_tuple(weights, "weights")
        if any(v <= 0 for v in w):
            raise InputError("weights must be positive")
        if int(capacity) <= 0:
            raise InputError("capacity must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "capacity", int(capacity))

    @property
    def n(self) -> int:
        return len(self.weights)

    def is_feasible(self, x: BinarySolution) -> bool:
        _check_dim(x.n, self.n)
        return sum(w * v for w, v in zip(self.weights, x.x)) <= self.capacity

    def nominal_solve(self, costs: Sequence[int]) -> BinarySolution:
        """Minimize total cost subject to the capacity.

        Items with non-negative cost are never worth packing, so only
        negative-cost items enter the capacity DP (maximizing forgone cost).
        On value ties the DP prefers excluding the higher-indexed item.
        """
        _check_dim(len(costs), self.n)
        gains = [(-c, i) for i, c in enumerate(costs) if c < 0]
        if not gains:
            return BinarySolution((0,) * self.n)
        cap = self.capacity
        best = [0] * (cap + 1)
        take = []
        for gain, i in gains:
            w = self.weights[i]
            row = bytearray(cap + 1)
            for c in range(cap, w - 1, -1):
                cand = best[c - w] + gain
                if cand > best[c]:
                    best[c] = cand
                    row[c] = 1
            take.append((i, w, row))
        chosen = []
        c = cap
        for i, w, row in reversed(take):
            if row[c]:
                chosen.append(i)
                c -= w
        return BinarySolution.from_indices(chosen, self.n)

    def solution_count(self) -> int:
        return sum(1 for _ in self.enumerate_solutions())

    def enumerate_solutions(self) -> Iterator[BinarySolution]:
        if self.n > 21:
            raise ScaleError(f"knapsack enumeration with n={self.n} too large")
        for bits in range(1 << self.n):
            x = [(bits >> i) & 1 for i in range(self.n)]
            if sum(w * v for w, v in zip(self.weights, x)) <= self.capacity:
                yield BinarySolution(x)

    def linear_rows(self) -> list[tuple[dict[int, float], str, float]]:
        return [
            (
                {i: float(w) for i, w in enumerate(self.weights)},
                "<=",
                float(self.capacity),
            )
        ]


@dataclass(frozen=True)
class ShortestPath:
    """Edge-indicator vectors of simple source-target paths in a digraph."""

    node_count: int
    edges: tuple[tuple[int, int], ...]
    source: int
    target: int

    def __init__(
        self,
        node_count: int,
        edges: Sequence[Sequence[int]],
        source: int,
        target: int,
    ):
        es = tuple((int(t), int(h)) for t, h in edges)
        nc, s, t = int(node_count), int(source), int(target)
        if s == t:
            raise InputError("source and target must differ")
        for tail, head in es:
            if not (0 <= tail < nc and 0 <= head < nc):
                raise InputError("edge endpoint out of range")
        object.__setattr__(self, "node_count", nc)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "source", s)
        object.__setattr__(self, "target", t)
        if self._shortest(None) is None:
            raise InfeasibleError("target unreachable from source")

    @property
    def n(self) -> int:
        return len(self.edges)

    def _out_edges(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.node_count)]
        for e, (tail, _) in enumerate(self.edges):
            out[tail].append(e)
        return out

    def is_feasible(self, x: BinarySolution) -> bool:
        """True iff x encodes a simple source-target path (no spare cycles)."""
        _check_dim(x.n, self.n)
        used = [e for e in range(self.n) if x.x[e]]
        succ: dict[int, int] = {}
        indeg: dict[int, int] = {}
        for e in used:
            tail, head = self.edges[e]
            if tail in succ:
                return False
            succ[tail] = e
            indeg[head] = indeg.get(head, 0) + 1
            if indeg[head] > 1:
                return False
        node = self.source
        walked = 0
        seen = {node}
        while node != self.target:
            if node not in succ:
                return False
            tail, head = self.edges[succ[node]]
            node = head
            if node in seen:
                return False
            seen.add(node)
            walked += 1
        return walked == len(used)

    def _shortest(
        self, costs: Optional[Sequence[float]]
    ) -> Optional[list[int]]:
        """Deterministic Dijkstra returning the edge list of a minimum path."""
        out = self._out_edges()
        dist: dict[int, float] = {self.source: 0.0}
        pred: dict[int, int] = {}
        heap: list[tuple[float, int]] = [(0.0, self.source)]
        done: set[int] = set()
        while heap:
            dv, v = heapq.heappop(heap)
            if v in done:
                continue
            done.add(v)
            for e in out[v]:
                w = 0.0 if costs is None else float(costs[e])
                _, head = self.edges[e]
                nd = dv + w
                if head not in dist or nd < dist[head] - 1e-12:
                    dist[head] = nd
                    pred[head] = e
                    heapq.heappush(heap, (nd, head))
        if self.target not in dist:
            return None
        path = []
        node = self.target
        while node != self.source:
            e = pred[node]
            path.append(e)
            node = self.edges[e][0]
        return path[::-1]

    def nominal_solve(self, costs: Sequence[int]) -> BinarySolution:
        _check_dim(len(costs), self.n)
        if any(c < 0 for c in costs):
            raise InputError("shortest path requires non-negative costs")
        path = self._shortest(costs)
        if path is None:
            raise InfeasibleError("target unreachable from source")
        return BinarySolution.from_indices(path, self.n)

    def solution_count(self) -> int:
        return sum(1 for _ in self.enumerate_solutions())

    def enumerate_solutions(self) -> Iterator[BinarySolution]:
        out = self._out_edges()
        stack: list[tuple[int, list[int], set[int]]] = [
            (self.source, [], {self.source})
        ]
        while stack:
            node, path, visited = stack.pop()
            if node == self.target:
                yield BinarySolution.from_indices(path, self.n)
                continue
            for e in reversed(out[node]):
                head = self.edges[e][1]
                if head not in visited:
                    stack.append((head, path + [e], visited | {head}))

    def linear_rows(self) -> list[tuple[dict[int, float], str, float]]:
        """Flow-conservation rows; solvers strip value-neutral cycles."""
        rows = []
        for v in range(self.node_count):
            coefs: dict[int, float] = {}
            for e, (tail, head) in enumerate(self.edges):
                if tail == v:
                    coefs[e] = coefs.get(e, 0.0) + 1.0
                if head == v:
                    coefs[e] = coefs.get(e, 0.0) - 1.0
            if v == self.source:
                rhs = 1.0
            elif v == self.target:
                rhs = -1.0
            else:
                rhs = 0.0
            if coefs or rhs:
                rows.append((coefs, "=", rhs))
        return rows


FeasibleSet = Union[MultiRepSelection, Knapsack, ShortestPath]


@dataclass(frozen=True)
class Instance:
    """A full problem instance: costs, budgets, and a feasible set."""

    costs: ItemCosts
    budgets: Budgets
    feasible: FeasibleSet
    name: str = ""

    def __post_init__(self) -> None:
        if self.costs.n != self.feasible.n:
            raise InputError("costs and feasible set disagree on n")
        self.budgets.validate(self.costs.n)

    @property
    def n(self) -> int:
        return self.costs.n

    def to_dict(self) -> dict:
        f = self.feasible
        if isinstance(f, MultiRepSelection):
            fs = {
                "type": "multirep_selection",
                "partitions": [list(p) for p in f.partitions],
                "p": list(f.quotas),
            }
        elif isinstance(f, Knapsack):
            fs = {
                "type": "knapsack",
                "weights": list(f.weights),
                "capacity": f.capacity,
            }
        else:
            fs = {
                "type": "shortest_path",
                "nodes": f.node_count,
                "edges": [list(e) for e in f.edges],
                "source": f.source,
                "target": f.target,
            }
        return {
            "name": self.name,
            "c_hat": list(self.costs.c_hat),
            "d": list(self.costs.d),
            "gamma": self.budgets.gamma,
            "gamma_prime": self.budgets.gamma_prime,
            "feasible_set": fs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        fs = data["feasible_set"]
        kind = fs["type"]
        feasible: FeasibleSet
        if kind == "multirep_selection":
            feasible = MultiRepSelection(fs["partitions"], fs["p"])
        elif kind == "knapsack":
            feasible = Knapsack(fs["weights"], fs["capacity"])
        elif kind == "shortest_path":
            feasible = ShortestPath(
                fs["nodes"], fs["edges"], fs["source"], fs["target"]
            )
        else:
            raise InputError(f"unknown feasible_set type {kind!r}")
        return cls(
            costs=ItemCosts(data["c_hat"], data["d"]),
            budgets=Budgets(int(data["gamma"]), int(data["gamma_prime"])),
            feasible=feasible,
            name=str(data.get("name", "")),
        )


@dataclass(frozen=True)
class AdversaryCertificate:
    """Worst case for a fixed first-stage solution: the adversary's pick
    ``y`` and attack ``delta``, the balancing response ``epsilon``, and the
    attained value."""

    value: int
    y: BinarySolution
    delta: Scenario
    epsilon: Scenario
    optimal: bool = True

    def recompute(self, inst: Instance, x: BinarySolution) -> int:
        c_hat, d = inst.costs.c_hat, inst.costs.d
        return sum(
            (c_hat[i] + d[i] * self.delta.delta[i] + d[i] * self.epsilon.delta[i])
            * (x.x[i] - self.y.x[i])
            for i in range(inst.n)
        )


def _check_dim(got: int, want: int) -> None:
    if got != want:
        raise InputError(f"dimension mismatch: got {got}, expected {want}")


def _comb(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


def is_feasible(x: BinarySolution, f: FeasibleSet) -> bool:
    """Whether x satisfies the feasible set's constraints."""
    return f.is_feasible(x)


def nominal_solve(f: FeasibleSet, costs: Sequence[int]) -> BinarySolution:
    """A deterministic minimizer of ``costs @ x`` over the feasible set.

    Ties are broken toward lower item indices.
    """
    return f.nominal_solve(costs)


def solution_count(f: FeasibleSet) -> int:
    return f.solution_count()


def enumerate_solutions(
    f: FeasibleSet, guard: int = ENUMERATION_GUARD
) -> list[BinarySolution]:
    """All feasible solutions, guarded against combinatorial blowup."""
    if isinstance(f, MultiRepSelection) and f.solution_count() > guard:
        raise ScaleError("feasible set too large to enumerate")
    out = []
    for x in f.enumerate_solutions():
        out.append(x)
        if len(out) > guard:
            raise ScaleError("feasible set too large to enumerate")
    return out
