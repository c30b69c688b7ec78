"""Self-contained bounded-scale mixed-binary linear programming.

A dense two-phase tableau simplex plus a depth-first branch-and-bound.
Models at desk scale only; simplicity and debuggability over sparsity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import InputError

PIVOT_TOL = 1e-9
MIN_PIVOT = 1e-7  # smallest tableau entry accepted as a pivot element
FEAS_TOL = 1e-7
INT_TOL = 1e-6
BLAND_AFTER = 1000
DEFAULT_NODE_LIMIT = 10**6
_MAX_PIVOTS = 200_000

INF = math.inf


@dataclass
class Variable:
    kind: str  # "binary" | "continuous"
    lb: float
    ub: float


@dataclass
class MilpModel:
    """Variables, sparse linear constraints, and a linear objective."""

    variables: list[Variable] = field(default_factory=list)
    constraints: list[tuple[dict[int, float], str, float]] = field(
        default_factory=list
    )
    objective_sense: str = "min"
    objective: dict[int, float] = field(default_factory=dict)

    def add_binary(self) -> int:
        self.variables.append(Variable("binary", 0.0, 1.0))
        return len(self.variables) - 1

    def add_continuous(self, lb: float = 0.0, ub: float = INF) -> int:
        if lb > ub:
            raise InputError("lower bound above upper bound")
        self.variables.append(Variable("continuous", lb, ub))
        return len(self.variables) - 1

    def add_constraint(
        self, coefs: dict[int, float], sense: str, rhs: float
    ) -> None:
        if sense not in ("<=", "=", ">="):
            raise InputError(f"unknown sense {sense!r}")
        for j in coefs:
            if not (0 <= j < len(self.variables)):
                raise InputError(f"constraint references unknown variable {j}")
        coefs = {j: float(v) for j, v in coefs.items() if v != 0.0}
        self.constraints.append((coefs, sense, float(rhs)))

    def set_objective(self, sense: str, coefs: dict[int, float]) -> None:
        if sense not in ("min", "max"):
            raise InputError(f"unknown objective sense {sense!r}")
        for j in coefs:
            if not (0 <= j < len(self.variables)):
                raise InputError(f"objective references unknown variable {j}")
        self.objective_sense = sense
        self.objective = {j: float(v) for j, v in coefs.items()}

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def binary_indices(self) -> list[int]:
        return [
            j for j, v in enumerate(self.variables) if v.kind == "binary"
        ]


@dataclass
class MilpResult:
    status: str  # "optimal" | "infeasible" | "unbounded" | "node_limit"
    value: float
    assignment: list[float]

    def rounded_value(self) -> int:
        """Objective rounded to the nearest integer (integral-data models)."""
        return int(round(self.value))


class _Unbounded(Exception):
    pass


class _Infeasible(Exception):
    pass


def _standardize(
    model: MilpModel, fixed: Optional[dict[int, float]] = None
):
    """Convert to min cᵀx', Ax' (sense) b, x' >= 0.

    Fixed variables are substituted out; finite lower bounds are shifted,
    free variables are split, finite upper bounds become extra rows.
    Returns the standard-form data plus a decoder back to model space.
    """
    fixed = fixed or {}
    col_of: list[Optional[tuple[int, float, Optional[int]]]] = []
    ncols = 0
    ub_rows: list[tuple[int, float]] = []
    for j, var in enumerate(model.variables):
        if j in fixed:
            col_of.append(None)
            continue
        lb, ub = var.lb, var.ub
        if lb == -INF:
            col_of.append((ncols, 0.0, ncols + 1))
            ncols += 2
            if ub < INF:
                ub_rows.append((j, ub))
        else:
            col_of.append((ncols, lb, None))
            ncols += 1
            if ub < INF:
                ub_rows.append((j, ub - lb))

    rows = []
    senses = []
    rhs = []

    def expand(coefs: dict[int, float]) -> tuple[np.ndarray, float]:
        row = np.zeros(ncols)
        shift_sum = 0.0
        for j, a in coefs.items():
            if j in fixed:
                shift_sum += a * fixed[j]
                continue
            col, shift, negcol = col_of[j]  # type: ignore[misc]
            row[col] += a
            if negcol is not None:
                row[negcol] -= a
            shift_sum += a * shift
        return row, shift_sum

    for coefs, sense, b in model.constraints:
        row, shift = expand(coefs)
        rows.append(row)
        senses.append(sense)
        rhs.append(b - shift)
    for j, cap in ub_rows:
        col, _, negcol = col_of[j]  # type: ignore[misc]
        row = np.zeros(ncols)
        row[col] = 1.0
        if negcol is not None:
            row[negcol] = -1.0
        rows.append(row)
        senses.append("<=")
        rhs.append(cap)

    sign = 1.0 if model.objective_sense == "min" else -1.0
    # expand() accounts for bound shifts and fixed-variable contributions.
    crow, const = expand({j: sign * v for j, v in model.objective.items()})

    A = (
        np.array(rows)
        if rows
        else np.zeros((0, ncols))
    )
    b_arr = np.array(rhs) if rhs else np.zeros(0)

    def decode(xstd: np.ndarray) -> list[float]:
        out = []
        for j, var in enumerate(model.variables):
            if j in fixed:
                out.append(fixed[j])
                continue
            col, shift, negcol = col_of[j]  # type: ignore[misc]
            v = xstd[col] + shift
            if negcol is not None:
                v -= xstd[negcol]
            out.append(float(v))
        return out

    return A, np.array(senses), b_arr, crow, const, sign, decode


def _pivot(T: np.ndarray, z: np.ndarray, basis: np.ndarray, r: int, c: int):
    piv = T[r, c]
    T[r] /= piv
    col = T[:, c].copy()
    col[r] = 0.0
    # Rank-1 update restricted to rows the entering column touches.
    nz = np.nonzero(col)[0]
    if nz.size:
        T[nz] -= col[nz, None] * T[r]
    z -= z[c] * T[r]
    basis[r] = c


def _run_simplex(
    T: np.ndarray, z: np.ndarray, basis: np.ndarray, allowed: np.ndarray
) -> None:
    """Iterate the tableau to optimality of the current objective row.

    ``z`` holds reduced costs (last entry: negated objective value).
    Raises _Unbounded if a negative reduced-cost column has no pivot row.
    """
    degenerate = 0
    bland = False
    for _ in range(_MAX_PIVOTS):
        red = z[:-1]
        if not bland:
            cand = np.where(allowed & (red < -FEAS_TOL))[0]
            if cand.size == 0:
                return
            cand = cand[np.argsort(red[cand], kind="stable")]
        else:
            cand = np.where(allowed & (red < -PIVOT_TOL))[0]
            if cand.size == 0:
                return
        # A column with no positive entry certifies an unbounded ray, but
        # roundoff can also produce a barely negative reduced cost on such
        # a column; try the remaining candidates before giving up.
        c = -1
        for cj in cand:
            if (T[:, cj] > MIN_PIVOT).any():
                c = int(cj)
                break
        if c < 0:
            raise _Unbounded()
        col = T[:, c]
        pos = col > MIN_PIVOT
        rhs = np.maximum(T[:, -1], 0.0)  # ignore roundoff drift below zero
        ratios = np.full(col.shape, np.inf)
        ratios[pos] = rhs[pos] / col[pos]
        best = ratios.min()
        ties = np.where(ratios <= best + 1e-9 * (1.0 + best))[0]
        if bland:
            r = ties[np.argmin(basis[ties])]
        else:
            r = ties[np.argmax(col[ties])]  # largest pivot for stability
        if best <= FEAS_TOL:
            degenerate += 1
            if degenerate >= BLAND_AFTER:
                bland = True  # sticky: do not revert once stalling is seen
        else:
            degenerate = 0
        _pivot(T, z, basis, int(r), int(c))
    raise RuntimeError("simplex pivot limit exceeded")


def _solve_standard(A, senses, b, c):
    """Two-phase simplex for min cᵀx, Ax (sense) b, x >= 0."""
    m, n = A.shape
    A = A.copy()
    b = b.copy()
    senses = list(senses)
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1
            b[i] = -b[i]
            senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]

    slack_cols = []
    for i, s in enumerate(senses):
        if s == "<=":
            e = np.zeros(m)
            e[i] = 1.0
            slack_cols.append(e)
        elif s == ">=":
            e = np.zeros(m)
            e[i] = -1.0
            slack_cols.append(e)
    nslack = len(slack_cols)
    full = np.hstack(
        [A, np.array(slack_cols).T if nslack else np.zeros((m, 0)), np.eye(m)]
    )
    nart = m
    total = n + nslack + nart
    T = np.hstack([full, b.reshape(-1, 1)])
    basis = np.arange(n + nslack, total)

    # Phase 1: minimize the artificial sum.
    z1 = np.zeros(total + 1)
    z1[n + nslack :] = 0.0
    c1 = np.zeros(total)
    c1[n + nslack : total] = 1.0
    z1[:total] = c1 - c1[basis] @ T[:, :total]
    z1[-1] = -(c1[basis] @ T[:, -1])
    allowed = np.ones(total, dtype=bool)
    try:
        _run_simplex(T, z1, basis, allowed)
    except _Unbounded:  # phase 1 is bounded below by zero
        raise RuntimeError("phase-1 unbounded: internal error")
    if -z1[-1] > 1e-6:
        raise _Infeasible()

    # Drive artificials out of the basis or drop their rows.
    art_start = n + nslack
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] >= art_start:
            row = T[i, :art_start]
            cands = np.where(np.abs(row) > MIN_PIVOT)[0]
            if cands.size:
                _pivot(T, z1, basis, i, int(cands[0]))
            else:
                keep[i] = False
    if not keep.all():
        T = T[keep]
        basis = basis[keep]

    T = np.hstack([T[:, :art_start], T[:, -1:]])
    basis = basis.copy()
    m2 = T.shape[0]
    c2 = np.zeros(art_start)
    c2[:n] = c
    z2 = np.zeros(art_start + 1)
    z2[:art_start] = c2 - c2[basis] @ T[:, :art_start]
    z2[-1] = -(c2[basis] @ T[:, -1])
    allowed2 = np.ones(art_start, dtype=bool)
    _run_simplex(T, z2, basis, allowed2)

    x = np.zeros(art_start)
    x[basis] = T[:, -1]
    value = float(c2 @ x)
    return x[:n], value


def solve_lp(
    model: MilpModel, fixed: Optional[dict[int, float]] = None
) -> MilpResult:
    """Solve the continuous relaxation (binaries relaxed to [0, 1])."""
    A, senses, b, c, const, sign, decode = _standardize(model, fixed)
    if A.shape[0] == 0:
        # Objective bounded iff no free improving direction exists.
        x = np.zeros(A.shape[1])
        if np.any(c < -PIVOT_TOL):
            return MilpResult("unbounded", -math.inf * sign, [])
        value = const
        return MilpResult("optimal", sign * value, decode(x))
    try:
        x, value = _solve_standard(A, senses, b, c)
    except _Infeasible:
        return MilpResult("infeasible", math.nan, [])
    except _Unbounded:
        return MilpResult(
            "unbounded", -math.inf if sign > 0 else math.inf, []
        )
    return MilpResult("optimal", sign * (value + const), decode(x))


def _violation(model: MilpModel, xs: Sequence[float]) -> float:
    worst = 0.0
    for coefs, sense, rhs in model.constraints:
        lhs = sum(a * xs[j] for j, a in coefs.items())
        if sense == "<=":
            worst = max(worst, lhs - rhs)
        elif sense == ">=":
            worst = max(worst, rhs - lhs)
        else:
            worst = max(worst, abs(lhs - rhs))
    return worst


def solve_milp(
    model: MilpModel,
    node_limit: int = DEFAULT_NODE_LIMIT,
    branch_only: Optional[Sequence[int]] = None,
) -> MilpResult:
    """Exact optimum by depth-first branch-and-bound over the binaries.

    Branches on the binary with fractional part closest to 0.5 (ties go to
    the lowest index), exploring the rounding-toward-incumbent child first.

    ``branch_only`` restricts branching to a subset of the binaries. The
    caller asserts that once those are integral the relaxation attains the
    mixed optimum (e.g. the rest decouple into fractional knapsacks with
    integer budgets); the returned assignment may then hold fractional
    values for the non-branched binaries at unchanged objective value.
    """
    binaries = (
        list(branch_only) if branch_only is not None else model.binary_indices()
    )
    sign = 1.0 if model.objective_sense == "min" else -1.0

    best_value = math.inf  # in minimization orientation
    best_assign: Optional[list[float]] = None
    limited = False

    stack: list[dict[int, float]] = [{}]
    nodes = 0
    while stack:
        fixed = stack.pop()
        nodes += 1
        if nodes > node_limit:
            limited = True
            break
        res = solve_lp(model, fixed)
        if res.status == "infeasible":
            continue
        if res.status == "unbounded":
            free = [j for j in binaries if j not in fixed]
            if not free:
                return MilpResult(
                    "unbounded",
                    -math.inf if model.objective_sense == "min" else math.inf,
                    [],
                )
            # No relaxation point to guide branching; split the first
            # unfixed binary and keep searching.
            stack.append({**fixed, free[0]: 1.0})
            stack.append({**fixed, free[0]: 0.0})
            continue
        bound = sign * res.value
        if bound >= best_value - FEAS_TOL:
            continue
        xs = res.assignment
        frac_var = -1
        frac_dist = 2.0
        for j in binaries:
            f = xs[j] - math.floor(xs[j])
            if min(f, 1 - f) > INT_TOL:
                dist = abs(f - 0.5)
                if dist < frac_dist - 1e-12:
                    frac_dist = dist
                    frac_var = j
        if frac_var < 0:
            snapped = list(xs)
            for j in binaries:
                snapped[j] = float(round(snapped[j]))
            if _violation(model, snapped) <= FEAS_TOL:
                if bound < best_value - FEAS_TOL:
                    best_value = bound
                    best_assign = snapped
            continue
        f = xs[frac_var] - math.floor(xs[frac_var])
        if best_assign is not None:
            first = float(round(best_assign[frac_var]))
        else:
            first = float(round(f))
        second = 1.0 - first
        # Depth-first: the preferred child is pushed last (popped first).
        stack.append({**fixed, frac_var: second})
        stack.append({**fixed, frac_var: first})

    if best_assign is None:
        if limited:
            return MilpResult("node_limit", math.nan, [])
        return MilpResult("infeasible", math.nan, [])
    status = "node_limit" if limited else "optimal"
    return MilpResult(status, sign * best_value, best_assign)


def write_lp(model: MilpModel, path: str) -> None:
    """Dump the model in LP text format for external cross-checking."""

    def term(coefs: dict[int, float]) -> str:
        parts = []
        for j in sorted(coefs):
            a = coefs[j]
            sign = "+" if a >= 0 else "-"
            parts.append(f"{sign} {abs(a):g} x{j}")
        return " ".join(parts) if parts else "0"

    lines = [f"{model.objective_sense}imize", f" obj: {term(model.objective)}"]
    lines.append("subject to")
    for k, (coefs, sense, rhs) in enumerate(model.constraints):
        op = {"<=": "<=", ">=": ">=", "=": "="}[sense]
        lines.append(f" c{k}: {term(coefs)} {op} {rhs:g}")
    lines.append("bounds")
    for j, var in enumerate(model.variables):
        lo = "-inf" if var.lb == -INF else f"{var.lb:g}"
        hi = "+inf" if var.ub == INF else f"{var.ub:g}"
        lines.append(f" {lo} <= x{j} <= {hi}")
    bins = model.binary_indices()
    if bins:
        lines.append("binary")
        lines.append(" " + " ".join(f"x{j}" for j in bins))
    lines.append("end")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
