"""Exact linear feasibility and minimization over box-bounded variables.

Problems have the form::

    minimize  c . x   subject to   A x = b,   lower <= x <= upper

with ``lower``/``upper`` entries possibly infinite. The solver is a dense
bounded-variable primal simplex with Bland's smallest-index rule, so it
terminates on the heavily degenerate systems that sign patterns produce.

Arithmetic runs on ``gmpy2.mpq`` when available (several times faster than
``Fraction`` for tableau updates) and falls back to :class:`fractions.Fraction`.
Set ``RANK1_LANDSCAPE_PURE=1`` to force the fallback. Inputs and outputs are
always ``Fraction``.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import InternalError, to_rational

if os.environ.get("RANK1_LANDSCAPE_PURE"):
    _Q = Fraction
    BACKEND = "fraction"
else:
    try:
        from gmpy2 import mpq as _Q

        BACKEND = "gmpy2"
    except ImportError:  # pragma: no cover - depends on environment
        _Q = Fraction
        BACKEND = "fraction"

INF = math.inf
_ZERO = _Q(0)


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _bound(value, default):
    if value is None:
        return default
    if isinstance(value, float) and math.isinf(value):
        return value
    return to_rational(value)


class MalformedSystem(ValueError):
    pass


class LpStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class BoxLinearSystem:
    """``A x = b`` with ``lower <= x <= upper``.

    ``equalities`` is a sequence of ``(row, rhs)`` pairs. Infinite bounds are
    ``-math.inf``/``math.inf`` (``None`` is accepted and means unbounded).
    """

    num_vars: int
    equalities: tuple = ()
    lower: tuple = None
    upper: tuple = None

    def __post_init__(self):
        nv = self.num_vars
        if not isinstance(nv, int) or nv < 0:
            raise MalformedSystem(f"num_vars must be a non-negative int, got {nv!r}")
        eqs = []
        for row, rhs in self.equalities:
            row = tuple(to_rational(a) for a in row)
            if len(row) != nv:
                raise MalformedSystem(
                    f"equality row has length {len(row)}, expected {nv}"
                )
            eqs.append((row, to_rational(rhs)))
        lower = self.lower if self.lower is not None else (-INF,) * nv
        upper = self.upper if self.upper is not None else (INF,) * nv
        if len(lower) != nv or len(upper) != nv:
            raise MalformedSystem("bound vectors must have length num_vars")
        lower = tuple(_bound(a, -INF) for a in lower)
        upper = tuple(_bound(a, INF) for a in upper)
        for k, (lo, hi) in enumerate(zip(lower, upper)):
            if lo == INF or hi == -INF:
                raise MalformedSystem(f"variable {k} has an empty bound range")
            if lo > hi:
                raise MalformedSystem(f"variable {k}: lower {lo} > upper {hi}")
        object.__setattr__(self, "equalities", tuple(eqs))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            return False
        for lo, hi, xk in zip(self.lower, self.upper, x):
            if xk < lo or xk > hi:
                return False
        return all(
            sum((a * xk for a, xk in zip(row, x)), Fraction(0)) == rhs
            for row, rhs in self.equalities
        )


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    witness: tuple | None = None
    objective_value: Fraction | None = None
    pivots: int = field(default=0, compare=False)


# --- standard form ----------------------------------------------------------
#
# Every original variable x_k becomes an affine image of nonnegative
# variables: x_k = offset + sum(coef * z), with 0 <= z <= ub (ub may be None).


def _standardize(sys: BoxLinearSystem):
    maps = []  # per original var: (offset, [(z index, coef)])
    ub = []
    for lo, hi in zip(sys.lower, sys.upper):
        lo_fin = not isinstance(lo, float)
        hi_fin = not isinstance(hi, float)
        if lo_fin and hi_fin and lo == hi:
            maps.append((_Q(lo), []))
        elif lo_fin:
            ub.append(_Q(hi - lo) if hi_fin else None)
            maps.append((_Q(lo), [(len(ub) - 1, 1)]))
        elif hi_fin:
            ub.append(None)
            maps.append((_Q(hi), [(len(ub) - 1, -1)]))
        else:
            ub.extend([None, None])
            maps.append((_ZERO, [(len(ub) - 2, 1), (len(ub) - 1, -1)]))
    nz = len(ub)
    A, b = [], []
    for row, rhs in sys.equalities:
        new = [_ZERO] * nz
        r = _Q(rhs)
        for a, (offset, terms) in zip(row, maps):
            if not a:
                continue
            a = _Q(a)
            r -= a * offset
            for z, coef in terms:
                new[z] += a * coef
        if any(new):
            A.append(new)
            b.append(r)
        elif r:
            return None  # 0 = nonzero
    return maps, ub, A, b


def _recover(maps, z) -> tuple[Fraction, ...]:
    out = []
    for offset, terms in maps:
        val = offset
        for idx, coef in terms:
            val += coef * z[idx]
        out.append(_frac(val))
    return tuple(out)


class _Simplex:
    """Bounded-variable tableau. Columns are structural only; each row starts
    with an artificial basic variable that may leave but never re-enters."""

    def __init__(self, A, b, ub):
        self.r = len(A)
        self.n = len(ub)
        self.T = []
        rhs = []
        for row, bi in zip(A, b):
            if bi < 0:
                row = [-a for a in row]
                bi = -bi
            self.T.append(list(row))
            rhs.append(bi)
        # variable ids: 0..n-1 structural, n..n+r-1 artificial
        self.ub = list(ub) + [None] * self.r
        self.x = [_ZERO] * self.n + rhs
        self.at_upper = [False] * self.n
        self.basis = list(range(self.n, self.n + self.r))
        self.is_basic = [False] * self.n
        self.pivots = 0

    def reduced_costs(self, cost):
        """``c_j - c_B . T[:, j]`` for structural columns; ``cost`` has length n + r."""
        d = list(cost[: self.n])
        for i, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                row = self.T[i]
                for j in range(self.n):
                    if row[j]:
                        d[j] -= cb * row[j]
        return d

    def run(self, d, max_pivots=100000):
        T, x, ub, basis = self.T, self.x, self.ub, self.basis
        for _ in range(max_pivots):
            j = -1
            for col in range(self.n):
                if self.is_basic[col]:
                    continue
                dc = d[col]
                if (dc < 0 and not self.at_upper[col]) or (dc > 0 and self.at_upper[col]):
                    j = col
                    break
            if j < 0:
                return True
            sigma = 1 if d[j] < 0 else -1
            # ratio test, ties by smallest variable id (Bland)
            best_theta, best_var, best_row, best_up = None, None, -1, False
            if ub[j] is not None:
                best_theta, best_var = ub[j], j
            for i in range(self.r):
                a = T[i][j]
                if not a:
                    continue
                if sigma < 0:
                    a = -a
                bv = basis[i]
                if a > 0:
                    theta, up = x[bv] / a, False
                else:
                    if ub[bv] is None:
                        continue
                    theta, up = (ub[bv] - x[bv]) / -a, True
                if (
                    best_theta is None
                    or theta < best_theta
                    or (theta == best_theta and bv < best_var)
                ):
                    best_theta, best_var, best_row, best_up = theta, bv, i, up
            if best_theta is None:
                return False
            step = best_theta if sigma > 0 else -best_theta
            if step:
                x[j] += step
                for i in range(self.r):
                    a = T[i][j]
                    if a:
                        x[basis[i]] -= a * step
            if best_row < 0:
                self.at_upper[j] = not self.at_upper[j]
                continue
            self._pivot(best_row, j, d)
            leaving = best_var
            x[leaving] = ub[leaving] if best_up else _ZERO
            if leaving < self.n:
                self.is_basic[leaving] = False
                self.at_upper[leaving] = best_up
        raise InternalError("simplex exceeded pivot limit")

    def _pivot(self, i, j, d):
        T = self.T
        prow = T[i]
        piv = prow[j]
        if piv != 1:
            inv = 1 / piv
            for l in range(self.n):
                if prow[l]:
                    prow[l] *= inv
        nz = [(l, a) for l, a in enumerate(prow) if a]
        for k in range(self.r):
            if k == i:
                continue
            row = T[k]
            f = row[j]
            if f:
                for l, a in nz:
                    row[l] -= f * a
        f = d[j]
        if f:
            for l, a in nz:
                d[l] -= f * a
        self.basis[i] = j
        self.is_basic[j] = True
        self.at_upper[j] = False
        self.pivots += 1

    def phase_one(self) -> bool:
        cost = [_ZERO] * self.n + [_Q(1)] * self.r
        d = self.reduced_costs(cost)
        self.run(d)
        if any(self.x[self.n :]):
            return False
        for a in range(self.n, self.n + self.r):
            self.ub[a] = _ZERO
        return True


def _solve(sys: BoxLinearSystem, objective):
    std = _standardize(sys)
    if std is None:
        return LpOutcome(LpStatus.INFEASIBLE)
    maps, ub, A, b = std
    ub = [None if u is None else _Q(u) for u in ub]
    s = _Simplex(A, b, ub)
    if not s.phase_one():
        return LpOutcome(LpStatus.INFEASIBLE, pivots=s.pivots)
    if objective is None:
        witness = _recover(maps, s.x)
        _check(sys, witness)
        return LpOutcome(LpStatus.FEASIBLE, witness, pivots=s.pivots)

    cost = [_ZERO] * (s.n + s.r)
    const = _ZERO
    for c, (offset, terms) in zip(objective, maps):
        if not c:
            continue
        c = _Q(c)
        const += c * offset
        for z, coef in terms:
            cost[z] += c * coef
    d = s.reduced_costs(cost)
    if not s.run(d):
        return LpOutcome(LpStatus.UNBOUNDED, pivots=s.pivots)
    witness = _recover(maps, s.x)
    _check(sys, witness)
    value = sum((c * w for c, w in zip(objective, witness)), Fraction(0))
    return LpOutcome(LpStatus.OPTIMAL, witness, value, pivots=s.pivots)


def _check(sys, witness):
    if not sys.satisfied_by(witness):
        raise InternalError("simplex witness violates its own constraints")


def solve_feasibility(sys: BoxLinearSystem) -> LpOutcome:
    """Decide whether ``sys`` has a solution; exact, no tolerance."""
    return _solve(sys, None)


def solve_min(sys: BoxLinearSystem, objective: Sequence) -> LpOutcome:
    """Minimize ``objective . x`` over ``sys``."""
    objective = tuple(to_rational(c) for c in objective)
    if len(objective) != sys.num_vars:
        raise MalformedSystem("objective length must equal num_vars")
    return _solve(sys, objective)
