"""Three independent decisions of ``0 in df(x, y)``.

* :func:`is_critical_lp` searches for a multiplier matrix ``L`` in the sign
  set of the residual with ``L y = 0`` and ``L^T x = 0`` (exact LP).
* :func:`is_critical_directional` minimizes the one-sided directional
  derivative over the unit box; the point is critical iff the minimum is 0.
* :func:`is_critical_closed_form` evaluates quantifier-free polynomial
  conditions directly.

All three must agree on every input; the fuzzing harness checks exactly that.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Instance,
    InternalError,
    Point,
    PreconditionViolated,
    check_dims,
    residual,
    sign,
)
from .rational_lp import BoxLinearSystem, LpStatus, solve_feasibility, solve_min
from .subdiff import SignValue, directional_derivative, sign_matrix

_ZERO = Fraction(0)


class Method(enum.Enum):
    LAMBDA_LP = "lambda_lp"
    DIRECTIONAL_LP = "directional_lp"
    CLOSED_FORM = "closed_form"


class Condition(enum.Enum):
    """Which closed-form criticality condition matched."""

    ZERO_RESIDUAL = "zero_residual"  # x y^T = u v^T
    Y_ZERO = "y_zero_balanced"  # y = 0, |signed sum of x| <= mass of x off supp(u)
    X_ZERO = "x_zero_balanced"  # mirror image
    BALANCED_RATIOS = "balanced_ratios"  # signed sums vanish, ratios <= 1, supports nested


@dataclass(frozen=True)
class CriticalityVerdict:
    is_critical: bool
    method: Method
    lambda_witness: tuple | None = None
    descent_certificate: Point | None = None
    certificate_slope: Fraction | None = None
    matched_condition: Condition | None = None

    def to_json(self) -> dict:
        out = {"method": self.method.value, "is_critical": self.is_critical}
        if self.lambda_witness is not None:
            out["lambda_witness"] = [[str(a) for a in row] for row in self.lambda_witness]
        if self.descent_certificate is not None:
            out["descent_certificate"] = self.descent_certificate.to_json()
            out["directional_derivative"] = str(self.certificate_slope)
        if self.matched_condition is not None:
            out["matched_condition"] = self.matched_condition.value
        return out


# --- multiplier LP ------------------------------------------------------------


def _lambda_valid(L, S, x, y) -> bool:
    for row, srow in zip(L, S):
        for a, s in zip(row, srow):
            lo, hi = s.bounds
            if not lo <= a <= hi:
                return False
    if any(sum((a * yj for a, yj in zip(row, y)), _ZERO) for row in L):
        return False
    m, n = len(x), len(y)
    return not any(sum((L[i][j] * x[i] for i in range(m)), _ZERO) for j in range(n))


def is_critical_lp(inst: Instance, p: Point) -> CriticalityVerdict:
    """Feasibility of ``L in sign(x y^T - M), L y = 0, L^T x = 0``.

    Entries with nonzero residual are fixed to ``+-1`` and folded into the
    right-hand sides; only zero-residual entries become box variables.
    """
    check_dims(inst, p)
    S = sign_matrix(inst, p)
    m, n = inst.m, inst.n
    free = [(i, j) for i in range(m) for j in range(n) if S[i][j] is SignValue.FULL_INTERVAL]
    col = {ij: k for k, ij in enumerate(free)}
    eqs = []
    for i in range(m):
        row = [_ZERO] * len(free)
        rhs = _ZERO
        for j in range(n):
            if (i, j) in col:
                row[col[i, j]] = p.y[j]
            else:
                rhs -= S[i][j].value * p.y[j]
        eqs.append((row, rhs))
    for j in range(n):
        row = [_ZERO] * len(free)
        rhs = _ZERO
        for i in range(m):
            if (i, j) in col:
                row[col[i, j]] = p.x[i]
            else:
                rhs -= S[i][j].value * p.x[i]
        eqs.append((row, rhs))
    box = (-1,) * len(free), (1,) * len(free)
    outcome = solve_feasibility(BoxLinearSystem(len(free), eqs, *box))
    if outcome.status is LpStatus.INFEASIBLE:
        return CriticalityVerdict(False, Method.LAMBDA_LP)
    L = [[Fraction(S[i][j].value) for j in range(n)] for i in range(m)]
    for (i, j), k in col.items():
        L[i][j] = outcome.witness[k]
    L = tuple(tuple(r) for r in L)
    if not _lambda_valid(L, S, p.x, p.y):
        raise InternalError("LP multiplier fails verification")
    return CriticalityVerdict(True, Method.LAMBDA_LP, lambda_witness=L)


# --- directional LP ---------------------------------------------------------------


def is_critical_directional(inst: Instance, p: Point) -> CriticalityVerdict:
    """Minimize ``d -> f'(p; d)`` over ``||d||_inf <= 1``.

    Variables are ``h`` (m), ``k`` (n) and, for each zero residual whose
    linear term can move, an epigraph variable ``s >= |x_i k_j + h_i y_j|``
    written with two nonnegative slacks.
    """
    check_dims(inst, p)
    m, n = inst.m, inst.n
    R = residual(inst, p)
    tight = [
        (i, j)
        for i in range(m)
        for j in range(n)
        if R[i][j] == 0 and (p.x[i] or p.y[j])
    ]
    nv = m + n + 3 * len(tight)
    cost = [_ZERO] * nv
    for i in range(m):
        for j in range(n):
            s = sign(R[i][j])
            if s:
                cost[i] += s * p.y[j]
                cost[m + j] += s * p.x[i]
    eqs = []
    for t, (i, j) in enumerate(tight):
        base = m + n + 3 * t
        cost[base] = Fraction(1)
        # s - (x_i k_j + h_i y_j) - a = 0  and  s + (x_i k_j + h_i y_j) - b = 0
        for sgn, slack in ((-1, base + 1), (1, base + 2)):
            row = [_ZERO] * nv
            row[base] = Fraction(1)
            row[i] += sgn * p.y[j]
            row[m + j] += sgn * p.x[i]
            row[slack] = Fraction(-1)
            eqs.append((row, _ZERO))
    lower = (-1,) * (m + n) + (0,) * (3 * len(tight))
    upper = (1,) * (m + n) + (math.inf,) * (3 * len(tight))
    outcome = solve_min(BoxLinearSystem(nv, eqs, lower, upper), cost)
    if outcome.status is not LpStatus.OPTIMAL:
        raise InternalError(f"directional LP returned {outcome.status}")
    if outcome.objective_value > 0:
        raise InternalError("directional LP minimum exceeds the value at d = 0")
    if outcome.objective_value == 0:
        return CriticalityVerdict(True, Method.DIRECTIONAL_LP, certificate_slope=_ZERO)
    w = outcome.witness
    d = Point(w[:m], w[m : m + n])
    slope = directional_derivative(inst, p, d)
    if slope != outcome.objective_value:
        raise InternalError("LP value disagrees with the closed-form derivative")
    return CriticalityVerdict(
        False, Method.DIRECTIONAL_LP, descent_certificate=d, certificate_slope=slope
    )


# --- closed form -------------------------------------------------------------------


def signed_sum(coords, factors) -> Fraction:
    """``sum over factors != 0 of sign(factor) * coord``."""
    return sum((sign(c) * a for a, c in zip(coords, factors) if c), _ZERO)


def off_support_mass(coords, factors) -> Fraction:
    """``sum over factors == 0 of |coord|``."""
    return sum((abs(a) for a, c in zip(coords, factors) if not c), _ZERO)


def ratio_at_most_one(xi, yj, ui, vj) -> bool:
    """``x_i y_j / (u_i v_j) <= 1`` for ``u_i v_j != 0``, without dividing."""
    uv = ui * vj
    return xi * yj <= uv if uv > 0 else xi * yj >= uv


def balanced_ratio_conditions(inst: Instance, p: Point) -> bool:
    x, y, u, v = p.x, p.y, inst.u, inst.v
    if signed_sum(x, u) or signed_sum(y, v):
        return False
    if any(xi for xi, ui in zip(x, u) if not ui):
        return False
    if any(yj for yj, vj in zip(y, v) if not vj):
        return False
    return all(
        ratio_at_most_one(xi, yj, ui, vj)
        for xi, ui in zip(x, u)
        if ui
        for yj, vj in zip(y, v)
        if vj
    )


def matched_condition(inst: Instance, p: Point) -> Condition | None:
    """First criticality condition that holds, in cheap-first order."""
    check_dims(inst, p)
    x, y, u, v = p.x, p.y, inst.u, inst.v
    if all(r == 0 for row in residual(inst, p) for r in row):
        return Condition.ZERO_RESIDUAL
    if not any(y) and abs(signed_sum(x, u)) <= off_support_mass(x, u):
        return Condition.Y_ZERO
    if not any(x) and abs(signed_sum(y, v)) <= off_support_mass(y, v):
        return Condition.X_ZERO
    if balanced_ratio_conditions(inst, p):
        return Condition.BALANCED_RATIOS
    return None


def is_critical_closed_form(inst: Instance, p: Point) -> CriticalityVerdict:
    cond = matched_condition(inst, p)
    return CriticalityVerdict(cond is not None, Method.CLOSED_FORM, matched_condition=cond)


def _sgn_outer(u, v):
    return tuple(tuple(Fraction(-sign(ui * vj)) for vj in v) for ui in u)


def witness_lambda(inst: Instance, p: Point) -> tuple:
    """The explicit multiplier ``L = -sgn(u v^T)`` (with ``sgn(0) = 0``).

    Valid whenever the balanced-ratio conditions hold; raises
    :class:`PreconditionViolated` otherwise.
    """
    check_dims(inst, p)
    if not balanced_ratio_conditions(inst, p):
        raise PreconditionViolated("balanced-ratio conditions do not hold at this point")
    L = _sgn_outer(inst.u, inst.v)
    if not _lambda_valid(L, sign_matrix(inst, p), p.x, p.y):
        raise InternalError("-sgn(u v^T) is not a valid multiplier")
    return L


def all_verdicts(inst: Instance, p: Point) -> tuple[CriticalityVerdict, ...]:
    return (
        is_critical_lp(inst, p),
        is_critical_directional(inst, p),
        is_critical_closed_form(inst, p),
    )
