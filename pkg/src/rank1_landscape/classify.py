"""Global minimum / spurious local minimum / saddle classification.

For ``M = u v^T`` with ``u != 0`` and ``v != 0`` the critical points split
into three families:

* global minima ``(u theta, v / theta)``;
* spurious local minima: ``y = 0`` and ``|sum_{u_i != 0} sign(u_i) x_i|``
  strictly below ``sum_{u_i = 0} |x_i|`` (or the mirror image with ``x = 0``);
* saddles: the same with equality, or the balanced-ratio conditions.

At every saddle, the segment toward a suitable global minimum
``(u theta, v / theta)`` decreases ``f`` as ``(1 - t^2) f(x, y)``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Instance,
    InternalError,
    Point,
    PreconditionViolated,
    check_dims,
    eval_f,
    factor_rank_one,
    sign,
)
from .criticality import (
    all_verdicts,
    is_critical_closed_form,
    off_support_mass,
    signed_sum,
)


class Kind(enum.Enum):
    NOT_CRITICAL = "not_critical"
    GLOBAL_MIN = "global_min"
    SPURIOUS_LOCAL_MIN = "spurious_local_min"
    SADDLE = "saddle"


class ClassCondition(enum.Enum):
    ZERO_RESIDUAL = "zero_residual"
    SPURIOUS_Y_ZERO = "spurious_y_zero"  # y = 0, strict imbalance in x
    SPURIOUS_X_ZERO = "spurious_x_zero"
    SADDLE_Y_ZERO = "saddle_y_zero"  # y = 0, tight imbalance in x
    SADDLE_X_ZERO = "saddle_x_zero"
    SADDLE_BALANCED = "saddle_balanced_ratios"


class DeciderDisagreement(InternalError):
    def __init__(self, verdicts):
        self.verdicts = verdicts
        super().__init__(
            "criticality deciders disagree: "
            + ", ".join(f"{v.method.value}={v.is_critical}" for v in verdicts)
        )


@dataclass(frozen=True)
class Classification:
    kind: Kind
    condition: ClassCondition | None
    f_value: Fraction
    theta: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "condition": self.condition.value if self.condition else None,
            "f_value": str(self.f_value),
        }
        if self.theta is not None:
            out["theta"] = str(self.theta)
        return out


def _global_theta(inst: Instance, p: Point) -> Fraction | None:
    if inst.is_zero:
        return None
    i = next(i for i, ui in enumerate(inst.u) if ui)
    return p.x[i] / inst.u[i]


def classify_point(inst: Instance, p: Point, *, cross_check: bool = True) -> Classification:
    """Classify ``p`` exactly.

    With ``cross_check`` (the default) all three criticality deciders run and
    a :class:`DeciderDisagreement` is raised if they differ. Callers that have
    already compared the verdicts can switch it off.
    """
    check_dims(inst, p)
    if cross_check:
        verdicts = all_verdicts(inst, p)
        if len({v.is_critical for v in verdicts}) != 1:
            raise DeciderDisagreement(verdicts)
        critical = verdicts[0].is_critical
    else:
        critical = is_critical_closed_form(inst, p).is_critical
    fval = eval_f(inst, p)
    if not critical:
        return Classification(Kind.NOT_CRITICAL, None, fval)
    if fval == 0:
        return Classification(
            Kind.GLOBAL_MIN, ClassCondition.ZERO_RESIDUAL, fval, _global_theta(inst, p)
        )
    x, y, u, v = p.x, p.y, inst.u, inst.v
    x_zero, y_zero = not any(x), not any(y)
    gap_x = off_support_mass(x, u) - abs(signed_sum(x, u))
    gap_y = off_support_mass(y, v) - abs(signed_sum(y, v))
    if y_zero and gap_x > 0:
        return Classification(Kind.SPURIOUS_LOCAL_MIN, ClassCondition.SPURIOUS_Y_ZERO, fval)
    if x_zero and gap_y > 0:
        return Classification(Kind.SPURIOUS_LOCAL_MIN, ClassCondition.SPURIOUS_X_ZERO, fval)
    if y_zero and gap_x == 0:
        return Classification(Kind.SADDLE, ClassCondition.SADDLE_Y_ZERO, fval)
    if x_zero and gap_y == 0:
        return Classification(Kind.SADDLE, ClassCondition.SADDLE_X_ZERO, fval)
    return Classification(Kind.SADDLE, ClassCondition.SADDLE_BALANCED, fval)


# --- descent at saddles ---------------------------------------------------------


@dataclass(frozen=True)
class DescentPlan:
    theta: Fraction
    direction: Point
    valid_step_bound: Fraction

    def to_json(self) -> dict:
        return {
            "theta": str(self.theta),
            "direction": self.direction.to_json(),
            "valid_step_bound": str(self.valid_step_bound),
        }


def _balanced_theta(inst: Instance, p: Point) -> Fraction:
    """Scale of the target global minimum when all ratio products are <= 1.

    Binding pairs ``x_i y_j = u_i v_j`` force the choice: the positive binding
    ratios ``x_i / u_i`` all coincide and are used when present, otherwise the
    common negative one. Without binding pairs any nonzero value works.
    """
    pos, neg = set(), set()
    for xi, ui in zip(p.x, inst.u):
        if not ui:
            continue
        for yj, vj in zip(p.y, inst.v):
            if vj and xi * yj == ui * vj:
                r = xi / ui
                (pos if r > 0 else neg).add(r)
    if len(pos) > 1 or (not pos and len(neg) > 1):
        raise InternalError("binding ratios are not unique")
    if pos:
        return pos.pop()
    if neg:
        return neg.pop()
    return Fraction(1)


def _descent_theta(inst: Instance, p: Point, cls: Classification) -> Fraction:
    if cls.condition is ClassCondition.SADDLE_Y_ZERO:
        s = signed_sum(p.x, inst.u)
        if s:
            return Fraction(sign(s))
    elif cls.condition is ClassCondition.SADDLE_X_ZERO:
        s = signed_sum(p.y, inst.v)
        if s:
            return Fraction(sign(s))
    # a tight imbalance of zero is the balanced-ratio case
    return _balanced_theta(inst, p)


def descent_identity_holds(inst: Instance, p: Point, direction: Point, t) -> bool:
    t = Fraction(t)
    return eval_f(inst, p + direction.scale(t)) == (1 - t * t) * eval_f(inst, p)


def descent_direction(inst: Instance, p: Point, *, max_halvings: int = 200) -> DescentPlan:
    """Direction from a saddle toward a global minimum with exact decrease.

    The step bound is found by halving ``t`` from 1/2 until the identity
    ``f(p + t d) = (1 - t^2) f(p)`` holds at both ``t`` and ``t / 2``.
    """
    check_dims(inst, p)
    if inst.is_zero:
        raise PreconditionViolated("descent construction needs u != 0 and v != 0")
    cls = classify_point(inst, p, cross_check=False)
    if cls.kind is not Kind.SADDLE:
        raise PreconditionViolated(f"point is {cls.kind.value}, not a saddle")
    theta = _descent_theta(inst, p, cls)
    d = Point(
        tuple(ui * theta - xi for ui, xi in zip(inst.u, p.x)),
        tuple(vj / theta - yj for vj, yj in zip(inst.v, p.y)),
    )
    t = Fraction(1, 2)
    for _ in range(max_halvings):
        if descent_identity_holds(inst, p, d, t) and descent_identity_holds(inst, p, d, t / 2):
            return DescentPlan(theta, d, t)
        t /= 2
    raise InternalError("descent identity never held; construction is wrong")


def verify_descent(inst: Instance, p: Point, plan: DescentPlan, t) -> bool:
    """Exact check of ``f(p + t d) = (1 - t^2) f(p)`` at a saddle."""
    t = Fraction(t)
    if t <= 0:
        raise PreconditionViolated("step must be positive")
    if classify_point(inst, p, cross_check=False).kind is not Kind.SADDLE:
        raise PreconditionViolated("point is not a saddle")
    return descent_identity_holds(inst, p, plan.direction, t)


# --- spurious minima ----------------------------------------------------------------


def theorem1_predicate(M) -> bool:
    """True iff ``M`` has no zero entries or is entirely zero.

    For rank-one ``M`` this is exactly the absence of spurious local minima.
    Raises :class:`RankTooHigh` for rank two and above.
    """
    inst = factor_rank_one(M)
    entries = [a for row in inst.M for a in row]
    return all(entries) or not any(entries)


def spurious_witness(inst: Instance) -> Point | None:
    """A spurious local minimum, or ``None`` when there is none."""
    if inst.is_zero:
        return None
    zero = Fraction(0)
    if not all(inst.u):
        i = inst.u.index(0)
        x = tuple(Fraction(1) if k == i else zero for k in range(inst.m))
        return Point(x, (zero,) * inst.n)
    if not all(inst.v):
        j = inst.v.index(0)
        y = tuple(Fraction(1) if k == j else zero for k in range(inst.n))
        return Point((zero,) * inst.m, y)
    return None


def probe_radius(inst: Instance, p: Point, cls: Classification) -> Fraction:
    """Perturbation radius inside which a spurious minimum provably holds.

    A quarter of the smallest nonzero among the coordinates, the strict gap
    and the target entries, further divided so that ``dim * radius`` stays
    below half the gap.
    """
    if cls.condition is ClassCondition.SPURIOUS_Y_ZERO:
        coords, gap, dim = p.x, off_support_mass(p.x, inst.u) - abs(signed_sum(p.x, inst.u)), inst.m
    elif cls.condition is ClassCondition.SPURIOUS_X_ZERO:
        coords, gap, dim = p.y, off_support_mass(p.y, inst.v) - abs(signed_sum(p.y, inst.v)), inst.n
    else:
        raise PreconditionViolated("probe radius is defined at spurious minima only")
    cands = [abs(a) for a in coords if a] + [gap]
    cands += [abs(a) for row in inst.M for a in row if a]
    return min(cands) / max(4, 2 * dim)


def spurious_lower_bound(inst: Instance, p: Point, cls: Classification, h, k) -> Fraction:
    """Value that ``f(p + (h, k))`` provably exceeds near a spurious minimum.

    ``f(p) + gap / 2 * sum |k_j|`` over ``v_j != 0`` (or the mirror image).
    """
    fval = eval_f(inst, p)
    if cls.condition is ClassCondition.SPURIOUS_Y_ZERO:
        gap = off_support_mass(p.x, inst.u) - abs(signed_sum(p.x, inst.u))
        moved = sum((abs(kj) for kj, vj in zip(k, inst.v) if vj), Fraction(0))
    else:
        gap = off_support_mass(p.y, inst.v) - abs(signed_sum(p.y, inst.v))
        moved = sum((abs(hi) for hi, ui in zip(h, inst.u) if ui), Fraction(0))
    return fval + gap / 2 * moved


@dataclass(frozen=True)
class ProbeFailure:
    h: tuple
    k: tuple
    f_value: Fraction
    bound: Fraction


def spurious_probe(
    inst: Instance,
    p: Point,
    rng: random.Random,
    samples: int = 200,
    cls: Classification | None = None,
    grid: int = 64,
) -> ProbeFailure | None:
    """Randomly perturb a spurious minimum within the probe radius.

    Returns the first perturbation that breaks either ``f(p + d) >= f(p)`` or
    the lower bound, else ``None``.
    """
    cls = cls or classify_point(inst, p, cross_check=False)
    if cls.kind is not Kind.SPURIOUS_LOCAL_MIN:
        raise PreconditionViolated("not a spurious local minimum")
    rho = probe_radius(inst, p, cls)
    fval = eval_f(inst, p)

    def draw(size):
        return tuple(Fraction(rng.randint(-grid, grid), grid) * rho for _ in range(size))

    for _ in range(samples):
        h, k = draw(inst.m), draw(inst.n)
        q = p + Point(h, k)
        fq = eval_f(inst, q)
        bound = spurious_lower_bound(inst, p, cls, h, k)
        if fq < fval or fq < bound:
            return ProbeFailure(h, k, fq, bound)
    return None

