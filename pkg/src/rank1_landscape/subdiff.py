"""Sign sets, step functions and one-sided derivatives of the objective.

Writing ``M = u v^T`` the objective decomposes through the convex
piecewise-affine sections::

    alpha(t) = sum_j |y_j t - v_j|        beta(t) = sum_i |x_i t - u_i|

whose subdifferentials are non-decreasing step functions. Those step
functions give the partial subdifferentials in each coordinate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Instance, Point, check_dims, l1, residual, sign

INF = math.inf


class SignValue(enum.Enum):
    MINUS_ONE = -1
    PLUS_ONE = 1
    FULL_INTERVAL = 0  # the closed interval [-1, 1]

    @classmethod
    def of(cls, r) -> "SignValue":
        if r < 0:
            return cls.MINUS_ONE
        if r > 0:
            return cls.PLUS_ONE
        return cls.FULL_INTERVAL

    @property
    def bounds(self) -> tuple[int, int]:
        if self is SignValue.FULL_INTERVAL:
            return -1, 1
        return self.value, self.value


SignMatrix = tuple[tuple[SignValue, ...], ...]


def sign_matrix(inst: Instance, p: Point) -> SignMatrix:
    """Entrywise set-valued sign of the residual ``x y^T - M``."""
    return tuple(tuple(SignValue.of(r) for r in row) for row in residual(inst, p))


# --- interval sets -----------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    lo: Fraction | float
    hi: Fraction | float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def __contains__(self, t) -> bool:
        return self.lo <= t <= self.hi

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def scaled(self, c) -> "Interval":
        a, b = c * self.lo, c * self.hi
        return Interval(min(a, b), max(a, b))


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint union of closed intervals (endpoints may be infinite)."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        ivs = tuple(sorted(self.intervals, key=lambda iv: iv.lo))
        for a, b in zip(ivs, ivs[1:]):
            if a.hi >= b.lo:
                raise ValueError("intervals overlap")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def point(cls, t) -> "IntervalSet":
        return cls((Interval(t, t),))

    @classmethod
    def closed(cls, lo, hi) -> "IntervalSet":
        return cls((Interval(lo, hi),))

    def __contains__(self, t) -> bool:
        return any(t in iv for iv in self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def scaled(self, c) -> "IntervalSet":
        if c == 0:
            return IntervalSet.point(Fraction(0)) if self.intervals else IntervalSet()
        return IntervalSet(tuple(iv.scaled(c) for iv in self.intervals))

    def to_json(self) -> list:
        return [[_endpoint(iv.lo), _endpoint(iv.hi)] for iv in self.intervals]


def _endpoint(t) -> str:
    if isinstance(t, float):
        return "inf" if t > 0 else "-inf"
    return str(t)


# --- step functions ------------------------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """Non-decreasing piecewise-constant set-valued map on the real line.

    ``plateaus[k]`` is the value strictly between ``breakpoints[k-1]`` and
    ``breakpoints[k]``; at a breakpoint the value is the closed interval
    between its two neighbouring plateaus.
    """

    breakpoints: tuple[Fraction, ...]
    plateaus: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.plateaus) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more plateau than breakpoints")
        if any(a >= b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @property
    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.plateaus, self.plateaus[1:]))

    @property
    def jumps(self) -> tuple[tuple[Fraction, Interval], ...]:
        return tuple(
            (t, Interval(self.plateaus[k], self.plateaus[k + 1]))
            for k, t in enumerate(self.breakpoints)
        )

    def to_json(self) -> dict:
        return {
            "breakpoints": [str(t) for t in self.breakpoints],
            "plateaus": [str(c) for c in self.plateaus],
        }


def _sign_sum(pairs: Iterable[tuple[Fraction, Fraction]], t: Fraction) -> Fraction:
    # sum_k sign(a_k t - b_k) a_k at a t that is not a breakpoint; terms with
    # a_k = 0 vanish whatever the sign set is
    return sum((sign(a * t - b) * a for a, b in pairs if a), Fraction(0))


def _step_function(coefs: Sequence[Fraction], offsets: Sequence[Fraction]) -> StepFunction:
    pairs = list(zip(coefs, offsets))
    bps = sorted({b / a for a, b in pairs if a})
    if not bps:
        return StepFunction((), (_sign_sum(pairs, Fraction(0)),))
    samples = [bps[0] - 1]
    samples += [(a + b) / 2 for a, b in zip(bps, bps[1:])]
    samples.append(bps[-1] + 1)
    plateaus = [_sign_sum(pairs, t) for t in samples]
    return StepFunction(tuple(bps), tuple(plateaus))


def step_alpha(inst: Instance, p: Point) -> StepFunction:
    """``t -> sum_j sign(y_j t - v_j) y_j``, jumping at ``v_j / y_j``."""
    check_dims(inst, p)
    return _step_function(p.y, inst.v)


def step_beta(inst: Instance, p: Point) -> StepFunction:
    """``t -> sum_i sign(x_i t - u_i) x_i``, jumping at ``u_i / x_i``."""
    check_dims(inst, p)
    return _step_function(p.x, inst.u)


def step_eval(sf: StepFunction, t) -> IntervalSet:
    bps = sf.breakpoints
    for k, b in enumerate(bps):
        if t < b:
            return IntervalSet.point(sf.plateaus[k])
        if t == b:
            return IntervalSet.closed(sf.plateaus[k], sf.plateaus[k + 1])
    return IntervalSet.point(sf.plateaus[-1])


def roots(sf: StepFunction) -> IntervalSet:
    """All ``t`` with ``0`` in ``sf(t)``; a single interval by monotonicity."""
    pl, bps = sf.plateaus, sf.breakpoints
    edges = (-INF,) + bps + (INF,)
    pieces = []
    for k, c in enumerate(pl):
        if c == 0:
            pieces.append((edges[k], edges[k + 1]))
    for k, b in enumerate(bps):
        if pl[k] <= 0 <= pl[k + 1]:
            pieces.append((b, b))
    if not pieces:
        return IntervalSet()
    return IntervalSet.closed(min(a for a, _ in pieces), max(b for _, b in pieces))


# --- partial subdifferentials ---------------------------------------------------


def _partial(coef, own, other_norm, sf_factory):
    if coef:
        return step_eval(sf_factory(), own / coef).scaled(sign(coef))
    if own:
        return IntervalSet.point(sign(own) * other_norm)
    return IntervalSet.closed(-other_norm, other_norm)


def partial_subdiff_x(inst: Instance, p: Point, i: int) -> IntervalSet:
    """Clarke subdifferential of ``f`` in the coordinate ``x_i`` (0-based)."""
    check_dims(inst, p)
    if not 0 <= i < inst.m:
        raise IndexError(f"x index {i} out of range for m={inst.m}")
    return _partial(inst.u[i], p.x[i], l1(p.y), lambda: step_alpha(inst, p))


def partial_subdiff_y(inst: Instance, p: Point, j: int) -> IntervalSet:
    """Clarke subdifferential of ``f`` in the coordinate ``y_j`` (0-based)."""
    check_dims(inst, p)
    if not 0 <= j < inst.n:
        raise IndexError(f"y index {j} out of range for n={inst.n}")
    return _partial(inst.v[j], p.y[j], l1(p.x), lambda: step_beta(inst, p))


def zero_in_partials(inst: Instance, p: Point) -> bool:
    """Whether ``0`` lies in every partial subdifferential.

    Necessary for criticality, not sufficient.
    """
    check_dims(inst, p)
    alpha = beta = None
    ny, nx = l1(p.y), l1(p.x)
    for ui, xi in zip(inst.u, p.x):
        if ui:
            alpha = alpha or step_alpha(inst, p)
            if 0 not in step_eval(alpha, xi / ui):
                return False
        elif xi and ny:
            return False
    for vj, yj in zip(inst.v, p.y):
        if vj:
            beta = beta or step_beta(inst, p)
            if 0 not in step_eval(beta, yj / vj):
                return False
        elif yj and nx:
            return False
    return True


def directional_derivative(inst: Instance, p: Point, d: Point) -> Fraction:
    """One-sided derivative ``lim_{t->0+} (f(p + t d) - f(p)) / t``.

    Each term ``|r_ij + t (x_i k_j + h_i y_j) + t^2 h_i k_j|`` contributes
    ``sign(r_ij) (x_i k_j + h_i y_j)`` when ``r_ij != 0`` and
    ``|x_i k_j + h_i y_j|`` when ``r_ij = 0``.
    """
    check_dims(inst, p)
    check_dims(inst, d)
    total = Fraction(0)
    for xi, hi, row in zip(p.x, d.x, residual(inst, p)):
        for yj, kj, r in zip(p.y, d.y, row):
            lin = xi * kj + hi * yj
            total += abs(lin) if r == 0 else sign(r) * lin
    return total
