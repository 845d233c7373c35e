"""Exact rational instances, points and the l1 objective.

Everything here works on :class:`fractions.Fraction`. An :class:`Instance`
holds a target matrix ``M`` of rank at most one together with a factorization
``M = u v^T``; a :class:`Point` holds a candidate ``(x, y)``.
"""

from __future__ import annotations

import json
import numbers
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]
Matrix = tuple[tuple[Fraction, ...], ...]


class RankTooHigh(ValueError):
    """The matrix has no exact rank-one factorization."""


class DimensionError(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


class InternalError(RuntimeError):
    """An exact self-check failed; indicates a bug, never bad input."""


def to_rational(value) -> Fraction:
    """Convert ``value`` to a Fraction, refusing anything inexact.

    Accepts ints, Fractions and strings of the form ``"p"`` or ``"p/q"``.
    Floats and decimal strings are rejected.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(c in text for c in ".eE") or not text:
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"not an exact rational: {value!r} ({type(value).__name__})")


def rational_str(q: Fraction) -> str:
    return str(q)


def sign(q) -> int:
    return (q > 0) - (q < 0)


def _vector(values: Iterable) -> Vector:
    return tuple(to_rational(v) for v in values)


def _matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(_vector(r) for r in rows)


def outer(u: Sequence[Fraction], v: Sequence[Fraction]) -> Matrix:
    return tuple(tuple(ui * vj for vj in v) for ui in u)


@dataclass(frozen=True)
class Instance:
    """Target ``M = u v^T`` of shape ``(m, n)``."""

    M: Matrix
    u: Vector
    v: Vector

    def __post_init__(self):
        object.__setattr__(self, "M", _matrix(self.M))
        object.__setattr__(self, "u", _vector(self.u))
        object.__setattr__(self, "v", _vector(self.v))
        if not self.u or not self.v:
            raise DimensionError("instance must have m >= 1 and n >= 1")
        if len(self.M) != len(self.u) or any(len(r) != len(self.v) for r in self.M):
            raise DimensionError(
                f"M has shape incompatible with u ({len(self.u)}) and v ({len(self.v)})"
            )
        if outer(self.u, self.v) != self.M:
            raise RankTooHigh("M != u v^T")

    @classmethod
    def from_factors(cls, u: Iterable, v: Iterable) -> "Instance":
        u, v = _vector(u), _vector(v)
        return cls(outer(u, v), u, v)

    @property
    def m(self) -> int:
        return len(self.u)

    @property
    def n(self) -> int:
        return len(self.v)

    @property
    def is_zero(self) -> bool:
        return not any(self.u) or not any(self.v)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "M": [[rational_str(q) for q in row] for row in self.M],
            "u": [rational_str(q) for q in self.u],
            "v": [rational_str(q) for q in self.v],
        }


@dataclass(frozen=True)
class Point:
    x: Vector
    y: Vector

    def __post_init__(self):
        object.__setattr__(self, "x", _vector(self.x))
        object.__setattr__(self, "y", _vector(self.y))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.x), len(self.y)

    def __add__(self, other: "Point") -> "Point":
        _same_shape(self, other)
        return Point(
            tuple(a + b for a, b in zip(self.x, other.x)),
            tuple(a + b for a, b in zip(self.y, other.y)),
        )

    def scale(self, t) -> "Point":
        t = to_rational(t)
        return Point(tuple(t * a for a in self.x), tuple(t * b for b in self.y))

    def rescale(self, theta) -> "Point":
        """Return ``(theta x, y / theta)``, which leaves the objective unchanged."""
        theta = to_rational(theta)
        if theta == 0:
            raise ValueError("theta must be nonzero")
        return Point(tuple(theta * a for a in self.x), tuple(b / theta for b in self.y))

    def to_json(self) -> dict:
        return {
            "x": [rational_str(q) for q in self.x],
            "y": [rational_str(q) for q in self.y],
        }


def _same_shape(p: Point, q: Point) -> None:
    if p.shape != q.shape:
        raise DimensionError(f"shape mismatch: {p.shape} vs {q.shape}")


def check_dims(inst: Instance, p: Point) -> None:
    if p.shape != (inst.m, inst.n):
        raise DimensionError(
            f"point has shape {p.shape}, instance expects {(inst.m, inst.n)}"
        )


def factor_rank_one(M: Iterable[Iterable]) -> Instance:
    """Canonical factorization ``M = u v^T``.

    The zero matrix factors as ``u = 0, v = 0``. Otherwise ``u`` is the first
    nonzero column and ``v`` is read off the first nonzero row of that column,
    normalized so that ``v`` has a 1 at that column. Raises
    :class:`RankTooHigh` when the product does not reproduce ``M``.
    """
    M = _matrix(M)
    if not M or not M[0]:
        raise DimensionError("M must be nonempty")
    n = len(M[0])
    if any(len(r) != n for r in M):
        raise DimensionError("M is ragged")
    m = len(M)
    nonzero_cols = [j for j in range(n) if any(M[i][j] for i in range(m))]
    if not nonzero_cols:
        zero_u = (Fraction(0),) * m
        zero_v = (Fraction(0),) * n
        return Instance(M, zero_u, zero_v)
    j0 = nonzero_cols[0]
    u = tuple(M[i][j0] for i in range(m))
    i0 = next(i for i in range(m) if u[i])
    v = tuple(M[i0][j] / M[i0][j0] for j in range(n))
    if outer(u, v) != M:
        raise RankTooHigh("matrix has rank >= 2")
    return Instance(M, u, v)


def residual(inst: Instance, p: Point) -> Matrix:
    """``x y^T - M``, entrywise and exact."""
    check_dims(inst, p)
    return tuple(
        tuple(xi * yj - mij for yj, mij in zip(p.y, row))
        for xi, row in zip(p.x, inst.M)
    )


def eval_f(inst: Instance, p: Point) -> Fraction:
    """The objective ``sum_ij |x_i y_j - M_ij|``."""
    return sum((abs(r) for row in residual(inst, p) for r in row), Fraction(0))


def l1(vec: Iterable[Fraction]) -> Fraction:
    return sum((abs(a) for a in vec), Fraction(0))


# --- file format -----------------------------------------------------------


def _reject_floats(obj):
    if isinstance(obj, float):
        raise ValueError(f"decimal number {obj!r} is not exact; use \"p/q\"")
    if isinstance(obj, list):
        for a in obj:
            _reject_floats(a)
    elif isinstance(obj, dict):
        for a in obj.values():
            _reject_floats(a)


def instance_from_dict(data: dict) -> Instance:
    """Build an instance from the JSON schema ``{m, n, M?, u?, v?}``.

    Either ``M`` or both ``u`` and ``v`` must be present; when all three are
    given they must agree exactly.
    """
    _reject_floats({k: data.get(k) for k in ("m", "n", "M", "u", "v")})
    has_M = data.get("M") is not None
    has_uv = data.get("u") is not None and data.get("v") is not None
    if has_uv:
        inst = Instance.from_factors(data["u"], data["v"])
        if has_M and _matrix(data["M"]) != inst.M:
            raise RankTooHigh("given M disagrees with u v^T")
    elif has_M:
        inst = factor_rank_one(data["M"])
    else:
        raise ValueError("instance needs either M or both u and v")
    for key, dim in (("m", inst.m), ("n", inst.n)):
        if key in data and data[key] != dim:
            raise DimensionError(f"declared {key}={data[key]} but data has {dim}")
    return inst


def point_from_dict(data: dict, inst: Instance | None = None) -> Point:
    if "x" not in data or "y" not in data:
        raise ValueError("point needs fields x and y")
    _reject_floats([data["x"], data["y"]])
    p = Point(data["x"], data["y"])
    if inst is not None:
        check_dims(inst, p)
    return p


def load_instance(path: str | Path) -> Instance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def load_point(path: str | Path, inst: Instance | None = None) -> Point:
    with open(path) as fh:
        return point_from_dict(json.load(fh), inst)
