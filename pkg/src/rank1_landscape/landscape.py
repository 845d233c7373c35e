"""Floating-point exploration of the landscape and the cross-oracle fuzzer.

Floats live only here. The one bridge back to the exact core is
:func:`snap_point`, after which every verdict is recomputed exactly.
"""

from __future__ import annotations

import csv
import io
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .classify import (
    Classification,
    Kind,
    classify_point,
    descent_direction,
    spurious_probe,
    theorem1_predicate,
    verify_descent,
)
from .core import Instance, InternalError, Point, eval_f
from .criticality import all_verdicts, balanced_ratio_conditions, witness_lambda
from .subdiff import step_alpha, step_beta, step_eval, zero_in_partials

log = logging.getLogger(__name__)

DEFAULT_POOL = tuple(Fraction(a) for a in ("-2", "-1", "-1/2", "0", "1/2", "1", "2"))
SNAP_DENOMINATORS = (10**6, 10**2)


def _float_matrix(inst: Instance) -> np.ndarray:
    return np.ascontiguousarray(np.array(inst.M, dtype=np.float64).reshape(inst.m, inst.n))


def _split(inst: Instance, p) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(p, Point):
        x, y = p.x, p.y
    elif isinstance(p, tuple) and len(p) == 2 and not np.isscalar(p[0]):
        x, y = p
    else:
        flat = np.asarray(p, dtype=np.float64).ravel()
        if flat.size != inst.m + inst.n:
            raise ValueError(f"expected {inst.m + inst.n} coordinates, got {flat.size}")
        x, y = flat[: inst.m], flat[inst.m :]
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    y = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    if x.shape != (inst.m,) or y.shape != (inst.n,):
        raise ValueError("point dimensions do not match the instance")
    return x, y


def eval_f_float(inst: Instance, p) -> float:
    x, y = _split(inst, p)
    return kernels.f_value(x, y, _float_matrix(inst))


def eval_fp(inst: Instance, p, power: float) -> float:
    """Smoothed objective ``sum |x_i y_j - M_ij| ** power`` for ``power > 1``."""
    if not power > 1:
        raise ValueError("power must exceed 1")
    x, y = _split(inst, p)
    return kernels.fp_value(x, y, _float_matrix(inst), float(power))


def subgradient_step(inst: Instance, p, step: float) -> np.ndarray:
    """One subgradient step with the selection ``L = sgn(x y^T - M)``.

    Returns the concatenated ``(x, y)`` after the step.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    x, y = _split(inst, p)
    gx, gy = kernels.subgradient(x, y, _float_matrix(inst))
    return np.concatenate([x - step * gx, y - step * gy])


@dataclass(frozen=True)
class Schedule:
    kind: str = "diminishing"  # c / k, or "constant"
    c: float = 0.1

    def __post_init__(self):
        if self.kind not in ("diminishing", "constant"):
            raise ValueError(f"unknown schedule {self.kind!r}")
        if not self.c > 0:
            raise ValueError("step constant must be positive")

    def to_json(self) -> dict:
        return {"kind": self.kind, "c": self.c}


@dataclass
class DescentTrace:
    iterates: np.ndarray  # (iters + 1, m + n)
    f_values: np.ndarray
    step_schedule: Schedule
    snapped: Point | None = None
    terminal_classification: Classification | None = None

    def to_json(self, every: int = 1) -> dict:
        idx = list(range(0, len(self.f_values), every))
        if idx[-1] != len(self.f_values) - 1:
            idx.append(len(self.f_values) - 1)
        return {
            "step_schedule": self.step_schedule.to_json(),
            "iterations": len(self.f_values) - 1,
            "iterates": [self.iterates[k].tolist() for k in idx],
            "f_values": [float(self.f_values[k]) for k in idx],
            "snapped": self.snapped.to_json() if self.snapped else None,
            "terminal_classification": (
                self.terminal_classification.to_json()
                if self.terminal_classification
                else None
            ),
        }


def snap_point(inst: Instance, flat: Sequence[float], max_den: int) -> Point:
    vals = [Fraction(float(a)).limit_denominator(max_den) for a in flat]
    return Point(vals[: inst.m], vals[inst.m :])


def snap_and_classify(inst: Instance, flat) -> tuple[Point, Classification]:
    """Round to nearby rationals and classify exactly.

    Tries each denominator cap in :data:`SNAP_DENOMINATORS`; the first one
    that lands on a critical point wins, else the last attempt is reported.
    """
    for den in SNAP_DENOMINATORS:
        p = snap_point(inst, flat, den)
        cls = classify_point(inst, p)
        if cls.kind is not Kind.NOT_CRITICAL:
            break
    return p, cls


def run_descent(
    inst: Instance, init, schedule: Schedule | None = None, max_iters: int = 2000
) -> DescentTrace:
    if max_iters <= 0:
        raise ValueError("max_iters must be positive")
    schedule = schedule or Schedule()
    x0, y0 = _split(inst, init)
    path, fvals = kernels.subgradient_path(
        x0, y0, _float_matrix(inst), schedule.c, schedule.kind == "diminishing", max_iters
    )
    snapped, cls = snap_and_classify(inst, path[-1])
    return DescentTrace(path, fvals, schedule, snapped, cls)


# --- grid sampling -----------------------------------------------------------


def coordinate_names(inst: Instance) -> list[str]:
    return [f"x{i + 1}" for i in range(inst.m)] + [f"y{j + 1}" for j in range(inst.n)]


@dataclass
class GridSample:
    axes: list[str]
    coords: list[np.ndarray]
    values: np.ndarray  # shape (res,) * len(axes), indexed like np.meshgrid(..., indexing="ij")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.axes + ["f"])
        mesh = np.meshgrid(*self.coords, indexing="ij")
        for idx in np.ndindex(self.values.shape):
            w.writerow([repr(float(g[idx])) for g in mesh] + [repr(float(self.values[idx]))])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "axes": self.axes,
            "coords": [c.tolist() for c in self.coords],
            "values": self.values.tolist(),
        }


def grid_sample(
    inst: Instance,
    axes: Sequence[str],
    ranges: Sequence[tuple[float, float]],
    resolution: int,
    base=None,
) -> GridSample:
    """Evaluate ``f`` on a regular 2-D or 3-D grid over chosen coordinates.

    ``axes`` name coordinates as ``x1..xm`` and ``y1..yn``; the remaining
    coordinates are held at ``base`` (zeros by default).
    """
    names = coordinate_names(inst)
    axes = list(axes)
    if len(axes) not in (2, 3):
        raise ValueError("select 2 or 3 axes")
    if len(set(axes)) != len(axes):
        raise ValueError("axes must be distinct")
    for a in axes:
        if a not in names:
            raise ValueError(f"unknown coordinate {a!r}; expected one of {names}")
    if len(ranges) != len(axes):
        raise ValueError("need one range per axis")
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    for lo, hi in ranges:
        if not hi > lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
    x, y = _split(inst, base if base is not None else np.zeros(inst.m + inst.n))
    origin = np.concatenate([x, y])
    coords = [np.linspace(lo, hi, resolution) for lo, hi in ranges]
    mesh = np.meshgrid(*coords, indexing="ij")
    pts = np.tile(origin, (mesh[0].size, 1))
    for a, g in zip(axes, mesh):
        pts[:, names.index(a)] = g.ravel()
    vals = kernels.grid_values(np.ascontiguousarray(pts), inst.m, _float_matrix(inst))
    return GridSample(axes, coords, np.asarray(vals).reshape(mesh[0].shape))


# --- fuzzing -----------------------------------------------------------------


@dataclass(frozen=True)
class FuzzConfig:
    num_instances: int = 500
    m_range: tuple[int, int] = (1, 4)
    n_range: tuple[int, int] = (1, 4)
    value_pool: tuple = DEFAULT_POOL
    points_per_instance: int = 20
    seed: int = 42
    # share of points drawn from critical-rich families (scaled global
    # minima, x = 0, y = 0) instead of uniformly from the pool
    structured_fraction: float = 0.25
    probe_samples: int = 20
    workers: int = 1

    def __post_init__(self):
        for lo, hi in (self.m_range, self.n_range):
            if not 1 <= lo <= hi <= 6:
                raise ValueError("dimension ranges must satisfy 1 <= lo <= hi <= 6")
        if self.num_instances < 0 or self.points_per_instance < 0:
            raise ValueError("counts must be non-negative")
        if not self.value_pool:
            raise ValueError("value pool is empty")


@dataclass
class FuzzReport:
    instances_tested: int = 0
    points_tested: int = 0
    disagreements: list = field(default_factory=list)
    classification_violations: list = field(default_factory=list)
    kind_counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.disagreements and not self.classification_violations

    def merge(self, other: "FuzzReport") -> None:
        self.instances_tested += other.instances_tested
        self.points_tested += other.points_tested
        self.disagreements.extend(other.disagreements)
        self.classification_violations.extend(other.classification_violations)
        for k, c in other.kind_counts.items():
            self.kind_counts[k] = self.kind_counts.get(k, 0) + c

    def to_json(self) -> dict:
        return {
            "instances_tested": self.instances_tested,
            "points_tested": self.points_tested,
            "disagreements": self.disagreements,
            "classification_violations": self.classification_violations,
            "kind_counts": dict(sorted(self.kind_counts.items())),
        }


def random_instance(rng: random.Random, cfg: FuzzConfig) -> Instance:
    m = rng.randint(*cfg.m_range)
    n = rng.randint(*cfg.n_range)
    pool = cfg.value_pool
    return Instance.from_factors([rng.choice(pool) for _ in range(m)], [rng.choice(pool) for _ in range(n)])


def random_point(rng: random.Random, inst: Instance, cfg: FuzzConfig) -> Point:
    pool = cfg.value_pool
    x = [rng.choice(pool) for _ in range(inst.m)]
    y = [rng.choice(pool) for _ in range(inst.n)]
    if rng.random() < cfg.structured_fraction:
        family = rng.randrange(3)
        zero = Fraction(0)
        if family == 0:
            theta = rng.choice([a for a in pool if a] or [Fraction(1)])
            x = [ui * theta for ui in inst.u]
            y = [vj / theta for vj in inst.v]
        elif family == 1:
            y = [zero] * inst.n
        else:
            x = [zero] * inst.m
    return Point(x, y)


def _record(inst: Instance, p: Point, what: str, **extra) -> dict:
    out = {"u": [str(a) for a in inst.u], "v": [str(a) for a in inst.v], **p.to_json()}
    out["property"] = what
    out.update(extra)
    return out


def check_point(inst: Instance, p: Point, rng: random.Random, probe_samples: int = 20,
                no_spurious: bool | None = None) -> tuple[Kind | None, list, list]:
    """Run every decider and landscape property at one point.

    Returns ``(kind, disagreements, violations)``.
    """
    disagreements, violations = [], []
    try:
        verdicts = all_verdicts(inst, p)
    except InternalError as exc:
        violations.append(_record(inst, p, "decider self-check", error=str(exc)))
        return None, disagreements, violations
    flags = [v.is_critical for v in verdicts]
    if len(set(flags)) != 1:
        disagreements.append(
            _record(inst, p, "criticality", verdicts={v.method.value: v.is_critical for v in verdicts})
        )
    critical = verdicts[0].is_critical
    fval = eval_f(inst, p)

    if critical and not zero_in_partials(inst, p):
        violations.append(_record(inst, p, "critical but 0 outside a partial subdifferential"))
    if critical and fval > 0:
        if 0 not in step_eval(step_alpha(inst, p), 0) or 0 not in step_eval(step_beta(inst, p), 0):
            violations.append(_record(inst, p, "critical, f > 0, but 0 is not a root of both step functions"))
    if balanced_ratio_conditions(inst, p):
        try:
            witness_lambda(inst, p)
        except InternalError as exc:
            violations.append(_record(inst, p, "explicit multiplier invalid", error=str(exc)))

    cls = classify_point(inst, p, cross_check=False)
    kind = cls.kind
    if (kind is not Kind.NOT_CRITICAL) != critical:
        violations.append(_record(inst, p, "classification disagrees with multiplier LP", kind=kind.value))
    if (kind is Kind.GLOBAL_MIN) != (fval == 0):
        violations.append(_record(inst, p, "global minimum iff f = 0", kind=kind.value, f=str(fval)))
    if kind in (Kind.SADDLE, Kind.SPURIOUS_LOCAL_MIN) and fval <= 0:
        violations.append(_record(inst, p, "non-global critical point with f = 0", kind=kind.value))
    if kind is Kind.SADDLE and not inst.is_zero:
        try:
            plan = descent_direction(inst, p)
            t = plan.valid_step_bound
            if not (verify_descent(inst, p, plan, t) and verify_descent(inst, p, plan, t / 2)):
                violations.append(_record(inst, p, "descent identity fails"))
        except InternalError as exc:
            violations.append(_record(inst, p, "descent construction failed", error=str(exc)))
    if kind is Kind.SPURIOUS_LOCAL_MIN:
        if no_spurious:
            violations.append(_record(inst, p, "spurious minimum although M has none or all entries zero"))
        failure = spurious_probe(inst, p, rng, samples=probe_samples, cls=cls)
        if failure is not None:
            violations.append(
                _record(
                    inst, p, "spurious probe found decrease",
                    h=[str(a) for a in failure.h], k=[str(a) for a in failure.k],
                )
            )
    return kind, disagreements, violations


def check_instance(inst: Instance, points: Sequence[Point], seed: int,
                   probe_samples: int = 20) -> FuzzReport:
    rng = random.Random(seed)
    no_spurious = theorem1_predicate(inst.M)
    report = FuzzReport(instances_tested=1)
    for p in points:
        kind, dis, vio = check_point(inst, p, rng, probe_samples, no_spurious)
        report.points_tested += 1
        report.disagreements.extend(dis)
        report.classification_violations.extend(vio)
        key = kind.value if kind else "error"
        report.kind_counts[key] = report.kind_counts.get(key, 0) + 1
    return report


def _task(args):
    idx, inst, points, seed, probe_samples = args
    rep = check_instance(inst, points, seed, probe_samples)
    for rec in rep.disagreements + rep.classification_violations:
        rec["instance_index"] = idx
    return idx, rep


def fuzz_tasks(cfg: FuzzConfig, instances: Sequence[Instance] | None = None):
    """Deterministic (index, instance, points, seed, samples) work items."""
    rng = random.Random(cfg.seed)
    if instances is None:
        instances = [random_instance(rng, cfg) for _ in range(cfg.num_instances)]
    tasks = []
    for idx, inst in enumerate(instances):
        points = [random_point(rng, inst, cfg) for _ in range(cfg.points_per_instance)]
        tasks.append((idx, inst, points, rng.getrandbits(64), cfg.probe_samples))
    return tasks


def fuzz_equivalence(cfg: FuzzConfig | None = None,
                     instances: Sequence[Instance] | None = None) -> FuzzReport:
    """Cross-check the three criticality deciders and the classifier.

    Random rank-one instances and points are drawn from ``cfg.value_pool``
    (or ``instances`` are used as given). The result depends only on the
    configuration, including when ``cfg.workers > 1``.
    """
    cfg = cfg or FuzzConfig()
    tasks = fuzz_tasks(cfg, instances)
    report = FuzzReport()
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=8))
    else:
        results = [_task(t) for t in tasks]
    for _, rep in sorted(results, key=lambda r: r[0]):
        report.merge(rep)
    if not report.ok:
        log.warning(
            "fuzz found %d disagreements and %d violations",
            len(report.disagreements), len(report.classification_violations),
        )
    return report
