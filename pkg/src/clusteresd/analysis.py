"""Sweeps, threshold searches, PPT patterns and the Table I reproduction.

Every number here comes from the numeric pipeline in :mod:`clusteresd.protocol`;
the closed forms are only used by the oracle suite.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import bisect

from . import __version__, metrics, protocol
from .noise import DephasingProfile
from .register import MEASUREMENT_CONVENTION, DensityState

ANGLE_NAMES = ("theta1", "theta2", "theta3", "theta4")
AXIS_NAMES = ("p",) + ANGLE_NAMES
SCALAR_METRICS = ("N1", "N12", "N13", "N14", "witness", "purity")
ROTATION = "rotation"

P_MAX = 1.0 - 1e-6
# a negativity counts as zero once it is above -ZERO_TOL
ZERO_TOL = 1e-12
# a pair counts as entangled at p = 0 only above this concurrence
ACTIVE_TOL = 1e-9
NPT_THRESHOLD = 1e-10
MIN_TOL = 1e-12

GRID_DENSITY = 64
REFINE_LEVELS = 3
REFINE_FACTOR = 8
P_SCAN = 17
EXTREMAL_TOL = 1e-8

_PAIR_METRIC = re.compile(r"^([FC])_pair\((\d),?(\d)\)$")


class NoSignChangeError(ValueError):
    """The bracket handed to :func:`find_threshold` has no sign change."""


# metric names

def canonical_metric(name: str) -> str:
    """Normalise a metric name; ``F_pair(2,4)`` becomes ``F_pair(24)``."""
    name = name.strip()
    if name in SCALAR_METRICS or name == "F_rotation":
        return name
    m = _PAIR_METRIC.match(name)
    if m:
        pair = m.group(2) + m.group(3)
        if pair in protocol.PAIRS:
            return f"{m.group(1)}_pair({pair})"
    raise ValueError(f"unknown metric {name!r}; expected one of "
                     f"{', '.join(SCALAR_METRICS)}, F_rotation, F_pair(jk), C_pair(jk) "
                     f"with jk in {sorted(protocol.PAIRS)}")


def metric_angles(name: str) -> tuple[str, ...]:
    """Angle names a metric depends on."""
    name = canonical_metric(name)
    if name == "F_rotation":
        return ANGLE_NAMES[:3]
    if name in SCALAR_METRICS:
        return ()
    return protocol.pair_angle_names(name[-3:-1])


def measured_qubits(name: str) -> list[int]:
    name = canonical_metric(name)
    if name == "F_rotation":
        return list(protocol.ROTATION_QUBITS)
    if name in SCALAR_METRICS:
        return []
    return list(protocol.PAIRS[name[-3:-1]])


def _check_rep(representation: str) -> str:
    rep = representation.lower()
    if rep not in ("c4", "c4h"):
        raise ValueError(f"unknown representation {representation!r}; expected c4 or c4h")
    return rep


def evaluate_metrics(representation: str, names: Sequence[str], ps, angles: dict, q: float = 1.0) -> dict:
    """Metric values at a batch of points.

    ``ps`` has shape ``(N, 4)`` (per-qubit strengths); ``angles`` maps angle
    names to arrays of length ``N`` (missing angles are 0).
    """
    rep = _check_rep(representation)
    ps = np.asarray(ps, dtype=float)
    n = ps.shape[0]
    ang = {k: np.asarray(angles.get(k, np.zeros(n)), dtype=float) for k in ANGLE_NAMES}
    out = {}
    rho = None
    for raw in names:
        name = canonical_metric(raw)
        if name in SCALAR_METRICS:
            if rho is None:
                rho = protocol.dephased_cluster(rep, ps=ps, q=q)
            if name == "witness":
                out[name] = metrics.witness_values(rho, rep)
            elif name == "purity":
                out[name] = np.real(np.einsum("...ij,...ji->...", rho, rho))
            else:
                out[name] = metrics.min_pt_eigenvalue(rho, metrics.NAMED_CUTS[name])
        elif name == "F_rotation":
            out[name] = protocol.rotation_fidelity(rep, None, ang["theta1"], ang["theta2"], ang["theta3"],
                                                   ps=ps, q=q)
        else:
            pair = name[-3:-1]
            a, b = (ang[k] for k in protocol.pair_angle_names(pair))
            fn = protocol.pair_fidelity if name[0] == "F" else protocol.pair_concurrence
            out[name] = fn(rep, pair, None, a, b, ps=ps, q=q)
    return out


# sweeps

@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError(f"axis {self.name} is empty")
        if not all(np.isfinite(vals)):
            raise ValueError(f"axis {self.name} has non-finite values")
        if len(set(vals)) != len(vals):
            raise ValueError(f"axis {self.name} repeats a value")
        if self.name == "p" and not all(0.0 <= v <= 1.0 for v in vals):
            raise ValueError("p values must lie in [0, 1]")
        object.__setattr__(self, "values", vals)

    @classmethod
    def linspace(cls, name: str, lo: float, hi: float, n: int) -> "Axis":
        if n < 1:
            raise ValueError("a grid needs at least one point")
        return cls(name, tuple(np.linspace(lo, hi, n)))


@dataclass(frozen=True)
class SweepConfig:
    """What to sweep. Without a ``p`` axis the dephasing comes from ``profile``."""

    representation: str = "c4"
    metrics: tuple[str, ...] = ("witness",)
    axes: tuple[Axis, ...] = ()
    profile: DephasingProfile | None = None
    q: float = 1.0
    workers: int = 1
    chunk: int = 4096

    def __post_init__(self):
        object.__setattr__(self, "representation", _check_rep(self.representation))
        names = tuple(canonical_metric(m) for m in self.metrics)
        if not names:
            raise ValueError("no metrics requested")
        if len(set(names)) != len(names):
            raise ValueError(f"metric names must be unique: {names}")
        object.__setattr__(self, "metrics", names)
        axes = tuple(self.axes)
        axis_names = [a.name for a in axes]
        if len(set(axis_names)) != len(axis_names):
            raise ValueError(f"axis names must be unique: {axis_names}")
        object.__setattr__(self, "axes", axes)
        if "p" in axis_names and self.profile is not None:
            raise ValueError("give either a p grid or a fixed dephasing profile, not both")
        if self.profile is not None and self.profile.n_qubits != 4:
            raise ValueError("the dephasing profile must cover four qubits")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"mixing weight {self.q} outside [0, 1]")
        if self.workers < 1 or self.chunk < 1:
            raise ValueError("workers and chunk must be positive")

    def metadata(self) -> dict:
        if self.profile is not None:
            profile = self.profile.as_dict()
        elif any(a.name == "p" for a in self.axes):
            profile = {"uniform": "p axis"}
        else:
            profile = DephasingProfile.uniform(0.0).as_dict()
        return {
            "representation": self.representation,
            "metrics": list(self.metrics),
            "dephasing_profile": profile,
            "q": self.q,
            "measurement": {
                "convention": MEASUREMENT_CONVENTION,
                "outcome": -1,
                "measured_qubits": {m: measured_qubits(m) for m in self.metrics},
            },
            "tool_version": __version__,
        }


@dataclass
class SweepResult:
    axes: tuple[Axis, ...]
    metric_names: tuple[str, ...]
    points: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axes = tuple(self.axes)
        self.metric_names = tuple(self.metric_names)
        n = int(np.prod([len(a.values) for a in self.axes], dtype=int))
        self.points = np.asarray(self.points, dtype=float).reshape(n, len(self.axes))
        self.values = np.asarray(self.values, dtype=float).reshape(n, len(self.metric_names))
        if len(set(self.metric_names)) != len(self.metric_names):
            raise ValueError("metric names must be unique")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SweepResult):
            return NotImplemented
        return (self.axes == other.axes and self.metric_names == other.metric_names
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.values, other.values)
                and self.metadata == other.metadata)

    @property
    def header(self) -> list[str]:
        return [a.name for a in self.axes] + list(self.metric_names)

    @property
    def records(self) -> list[tuple[dict, dict]]:
        names = [a.name for a in self.axes]
        return [(dict(zip(names, map(float, pt))), dict(zip(self.metric_names, map(float, v))))
                for pt, v in zip(self.points, self.values)]

    def column(self, name: str) -> np.ndarray:
        names = [a.name for a in self.axes]
        if name in names:
            return self.points[:, names.index(name)]
        return self.values[:, self.metric_names.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for pt, v in zip(self.points, self.values):
            w.writerow([_fmt(x) for x in pt] + [_fmt(x) for x in v])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, metadata: dict | None = None) -> "SweepResult":
        """Parse :meth:`to_csv` output. CSV carries no metadata; pass it in if needed."""
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty CSV")
        header = rows[0]
        axis_names = [h for h in header if h in AXIS_NAMES]
        if header[:len(axis_names)] != axis_names:
            raise ValueError("axis columns must come first")
        metric_names = header[len(axis_names):]
        data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
        pts = data[:, :len(axis_names)]
        axes = tuple(Axis(n, tuple(dict.fromkeys(pts[:, i].tolist()))) for i, n in enumerate(axis_names))
        grid = _grid_points(axes)
        if grid.shape != pts.shape or not np.array_equal(grid, pts):
            raise ValueError("CSV rows do not form a full grid in index order")
        return cls(axes, tuple(metric_names), pts, data[:, len(axis_names):], dict(metadata or {}))

    def to_json(self) -> str:
        return json.dumps({
            "axes": [{"name": a.name, "values": list(a.values)} for a in self.axes],
            "metadata": self.metadata,
            "records": [{"point": pt, "values": v} for pt, v in self.records],
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SweepResult":
        obj = json.loads(text)
        axes = tuple(Axis(a["name"], tuple(a["values"])) for a in obj["axes"])
        records = obj["records"]
        metadata = obj.get("metadata", {})
        names = tuple(metadata.get("metrics") or (records[0]["values"] if records else ()))
        pts = np.array([[r["point"][a.name] for a in axes] for r in records], dtype=float)
        vals = np.array([[r["values"][m] for m in names] for r in records], dtype=float)
        return cls(axes, names, pts, vals, metadata)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _grid_points(axes: Sequence[Axis]) -> np.ndarray:
    if not axes:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*[np.array(a.values) for a in axes], indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def sweep(config: SweepConfig) -> SweepResult:
    """Evaluate every requested metric at every grid point (first axis slowest)."""
    pts = _grid_points(config.axes)
    n = pts.shape[0]
    names = [a.name for a in config.axes]
    if "p" in names:
        ps = np.repeat(pts[:, names.index("p")][:, None], 4, axis=1)
    else:
        profile = config.profile or DephasingProfile.uniform(0.0)
        ps = np.broadcast_to(np.array(profile.p_per_qubit), (n, 4))
    angles = {k: (pts[:, names.index(k)] if k in names else np.zeros(n)) for k in ANGLE_NAMES}

    def run(lo):
        sl = slice(lo, lo + config.chunk)
        vals = evaluate_metrics(config.representation, config.metrics, ps[sl],
                                {k: v[sl] for k, v in angles.items()}, config.q)
        return np.stack([vals[m] for m in config.metrics], axis=-1)

    starts = range(0, n, config.chunk)
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(lo) for lo in starts]
    values = np.concatenate(parts, axis=0) if parts else np.zeros((0, len(config.metrics)))
    return SweepResult(config.axes, config.metrics, pts, values, config.metadata())


# thresholds

@dataclass(frozen=True)
class ThresholdReport:
    quantity: str
    bracket: tuple[float, float]
    root: float | None
    method: str = "bisection"
    achieved_tol: float | None = None
    residual: float | None = None

    @property
    def found(self) -> bool:
        return self.root is not None

    def as_dict(self) -> dict:
        return {"quantity": self.quantity, "bracket": list(self.bracket), "root": self.root,
                "method": self.method, "achieved_tol": self.achieved_tol, "residual": self.residual}


def find_threshold(f: Callable[[float], float], bracket=(0.0, 1.0), tol: float = 1e-12,
                   quantity: str = "f") -> ThresholdReport:
    """Bisection root of ``f`` in ``bracket``; ``f(lo) * f(hi)`` must be <= 0."""
    if tol < MIN_TOL:
        raise ValueError(f"tolerance {tol} below the supported minimum {MIN_TOL}")
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError(f"bracket {bracket} is empty")
    flo, fhi = float(f(lo)), float(f(hi))
    if flo * fhi > 0:
        raise NoSignChangeError(f"{quantity}: no sign change in [{lo}, {hi}] "
                                f"(f = {flo:.3g}, {fhi:.3g})")
    if flo == 0.0 or fhi == 0.0:
        root = lo if flo == 0.0 else hi
        return ThresholdReport(quantity, (lo, hi), root, "bisection", 0.0, 0.0)
    root, res = bisect(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                       maxiter=200, full_output=True)
    return ThresholdReport(quantity, (lo, hi), float(root), "bisection",
                           float(tol), abs(float(f(root))))


def threshold_function(representation: str, quantity: str, angles: Sequence[float] = (),
                       q: float = 1.0) -> Callable[[float], float]:
    """Scalar function of p whose sign change marks the ESD or fidelity-.5 point.

    Negativities are shifted by ``ZERO_TOL`` so that the roundoff noise left
    after sudden death does not count as entanglement.
    """
    rep = _check_rep(representation)
    name = canonical_metric(quantity)
    if name == "purity":
        raise ValueError("purity has no threshold")
    need = metric_angles(name)
    angles = [float(a) for a in angles]
    if len(angles) not in (0, len(need)):
        raise ValueError(f"{name} takes {len(need)} angles ({', '.join(need)}), got {len(angles)}")
    if not angles:
        angles = [0.0] * len(need)
    given = dict(zip(need, angles))

    def f(p):
        ps = np.full((1, 4), float(p))
        v = float(evaluate_metrics(rep, [name], ps, {k: np.array([v]) for k, v in given.items()}, q)[name][0])
        if name.startswith("N"):
            return v + ZERO_TOL
        if name.startswith("F"):
            return v - 0.5
        return v

    return f


def esd_threshold(representation: str, quantity: str, angles: Sequence[float] = (),
                  tol: float = 1e-12, q: float = 1.0) -> ThresholdReport:
    """First p in [0, 1 - 1e-6] where ``quantity`` stops certifying entanglement.

    Returns a report with ``root=None`` when there is no crossing before ``P_MAX``.
    """
    f = threshold_function(representation, quantity, angles, q)
    label = f"{canonical_metric(quantity)}[{representation.lower()}]"
    f0, fhi = f(0.0), f(P_MAX)
    start_sign = np.sign(f0)
    if start_sign == 0 or np.sign(fhi) == start_sign:
        return ThresholdReport(label, (0.0, P_MAX), None)
    return find_threshold(f, (0.0, P_MAX), tol, label)


# extremal crossings over measurement angles

@dataclass(frozen=True)
class CrossingReport:
    quantity: str
    representation: str
    pair: str
    min_p: float | None
    max_p: float | None
    argmin_angles: dict | None
    argmax_angles: dict | None
    crossing_fraction: float
    method: str = "grid+refine"
    tol: float = EXTREMAL_TOL

    @property
    def none(self) -> bool:
        return self.min_p is None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("quantity", "representation", "pair", "min_p", "max_p",
                                              "argmin_angles", "argmax_angles", "crossing_fraction",
                                              "method", "tol")}


class _Problem:
    """One extremal search: the signed function on angle grids and on point sets.

    Grid evaluations are memoised per (grid, p), so the min and max searches
    share work when they visit the same p.
    """

    def __init__(self, quantity: str, representation: str, pair: str, q: float):
        if quantity not in ("fidelity", "concurrence"):
            raise ValueError(f"unknown crossing quantity {quantity!r}; expected fidelity or concurrence")
        self.rep = _check_rep(representation)
        self.quantity = quantity
        self.q = q
        if pair == ROTATION:
            if quantity != "fidelity":
                raise ValueError("the one-qubit rotation only has a fidelity crossing")
            self.qubits = protocol.ROTATION_QUBITS
            self.names = ANGLE_NAMES[:3]
        else:
            if pair not in protocol.PAIRS:
                raise ValueError(f"unknown pair {pair!r}; expected one of {sorted(protocol.PAIRS)}")
            self.qubits = protocol.PAIRS[pair]
            self.names = protocol.pair_angle_names(pair)
        self._memo: dict = {}
        self._refs: dict = {}

    @staticmethod
    def _key(axes):
        return tuple(np.asarray(a, dtype=float).tobytes() for a in axes)

    def _signed(self, out, ref):
        if self.quantity == "concurrence":
            return metrics.wootters_lambda(out)
        return metrics.trace_overlap(out, ref) - 0.5

    def on_grid(self, p: float, axes) -> np.ndarray:
        key = (self._key(axes), float(p))
        if key not in self._memo:
            ref = None
            if self.quantity == "fidelity":
                if key[0] not in self._refs:
                    self._refs[key[0]] = protocol.grid_states(self.rep, self.qubits, 0.0, axes, q=self.q)
                ref = self._refs[key[0]]
            out = protocol.grid_states(self.rep, self.qubits, p, axes, q=self.q)
            self._memo[key] = self._signed(out, ref)
        return self._memo[key]

    def at_points(self, p: float, angles: np.ndarray) -> np.ndarray:
        """Signed values at scattered angle points (``angles`` has one column per angle)."""
        qs = np.full(4, float(p))
        out, ref = protocol._measure(self.rep, self.qubits, tuple(angles.T), None, qs, self.q,
                                     reference=self.quantity == "fidelity")
        return self._signed(out, ref)


def _local_axes(center, h, factor):
    offsets = h * np.arange(-factor, factor + 1) / factor
    return [c + offsets for c in center]


# below this fraction of the grid, candidates are evaluated point by point
_SPARSE = 0.02


def _envelope_root(problem, axes, mask, lo, hi, mode, tol):
    """First p in [lo, hi] where the min (or max) over ``mask`` of f reaches 0.

    Bisection on the envelope. Every point has one crossing inside the
    bracket, so after each step the points that can no longer be extreme are
    dropped: for the min, those still positive once the envelope has
    crossed; for the max, those already crossed while the envelope has not.
    Dropping them never changes the envelope's sign.
    """
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.flatnonzero(mask.ravel())
    pts = np.stack([m.ravel()[flat] for m in mesh], axis=-1)
    size = mask.size

    def values(p, keep):
        if keep.size > _SPARSE * size:
            return problem.on_grid(p, axes).ravel()[flat[keep]]
        return problem.at_points(p, pts[keep])

    keep = np.arange(flat.size)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v = values(mid, keep)
        if mode == "min":
            if v.min() <= 0:
                hi, keep = mid, keep[v <= 0]
            else:
                lo = mid
        elif v.max() > 0:
            lo, keep = mid, keep[v > 0]
        else:
            hi = mid
    v = values(hi if mode == "min" else lo, keep)
    best = keep[np.argmin(v) if mode == "min" else np.argmax(v)]
    return 0.5 * (lo + hi), [float(x) for x in pts[best]]


def _grid_extremes(problem, axes, ps, tol, modes=("min", "max")):
    """Bracket every grid point's crossing on the p grid ``ps`` (``ps[0] = 0``),
    then bisect the envelope inside the extreme brackets."""
    vals = np.stack([problem.on_grid(p, axes) for p in ps])
    active = vals[0] > ACTIVE_TOL
    below = vals[1:] <= 0
    crosses = active & below.any(axis=0)
    if not crosses.any():
        return None, 0.0
    first = np.where(crosses, below.argmax(axis=0) + 1, -1)
    out = {}
    for mode in modes:
        k = first[crosses].min() if mode == "min" else first[crosses].max()
        mask = crosses & (first == k)
        out[mode] = _envelope_root(problem, axes, mask, ps[k - 1], ps[k], mode, tol)
    return out, float(crosses.sum()) / crosses.size


def _window_scan(p_best, width, n=9):
    lo, hi = max(0.0, p_best - width), min(P_MAX, p_best + width)
    return np.unique(np.concatenate([[0.0], np.linspace(lo, hi, n), [P_MAX]]))


def extremal_crossing(quantity: str, representation: str, pair: str, density: int = GRID_DENSITY,
                      levels: int = REFINE_LEVELS, factor: int = REFINE_FACTOR,
                      tol: float = EXTREMAL_TOL, scan: int = P_SCAN, q: float = 1.0) -> CrossingReport:
    """Smallest and largest crossing point over the measurement angles.

    ``quantity`` is ``"fidelity"`` (p where the pair or rotation fidelity
    drops to .5) or ``"concurrence"`` (p where the pair's Lambda reaches 0).
    ``pair`` is a pair label such as ``"24"`` or ``"rotation"``.

    Each angle runs over ``density`` points in [0, pi) (every quantity here
    has period pi in each angle). The crossing of each grid point is
    bracketed by a ``scan``-point grid in p; the extreme brackets are then
    bisected on the envelope (min or max over the tied points), which gives
    the same extreme as bisecting every point. Each extreme is refined
    ``levels`` times on a local grid ``factor`` times finer, spanning one
    coarse cell either side, with the p scan narrowed around the current
    extreme. Angle points
    where a pair is not entangled at p = 0 have no sudden death and are
    skipped.
    """
    if density < 2 or levels < 0 or factor < 1 or scan < 3:
        raise ValueError("invalid grid settings")
    problem = _Problem(quantity, representation, pair, q)
    h = np.pi / density
    axes = [np.arange(density) * h] * len(problem.names)
    width = 1.0 / (scan - 1)
    found, fraction = _grid_extremes(problem, axes, np.linspace(0.0, P_MAX, scan), tol)
    rep = problem.rep
    if found is None:
        return CrossingReport(quantity, rep, pair, None, None, None, None, 0.0, tol=tol)
    best = dict(found)
    for mode in ("min", "max"):
        p_best, ang = best[mode]
        step = h
        for _ in range(levels):
            local, _ = _grid_extremes(problem, _local_axes(ang, step, factor),
                                      _window_scan(p_best, width), tol, (mode,))
            if local is not None:
                p_new, ang_new = local[mode]
                # gains below the bisection tolerance are noise
                if (p_new < p_best - tol) if mode == "min" else (p_new > p_best + tol):
                    p_best, ang = p_new, ang_new
            step /= factor
        best[mode] = (p_best, ang)

    def named(ang):
        return {k: float(np.mod(a, np.pi)) for k, a in zip(problem.names, ang)}

    return CrossingReport(quantity, rep, pair, float(best["min"][0]), float(best["max"][0]),
                          named(best["min"][1]), named(best["max"][1]), fraction, tol=tol)


# PPT patterns

CUT_LABELS = {name: "{" + ",".join(str(q) for q in sorted(qs)) + "}" for name, qs in metrics.NAMED_CUTS.items()}


@dataclass(frozen=True)
class PPTPattern:
    cuts: dict
    min_eigenvalues: dict

    @property
    def bound_entanglement(self) -> bool:
        """Some cuts NPT and some PPT (a loose label, not the standard definition)."""
        kinds = set(self.cuts.values())
        return kinds == {"NPT", "PPT"}

    def as_dict(self) -> dict:
        return {"cuts": dict(self.cuts), "min_eigenvalues": dict(self.min_eigenvalues),
                "bound_entanglement": self.bound_entanglement}


def ppt_pattern(state) -> PPTPattern:
    """NPT/PPT classification across the four cuts containing qubit 0."""
    if not isinstance(state, DensityState):
        state = DensityState.from_matrix(state)
    if state.n_qubits != 4:
        raise ValueError("PPT patterns are defined for four-qubit states")
    cuts, eigs = {}, {}
    for name, qs in metrics.NAMED_CUTS.items():
        e = float(metrics.min_pt_eigenvalue(state.matrix, qs))
        label = CUT_LABELS[name]
        eigs[label] = e
        cuts[label] = "NPT" if e < -NPT_THRESHOLD else "PPT"
    return PPTPattern(cuts, eigs)


def ppt_transitions(representation: str, tol: float = 1e-12, q: float = 1.0) -> dict:
    """p at which each cut turns from NPT to PPT (None if it stays NPT below 1 - 1e-6)."""
    rep = _check_rep(representation)
    out = {}
    for name in metrics.NAMED_CUTS:
        def f(p, name=name):
            rho = protocol.dephased_cluster(rep, float(p), q=q)
            return float(metrics.min_pt_eigenvalue(rho, metrics.NAMED_CUTS[name])) + NPT_THRESHOLD
        if f(0.0) >= 0 or f(P_MAX) < 0:
            out[CUT_LABELS[name]] = None
        else:
            out[CUT_LABELS[name]] = find_threshold(f, (0.0, P_MAX), tol, name).root
    return out


# Table I

@dataclass(frozen=True)
class Cell:
    block: int
    representation: str
    column: str
    kind: str  # bisection | none | max | range | independent
    expected: tuple[float, ...] = ()


TABLE1 = (
    Cell(1, "c4", "W", "bisection", (0.586,)),
    Cell(1, "c4", "N1", "none"),
    Cell(1, "c4", "N12", "bisection", (0.586,)),
    Cell(1, "c4", "N13", "none"),
    Cell(1, "c4", "N14", "none"),
    Cell(1, "c4h", "W", "bisection", (0.535,)),
    Cell(1, "c4h", "N1", "bisection", (0.828,)),
    Cell(1, "c4h", "N12", "bisection", (0.828,)),
    Cell(1, "c4h", "N13", "bisection", (0.938,)),
    Cell(1, "c4h", "N14", "bisection", (0.828,)),
    Cell(2, "c4", "C34", "none"),
    Cell(2, "c4", "C24", "independent", (0.586,)),
    Cell(2, "c4", "C23", "independent", (0.586,)),
    Cell(2, "c4", "C14", "independent", (0.586,)),
    Cell(2, "c4h", "C34", "max", (0.704,)),
    Cell(2, "c4h", "C24", "max", (0.618,)),
    Cell(2, "c4h", "C23", "max", (0.586,)),
    Cell(2, "c4h", "C14", "range", (0.568, 0.586)),
    Cell(3, "c4", "F34", "none"),
    Cell(3, "c4", "F24", "independent", (0.586,)),
    Cell(3, "c4", "F23", "independent", (0.586,)),
    Cell(3, "c4", "F14", "independent", (0.586,)),
    Cell(3, "c4", "Fr", "none"),
    Cell(3, "c4h", "F34", "range", (0.618, 0.704)),
    Cell(3, "c4h", "F24", "range", (0.568, 0.828)),
    Cell(3, "c4h", "F23", "range", (0.586, 0.828)),
    Cell(3, "c4h", "F14", "range", (0.568, 0.586)),
    Cell(3, "c4h", "Fr", "none"),
)


@dataclass(frozen=True)
class CellResult:
    cell: Cell
    computed: tuple[float, ...] | None
    tolerance: float
    passed: bool
    detail: dict

    def as_dict(self) -> dict:
        c = self.cell
        return {"block": c.block, "representation": c.representation, "column": c.column,
                "kind": c.kind, "expected": list(c.expected) if c.kind != "none" else "none",
                "computed": list(self.computed) if self.computed is not None else "none",
                "tolerance": self.tolerance, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class Table1Report:
    cells: tuple[CellResult, ...]
    metadata: dict

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.cells)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_pass else 2

    def cell(self, representation: str, column: str) -> CellResult:
        for c in self.cells:
            if c.cell.representation == representation and c.cell.column == column:
                return c
        raise KeyError((representation, column))

    def as_dict(self) -> dict:
        return {"metadata": self.metadata, "all_pass": self.all_pass,
                "cells": [c.as_dict() for c in self.cells]}

    def format_text(self) -> str:
        lines = []
        for r in self.cells:
            c = r.cell
            exp = "none" if c.kind == "none" else "/".join(f"{x:.3f}" for x in c.expected)
            got = "none" if r.computed is None else "/".join(f"{x:.6f}" for x in r.computed)
            lines.append(f"{'PASS' if r.passed else 'FAIL'}  block {c.block}  {c.representation:<4} "
                         f"{c.column:<4} {c.kind:<11} expected {exp:<12} computed {got}")
        lines.append(f"{sum(r.passed for r in self.cells)}/{len(self.cells)} cells pass")
        return "\n".join(lines)


def _block1_quantity(column: str) -> str:
    return "witness" if column == "W" else column


def _evaluate_cell(cell: Cell, tol_bisect: float, tol_extremal: float, density: int, levels: int) -> CellResult:
    if cell.block == 1:
        rep = esd_threshold(cell.representation, _block1_quantity(cell.column), tol=1e-12)
        computed = None if rep.root is None else (rep.root,)
        detail = rep.as_dict()
        tol = tol_bisect
    else:
        if cell.column == "Fr":
            quantity, pair = "fidelity", ROTATION
        else:
            quantity = "concurrence" if cell.column[0] == "C" else "fidelity"
            pair = cell.column[1:]
        rep = extremal_crossing(quantity, cell.representation, pair, density=density, levels=levels)
        computed = None if rep.none else (rep.min_p, rep.max_p)
        detail = rep.as_dict()
        tol = tol_bisect if cell.kind == "independent" else tol_extremal
    if cell.kind == "none":
        passed = computed is None
    elif computed is None:
        passed = False
    elif cell.kind == "bisection":
        passed = abs(computed[0] - cell.expected[0]) <= tol
    elif cell.kind == "max":
        passed = abs(computed[1] - cell.expected[0]) <= tol
    elif cell.kind == "range":
        passed = all(abs(a - b) <= tol for a, b in zip(computed, cell.expected))
    else:
        passed = all(abs(a - cell.expected[0]) <= tol for a in computed)
    return CellResult(cell, computed, tol, bool(passed), detail)


@lru_cache(maxsize=8)
def _table1_cells(tol_bisect, tol_extremal, density, levels):
    return tuple(_evaluate_cell(c, tol_bisect, tol_extremal, density, levels) for c in TABLE1)


def table1_report(tol_bisect: float = 1e-3, tol_extremal: float = 5e-3, density: int = GRID_DENSITY,
                  levels: int = REFINE_LEVELS) -> Table1Report:
    """Recompute every cell of Table I and compare with the quoted values.

    "<= x" cells compare the largest crossing over angles with x, range
    cells compare (min, max), angle-independent cells require both ends to
    match. Results are cached per argument set.
    """
    cells = _table1_cells(float(tol_bisect), float(tol_extremal), int(density), int(levels))
    meta = {"measurement_convention": MEASUREMENT_CONVENTION, "tool_version": __version__,
            "tol_bisect": tol_bisect, "tol_extremal": tol_extremal,
            "grid_density": density, "refine_levels": levels, "refine_factor": REFINE_FACTOR,
            "p_scan": P_SCAN, "p_max": P_MAX}
    return Table1Report(cells, meta)


def grid_product(*axes) -> list[tuple]:
    """All points of a small grid in index order (first axis slowest)."""
    return list(itertools.product(*axes))
