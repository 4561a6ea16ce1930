"""Closed form versus numeric pipeline: sample sets, golden values, deviations."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import metrics, protocol, tensor
from .closed_forms import FORMS

ANGLE_COLUMNS = ("theta1", "theta2", "theta3", "theta4")
GOLDEN_COLUMNS = ("form_name", "p") + ANGLE_COLUMNS + ("value",)
ORACLE_TOL = 1e-8
RANDOM_SAMPLES = 256
SEED = 20090604
_CHUNK = 2048


def _pt_spectrum(rep, cut):
    subset = metrics.NAMED_CUTS[cut]
    return lambda p: tensor.hermitian_eigenvalues(
        tensor.partial_transpose(protocol.dephased_cluster(rep, p), subset))


def _negativity(rep, cut):
    spectrum = _pt_spectrum(rep, cut)
    return lambda p: spectrum(p)[..., 0]


def _witness(rep):
    return lambda p: metrics.witness_values(protocol.dephased_cluster(rep, p), rep)


def _pair(rep, pair, kind):
    fn = protocol.pair_fidelity if kind == "f" else protocol.pair_concurrence
    return lambda p, a, b: fn(rep, pair, p, a, b)


def _rotation(rep):
    return lambda p, t1, t2, t3: protocol.rotation_fidelity(rep, p, t1, t2, t3)


NUMERIC = {
    "witness_c4": _witness("c4"),
    "witness_c4h": _witness("c4h"),
    "f_c4": _rotation("c4"),
    "f_c4h": _rotation("c4h"),
}
# Negativity forms give one branch of the partial-transpose spectrum. That
# branch is the lowest eigenvalue only while it is negative; once the cut
# turns PPT the form keeps growing while the lowest eigenvalue sits at zero.
SPECTRA = {}
for _rep in ("c4", "c4h"):
    for _cut in metrics.NAMED_CUTS:
        SPECTRA[f"{_cut.lower()}_{_rep}"] = _pt_spectrum(_rep, _cut)
        NUMERIC[f"{_cut.lower()}_{_rep}"] = _negativity(_rep, _cut)
NPT_TOL = 1e-12
for _name in FORMS:
    if _name[0] in "fc" and _name[1:3] in protocol.PAIRS:
        NUMERIC[_name] = _pair(_name.split("_")[1], _name[1:3], _name[0])


def numeric_value(name: str, p, angles: dict):
    """Evaluate the numeric-pipeline counterpart of closed form ``name``."""
    form = FORMS[name]
    args = [np.asarray(angles[k], dtype=float) for k in form.params]
    p = np.asarray(p, dtype=float)
    shape = np.broadcast_shapes(p.shape, *(a.shape for a in args))
    p = np.broadcast_to(p, shape).ravel()
    args = [np.broadcast_to(a, shape).ravel() for a in args]
    out = np.empty(p.size)
    for lo in range(0, p.size, _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        out[sl] = NUMERIC[name](p[sl], *(a[sl] for a in args))
    return out.reshape(shape)


def closed_value(name: str, p, angles: dict):
    form = FORMS[name]
    return np.asarray(form(np.asarray(p, dtype=float), *(np.asarray(angles[k], dtype=float)
                                                          for k in form.params)), dtype=float)


def random_samples(name: str, n: int = RANDOM_SAMPLES, seed: int = SEED):
    """``n`` points with p uniform in [0, 1] and every angle uniform in [0, 2 pi)."""
    rng = np.random.default_rng([seed, sorted(FORMS).index(name)])
    p = rng.random(n)
    angles = {k: rng.random(n) * 2 * np.pi for k in ANGLE_COLUMNS}
    return p, angles


def grid_samples(name: str):
    """p in {0, .1, ..., 1} crossed with every angle in {0, pi/8, ..., 15 pi/8}."""
    params = FORMS[name].params
    axes = [np.linspace(0, 1, 11)] + [np.arange(16) * np.pi / 8] * len(params)
    mesh = np.meshgrid(*axes, indexing="ij")
    p = mesh[0].ravel()
    angles = {k: np.zeros_like(p) for k in ANGLE_COLUMNS}
    for k, m in zip(params, mesh[1:]):
        angles[k] = m.ravel()
    return p, angles


@dataclass
class Deviation:
    name: str
    samples: int
    max_dev: float
    golden_dev: float | None = None

    @property
    def worst(self) -> float:
        return max(self.max_dev, self.golden_dev or 0.0)

    def ok(self, tol: float = ORACLE_TOL) -> bool:
        return self.worst <= tol


def _deviation(name, p, angles):
    closed = closed_value(name, p, angles)
    if name not in SPECTRA:
        return np.abs(numeric_value(name, p, angles) - closed)
    spectrum = SPECTRA[name](p)
    lowest = spectrum[..., 0]
    npt = lowest < -NPT_TOL
    on_branch = np.min(np.abs(spectrum - closed[..., None]), axis=-1)
    return np.where(npt, np.abs(lowest - closed),
                    np.maximum(on_branch, np.clip(-closed, 0.0, None)))


def compare(name: str, include_grid: bool = True) -> Deviation:
    """Largest closed-form versus pipeline disagreement over the sample sets.

    For negativity forms the comparison is against the lowest PT eigenvalue
    where that is negative; elsewhere the form must be non-negative and
    still be an eigenvalue of the partial transpose.
    """
    sets = [random_samples(name)]
    if include_grid:
        sets.append(grid_samples(name))
    dev = 0.0
    count = 0
    for p, a in sets:
        dev = max(dev, float(_deviation(name, p, a).max()))
        count += p.size
    return Deviation(name, count, dev)


# golden values

def default_golden_path():
    return resources.files("clusteresd").joinpath("data", "golden.csv")


def generate_golden(path) -> int:
    """Write numeric-pipeline values at the random sample points of every form."""
    rows = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GOLDEN_COLUMNS)
        for name in FORMS:
            p, angles = random_samples(name)
            vals = numeric_value(name, p, angles)
            if name in SPECTRA:
                npt = vals < -NPT_TOL
                p, vals = p[npt], vals[npt]
                angles = {k: v[npt] for k, v in angles.items()}
            for i in range(p.size):
                w.writerow([name, f"{p[i]:.17g}"] + [f"{angles[k][i]:.17g}" for k in ANGLE_COLUMNS]
                           + [f"{vals[i]:.17g}"])
                rows += 1
    return rows


def read_golden(path) -> dict[str, tuple[np.ndarray, dict, np.ndarray]]:
    groups: dict[str, list] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(GOLDEN_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"golden file lacks columns {sorted(missing)}")
        for row in reader:
            groups.setdefault(row["form_name"], []).append(row)
    out = {}
    for name, rows in groups.items():
        p = np.array([float(r["p"]) for r in rows])
        angles = {k: np.array([float(r[k]) for r in rows]) for k in ANGLE_COLUMNS}
        vals = np.array([float(r["value"]) for r in rows])
        out[name] = (p, angles, vals)
    return out


def golden_deviation(name: str, golden) -> float:
    if name not in golden:
        return float("inf")
    p, angles, vals = golden[name]
    return float(np.max(np.abs(closed_value(name, p, angles) - vals)))


def verify_all(golden_path=None, include_grid: bool = True) -> list[Deviation]:
    path = Path(str(golden_path or default_golden_path()))
    golden = read_golden(path)
    results = []
    for name in FORMS:
        d = compare(name, include_grid)
        d.golden_dev = golden_deviation(name, golden)
        results.append(d)
    return results
