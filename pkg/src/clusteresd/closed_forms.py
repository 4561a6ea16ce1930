"""Analytic expressions for the dephased four-qubit chain, as plain numpy functions.

All functions broadcast over array arguments. ``pt`` below stands for
``sqrt(1 - p)``.

Two expressions needed repair before they agreed with the numeric pipeline:

* The full three-angle rotation fidelity for the Hadamard-rotated chain
  contains a coefficient that is not otherwise defined; it equals ``-pt**3``.
* In ``c34_c4`` the bracket of the second term of ``A`` closes before the
  cosine: ``(p-1)^2 (2 + p(p-2)) cos(2 s)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

RADICAND_TOL = 1e-10

cos = np.cos
sin = np.sin


def ptilde(p):
    return np.sqrt(1.0 - np.asarray(p, dtype=float))


def _nonneg_radicand(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(x < -RADICAND_TOL):
        raise ValueError(f"negative radicand in {what}: {x.min():.3g}")
    return np.clip(x, 0.0, None)


# one-qubit rotation fidelity

def f_c4(p, theta_sum):
    p = np.asarray(p, dtype=float)
    return 0.25 * (4 + p * (p - 3) + p * (1 - p) * cos(2 * theta_sum))


def f_c4h_coefficient(p):
    """The coefficient multiplying the single-angle-difference terms of ``f_c4h``."""
    return -ptilde(p) ** 3


def f_c4h(p, theta1, theta2, theta3):
    p = np.asarray(p, dtype=float)
    t1, t2, t3 = theta1, theta2, theta3
    pt = ptilde(p)
    pt3 = pt ** 3
    pp = f_c4h_coefficient(p)
    total = (
        2 * pt3 * cos(2 * (t1 - t2))
        + 4 * pp * cos(2 * t2)
        + 2 * pt3 * cos(2 * (t1 + t2))
        + 2 * pp * cos(2 * (t1 - t3))
        + pt3 * cos(2 * (t1 - t2 - t3))
        + 2 * pp * cos(2 * (t2 - t3))
        + pt3 * cos(2 * (t1 + t2 - t3))
        + 4 * (p - 1) * cos(2 * t1) * (pt - 2 * (p + 1) * cos(t3) ** 2)
        + 12 * pp * cos(2 * t3)
        + 4 * (11 + 5 * pt3 + 3 * cos(2 * t3))
        + 2 * pp * cos(2 * (t1 + t3))
        + pt3 * cos(2 * (t1 - t2 + t3))
        + 2 * pp * cos(2 * (t2 + t3))
        + pt3 * cos(2 * (t1 + t2 + t3))
        + 16 * cos(2 * t2) * cos(t3) ** 2 * sin(t1) ** 2
        + 8 * p ** 2 * (cos(t3) ** 2 * (1 + 2 * cos(2 * t2) * sin(t1) ** 2)
                        - cos(t2) * sin(2 * t1) * sin(2 * t3))
        + 8 * p * (-4 * cos(t3) ** 2 * (1 + cos(2 * t2) * sin(t1) ** 2)
                   + cos(t2) * sin(2 * t1) * sin(2 * t3))
    )
    return total / 64


# four-qubit witness and negativities

def witness_c4(p):
    p = np.asarray(p, dtype=float)
    return -0.25 * (p ** 2 - 4 * p + 2)


def n1_c4(p):
    p = np.asarray(p, dtype=float)
    return -0.25 * (p ** 2 - 3 * p + 2)


def n12_c4(p):
    return witness_c4(p)


def n13_c4(p):
    return 0.25 * (np.asarray(p, dtype=float) - 1)


def n14_c4(p):
    return n13_c4(p)


def witness_c4h(p):
    p = np.asarray(p, dtype=float)
    pt = ptilde(p)
    return (-8 * pt + p * (8 + 4 * pt - p)) / 16


def n1_c4h(p):
    p = np.asarray(p, dtype=float)
    return (-4 - 4 * ptilde(p) ** 3 + 6 * p - p ** 2) / 16


def n12_c4h(p):
    return n1_c4h(p)


def n13_c4h(p):
    p = np.asarray(p, dtype=float)
    return (-4 * ptilde(p) + 2 * p - p ** 2) / 16


def n14_c4h(p):
    p = np.asarray(p, dtype=float)
    return (-4 + 4 * p + p ** 2) / 16


# two-qubit leftovers, C4

def c34_c4(p, theta_sum):
    p = np.asarray(p, dtype=float)
    c2 = cos(2 * theta_sum)
    a = 2 + p * (p - 2) * (p - 1) ** 2 - (p - 1) ** 2 * (2 + p * (p - 2)) * c2
    b = 2 * np.sqrt(_nonneg_radicand(
        -2 * (p - 1) ** 4 * (-1 + p * (p - 2) + (p - 1) ** 2 * c2) * sin(theta_sum) ** 2, "B34"))
    a_plus_b = _nonneg_radicand(a + b, "A34+B34")
    _nonneg_radicand(a - b, "A34-B34")
    # A^2 - B^2 is a perfect square; dividing it by A + B avoids the cancellation in A - B
    diff_root = np.abs(p * (p - 2) * ((p - 1) ** 2 * c2 - (p * p - 2 * p + 3)))
    with np.errstate(invalid="ignore", divide="ignore"):
        minus = np.where(a_plus_b > 0, diff_root / np.sqrt(a_plus_b), 0.0)
    return (np.sqrt(a_plus_b) - minus) / (2 * np.sqrt(2))


def f24_c4(p):
    return 0.25 * (np.asarray(p, dtype=float) - 2) ** 2


def c24_c4(p):
    p = np.asarray(p, dtype=float)
    return 0.5 * (p ** 2 - 4 * p + 2)


# two-qubit leftovers, C4H

def f34_c4h(p, theta1, theta2):
    p = np.asarray(p, dtype=float)
    pt = ptilde(p)
    return (8 * (1 + pt) + p * (-5 - 4 * pt + p)
            - p * (p - 1) * (cos(2 * theta1) - 2 * cos(2 * theta2) * sin(theta1) ** 2)) / 16


def f24_c4h(p, theta1, theta3):
    p = np.asarray(p, dtype=float)
    pt = ptilde(p)
    return (8 * (1 + pt) + p * (-5 - 4 * pt + p)
            + p * cos(2 * theta1) * (1 + 2 * pt - p)
            + 2 * p * cos(2 * theta3) * (pt + (p - 1) * sin(theta1) ** 2)) / 16


def f23_c4h(p, theta1, theta4):
    p = np.asarray(p, dtype=float)
    pt = ptilde(p)
    return (10 + 6 * pt - p * (7 + 2 * pt - p)
            + cos(2 * theta4) * (-2 + 2 * pt + 3 * p - p ** 2)
            + 2 * cos(2 * theta1) * (pt - pt ** 3 * cos(2 * theta4)
                                     - (p - 2) * (p - 1) * sin(theta4) ** 2)) / 16


def _angle_mix_14(theta2, theta3):
    return cos(2 * theta2) + 2 * cos(theta2) ** 2 * cos(2 * theta3)


def f14_c4h(p, theta2, theta3):
    p = np.asarray(p, dtype=float)
    pt = ptilde(p)
    return (10 + 6 * pt - p * (7 + 6 * pt - p)
            + (p - 1) * (-2 + 2 * pt + p) * _angle_mix_14(theta2, theta3)) / 16


def c14_term(p, theta2, theta3):
    p = np.asarray(p, dtype=float)
    rad = (p - 1) ** 2 * (16 + p * (p - 16) + p ** 2 * _angle_mix_14(theta2, theta3))
    return 0.25 * np.sqrt(_nonneg_radicand(rad, "c14"))


def c14_c4h(p, theta2, theta3):
    p = np.asarray(p, dtype=float)
    c = c14_term(p, theta2, theta3)
    return np.maximum(-p / 2 - c, -p / 2 + c)


@dataclass(frozen=True)
class ClosedForm:
    """A registered expression. ``params`` lists the arguments after ``p``."""

    name: str
    params: tuple[str, ...]
    evaluator: Callable

    def __call__(self, p, *angles):
        return self.evaluator(p, *angles)


def _sum12(fn):
    return lambda p, t1, t2, *_: fn(p, t1 + t2)


def _fixed(fn):
    return lambda p, *_: fn(p)


FORMS: dict[str, ClosedForm] = {
    f.name: f
    for f in [
        ClosedForm("witness_c4", (), witness_c4),
        ClosedForm("n1_c4", (), n1_c4),
        ClosedForm("n12_c4", (), n12_c4),
        ClosedForm("n13_c4", (), n13_c4),
        ClosedForm("n14_c4", (), n14_c4),
        ClosedForm("witness_c4h", (), witness_c4h),
        ClosedForm("n1_c4h", (), n1_c4h),
        ClosedForm("n12_c4h", (), n12_c4h),
        ClosedForm("n13_c4h", (), n13_c4h),
        ClosedForm("n14_c4h", (), n14_c4h),
        ClosedForm("f_c4", ("theta1", "theta2", "theta3"), _sum12(f_c4)),
        ClosedForm("f_c4h", ("theta1", "theta2", "theta3"), f_c4h),
        ClosedForm("f34_c4", ("theta1", "theta2"), _sum12(f_c4)),
        ClosedForm("c34_c4", ("theta1", "theta2"), _sum12(c34_c4)),
        ClosedForm("f24_c4", ("theta1", "theta3"), _fixed(f24_c4)),
        ClosedForm("c24_c4", ("theta1", "theta3"), _fixed(c24_c4)),
        ClosedForm("f23_c4", ("theta1", "theta4"), _fixed(f24_c4)),
        ClosedForm("c23_c4", ("theta1", "theta4"), _fixed(c24_c4)),
        ClosedForm("f14_c4", ("theta2", "theta3"), _fixed(f24_c4)),
        ClosedForm("c14_c4", ("theta2", "theta3"), _fixed(c24_c4)),
        ClosedForm("f34_c4h", ("theta1", "theta2"), f34_c4h),
        ClosedForm("f24_c4h", ("theta1", "theta3"), f24_c4h),
        ClosedForm("f23_c4h", ("theta1", "theta4"), f23_c4h),
        ClosedForm("f14_c4h", ("theta2", "theta3"), f14_c4h),
        ClosedForm("c14_c4h", ("theta2", "theta3"), c14_c4h),
    ]
}
