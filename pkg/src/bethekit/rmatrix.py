"""Scalar functions f, g, h, t and the six-vertex R-matrix.

A ``RMatrixKind`` is either rational with constant ``c`` or trigonometric with
constant ``eta``. The helper ``kind.sh`` is the identity for the rational kind
and ``sinh`` for the trigonometric kind, so every formula is written once:

    f(u, v) = sh(u - v + c) / sh(u - v)
    g(u, v) = sh(c) / sh(u - v)
    h(u, v) = sh(u - v + c) / sh(c)
    t(u, v) = g(u, v) / h(u, v)

where ``c`` stands for the kind's constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .tensoralg import PreconditionError, embed_operator

POLE_GUARD = 1e-9


class PoleError(PreconditionError):
    """A scalar function was evaluated at (or too close to) a pole."""


@dataclass(frozen=True)
class RMatrixKind:
    """Rational (``trigonometric=False``, constant c) or trigonometric (constant eta)."""

    trigonometric: bool
    const: complex

    def __post_init__(self):
        if abs(self.sh(self.const)) < POLE_GUARD:
            raise PreconditionError("the R-matrix constant must satisfy sh(const) != 0")

    @property
    def label(self) -> str:
        return "trigonometric" if self.trigonometric else "rational"

    def sh(self, x):
        return np.sinh(x) if self.trigonometric else x

    def dsh(self, x):
        """Derivative of ``sh``."""
        return np.cosh(x) if self.trigonometric else np.ones_like(x)

    def dlog_sh(self, x):
        """Logarithmic derivative of ``sh``: coth x or 1/x."""
        return np.cosh(x) / np.sinh(x) if self.trigonometric else 1.0 / x

    @property
    def sh_const(self) -> complex:
        return complex(self.sh(self.const))


def rational(c: complex = 1j) -> RMatrixKind:
    return RMatrixKind(False, complex(c))


def trigonometric(eta: complex) -> RMatrixKind:
    return RMatrixKind(True, complex(eta))


def eta_from_delta(delta: float) -> complex:
    """Trigonometric constant with cosh(eta) = delta.

    For |delta| < 1 this returns eta = -i*zeta with delta = cos(zeta), zeta in (0, pi).
    """
    delta = float(delta)
    if abs(delta) < 1:
        return -1j * float(np.arccos(delta))
    if delta > 1:
        return complex(np.arccosh(delta))
    if delta < -1:
        return complex(np.arccosh(-delta)) + 1j * np.pi
    raise PreconditionError("delta = +-1 is the rational (XXX) point; use the rational kind")


def anisotropy(kind: RMatrixKind) -> float:
    """Delta = cosh(eta) for the trigonometric kind, 1 for the rational kind."""
    if kind.trigonometric:
        return float(np.real(np.cosh(kind.const)))
    return 1.0


class Normalization(str, Enum):
    """R-matrix normalizations.

    FG: weights (f, 1, g); PUNIT: R(u, u) = P; SINH: weights (sh(x+c), sh(x), sh(c)).
    """

    FG = "fg"
    PUNIT = "punit"
    SINH = "sinh"


def _sep(kind: RMatrixKind, x, what: str):
    s = kind.sh(x)
    if abs(s) < POLE_GUARD:
        raise PoleError(f"pole in {what}: sh({x}) vanishes")
    return s


def f(kind: RMatrixKind, u, v) -> complex:
    x = u - v
    return kind.sh(x + kind.const) / _sep(kind, x, f"f({u}, {v})")


def g(kind: RMatrixKind, u, v) -> complex:
    x = u - v
    return kind.sh_const / _sep(kind, x, f"g({u}, {v})")


def h(kind: RMatrixKind, u, v) -> complex:
    return kind.sh(u - v + kind.const) / kind.sh_const


def t(kind: RMatrixKind, u, v) -> complex:
    x = u - v
    return kind.sh_const**2 / (_sep(kind, x, f"t({u}, {v})") * _sep(kind, x + kind.const, f"t({u}, {v})"))


def kernel(kind: RMatrixKind, x) -> complex:
    """Gaudin kernel sh(2c) / (sh(x + c) sh(x - c))."""
    c = kind.const
    return kind.sh(2 * c) / (_sep(kind, x + c, "kernel") * _sep(kind, x - c, "kernel"))


def _prod(fun, kind, xs, ys) -> complex:
    out = 1.0 + 0j
    for x in np.atleast_1d(xs):
        for y in np.atleast_1d(ys):
            out *= fun(kind, x, y)
    return out


def prod_f(kind, xs, ys) -> complex:
    """Product f(x, y) over all x in xs and y in ys."""
    return _prod(f, kind, xs, ys)


def prod_g(kind, xs, ys) -> complex:
    return _prod(g, kind, xs, ys)


def prod_h(kind, xs, ys) -> complex:
    return _prod(h, kind, xs, ys)


def r_weights(kind: RMatrixKind, norm: Normalization, u, v) -> tuple[complex, complex, complex]:
    """Six-vertex weights (diagonal, transmission, reflection) of R(u, v)."""
    norm = Normalization(norm)
    x = u - v
    c = kind.const
    if norm is Normalization.FG:
        return f(kind, u, v), 1.0 + 0j, g(kind, u, v)
    if norm is Normalization.SINH:
        return complex(kind.sh(x + c)), complex(kind.sh(x)), kind.sh_const
    den = _sep(kind, x + c, f"PUnit R({u}, {v})")
    return 1.0 + 0j, complex(kind.sh(x) / den), complex(kind.sh_const / den)


def r_matrix(kind: RMatrixKind, norm: Normalization, u, v, f_shift: complex = 0.0) -> np.ndarray:
    """4x4 R-matrix [[w1,0,0,0],[0,w2,w3,0],[0,w3,w2,0],[0,0,0,w1]].

    ``f_shift`` perturbs the diagonal weight and exists only to build negative controls.
    """
    w1, w2, w3 = r_weights(kind, norm, u, v)
    w1 = w1 + f_shift
    return np.array(
        [[w1, 0, 0, 0], [0, w2, w3, 0], [0, w3, w2, 0], [0, 0, 0, w1]],
        dtype=complex,
    )


def yang_baxter_residual(kind, norm, u1, u2, u3, f_shift: complex = 0.0, relative: bool = False) -> float:
    """Max-abs entry of R12 R13 R23 - R23 R13 R12 on the 8-dimensional space.

    Spaces 1, 2, 3 are the left, middle and right factors. With ``relative`` the
    residual is divided by the product of the max-abs entries of the three R-matrices.
    """
    r12 = r_matrix(kind, norm, u1, u2, f_shift)
    r13 = r_matrix(kind, norm, u1, u3, f_shift)
    r23 = r_matrix(kind, norm, u2, u3, f_shift)
    # site labels: space 1 -> site 3 (left factor), space 3 -> site 1
    R12 = embed_operator(r12, (3, 2), 3)
    R13 = embed_operator(r13, (3, 1), 3)
    R23 = embed_operator(r23, (2, 1), 3)
    res = float(np.max(np.abs(R12 @ R13 @ R23 - R23 @ R13 @ R12)))
    if relative:
        scale = np.max(np.abs(r12)) * np.max(np.abs(r13)) * np.max(np.abs(r23))
        res /= float(scale)
    return res


def random_points(rng: np.random.Generator, count: int, scale: float = 1.0) -> np.ndarray:
    """Complex points with independent normal real and imaginary parts."""
    return scale * (rng.normal(size=count) + 1j * rng.normal(size=count))


def coupling_swap_residual(kind: RMatrixKind, u, v) -> float:
    """|f(u,v)|_{c->-c} - f(v,u)| + |g(u,v)|_{c->-c} - g(v,u)|."""
    flipped = RMatrixKind(kind.trigonometric, -kind.const)
    return abs(f(flipped, u, v) - f(kind, v, u)) + abs(g(flipped, u, v) - g(kind, v, u))


__all__ = [
    "POLE_GUARD",
    "PoleError",
    "RMatrixKind",
    "Normalization",
    "rational",
    "trigonometric",
    "eta_from_delta",
    "anisotropy",
    "f",
    "g",
    "h",
    "t",
    "kernel",
    "prod_f",
    "prod_g",
    "prod_h",
    "r_weights",
    "r_matrix",
    "yang_baxter_residual",
    "random_points",
    "coupling_swap_residual",
]
