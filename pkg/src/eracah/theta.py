"""Jacobi theta functions and their rescaled, normalized variants.

Evaluation is by the q-series in the nome p,

    theta_1(x) = 2 sum_{n>=0} (-1)^n p^((n+1/2)^2) sin((2n+1)x)
    theta_2(x) = 2 sum_{n>=0}        p^((n+1/2)^2) cos((2n+1)x)
    theta_3(x) = 1 + 2 sum_{n>=1}        p^(n^2) cos(2nx)
    theta_4(x) = 1 + 2 sum_{n>=1} (-1)^n p^(n^2) cos(2nx)

with the classical infinite products implemented alongside as an
independent cross-check of every value.  The rescaled variants

    [z]_1 = theta_1(alpha z/2) / ((alpha/2) theta_1'(0))
    [z]_r = theta_r(alpha z/2) / theta_r(0)          (r = 2, 3, 4)

are normalized so that [0]_1 = 0 with unit slope and [0]_r = 1; they are
periodic up to a sign with real period 2 pi / alpha.

Shifting z by the half period pi/alpha swaps the labels pairwise,
r -> (2, 1, 4, 3)[r-1], up to label-dependent constants returned by
:func:`half_period_constants`; the constants cancel in same-label ratios,
which is the only way the shift is used by the coefficient formulas
downstream.

``TrigContext`` realizes the p -> 0 degeneration of the same interface
analytically: [z]_1 -> (2/alpha) sin(alpha z/2), [z]_2 -> cos(alpha z/2),
[z]_3, [z]_4 -> 1.  Feeding it to the coefficient builders produces the
trigonometric pipeline without any elliptic evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import NonConvergence

#: label permutation induced by the half-period shift z -> z + pi/alpha
HALF_PERIOD_LABELS = (2, 1, 4, 3)

_SERIES_CAP = 20000


@dataclass(frozen=True)
class ThetaContext:
    """Elliptic nome, argument scale and series truncation tolerance.

    p     -- nome, 0 < p < 1
    alpha -- positive scale; the rescaled functions have real period 2 pi / alpha
    tol   -- relative series/product truncation tolerance
    """

    p: float
    alpha: float = 1.0
    tol: float = 1e-16

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"elliptic nome must satisfy 0 < p < 1, got {self.p!r}")
        if not self.alpha > 0.0:
            raise ValueError(f"scale alpha must be positive, got {self.alpha!r}")
        if not self.tol > 0.0:
            raise ValueError(f"tolerance must be positive, got {self.tol!r}")

    def theta(self, r: int, z: float) -> float:
        return theta(r, z, self)

    def scaled(self, r: int, z: float) -> float:
        return scaled_theta(r, z, self)


@dataclass(frozen=True)
class TrigContext:
    """Trigonometric (p -> 0) degeneration of the scaled theta interface."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError(f"scale alpha must be positive, got {self.alpha!r}")

    def scaled(self, r: int, z: float) -> float:
        x = 0.5 * self.alpha * z
        if r == 1:
            return 2.0 / self.alpha * math.sin(x)
        if r == 2:
            return math.cos(x)
        if r in (3, 4):
            return 1.0
        raise ValueError(f"theta index must be 1..4, got {r!r}")


def _check_index(r: int) -> None:
    if r not in (1, 2, 3, 4):
        raise ValueError(f"theta index must be 1..4, got {r!r}")


def _series(r: int, x: float, p: float, tol: float) -> float:
    """q-series for theta_r at argument x.

    Terms are added while the term-magnitude envelope (the q-power times 2,
    ignoring the bounded trig factor) exceeds tol * max(1, |partial sum|).
    """
    if r in (1, 2):
        s = 0.0
        sign = 1.0
        n = 0
        while True:
            env = 2.0 * p ** ((n + 0.5) * (n + 0.5))
            if n and env < tol * max(1.0, abs(s)):
                return s
            ang = (2 * n + 1) * x
            if r == 1:
                s += sign * env * math.sin(ang)
                sign = -sign
            else:
                s += env * math.cos(ang)
            n += 1
            if n > _SERIES_CAP:
                raise NonConvergence(
                    f"theta_{r} series exceeded {_SERIES_CAP} terms (p={p!r}); context invalid"
                )
    s = 1.0
    n = 1
    while True:
        env = 2.0 * p ** (n * n)
        if env < tol * max(1.0, abs(s)):
            return s
        term = env * math.cos(2 * n * x)
        if r == 4 and n % 2:
            term = -term
        s += term
        n += 1
        if n > _SERIES_CAP:
            raise NonConvergence(
                f"theta_{r} series exceeded {_SERIES_CAP} terms (p={p!r}); context invalid"
            )


def _product(r: int, x: float, p: float, tol: float) -> float:
    """Infinite-product form of theta_r at argument x (independent of the series)."""
    if r == 1:
        pref = 2.0 * p ** 0.25 * math.sin(x)
        sign = -1.0
    elif r == 2:
        pref = 2.0 * p ** 0.25 * math.cos(x)
        sign = 1.0
    elif r == 3:
        pref = 1.0
        sign = 1.0
    else:
        pref = 1.0
        sign = -1.0

    cos2x = math.cos(2.0 * x)
    prod = 1.0
    n = 1
    while True:
        p2n = p ** (2 * n)
        g = p2n if r in (1, 2) else p ** (2 * n - 1)
        prod *= (1.0 - p2n) * (1.0 + sign * 2.0 * g * cos2x + g * g)
        n += 1
        nxt = p ** (2 * n) if r in (1, 2) else p ** (2 * n - 1)
        if 8.0 * nxt < tol:
            return pref * prod
        if n > _SERIES_CAP:
            raise NonConvergence(
                f"theta_{r} product exceeded {_SERIES_CAP} factors (p={p!r}); context invalid"
            )


def theta(r: int, z: float, ctx: ThetaContext) -> float:
    """theta_r(z; p) by the q-series."""
    _check_index(r)
    return _series(r, z, ctx.p, ctx.tol)


def theta_product(r: int, z: float, ctx: ThetaContext) -> float:
    """theta_r(z; p) by the infinite product; the built-in self-oracle."""
    _check_index(r)
    return _product(r, z, ctx.p, ctx.tol)


@lru_cache(maxsize=512)
def _d1_zero(p: float, tol: float) -> float:
    """theta_1'(0; p) from the term-by-term differentiated series at 0."""
    s = 0.0
    sign = 1.0
    n = 0
    while True:
        env = 2.0 * (2 * n + 1) * p ** ((n + 0.5) * (n + 0.5))
        if n and env < tol * max(1.0, abs(s)):
            return s
        s += sign * env
        sign = -sign
        n += 1
        if n > _SERIES_CAP:
            raise NonConvergence(f"theta_1' series exceeded {_SERIES_CAP} terms (p={p!r})")


@lru_cache(maxsize=512)
def _nulls(p: float, tol: float) -> tuple[float, float, float]:
    """(theta_2(0), theta_3(0), theta_4(0))."""
    return (_series(2, 0.0, p, tol), _series(3, 0.0, p, tol), _series(4, 0.0, p, tol))


def theta1_prime_zero(ctx: ThetaContext) -> float:
    """theta_1'(0; p).

    Computed from the differentiated series; the classical identity
    theta_1'(0) = theta_2(0) theta_3(0) theta_4(0) is exercised by the
    test suite as a cross-check, not used here.
    """
    return _d1_zero(ctx.p, ctx.tol)


def theta_null_triple(ctx: ThetaContext) -> float:
    """theta_2(0) theta_3(0) theta_4(0), the cross-check partner of theta_1'(0)."""
    t2, t3, t4 = _nulls(ctx.p, ctx.tol)
    return t2 * t3 * t4


def scaled_theta(r: int, z: float, ctx: ThetaContext) -> float:
    """The rescaled, normalized variant [z]_r."""
    _check_index(r)
    x = 0.5 * ctx.alpha * z
    if r == 1:
        return _series(1, x, ctx.p, ctx.tol) / (0.5 * ctx.alpha * _d1_zero(ctx.p, ctx.tol))
    null = _nulls(ctx.p, ctx.tol)[r - 2]
    return _series(r, x, ctx.p, ctx.tol) / null


def half_period_constants(ctx: ThetaContext) -> tuple[float, float, float, float]:
    """Constants C_r with [z + pi/alpha]_r = C_r [-z]_{(2,1,4,3)[r-1]} for all z.

    C_1 C_2 = C_3 C_4 = 1, so the constants drop out of the same-label
    ratios appearing in the lattice coefficient formulas.
    """
    t2, t3, t4 = _nulls(ctx.p, ctx.tol)
    d1 = _d1_zero(ctx.p, ctx.tol)
    c1 = t2 / (0.5 * ctx.alpha * d1)
    c3 = t4 / t3
    return (c1, 1.0 / c1, c3, 1.0 / c3)
