"""Difference-operator coefficient functions and their finite-lattice values.

The step coefficients of the difference operator are

    A(z) = prod_r ( [z+u_r]_r / [z]_r ) ( [z+1/2+v_r]_r / [z+1/2]_r )

    B(z) = sum_r c_r ( [z+1/2+w]_r / [z+1/2]_r ) ( [z-1/2-w]_r / [z-1/2]_r )

    c_r  = 2 / ([w]_1 [w+1]_1) * prod_s [u_{perm_r(s)} - 1/2]_s [v_{perm_r(s)}]_s

with w the virtual parameter.  On the lattice {u_1, u_1+1, ..., u_1+M}
the three bands are a_k = A(-u_1-k), at_k = A(u_1+M-k), b_k = B(u_1+k);
a_0 = at_0 = 0 because [0]_1 and the half-period zero of label 2 kill
the boundary terms, and a_k, at_k > 0 for k = 1..M on the valid domain.

a_k and at_k are built from the parity/half-period reduced products
(the form in which the boundary zeros are exact in floating point);
equality with A evaluated at the lattice points is a test-suite check.
Reflecting the lattice index is the same as permuting the parameters by
(12)(34): at_k = perm_2(a_k) and b_{M-k} = perm_2(b_k), which
construction verifies by recomputation before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvariantViolation, PoleProximity, VirtualParamSingular
from .params import CouplingParams, apply_permutation, permute, permute_index

#: denominators of coefficient ratios must stay this far from zero
POLE_TOL = 1e-12


@dataclass(frozen=True)
class CoefficientSet:
    """Bands a_0..a_M (sub), at_0..at_M (super source), b_0..b_M (diag) and c_1..c_4."""

    a: tuple[float, ...]
    a_tilde: tuple[float, ...]
    b: tuple[float, ...]
    c: tuple[float, float, float, float]

    @property
    def M(self) -> int:
        return len(self.b) - 1

    def permuted(self) -> "CoefficientSet":
        """The (12)(34)-image: a and at swap, b reverses, c pairs swap."""
        c = self.c
        return CoefficientSet(
            a=self.a_tilde,
            a_tilde=self.a,
            b=tuple(reversed(self.b)),
            c=(c[1], c[0], c[3], c[2]),
        )

    def recurrence_products(self) -> tuple[float, ...]:
        """g_k = a_k * at_{M+1-k} for k = 0..M (g_0 = 0); the recurrence couplings."""
        M = self.M
        return (0.0,) + tuple(self.a[k] * self.a_tilde[M + 1 - k] for k in range(1, M + 1))


def _context(params: CouplingParams, ctx):
    return params.theta_context() if ctx is None else ctx


def coeff_A(z: float, params: CouplingParams, ctx=None, *, pole_tol: float = POLE_TOL) -> float:
    """Step coefficient A(z)."""
    sc = _context(params, ctx).scaled
    val = 1.0
    for r in range(1, 5):
        d1 = sc(r, z)
        d2 = sc(r, z + 0.5)
        if abs(d1) < pole_tol:
            raise PoleProximity(f"[z]_{r} = {d1!r} at z = {z!r}", factor=r)
        if abs(d2) < pole_tol:
            raise PoleProximity(f"[z+1/2]_{r} = {d2!r} at z = {z!r}", factor=r)
        val *= sc(r, z + params.u[r - 1]) / d1
        val *= sc(r, z + 0.5 + params.v[r - 1]) / d2
    return val


def coeff_c(r: int, params: CouplingParams, ctx=None) -> float:
    """Constant c_r in the diagonal coefficient."""
    sc = _context(params, ctx).scaled
    w = params.u_virtual
    d1 = sc(1, w)
    d2 = sc(1, w + 1.0)
    if abs(d1) < POLE_TOL or abs(d2) < POLE_TOL:
        raise VirtualParamSingular(
            f"[w]_1 [w+1]_1 = {d1!r} * {d2!r} too close to zero for w = {w!r}"
        )
    val = 2.0 / (d1 * d2)
    for s in range(1, 5):
        i = permute_index(r, s)
        val *= sc(s, params.u[i - 1] - 0.5) * sc(s, params.v[i - 1])
    return val


def coeff_B(z: float, params: CouplingParams, ctx=None, *, pole_tol: float = POLE_TOL) -> float:
    """Diagonal coefficient B(z); the virtual parameter enters only here."""
    ctx = _context(params, ctx)
    sc = ctx.scaled
    w = params.u_virtual
    total = 0.0
    for r in range(1, 5):
        dp = sc(r, z + 0.5)
        dm = sc(r, z - 0.5)
        if abs(dp) < pole_tol:
            raise PoleProximity(f"[z+1/2]_{r} = {dp!r} at z = {z!r}", factor=r)
        if abs(dm) < pole_tol:
            raise PoleProximity(f"[z-1/2]_{r} = {dm!r} at z = {z!r}", factor=r)
        total += coeff_c(r, params, ctx) * (sc(r, z + 0.5 + w) / dp) * (sc(r, z - 0.5 - w) / dm)
    return total


def _band_product(k: int, uu, vv, sc, pole_tol: float) -> float:
    # prod_r [x1-u_r+k]_r/[x1+k]_r * [x1-v_r-1/2+k]_r/[x1-1/2+k]_r with x1 = uu[0]
    x1 = uu[0]
    val = 1.0
    for r in range(1, 5):
        d1 = sc(r, x1 + k)
        d2 = sc(r, x1 - 0.5 + k)
        if abs(d1) < pole_tol:
            raise PoleProximity(f"[u+k]_{r} = {d1!r} at k = {k}", factor=r)
        if abs(d2) < pole_tol:
            raise PoleProximity(f"[u-1/2+k]_{r} = {d2!r} at k = {k}", factor=r)
        val *= sc(r, x1 - uu[r - 1] + k) / d1
        val *= sc(r, x1 - vv[r - 1] - 0.5 + k) / d2
    return val


def subdiagonal_coeff(k: int, params: CouplingParams, ctx=None, *, pole_tol: float = POLE_TOL) -> float:
    """a_k = A(-u_1-k) in parity-reduced product form (exact zero at k = 0)."""
    sc = _context(params, ctx).scaled
    return _band_product(k, params.u, params.v, sc, pole_tol)


def superdiagonal_coeff(k: int, params: CouplingParams, ctx=None, *, pole_tol: float = POLE_TOL) -> float:
    """at_k = A(u_1+M-k) in half-period reduced form: the a_k formula with permuted parameters."""
    sc = _context(params, ctx).scaled
    return _band_product(k, apply_permutation(2, params.u), apply_permutation(2, params.v), sc, pole_tol)


def principal_trig_sign_factor(k: int, params: CouplingParams) -> float:
    """The leading trigonometric factor whose sign equals the sign of a_k."""
    h = 0.5 * params.alpha
    u1, u2 = params.u[0], params.u[1]
    v1, v2 = params.v[0], params.v[1]
    return (
        math.sin(h * k) / math.sin(h * (u1 + k))
        * math.cos(h * (u1 - u2 + k)) / math.cos(h * (u1 + k))
        * math.sin(h * (u1 - v1 - 0.5 + k)) / math.sin(h * (u1 - 0.5 + k))
        * math.cos(h * (u1 - v2 - 0.5 + k)) / math.cos(h * (u1 - 0.5 + k))
    )


def _rel(x: float, y: float) -> float:
    return abs(x - y) / max(1.0, abs(x), abs(y))


def lattice_coeffs(
    params: CouplingParams,
    ctx=None,
    *,
    check_tol: float = 1e-10,
    pole_tol: float = POLE_TOL,
) -> CoefficientSet:
    """All band coefficients for the (M+1)-point lattice, invariants checked.

    Construction fails with InvariantViolation if the boundary zeros, the
    positivity of the off-diagonal bands, or the reflection covariance
    (recomputed with permuted parameters) are violated beyond check_tol.
    """
    ctx = _context(params, ctx)
    M = params.M
    u1 = params.u[0]

    a = tuple(subdiagonal_coeff(k, params, ctx, pole_tol=pole_tol) for k in range(M + 1))
    a_tilde = tuple(superdiagonal_coeff(k, params, ctx, pole_tol=pole_tol) for k in range(M + 1))
    b = tuple(coeff_B(u1 + k, params, ctx, pole_tol=pole_tol) for k in range(M + 1))
    c = tuple(coeff_c(r, params, ctx) for r in range(1, 5))

    if a[0] != 0.0 or a_tilde[0] != 0.0:
        raise InvariantViolation(f"boundary zeros a_0 = {a[0]!r}, at_0 = {a_tilde[0]!r} not exact")
    for k in range(1, M + 1):
        if not a[k] > 0.0:
            raise InvariantViolation(f"positivity fails: a_{k} = {a[k]!r}")
        if not a_tilde[k] > 0.0:
            raise InvariantViolation(f"positivity fails: at_{k} = {a_tilde[k]!r}")

    # reflection covariance, verified by recomputation with permuted parameters
    pp = permute(params, 2)
    for k in range(M + 1):
        ak_perm = subdiagonal_coeff(k, pp, ctx, pole_tol=pole_tol)
        if _rel(ak_perm, a_tilde[k]) > check_tol:
            raise InvariantViolation(
                f"reflection covariance fails for at_{k}: {a_tilde[k]!r} vs permuted {ak_perm!r}"
            )
        bk_perm = coeff_B(pp.u[0] + k, pp, ctx, pole_tol=pole_tol)
        if _rel(bk_perm, b[M - k]) > check_tol:
            raise InvariantViolation(
                f"reflection covariance fails for b_{M-k}: {b[M-k]!r} vs permuted {bk_perm!r}"
            )

    return CoefficientSet(a=a, a_tilde=a_tilde, b=b, c=c)
