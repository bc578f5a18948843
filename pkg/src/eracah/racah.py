"""Monic tridiagonal minor polynomials and the orthogonal eigenbasis built on them.

p_k(E) is the k-th principal minor of (E I - H): p_0 = 1, p_1 = E - b_0 and

    p_{k+1}(E) = (E - b_k) p_k(E) - a_k at_{M+1-k} p_{k-1}(E),

so p_{M+1} is the characteristic polynomial.  Expanding the determinant
directly gives an alternating sum over non-adjacent transposition sets;
both routes are implemented and must agree.

On shell (at a root E_j of p_{M+1}) the normalized values

    f_k(E_j) = p_k(E_j) / (at_M at_{M-1} ... at_{M-k+1})

are eigenvector components; the weights Delta_k, quadratic norms N_j,
reflection constants eps_j and the normalized solution family
h_k(E_j) = |eps_j|^{1/2} f_k(E_j) complete the table.

Every recurrence value is carried internally as a (mantissa, base-2
exponent) pair so that the large products that appear in eps_j, N_j and
the determinant formulas neither overflow nor underflow as M grows; the
plain-float views are exact whenever the magnitudes fit in binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientSet
from .errors import (
    ExpansionTooLarge,
    FormMismatch,
    InvariantViolation,
    OffShell,
    ProductIdentityViolation,
    SignPatternViolation,
)
from .matrix import delta_weights
from .params import apply_permutation

#: degree cap for the explicit determinant expansion (term count grows
#: like a Fibonacci number)
EXPANSION_CAP = 20


# ---------------------------------------------------------------------------
# scaled (mantissa, exponent) arithmetic

def _snorm(m: float, e: int):
    if m == 0.0:
        return (0.0, 0)
    m, d = math.frexp(m)
    return (m, e + d)


def _smul(x, y):
    return _snorm(x[0] * y[0], x[1] + y[1])


def _sdiv(x, y):
    return _snorm(x[0] / y[0], x[1] - y[1])


def _sfloat(x) -> float:
    return math.ldexp(x[0], x[1])


def _sprod(values):
    acc = (1.0, 0)
    for v in values:
        acc = _smul(acc, _snorm(v, 0))
    return acc


def _srel(x, y) -> float:
    """Relative difference of two scaled values (floor 1 in float terms)."""
    hi = max(x[1], y[1], 1)
    diff = abs(math.ldexp(x[0], x[1] - hi) - math.ldexp(y[0], y[1] - hi))
    scale = max(math.ldexp(1.0, -hi), abs(math.ldexp(x[0], x[1] - hi)), abs(math.ldexp(y[0], y[1] - hi)))
    return diff / scale


# ---------------------------------------------------------------------------
# recurrence evaluation

def poly_recurrence_scaled(coeffs: CoefficientSet, energy: float, upto: int | None = None):
    """p_0(E)..p_upto(E) as (mantissa, exponent) pairs (default upto = M+1)."""
    M = coeffs.M
    if upto is None:
        upto = M + 1
    if not 0 <= upto <= M + 1:
        raise ValueError(f"upto must lie in 0..{M+1}, got {upto!r}")
    out = [(1.0, 0)]
    if upto == 0:
        return out
    g = coeffs.recurrence_products()
    prev = (1.0, 0)
    cur = _snorm(energy - coeffs.b[0], 0)
    out.append(cur)
    for k in range(1, upto):
        t1 = (energy - coeffs.b[k]) * cur[0]
        t2 = g[k] * prev[0]
        e = max(cur[1], prev[1])
        m = math.ldexp(t1, cur[1] - e) - math.ldexp(t2, prev[1] - e)
        nxt = _snorm(m, e)
        out.append(nxt)
        prev, cur = cur, nxt
    return out


def poly_recurrence(coeffs: CoefficientSet, energy: float, upto: int | None = None):
    """p_0(E)..p_upto(E) as plain floats."""
    return [_sfloat(x) for x in poly_recurrence_scaled(coeffs, energy, upto)]


def poly_derivatives(coeffs: CoefficientSet, energy: float, upto: int | None = None):
    """(p_k(E), p_k'(E)) lists from the differentiated recurrence."""
    M = coeffs.M
    if upto is None:
        upto = M + 1
    if not 0 <= upto <= M + 1:
        raise ValueError(f"upto must lie in 0..{M+1}, got {upto!r}")
    p = [1.0]
    dp = [0.0]
    if upto == 0:
        return p, dp
    g = coeffs.recurrence_products()
    p.append(energy - coeffs.b[0])
    dp.append(1.0)
    for k in range(1, upto):
        p.append((energy - coeffs.b[k]) * p[k] - g[k] * p[k - 1])
        dp.append(p[k] + (energy - coeffs.b[k]) * dp[k] - g[k] * dp[k - 1])
    return p, dp


def char_poly(coeffs: CoefficientSet, energy: float):
    """(p_{M+1}(E), scale) with scale = max(1, |p_k(E)|) along the recurrence."""
    seq = poly_recurrence(coeffs, energy)
    return seq[-1], max(1.0, max(abs(x) for x in seq[:-1]))


# ---------------------------------------------------------------------------
# explicit determinant expansion

def _nonadjacent_subsets(limit: int):
    """All subsets of {1..limit} without adjacent members, as sorted tuples."""
    if limit <= 0:
        yield ()
        return
    yield from _nonadjacent_subsets(limit - 1)
    for s in _nonadjacent_subsets(limit - 2):
        yield s + (limit,)


def poly_expansion(coeffs: CoefficientSet, energy: float, k: int) -> float:
    """p_k(E) summed over non-adjacent transposition sets of the k x k minor."""
    M = coeffs.M
    if not 0 <= k <= M + 1:
        raise ValueError(f"degree must lie in 0..{M+1}, got {k!r}")
    if k > EXPANSION_CAP:
        raise ExpansionTooLarge(f"expansion of degree {k} exceeds cap {EXPANSION_CAP}")
    b = coeffs.b
    g = coeffs.recurrence_products()
    total = 0.0
    for subset in _nonadjacent_subsets(k - 1):
        term = -1.0 if len(subset) % 2 else 1.0
        skip = set()
        for j in subset:
            term *= g[j]
            skip.add(j)
            skip.add(j + 1)
        for j in range(1, k + 1):
            if j not in skip:
                term *= energy - b[j - 1]
        total += term
    return total


# ---------------------------------------------------------------------------
# eigenvectors and the orthogonality data

def eigenvector(coeffs: CoefficientSet, energy: float, *, onshell_tol: float = 1e-8):
    """Normalized components f_k(E) for an on-shell energy; f_0 = 1."""
    M = coeffs.M
    scaled = poly_recurrence_scaled(coeffs, energy)
    seq = [_sfloat(x) for x in scaled]
    scale = max(1.0, max(abs(x) for x in seq[:-1]))
    if abs(seq[M + 1]) > onshell_tol * scale:
        raise OffShell(
            f"p_(M+1)({energy!r}) = {seq[M+1]!r} exceeds {onshell_tol} * {scale!r}; energy off shell"
        )
    f = [1.0]
    den = (1.0, 0)
    for k in range(1, M + 1):
        den = _smul(den, _snorm(coeffs.a_tilde[M - k + 1], 0))
        f.append(_sfloat(_sdiv(scaled[k], den)))
    return f


def weights_closed_form(params, ctx=None):
    """Weights Delta_k in the closed theta-ratio form (duplication-simplified)."""
    sc = (params.theta_context() if ctx is None else ctx).scaled
    u1, u2 = params.u[0], params.u[1]
    M = params.M
    up = apply_permutation(2, params.u)
    vp = apply_permutation(2, params.v)
    base = sc(1, 2.0 * u1)
    out = [1.0]
    layer = 1.0
    for k in range(1, M + 1):
        inner = 1.0
        for r in range(1, 5):
            inner *= sc(r, u2 - up[r - 1] + M + 1 - k) * sc(r, u2 - vp[r - 1] + M + 0.5 - k)
            inner /= sc(r, u1 - params.u[r - 1] + k) * sc(r, u1 - params.v[r - 1] - 0.5 + k)
        layer *= inner
        out.append(sc(1, 2.0 * u1 + 2.0 * k) / base * layer)
    return tuple(out)


def weights(coeffs: CoefficientSet, params, ctx=None, *, tol: float = 1e-10):
    """Weights Delta_k by the band-ratio product, cross-checked against the
    closed theta-ratio form (the two must agree to tol)."""
    ratio = delta_weights(coeffs)
    closed = weights_closed_form(params, ctx)
    for k in range(params.M + 1):
        if not ratio[k] > 0.0:
            raise InvariantViolation(f"weight positivity fails: Delta_{k} = {ratio[k]!r}")
        if abs(ratio[k] - closed[k]) > tol * max(1.0, abs(ratio[k]), abs(closed[k])):
            raise FormMismatch(
                f"Delta_{k}: ratio form {ratio[k]!r} vs closed theta form {closed[k]!r}"
            )
    return ratio


def _values_of(spectrum):
    return tuple(getattr(spectrum, "values", spectrum))


def epsilons(coeffs: CoefficientSet, spectrum, *, product_tol: float = 1e-10,
             strict: bool = True):
    """Reflection constants eps_j = pt_M(E_j)/(a_1..a_M) and their permuted partners.

    With strict=True, checks eps_j * ept_j = 1 to product_tol and the exact
    sign ladder sign(eps_j) = (-1)^j; strict=False returns raw values.
    """
    values = _values_of(spectrum)
    M = coeffs.M
    pc = coeffs.permuted()
    prod_a = _sprod(coeffs.a[1:])
    prod_at = _sprod(coeffs.a_tilde[1:])
    eps = []
    eps_tilde = []
    for j, energy in enumerate(values):
        pm_perm = poly_recurrence_scaled(pc, energy, M)[M]
        pm = poly_recurrence_scaled(coeffs, energy, M)[M]
        ej = _sfloat(_sdiv(pm_perm, prod_a))
        etj = _sfloat(_sdiv(pm, prod_at))
        if strict:
            want = -1.0 if j % 2 else 1.0
            if ej == 0.0 or etj == 0.0 or math.copysign(1.0, ej) != want or math.copysign(1.0, etj) != want:
                raise SignPatternViolation(
                    f"sign(eps_{j}) = {math.copysign(1.0, ej)!r}, expected {want!r} (eps = {ej!r})"
                )
            if abs(ej * etj - 1.0) > product_tol:
                raise ProductIdentityViolation(
                    f"eps_{j} * eps~_{j} = {ej * etj!r} deviates from 1 beyond {product_tol}"
                )
        eps.append(ej)
        eps_tilde.append(etj)
    return tuple(eps), tuple(eps_tilde)


def _gap_products(values):
    return [
        _sprod(abs(energy - other) for l, other in enumerate(values) if l != j)
        for j, energy in enumerate(values)
    ]


def norms_theta_form(coeffs: CoefficientSet, spectrum, eps, params, ctx=None):
    """N_j with the coefficient product written out as explicit theta ratios."""
    values = _values_of(spectrum)
    sc = (params.theta_context() if ctx is None else ctx).scaled
    u1 = params.u[0]
    inv = (1.0, 0)
    for k in range(1, coeffs.M + 1):
        for r in range(1, 5):
            inv = _smul(inv, _snorm(sc(r, u1 + k) / sc(r, u1 - params.u[r - 1] + k), 0))
            inv = _smul(
                inv, _snorm(sc(r, u1 - 0.5 + k) / sc(r, u1 - params.v[r - 1] - 0.5 + k), 0)
            )
    gaps = _gap_products(values)
    return tuple(
        _sfloat(_smul(_sdiv(inv, _snorm(abs(eps[j]), 0)), gaps[j]))
        for j in range(len(values))
    )


def norms(coeffs: CoefficientSet, spectrum, eps, params=None, ctx=None, *, tol: float = 1e-9):
    """Quadratic norms N_j = (|eps_j| a_1..a_M)^{-1} prod_{l != j} |E_j - E_l|.

    When params is given, the expanded theta-ratio form of the same
    quantity is evaluated as well and must agree to tol.
    """
    values = _values_of(spectrum)
    prod_a = _sprod(coeffs.a[1:])
    gaps = _gap_products(values)
    out = []
    for j in range(len(values)):
        nj = _sfloat(_sdiv(gaps[j], _smul(_snorm(abs(eps[j]), 0), prod_a)))
        if not nj > 0.0:
            raise InvariantViolation(f"norm positivity fails: N_{j} = {nj!r}")
        out.append(nj)
    if params is not None:
        other = norms_theta_form(coeffs, spectrum, eps, params, ctx)
        for j in range(len(values)):
            if abs(out[j] - other[j]) > tol * max(1.0, abs(out[j]), abs(other[j])):
                raise FormMismatch(
                    f"N_{j}: compact form {out[j]!r} vs theta-ratio form {other[j]!r}"
                )
    return tuple(out)


def christoffel_darboux_check(coeffs: CoefficientSet, x: float, y: float, n: int):
    """Relative residuals of the two summation identities for p_0..p_{n+1}.

    First: sum_k p_k(x) p_k(y) / Pi_k against the cross-difference of the
    top pair divided by (x - y) Pi_n.  Second (confluent): the same at
    y -> x with the derivative recurrence supplying p'.
    """
    M = coeffs.M
    if not 0 <= n <= M:
        raise ValueError(f"n must lie in 0..{M}, got {n!r}")
    if x == y:
        raise ValueError("the two-point identity needs x != y")
    g = coeffs.recurrence_products()
    pi = [1.0]
    for k in range(1, n + 1):
        pi.append(pi[-1] * g[k])
    px = poly_recurrence(coeffs, x, n + 1)
    py = poly_recurrence(coeffs, y, n + 1)
    lhs = math.fsum(px[k] * py[k] / pi[k] for k in range(n + 1))
    rhs = (px[n + 1] * py[n] - px[n] * py[n + 1]) / ((x - y) * pi[n])
    res_xy = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))

    p, dp = poly_derivatives(coeffs, x, n + 1)
    lhs_c = math.fsum(px[k] * px[k] / pi[k] for k in range(n + 1))
    rhs_c = (dp[n + 1] * p[n] - dp[n] * p[n + 1]) / pi[n]
    res_confluent = abs(lhs_c - rhs_c) / max(1.0, abs(lhs_c), abs(rhs_c))
    return res_xy, res_confluent


def heun_functions(coeffs: CoefficientSet, spectrum, eps=None, *, onshell_tol: float = 1e-8):
    """Matrix h[k, j] = |eps_j|^{1/2} f_k(E_j); column j solves H h = E_j h."""
    values = _values_of(spectrum)
    if eps is None:
        eps, _ = epsilons(coeffs, spectrum)
    n = coeffs.M + 1
    h = np.empty((n, n))
    for j, energy in enumerate(values):
        f = eigenvector(coeffs, energy, onshell_tol=onshell_tol)
        h[:, j] = math.sqrt(abs(eps[j])) * np.asarray(f)
    return h


def heun_lattice_weights(coeffs: CoefficientSet):
    """w_k = prod_{1<=l<=k} at_{M+1-l} * prod_{k<l<=M} a_l, the asymmetric lattice weight."""
    M = coeffs.M
    out = []
    for k in range(M + 1):
        acc = (1.0, 0)
        for l in range(1, k + 1):
            acc = _smul(acc, _snorm(coeffs.a_tilde[M + 1 - l], 0))
        for l in range(k + 1, M + 1):
            acc = _smul(acc, _snorm(coeffs.a[l], 0))
        out.append(_sfloat(acc))
    return tuple(out)


@dataclass(frozen=True)
class RacahMatrix:
    """Eigenvector matrix F, its closed-form inverse, and det(F) three ways."""

    F: np.ndarray
    inverse: np.ndarray
    det: float
    det_vandermonde: float
    det_weight_form: float


def racah_matrix(coeffs: CoefficientSet, spectrum, *, inv_tol: float = 1e-8,
                 det_tol: float = 1e-7, onshell_tol: float = 1e-8) -> RacahMatrix:
    """F = [f(E_0) .. f(E_M)] with inverse N^{-1} F^T Delta and det(F) computed by
    LU elimination, by the Vandermonde product form, and by the norm/weight form;
    all three must agree to det_tol and F^{-1} F = I to inv_tol."""
    values = _values_of(spectrum)
    M = coeffs.M
    n = M + 1
    F = np.column_stack(
        [eigenvector(coeffs, energy, onshell_tol=onshell_tol) for energy in values]
    )
    eps, _ = epsilons(coeffs, spectrum)
    delta = np.asarray(delta_weights(coeffs))
    nrm = np.asarray(norms(coeffs, spectrum, eps))
    inverse = (F.T * delta[None, :]) / nrm[:, None]
    resid = float(np.max(np.abs(inverse @ F - np.eye(n))))
    if resid > inv_tol:
        raise FormMismatch(f"F^-1 F deviates from identity by {resid!r} (> {inv_tol})")

    det_lu = float(np.linalg.det(F))
    sign = -1.0 if (M * (M + 1) // 2) % 2 else 1.0

    vand = (sign, 0)
    for l in range(1, M + 1):
        for _ in range(l):
            vand = _sdiv(vand, _snorm(coeffs.a_tilde[l], 0))
    for j in range(n):
        for k in range(j + 1, n):
            vand = _smul(vand, _snorm(values[j] - values[k], 0))
    det_vand = _sfloat(vand)

    wform = (sign, 0)
    for l in range(n):
        wform = _smul(wform, _snorm(math.sqrt(nrm[l] / delta[l]), 0))
    det_w = _sfloat(wform)

    for lhs, rhs, tag in (
        (det_lu, det_vand, "elimination vs product form"),
        (det_lu, det_w, "elimination vs norm/weight form"),
        (det_vand, det_w, "product form vs norm/weight form"),
    ):
        if abs(lhs - rhs) > det_tol * max(1.0, abs(lhs), abs(rhs)):
            raise FormMismatch(f"det(F) {tag}: {lhs!r} vs {rhs!r}")
    return RacahMatrix(F=F, inverse=inverse, det=det_lu,
                       det_vandermonde=det_vand, det_weight_form=det_w)


def epsilon_product_identities(coeffs: CoefficientSet, spectrum, eps=None):
    """Residuals of the two determinant-comparison product identities:
    prod_j eps_j against +-prod (at_l/a_l)^l, and prod_j p_M(E_j) against
    +-prod (a_l at_{M+1-l})^l."""
    values = _values_of(spectrum)
    M = coeffs.M
    if eps is None:
        eps, _ = epsilons(coeffs, spectrum)
    sign = -1.0 if (M * (M + 1) // 2) % 2 else 1.0

    lhs1 = _sprod(eps)
    rhs1 = (sign, 0)
    for l in range(1, M + 1):
        for _ in range(l):
            rhs1 = _smul(rhs1, _snorm(coeffs.a_tilde[l] / coeffs.a[l], 0))
    res1 = _srel(lhs1, rhs1)

    lhs2 = (1.0, 0)
    for energy in values:
        lhs2 = _smul(lhs2, poly_recurrence_scaled(coeffs, energy, M)[M])
    rhs2 = (sign, 0)
    for l in range(1, M + 1):
        for _ in range(l):
            rhs2 = _smul(rhs2, _snorm(coeffs.a[l] * coeffs.a_tilde[M + 1 - l], 0))
    res2 = _srel(lhs2, rhs2)
    return res1, res2


@dataclass(frozen=True)
class RacahTable:
    """Everything the eigenbasis carries, on shell."""

    spectrum: tuple[float, ...]
    p: np.ndarray                 # p[k, j] = p_k(E_j), k = 0..M
    char_residual: tuple[float, ...]
    f: np.ndarray                 # f[k, j] = f_k(E_j)
    delta: tuple[float, ...]
    norms: tuple[float, ...]
    eps: tuple[float, ...]
    eps_tilde: tuple[float, ...]
    h: np.ndarray                 # h[k, j] = |eps_j|^(1/2) f_k(E_j)


def racah_table(coeffs: CoefficientSet, spectrum, params, ctx=None, *,
                onshell_tol: float = 1e-8) -> RacahTable:
    """Assemble the full on-shell table with the dual-form checks enabled."""
    values = _values_of(spectrum)
    M = coeffs.M
    n = M + 1
    pmat = np.empty((n, n))
    fmat = np.empty((n, n))
    resid = []
    for j, energy in enumerate(values):
        seq = poly_recurrence(coeffs, energy)
        scale = max(1.0, max(abs(x) for x in seq[:-1]))
        resid.append(abs(seq[-1]) / scale)
        pmat[:, j] = seq[:-1]
        fmat[:, j] = eigenvector(coeffs, energy, onshell_tol=onshell_tol)
    eps, eps_tilde = epsilons(coeffs, spectrum)
    delta = weights(coeffs, params, ctx)
    nrm = norms(coeffs, spectrum, eps, params, ctx)
    h = heun_functions(coeffs, spectrum, eps, onshell_tol=onshell_tol)
    return RacahTable(
        spectrum=values,
        p=pmat,
        char_residual=tuple(resid),
        f=fmat,
        delta=delta,
        norms=nrm,
        eps=eps,
        eps_tilde=eps_tilde,
        h=h,
    )
