"""Trigonometric (p -> 0) degeneration: basic hypergeometric polynomials on the
unit circle, their closed-form spectra, weights, norms and inverses, the
zero-potential slice, and numerical convergence of the elliptic pipeline onto
all of it.

With q = e^{i alpha} and

    a = -q^(u1+u2-1),  b = -q^(u1-u2),  c = -q^(u1+v2-1/2),  d = -q^(u2+v1-1/2),

the truncation alpha (u1+u2+M) = pi makes a q^(M+1) = 1.  The degree-k member
of the orthogonal family is the terminating series

    R_k(x(x)) = phi43(q^-k, ab q^(k+1), q^-x, cd q^(x+1); aq, bdq, cq; q, q),
    x(x) = cd q^(x+1) + q^(-x),

whose k <-> x, (a,b) <-> (c,d) duality is manifest.  Everything the elliptic
pipeline produces must converge onto the closed trigonometric forms below as
p -> 0; the sweep report quantifies that decay.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientSet, lattice_coeffs
from .errors import (
    DegenerateSpectrum,
    DenominatorPoleBeforeTermination,
    FormMismatch,
    ImaginaryLeak,
    NonConvergence,
)
from .matrix import HeunMatrix
from .params import CouplingParams, permute_index, validate
from .racah import eigenvector
from .spectra import eigenvalues
from .theta import ThetaContext

#: default nome sweep for the convergence report (successive halving)
DEFAULT_P_SWEEP = (1e-2, 5e-3, 2.5e-3, 1.25e-3)

_IMAG_TOL = 1e-10
_POLE_TOL = 1e-13


def _real(value: complex, what: str, tol: float = _IMAG_TOL) -> float:
    if abs(value.imag) > tol * max(1.0, abs(value.real)):
        raise ImaginaryLeak(f"{what} = {value!r} has imaginary part beyond {tol}")
    return value.real


def qpow(alpha: float, exponent: float) -> complex:
    """q^exponent for q = e^{i alpha}, evaluated as a phase (any real exponent)."""
    return cmath.exp(1j * alpha * exponent)


def qpochhammer(z: complex, q: complex, n: int) -> complex:
    """(z; q)_n = prod_{0<=l<n} (1 - z q^l); empty product is 1."""
    if n < 0:
        raise ValueError(f"Pochhammer length must be nonnegative, got {n!r}")
    out = 1.0 + 0.0j
    zq = complex(z)
    for _ in range(n):
        out *= 1.0 - zq
        zq *= q
    return out


def qpochhammer_multi(zs, q: complex, n: int) -> complex:
    """(z_1, ..., z_s; q)_n = prod_i (z_i; q)_n."""
    out = 1.0 + 0.0j
    for z in zs:
        out *= qpochhammer(z, q, n)
    return out


def basic_phi(numerators, denominators, q: complex, z: complex, terms: int,
              *, pole_tol: float = _POLE_TOL) -> complex:
    """Terminating basic hypergeometric partial sum

        sum_{n=0}^{terms} prod_i (a_i; q)_n / ((q; q)_n prod_j (b_j; q)_n) z^n,

    accumulated by term ratios.  Raises if a denominator Pochhammer factor
    vanishes before the requested termination order."""
    term = 1.0 + 0.0j
    total = term
    qn = 1.0 + 0.0j
    for n in range(terms):
        num = 1.0 + 0.0j
        for a in numerators:
            num *= 1.0 - a * qn
        den = 1.0 - q * qn
        for b in denominators:
            fac = 1.0 - b * qn
            if abs(fac) < pole_tol:
                raise DenominatorPoleBeforeTermination(
                    f"denominator factor (1 - b q^{n}) = {fac!r} vanished before term {terms}"
                )
            den *= fac
        if abs(den) < pole_tol:
            raise DenominatorPoleBeforeTermination(
                f"denominator vanished at term ratio {n} before term {terms}"
            )
        term *= num / den * z
        total += term
        qn *= q
    return total


def phi43(numerators, denominators, q: complex, z: complex, k: int) -> complex:
    """Terminating 4phi3; the first numerator parameter q^-k stops the sum at n = k."""
    if len(numerators) != 4 or len(denominators) != 3:
        raise ValueError("phi43 takes 4 numerator and 3 denominator parameters")
    return basic_phi(numerators, denominators, q, z, k)


@dataclass(frozen=True)
class QRacahParams:
    """Unit-circle hypergeometric parameters of the trigonometric limit."""

    q: complex
    a: complex
    b: complex
    c: complex
    d: complex
    M: int

    @classmethod
    def from_coupling(cls, params: CouplingParams, *, truncation_tol: float = 1e-12):
        alpha = params.alpha
        u1, u2 = params.u[0], params.u[1]
        v1, v2 = params.v[0], params.v[1]
        qp = cls(
            q=qpow(alpha, 1.0),
            a=-qpow(alpha, u1 + u2 - 1.0),
            b=-qpow(alpha, u1 - u2),
            c=-qpow(alpha, u1 + v2 - 0.5),
            d=-qpow(alpha, u2 + v1 - 0.5),
            M=params.M,
        )
        trunc = qp.a * qp.q ** (params.M + 1)
        if abs(trunc - 1.0) > truncation_tol:
            raise FormMismatch(f"truncation a q^(M+1) = {trunc!r} deviates from 1")
        return qp

    def dual(self) -> "QRacahParams":
        return QRacahParams(q=self.q, a=self.c, b=self.d, c=self.a, d=self.b, M=self.M)

    def x(self, j: int) -> complex:
        return self.c * self.d * self.q ** (j + 1) + self.q ** (-j)

    def x_dual(self, k: int) -> complex:
        return self.a * self.b * self.q ** (k + 1) + self.q ** (-k)

    def poly(self, k: int, j: int) -> complex:
        """R_k at the j-th spectral point."""
        nums = (self.q ** (-k), self.a * self.b * self.q ** (k + 1),
                self.q ** (-j), self.c * self.d * self.q ** (j + 1))
        dens = (self.a * self.q, self.b * self.d * self.q, self.c * self.q)
        return phi43(nums, dens, self.q, self.q, k)


def qracah_poly(k: int, j: int, params: CouplingParams) -> float:
    """R_k(x(j)) for the coupling-parameter mapping; real on shell."""
    qp = QRacahParams.from_coupling(params)
    if not (0 <= k <= qp.M and 0 <= j <= qp.M):
        raise ValueError(f"indices must lie in 0..{qp.M}, got k={k!r}, j={j!r}")
    return _real(qp.poly(k, j), f"R_{k}(x({j}))")


def _poly_matrix(qp: QRacahParams) -> np.ndarray:
    out = np.empty((qp.M + 1, qp.M + 1))
    for k in range(qp.M + 1):
        for j in range(qp.M + 1):
            out[k, j] = _real(qp.poly(k, j), f"R_{k}(x({j}))")
    return out


def recurrence_A(k: int, qp: QRacahParams) -> complex:
    q, a, b, c, d = qp.q, qp.a, qp.b, qp.c, qp.d
    return (
        (1 - a * q ** (k + 1)) * (1 - a * b * q ** (k + 1))
        * (1 - b * d * q ** (k + 1)) * (1 - c * q ** (k + 1))
    ) / ((1 - a * b * q ** (2 * k + 1)) * (1 - a * b * q ** (2 * k + 2)))


def recurrence_C(k: int, qp: QRacahParams) -> complex:
    q, a, b, c, d = qp.q, qp.a, qp.b, qp.c, qp.d
    return (
        q * (1 - q ** k) * (1 - b * q ** k) * (c - a * b * q ** k) * (d - a * q ** k)
    ) / ((1 - a * b * q ** (2 * k)) * (1 - a * b * q ** (2 * k + 1)))


def qracah_recurrence_residual(k: int, j: int, qp: QRacahParams) -> float:
    """|A_k R_{k+1} + C_k R_{k-1} + (cdq + 1 - A_k - C_k) R_k - x(j) R_k| on shell.

    A_M vanishes through the truncation, so R_{M+1} is never evaluated; C_0 = 0.
    """
    x = qp.x(j)
    rk = qp.poly(k, j)
    acc = (qp.c * qp.d * qp.q + 1.0) * rk - x * rk
    if k < qp.M:
        ak = recurrence_A(k, qp)
        acc += ak * (qp.poly(k + 1, j) - rk)
    if k > 0:
        ck = recurrence_C(k, qp)
        acc += ck * (qp.poly(k - 1, j) - rk)
    return abs(acc) / max(1.0, abs(x * rk))


# ---------------------------------------------------------------------------
# closed trigonometric forms

def trig_c(r: int, params: CouplingParams) -> float:
    """Limit value of the diagonal constants c_r."""
    h = 0.5 * params.alpha
    w = params.u_virtual
    i1 = permute_index(r, 1)
    i2 = permute_index(r, 2)
    return (
        2.0
        * math.sin(h * (params.u[i1 - 1] - 0.5)) * math.sin(h * params.v[i1 - 1])
        * math.cos(h * (params.u[i2 - 1] - 0.5)) * math.cos(h * params.v[i2 - 1])
        / (math.sin(h * w) * math.sin(h * (w + 1.0)))
    )


def trig_A(z: float, params: CouplingParams) -> float:
    """Limit of the step coefficient A."""
    h = 0.5 * params.alpha
    u1, u2 = params.u[0], params.u[1]
    v1, v2 = params.v[0], params.v[1]
    return (
        math.sin(h * (z + u1)) / math.sin(h * z)
        * math.cos(h * (z + u2)) / math.cos(h * z)
        * math.sin(h * (z + 0.5 + v1)) / math.sin(h * (z + 0.5))
        * math.cos(h * (z + 0.5 + v2)) / math.cos(h * (z + 0.5))
    )


def trig_B(z: float, params: CouplingParams) -> float:
    """Limit of the diagonal coefficient B."""
    h = 0.5 * params.alpha
    w = params.u_virtual
    return (
        trig_c(1, params)
        * math.sin(h * (z + 0.5 + w)) / math.sin(h * (z + 0.5))
        * math.sin(h * (z - 0.5 - w)) / math.sin(h * (z - 0.5))
        + trig_c(2, params)
        * math.cos(h * (z + 0.5 + w)) / math.cos(h * (z + 0.5))
        * math.cos(h * (z - 0.5 - w)) / math.cos(h * (z - 0.5))
        + trig_c(3, params)
        + trig_c(4, params)
    )


def trig_constant(params: CouplingParams) -> float:
    """The z-independent combination A_t(z) + A_t(-z) + B_t(z)."""
    s = params.u[0] + params.u[1] + params.v[0] + params.v[1]
    return 2.0 * math.cos(0.5 * params.alpha * s) + math.fsum(
        trig_c(r, params) for r in range(1, 5)
    )


def trig_eigenvalue(j: int, params: CouplingParams) -> float:
    s = params.u[0] + params.u[1] + params.v[0] + params.v[1]
    return 2.0 * math.cos(0.5 * params.alpha * (2 * j + s)) + math.fsum(
        trig_c(r, params) for r in range(1, 5)
    )


def trig_coefficient_set(params: CouplingParams) -> CoefficientSet:
    """Lattice coefficients of the degenerate pipeline: the general builders run
    on the analytic p -> 0 backend."""
    return lattice_coeffs(params, params.trig_context())


@dataclass(frozen=True)
class TrigSpectrum:
    """Closed-form spectrum of the degenerate problem, sorted descending."""

    values: tuple[float, ...]
    c: tuple[float, float, float, float]
    constant: float

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def trig_spectrum(params: CouplingParams) -> TrigSpectrum:
    vals = tuple(trig_eigenvalue(j, params) for j in range(params.M + 1))
    for j in range(params.M):
        if not vals[j] > vals[j + 1]:
            raise DegenerateSpectrum(
                f"closed-form values not strictly descending at {j}: {vals[j]!r} vs {vals[j+1]!r}"
            )
    return TrigSpectrum(
        values=vals,
        c=tuple(trig_c(r, params) for r in range(1, 5)),
        constant=trig_constant(params),
    )


def trig_weight(k: int, params: CouplingParams) -> float:
    """Weight Delta_{t,k} in closed product form."""
    al = params.alpha
    h = 0.5 * al
    u1, u2 = params.u[0], params.u[1]
    v1, v2 = params.v[0], params.v[1]
    M = params.M
    out = math.sin(al * (u1 + k)) / math.sin(al * u1)
    for l in range(1, k + 1):
        out *= (
            math.sin(h * (M + 1 - l)) * math.sin(h * (u2 - v2 + M + 0.5 - l))
            / (math.sin(h * l) * math.sin(h * (u1 - v1 - 0.5 + l)))
            * math.cos(h * (u2 - u1 + M + 1 - l)) * math.cos(h * (u2 - v1 + M + 0.5 - l))
            / (math.cos(h * (u1 - u2 + l)) * math.cos(h * (u1 - v2 - 0.5 + l)))
        )
    return out


def standard_qracah_weight(k: int, qp: QRacahParams) -> float:
    """The standard orthogonality weight of the terminating family,

        (cq, bdq, aq, abq; q)_k / (q, ab/c q, a/d q, bq; q)_k
        * (1 - ab q^(2k+1)) / ((cdq)^k (1 - ab q)),

    real for the unit-circle parameter mapping."""
    q, a, b, c, d = qp.q, qp.a, qp.b, qp.c, qp.d
    num = qpochhammer_multi((c * q, b * d * q, a * q, a * b * q), q, k)
    den = qpochhammer_multi((q, a * b * q / c, a * q / d, b * q), q, k)
    val = num / den * (1 - a * b * q ** (2 * k + 1)) / ((c * d * q) ** k * (1 - a * b * q))
    return _real(val, f"weight_{k}")


def trig_dual_weight(j: int, params: CouplingParams) -> float:
    """Dual weight Delta^_{t,j} in closed product form."""
    h = 0.5 * params.alpha
    u1, u2 = params.u[0], params.u[1]
    v1, v2 = params.v[0], params.v[1]
    M = params.M
    s = u1 + u2 + v1 + v2
    out = math.sin(h * (s + 2 * j)) / math.sin(h * s)
    for l in range(1, j + 1):
        out *= (
            math.sin(h * (M + 1 - l)) * math.sin(h * (u2 - v2 + M + 0.5 - l))
            / (math.sin(h * l) * math.sin(h * (u2 + v2 - 0.5 + l)))
            * math.cos(h * (-v1 - v2 + M + 1 - l)) * math.cos(h * (u2 - v1 + M + 0.5 - l))
            / (math.cos(h * (v1 + v2 + l)) * math.cos(h * (u2 + v1 - 0.5 + l)))
        )
    return out


def trig_epsilon_inv_series(j: int, params: CouplingParams) -> float:
    """eps_{t,j}^{-1} as the balanced 3phi2 left after the truncation collapses
    the top-degree 4phi3."""
    al = params.alpha
    q = qpow(al, 1.0)
    u1, u2 = params.u[0], params.u[1]
    v1, v2 = params.v[0], params.v[1]
    nums = (-qpow(al, u1 - u2), qpow(al, -j), qpow(al, u1 + u2 + v1 + v2 + j))
    dens = (qpow(al, u1 + v1 + 0.5), -qpow(al, u1 + v2 + 0.5))
    return _real(basic_phi(nums, dens, q, q, j), f"eps_inv_series({j})")


def trig_epsilon_inv_poch(j: int, params: CouplingParams) -> float:
    """The same via the closed Pochhammer-ratio evaluation of the balanced sum."""
    al = params.alpha
    q = qpow(al, 1.0)
    u1, u2 = params.u[0], params.u[1]
    v1, v2 = params.v[0], params.v[1]
    num = qpochhammer_multi(
        (-qpow(al, u2 + v1 + 0.5), qpow(al, -u2 - v2 + 0.5 - j)), q, j
    )
    den = qpochhammer_multi(
        (qpow(al, u1 + v1 + 0.5), -qpow(al, -u1 - v2 + 0.5 - j)), q, j
    )
    return _real(num / den, f"eps_inv_poch({j})")


def trig_epsilon_inv_product(j: int, params: CouplingParams) -> float:
    """The same as the manifestly real alternating trig product."""
    h = 0.5 * params.alpha
    u1, u2 = params.u[0], params.u[1]
    v1, v2 = params.v[0], params.v[1]
    out = -1.0 if j % 2 else 1.0
    for l in range(j):
        out *= (
            math.sin(h * (u2 + v2 + 0.5 + l)) / math.sin(h * (u1 + v1 + 0.5 + l))
            * math.cos(h * (u2 + v1 + 0.5 + l)) / math.cos(h * (u1 + v2 + 0.5 + l))
        )
    return out


def trig_norm_total(params: CouplingParams) -> float:
    """N_{t,0} = sum_k Delta_{t,k} in closed product form."""
    h = 0.5 * params.alpha
    u1, u2 = params.u[0], params.u[1]
    v1, v2 = params.v[0], params.v[1]
    out = 1.0
    for l in range(1, params.M + 1):
        out *= (
            math.sin(h * (2 * u1 + l)) * math.sin(h * (u1 + u2 + v1 + v2 + l))
            / (math.sin(h * (u1 - v1 - 0.5 + l)) * math.sin(h * (u2 + v2 - 0.5 + l)))
        )
    return out


@dataclass(frozen=True)
class TrigTables:
    """Closed-form trigonometric data, cross-checked on construction."""

    spectrum: TrigSpectrum
    f: np.ndarray                     # f[k, j] = R_k(x(j))
    delta: tuple[float, ...]
    delta_dual: tuple[float, ...]
    norms: tuple[float, ...]
    eps: tuple[float, ...]
    norm_total: float


def trig_tables(params: CouplingParams, *, form_tol: float = 1e-10,
                sum_tol: float = 1e-9) -> TrigTables:
    """Every closed trigonometric quantity, with the dual-route agreements:
    weights against the standard q-form, eps against both the balanced-sum
    evaluation and the Pochhammer ratio, norms against the eigenvalue-gap
    form, and the three expressions of the total mass."""
    M = params.M
    qp = QRacahParams.from_coupling(params)
    spec = trig_spectrum(params)
    f = _poly_matrix(qp)

    delta = []
    for k in range(M + 1):
        d1 = trig_weight(k, params)
        d2 = standard_qracah_weight(k, qp)
        if abs(d1 - d2) > form_tol * max(1.0, abs(d1), abs(d2)):
            raise FormMismatch(f"Delta_t[{k}]: trig form {d1!r} vs q-form {d2!r}")
        delta.append(d1)

    delta_dual = []
    for j in range(M + 1):
        d1 = trig_dual_weight(j, params)
        d2 = standard_qracah_weight(j, qp.dual())
        if abs(d1 - d2) > form_tol * max(1.0, abs(d1), abs(d2)):
            raise FormMismatch(f"dual Delta_t[{j}]: trig form {d1!r} vs q-form {d2!r}")
        delta_dual.append(d1)

    eps = []
    for j in range(M + 1):
        inv_series = trig_epsilon_inv_series(j, params)
        inv_poch = trig_epsilon_inv_poch(j, params)
        inv_prod = trig_epsilon_inv_product(j, params)
        for lhs, rhs, tag in (
            (inv_series, inv_prod, "balanced sum vs trig product"),
            (inv_poch, inv_prod, "Pochhammer ratio vs trig product"),
        ):
            if abs(lhs - rhs) > form_tol * max(1.0, abs(lhs), abs(rhs)):
                raise FormMismatch(f"eps_t^-1[{j}] {tag}: {lhs!r} vs {rhs!r}")
        want = -1.0 if j % 2 else 1.0
        if math.copysign(1.0, inv_prod) != want:
            raise FormMismatch(f"sign(eps_t[{j}]) != (-1)^{j}")
        eps.append(1.0 / inv_prod)

    total = trig_norm_total(params)
    s_delta = math.fsum(delta)
    s_dual = math.fsum(delta_dual)
    for lhs, tag in ((s_delta, "sum of weights"), (s_dual, "sum of dual weights")):
        if abs(lhs - total) > sum_tol * max(1.0, abs(lhs), abs(total)):
            raise FormMismatch(f"norm total: {tag} {lhs!r} vs closed form {total!r}")

    # quadratic norms: eigenvalue-gap form against N_{t,0} / dual weight
    at = [trig_A(-params.u[0] - k, params) for k in range(M + 1)]
    prod_a = math.prod(at[1:]) if M else 1.0
    norms_list = []
    for j in range(M + 1):
        gaps = math.prod(
            spec.values[j] - spec.values[l] for l in range(M + 1) if l != j
        ) if M else 1.0
        n1 = gaps / (eps[j] * prod_a)
        n2 = total / delta_dual[j]
        if abs(n1 - n2) > sum_tol * max(1.0, abs(n1), abs(n2)):
            raise FormMismatch(f"N_t[{j}]: gap form {n1!r} vs mass/dual-weight form {n2!r}")
        norms_list.append(n1)

    return TrigTables(
        spectrum=spec,
        f=f,
        delta=tuple(delta),
        delta_dual=tuple(delta_dual),
        norms=tuple(norms_list),
        eps=tuple(eps),
        norm_total=total,
    )


def trig_racah_matrix(tables: TrigTables, *, inv_tol: float = 1e-8, det_tol: float = 1e-7):
    """(F_t, F_t^{-1}, det F_t) with the closed-form inverse and determinant checked."""
    f = tables.f
    n = f.shape[0]
    dd = np.asarray(tables.delta_dual)
    d = np.asarray(tables.delta)
    inverse = (dd[:, None] * f.T * d[None, :]) / tables.norm_total
    resid = float(np.max(np.abs(inverse @ f - np.eye(n))))
    if resid > inv_tol:
        raise FormMismatch(f"F_t^-1 F_t deviates from identity by {resid!r}")
    det_lu = float(np.linalg.det(f))
    M = n - 1
    sign = -1.0 if (M * (M + 1) // 2) % 2 else 1.0
    det_closed = sign * tables.norm_total ** (0.5 * n) / math.sqrt(
        math.prod(tables.delta[l] * tables.delta_dual[l] for l in range(n))
    )
    if abs(det_lu - det_closed) > det_tol * max(1.0, abs(det_lu), abs(det_closed)):
        raise FormMismatch(f"det(F_t): elimination {det_lu!r} vs closed form {det_closed!r}")
    return f, inverse, det_lu


# ---------------------------------------------------------------------------
# convergence of the elliptic pipeline onto the trigonometric data

@dataclass(frozen=True)
class ConvergenceRow:
    p: float
    j: int
    energy_dev: float
    vector_dev: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def raise_if_failed(self):
        if self.failures:
            raise NonConvergence("; ".join(self.failures))


#: deviations below this are treated as having reached the double-precision
#: floor and are exempt from the decay-ratio requirement
_FLOOR = 1e-12


def trig_limit_convergence(params: CouplingParams, p_values=None, *,
                           decay_ratio: float = 0.75) -> ConvergenceReport:
    """Deviation table |E_j(p) - E_{t,j}| and max_k |f_k(E_j; p) - f_{t,k}(E_{t,j})|
    over a decreasing nome sequence, with monotone-decay and ratio checks."""
    p_values = tuple(DEFAULT_P_SWEEP if p_values is None else p_values)
    if not p_values or any(x <= 0 for x in p_values):
        raise ValueError("the nome sweep must be a nonempty positive sequence")
    if any(b >= a for a, b in zip(p_values, p_values[1:])):
        raise ValueError("the nome sweep must be strictly decreasing")

    M = params.M
    spec_t = trig_spectrum(params)
    f_t = _poly_matrix(QRacahParams.from_coupling(params))

    rows = []
    for p in p_values:
        pe = params.with_nome(p)
        coeffs = lattice_coeffs(pe)
        spec = eigenvalues(HeunMatrix(coeffs))
        for j in range(M + 1):
            fj = eigenvector(coeffs, spec.values[j])
            dev_e = abs(spec.values[j] - spec_t.values[j])
            dev_f = max(abs(fj[k] - f_t[k, j]) for k in range(M + 1))
            rows.append(ConvergenceRow(p=p, j=j, energy_dev=dev_e, vector_dev=dev_f))

    failures = []
    for j in range(M + 1):
        seq = [r for r in rows if r.j == j]
        for prev, cur in zip(seq, seq[1:]):
            for field in ("energy_dev", "vector_dev"):
                a = getattr(prev, field)
                b = getattr(cur, field)
                if b < _FLOOR and a < 10.0 * _FLOOR:
                    continue
                if not b < a:
                    failures.append(
                        f"{field} for j={j} does not decrease from p={prev.p!r} to p={cur.p!r}"
                    )
                elif not b <= decay_ratio * a:
                    failures.append(
                        f"{field} for j={j} decays slower than {decay_ratio} between "
                        f"p={prev.p!r} and p={cur.p!r}"
                    )
    return ConvergenceReport(rows=tuple(rows), failures=tuple(failures))


# ---------------------------------------------------------------------------
# zero-potential slice

_VIRTUAL_CANDIDATES = (0.37, 0.59, 0.73, 1.19, 1.83, 2.41)


def _pick_virtual(period: float) -> float:
    for cand in _VIRTUAL_CANDIDATES:
        ok = True
        for x in (cand, cand + 1.0):
            if abs(x - period * round(x / period)) <= 1e-6:
                ok = False
                break
        if ok:
            return cand
    raise ValueError(f"no admissible virtual parameter found for period {period!r}")


def lame_matrix(u: float, M: int, ctx: ThetaContext | None = None, *,
                p: float | None = None, check: bool = True,
                form_tol: float = 1e-10) -> HeunMatrix:
    """Zero-diagonal matrix of the all-equal-couplings, zero-v slice.

    Built directly from the single-ratio bands t_k = [k]_1/[u+k]_1 evaluated
    with the doubled-period scale 2 pi/(2u+M); both off-diagonals equal t_k
    and the diagonal vanishes identically.  With check=True the general
    pipeline is run at equal couplings (scale pi/(2u+M)) and its bands must
    reproduce t_k through the argument-doubling identity of the label-1
    function, tying the two period conventions together.
    """
    if not u > 0:
        raise ValueError(f"coupling u must be positive, got {u!r}")
    if not (isinstance(M, int) and M >= 0):
        raise ValueError(f"M must be a nonnegative integer, got {M!r}")
    alpha_l = 2.0 * math.pi / (2.0 * u + M)
    if ctx is None:
        if p is None:
            raise ValueError("either a theta context or a nome p is required")
        ctx = ThetaContext(p, alpha_l)
    elif abs(ctx.alpha - alpha_l) > 1e-12 * alpha_l:
        raise ValueError(f"context scale {ctx.alpha!r} != 2 pi/(2u+M) = {alpha_l!r}")

    band = tuple(ctx.scaled(1, float(k)) / ctx.scaled(1, u + k) for k in range(M + 1))
    coeffs = CoefficientSet(
        a=band,
        a_tilde=band,
        b=(0.0,) * (M + 1),
        c=(0.0, 0.0, 0.0, 0.0),
    )
    if check:
        period = 2.0 * (2.0 * u + M)
        general = validate((u,) * 4, (0.0,) * 4, _pick_virtual(period), M, ctx.p)
        gc = lattice_coeffs(general)
        for k in range(M + 1):
            for got, tag in ((gc.a[k], "a"), (gc.a_tilde[k], "at")):
                if abs(got - band[k]) > form_tol * max(1.0, abs(got), abs(band[k])):
                    raise FormMismatch(
                        f"general-pipeline {tag}_{k} = {got!r} vs slice band {band[k]!r}"
                    )
            if gc.b[k] != 0.0:
                raise FormMismatch(f"general-pipeline diagonal b_{k} = {gc.b[k]!r} is not zero")
    return HeunMatrix(coeffs)
