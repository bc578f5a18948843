"""The (M+1)x(M+1) tridiagonal matrix H and its structural companions.

Entry layout: H[k][k] = b_k, H[k][k-1] = a_k, H[k][k+1] = at_{M-k}.
Reflecting H through its center (conjugation by the exchange matrix J)
equals rebuilding it from (12)(34)-permuted parameters; the bands of the
reflected matrix are available structurally through
``CoefficientSet.permuted``.

Only the three bands are stored; a dense copy exists solely for test
oracles.  Symmetrization uses the orthogonality weights
Delta_k = prod_{l<=k} at_{M+1-l}/a_l as the diagonal similarity, which
doubles as a check of the weight formula: D H D^{-1} must come out
symmetric with off-diagonal sqrt(a_k at_{M+1-k}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientSet, lattice_coeffs
from .errors import InvariantViolation, PositivityViolation
from .params import CouplingParams


@dataclass(frozen=True)
class HeunMatrix:
    coeffs: CoefficientSet

    @property
    def size(self) -> int:
        return self.coeffs.M + 1

    @property
    def diag(self) -> tuple[float, ...]:
        return self.coeffs.b

    @property
    def sub(self) -> tuple[float, ...]:
        """(a_1, ..., a_M): entry (k, k-1) is sub[k-1]."""
        return self.coeffs.a[1:]

    @property
    def sup(self) -> tuple[float, ...]:
        """(at_M, ..., at_1): entry (k, k+1) is sup[k]."""
        return tuple(reversed(self.coeffs.a_tilde[1:]))

    def apply(self, vec):
        """Tridiagonal matrix-vector product."""
        n = self.size
        if len(vec) != n:
            raise ValueError(f"vector length {len(vec)} != {n}")
        d, lo, up = self.diag, self.sub, self.sup
        out = []
        for k in range(n):
            acc = d[k] * vec[k]
            if k > 0:
                acc += lo[k - 1] * vec[k - 1]
            if k < n - 1:
                acc += up[k] * vec[k + 1]
            out.append(acc)
        return out

    def dense(self) -> np.ndarray:
        """Dense copy; test-oracle use only."""
        n = self.size
        out = np.zeros((n, n))
        out[np.arange(n), np.arange(n)] = self.diag
        if n > 1:
            out[np.arange(1, n), np.arange(n - 1)] = self.sub
            out[np.arange(n - 1), np.arange(1, n)] = self.sup
        return out

    def reflected(self) -> "HeunMatrix":
        """J H J, built structurally from the permuted coefficient set."""
        return HeunMatrix(self.coeffs.permuted())

    def trace(self) -> float:
        return math.fsum(self.diag)

    def trace_square(self) -> float:
        """trace(H^2) = sum b_k^2 + 2 sum a_{k+1} at_{M-k}."""
        s = math.fsum(x * x for x in self.diag)
        s += 2.0 * math.fsum(lo * up for lo, up in zip(self.sub, self.sup))
        return s


def build(params: CouplingParams, ctx=None, **kwargs) -> HeunMatrix:
    """Assemble H from the lattice coefficients (invariants checked there)."""
    return HeunMatrix(lattice_coeffs(params, ctx, **kwargs))


def delta_weights(coeffs: CoefficientSet) -> tuple[float, ...]:
    """Orthogonality weights Delta_k = prod_{1<=l<=k} at_{M+1-l} / a_l (Delta_0 = 1)."""
    M = coeffs.M
    out = [1.0]
    for k in range(1, M + 1):
        out.append(out[-1] * coeffs.a_tilde[M + 1 - k] / coeffs.a[k])
    return tuple(out)


def symmetrize(H: HeunMatrix, *, sym_tol: float = 1e-12):
    """Diagonal similarity D = diag(sqrt(Delta_k)) and the symmetric form of H.

    Returns (D, d, e) with S = D H D^{-1} symmetric tridiagonal:
    diagonal d = b, off-diagonal e_k = sqrt(a_{k+1} at_{M-k}).
    """
    c = H.coeffs
    M = c.M
    for k in range(1, M + 1):
        if not (c.a[k] > 0.0 and c.a_tilde[k] > 0.0):
            raise PositivityViolation(
                f"off-diagonal positivity fails at k = {k}: a = {c.a[k]!r}, at = {c.a_tilde[k]!r}"
            )
    D = np.sqrt(np.asarray(delta_weights(c)))
    d = np.asarray(c.b, dtype=float)
    e = np.empty(M, dtype=float) if M else np.empty(0)
    for k in range(1, M + 1):
        ref = math.sqrt(c.a[k] * c.a_tilde[M + 1 - k])
        up = D[k - 1] * c.a_tilde[M + 1 - k] / D[k]
        lo = D[k] * c.a[k] / D[k - 1]
        if abs(up - lo) > sym_tol * max(1.0, abs(up), abs(lo)):
            raise InvariantViolation(
                f"symmetrization residual too large at k = {k}: {up!r} vs {lo!r}"
            )
        e[k - 1] = ref
    return D, d, e
