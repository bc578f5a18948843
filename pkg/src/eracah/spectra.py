"""Eigenvalues of the tridiagonal matrix by certified bisection.

The matrix is symmetrized first (positive off-diagonals guarantee this is
possible), then each eigenvalue is bracketed by sign-agreement counting
along the leading-minor recurrence of the shifted symmetric form and
bisected to a relative width of ``bracket_rtol``; a few Newton steps on
the characteristic polynomial, evaluated through the three-term
recurrence, polish the root without leaving its bracket.

Bisection plus counting, rather than QR iteration, because the counts
certify both the number of eigenvalues and their ordering, which the
verification suite relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, InvariantViolation
from .matrix import HeunMatrix, symmetrize
from .racah import poly_derivatives


@dataclass(frozen=True)
class Spectrum:
    """Strictly descending real eigenvalues E_0 > E_1 > ... > E_M."""

    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, idx):
        return self.values[idx]


def _count_below(d, e2, x: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below x."""
    count = 0
    q = 1.0
    for i in range(len(d)):
        q = d[i] - x - (e2[i - 1] / q if i else 0.0)
        if q == 0.0:
            q = -1e-300
        if q < 0.0:
            count += 1
    return count


def eigenvalues(
    H: HeunMatrix,
    *,
    bracket_rtol: float = 1e-13,
    newton_steps: int = 5,
    separation: float = 1e-9,
) -> Spectrum:
    """All M+1 eigenvalues, sorted descending, separation-certified.

    Raises DegenerateSpectrum when adjacent eigenvalues come closer than
    separation times the spectral spread (parameters outside the
    guaranteed domain, or numerical breakdown).
    """
    n = H.size
    coeffs = H.coeffs
    if n == 1:
        return Spectrum((coeffs.b[0],))

    _, d, e = symmetrize(H)
    e2 = e * e
    rad = np.zeros(n)
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    lo = float(np.min(d - rad))
    hi = float(np.max(d + rad))
    pad = 1e-12 * max(hi - lo, 1.0)
    lo -= pad
    hi += pad
    if _count_below(d, e2, lo) != 0 or _count_below(d, e2, hi) != n:
        raise InvariantViolation("eigenvalue count at the spectral bounds is not M+1")

    ascending = []
    for i in range(n):
        a, b = lo, hi
        while (b - a) > bracket_rtol * max(1.0, abs(a), abs(b)):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if _count_below(d, e2, mid) <= i:
                a = mid
            else:
                b = mid
        x = 0.5 * (a + b)
        width = max(b - a, 1e-15 * max(1.0, abs(x)))
        for _ in range(newton_steps):
            p, dp = poly_derivatives(coeffs, x)
            if dp[-1] == 0.0:
                break
            step = p[-1] / dp[-1]
            xn = x - step
            if not (a - 8 * width <= xn <= b + 8 * width) or xn == x:
                break
            x = xn
        ascending.append(x)

    values = tuple(sorted(ascending, reverse=True))
    spread = values[0] - values[-1]
    if not spread > 0.0:
        raise DegenerateSpectrum(f"spectral spread {spread!r} is not positive")
    for j in range(n - 1):
        gap = values[j] - values[j + 1]
        if gap <= separation * spread:
            raise DegenerateSpectrum(
                f"eigenvalues {j} and {j+1} separated by {gap!r} <= {separation} * spread {spread!r}"
            )
    return Spectrum(values)


def residual(H: HeunMatrix, energy: float, f) -> float:
    """max_k |(Hf)_k - E f_k| / ((1 + |E|) max_k |f_k|); zero vectors give 0."""
    fmax = max(abs(x) for x in f)
    if fmax == 0.0:
        return 0.0
    hf = H.apply(f)
    rmax = max(abs(hv - energy * fv) for hv, fv in zip(hf, f))
    return rmax / ((1.0 + abs(energy)) * fmax)
