"""Coupling-parameter domain, validation and half-period permutations.

The admissible domain is

    u_1 > 0,  u_2 > 0,  |v_1| < u_1 + 1/2,  |v_2| < u_2 + 1/2,
    u_3, u_4, v_3, v_4 real,

with the real period tied to the truncation size M through

    alpha = pi / (u_1 + u_2 + M),       M a nonnegative integer,

and a virtual parameter w kept away from the period lattice:
w, w + 1 != 0 mod (2 pi / alpha) Z.  The virtual parameter only shifts
the spectrum by a constant; it never enters the off-diagonal
coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainViolation, VirtualParamSingular
from .theta import ThetaContext, TrigContext

#: images of the indices 1..4 under the four half-period permutations
#: (identity, (12)(34), (13)(24), (14)(23)); each is an involution and
#: they compose as perm[r] o perm[s] = perm[perm[r][s]].
PERMUTATIONS = {
    1: (1, 2, 3, 4),
    2: (2, 1, 4, 3),
    3: (3, 4, 1, 2),
    4: (4, 3, 2, 1),
}

#: default lattice-distance tolerance for the virtual parameter;
#: [w]_1 [w+1]_1 sits in a denominator, so near-zeros amplify error.
VIRTUAL_LATTICE_TOL = 1e-10


def permute_index(r: int, s: int) -> int:
    """Image of index s (1..4) under permutation r (1..4)."""
    return PERMUTATIONS[r][s - 1]


def apply_permutation(r: int, quad):
    """Permute a length-4 tuple: entry s of the result is entry perm_r(s) of the input."""
    img = PERMUTATIONS[r]
    return tuple(quad[img[s] - 1] for s in range(4))


@dataclass(frozen=True)
class CouplingParams:
    """Validated coupling parameters; construct through :func:`validate`."""

    u: tuple[float, float, float, float]
    v: tuple[float, float, float, float]
    u_virtual: float
    M: int
    p: float

    @property
    def alpha(self) -> float:
        return math.pi / (self.u[0] + self.u[1] + self.M)

    def theta_context(self, tol: float = 1e-16) -> ThetaContext:
        return ThetaContext(self.p, self.alpha, tol)

    def trig_context(self) -> TrigContext:
        return TrigContext(self.alpha)

    def with_nome(self, p: float) -> "CouplingParams":
        return validate(self.u, self.v, self.u_virtual, self.M, p)

    def with_virtual(self, u_virtual: float) -> "CouplingParams":
        return validate(self.u, self.v, u_virtual, self.M, self.p)

    def as_dict(self) -> dict:
        return {
            "u1": self.u[0], "u2": self.u[1], "u3": self.u[2], "u4": self.u[3],
            "v1": self.v[0], "v2": self.v[1], "v3": self.v[2], "v4": self.v[3],
            "uu": self.u_virtual, "M": self.M, "p": self.p,
        }


def _lattice_distance(x: float, period: float) -> float:
    return abs(x - period * round(x / period))


def validate(u, v, u_virtual, M, p, *, lattice_tol: float = VIRTUAL_LATTICE_TOL) -> CouplingParams:
    """Validate raw parameters; returns CouplingParams or raises with every violation named."""
    u = tuple(float(x) for x in u)
    v = tuple(float(x) for x in v)
    if len(u) != 4 or len(v) != 4:
        raise DomainViolation(["u and v must each have four entries"])

    violations = []
    for i in (0, 1):
        if not u[i] > 0.0:
            violations.append(f"u{i+1} > 0 fails (u{i+1} = {u[i]!r})")
        if not abs(v[i]) < u[i] + 0.5:
            violations.append(f"|v{i+1}| < u{i+1} + 1/2 fails (v{i+1} = {v[i]!r})")
    if not (isinstance(M, int) and M >= 0):
        violations.append(f"M must be a nonnegative integer (M = {M!r})")
    if not 0.0 < p < 1.0:
        violations.append(f"0 < p < 1 fails (p = {p!r})")
    if violations:
        raise DomainViolation(violations)

    period = 2.0 * (u[0] + u[1] + M)  # = 2 pi / alpha in lattice units
    w = float(u_virtual)
    for x, label in ((w, "u_virtual"), (w + 1.0, "u_virtual + 1")):
        if _lattice_distance(x, period) <= lattice_tol:
            raise VirtualParamSingular(
                f"{label} = {x!r} is within {lattice_tol} of the period lattice {period!r}*Z"
            )
    return CouplingParams(u, v, w, int(M), float(p))


def permute(params: CouplingParams, r: int) -> CouplingParams:
    """Parameters with u, v entries permuted by the r-th half-period permutation.

    The result is re-validated; permutations 3 and 4 may leave the domain.
    alpha is unchanged for r = 1, 2 because u_1 + u_2 is invariant there.
    """
    if r not in PERMUTATIONS:
        raise ValueError(f"permutation index must be 1..4, got {r!r}")
    return validate(
        apply_permutation(r, params.u),
        apply_permutation(r, params.v),
        params.u_virtual,
        params.M,
        params.p,
    )


def is_centrosymmetric(params: CouplingParams, tol: float = 0.0) -> bool:
    """True on the palindromic slice (u1,v1) = (u2,v2), (u3,v3) = (u4,v4)."""
    return (
        abs(params.u[0] - params.u[1]) <= tol
        and abs(params.v[0] - params.v[1]) <= tol
        and abs(params.u[2] - params.u[3]) <= tol
        and abs(params.v[2] - params.v[3]) <= tol
    )


def default_coupling(p: float = 0.25, M: int = 5) -> CouplingParams:
    """The desk-scale default parameter set used by the CLI and the test suite."""
    return validate((1.3, 0.9, 0.4, -0.2), (0.5, -0.3, 0.7, 0.1), 0.37, M, p)
