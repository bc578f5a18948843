"""One-call orchestration of the solve chain used by the CLI and the checks."""

from __future__ import annotations

from dataclasses import dataclass

from .coefficients import CoefficientSet
from .matrix import HeunMatrix, build
from .params import CouplingParams
from .racah import RacahTable, racah_table
from .spectra import Spectrum, eigenvalues


@dataclass(frozen=True)
class PipelineResult:
    params: CouplingParams
    coeffs: CoefficientSet
    H: HeunMatrix
    spectrum: Spectrum


def solve(params: CouplingParams, ctx=None) -> PipelineResult:
    """Coefficients, matrix and spectrum for one parameter set."""
    H = build(params, ctx)
    return PipelineResult(params=params, coeffs=H.coeffs, H=H, spectrum=eigenvalues(H))


def solve_table(params: CouplingParams, ctx=None) -> tuple[PipelineResult, RacahTable]:
    """The solve chain plus the fully cross-checked on-shell table."""
    res = solve(params, ctx)
    table = racah_table(res.coeffs, res.spectrum, params, ctx)
    return res, table
