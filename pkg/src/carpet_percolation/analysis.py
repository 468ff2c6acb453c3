"""
Geometric descriptors of carpets and the empirical P_c relations.

Power law (central family)::

    (1 - P_c) / (1 - P_c^s) = (D - 1) ** exponent

Quadratic in the connectivity Q (either family)::

    P_c = a Q**2 + b Q + c
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import ParameterError, SingularFitError


def _check_bl(b: int, l: int) -> None:
    if b < 2:
        raise ParameterError(f"b must be >= 2, got {b}")
    if not 0 <= l < b:
        raise ParameterError(f"need 0 <= l < b, got b={b}, l={l}")


def dimensionality(b: int, l: int) -> float:
    """Similarity dimension ln(b^2 - l^2) / ln(b)."""
    _check_bl(b, l)
    if l == 0:
        return 2.0
    return math.log(b * b - l * l) / math.log(b)


def connectivity(b: int, l: int) -> float:
    """ln(b - l) / ln(b)."""
    _check_bl(b, l)
    if l == 0:
        return 1.0
    return math.log(b - l) / math.log(b)


def predict_pc_from_d(d, pcs: float = 0.41, exponent: float = 1.60):
    d = np.asarray(d, dtype=np.float64)
    if np.any(d <= 1) or np.any(d > 2):
        raise ParameterError("dimensionality must lie in (1, 2]")
    if not 0 < pcs < 1:
        raise ParameterError(f"baseline threshold must lie in (0, 1), got {pcs}")
    # written so that d = 2 returns pcs exactly
    out = pcs + (1.0 - pcs) * (1.0 - (d - 1.0) ** exponent)
    return float(out) if out.ndim == 0 else out


def predict_pc_from_q(q, coeffs):
    q = np.asarray(q, dtype=np.float64)
    if np.any(q <= 0) or np.any(q > 1):
        raise ParameterError("connectivity must lie in (0, 1]")
    a, b, c = coeffs
    out = a * q * q + b * q + c
    return float(out) if out.ndim == 0 else out


def remainder_error(residuals, k: int | None = None) -> float:
    """sqrt(sum(r**2) / (k - 2))."""
    r = np.asarray(residuals, dtype=np.float64)
    if k is None:
        k = r.size
    if k != r.size:
        raise ParameterError(f"k = {k} does not match {r.size} residuals")
    if k < 3:
        raise ParameterError(f"remainder error needs k >= 3, got {k}")
    return float(math.sqrt(np.dot(r, r) / (k - 2)))


@dataclass
class FitResult:
    kind: str  # "exponent_power_law" or "quadratic"
    coefficients: list
    residuals: np.ndarray = field(repr=False)
    pcs_baseline: float | None = None
    space: str = "log"

    @property
    def remainder_error(self) -> float:
        if len(self.residuals) < 3:
            return float("nan")
        return remainder_error(self.residuals)

    @property
    def exponent(self) -> float:
        return self.coefficients[0]

    def predict(self, x):
        if self.kind == "quadratic":
            return predict_pc_from_q(x, self.coefficients)
        return predict_pc_from_d(x, self.pcs_baseline, self.coefficients[0])


def fit_exponent(points, pcs: float = 0.41, space: str = "log") -> FitResult:
    """Fit the power-law exponent with ``pcs`` held fixed.

    ``space="log"`` regresses ln((1-pc)/(1-pcs)) on ln(d-1) through the
    origin.  ``space="pc"`` instead minimizes squared error in P_c, starting
    from the log-space solution.  Residuals are always predicted minus
    observed P_c.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        raise SingularFitError("exponent fit needs at least two points")
    d, pc = pts[:, 0], pts[:, 1]
    if np.any(d <= 1) or np.any(pc >= 1):
        raise ParameterError("exponent fit needs d > 1 and pc < 1 for every point")
    x = np.log(d - 1.0)
    y = np.log((1.0 - pc) / (1.0 - pcs))
    sxx = float(np.dot(x, x))
    if np.ptp(d) == 0 or sxx == 0:
        raise SingularFitError("all dimensionalities are equal; exponent is not identifiable")
    exponent = float(np.dot(x, y) / sxx)
    if space == "pc":
        sol = least_squares(lambda e: 1.0 - (1.0 - pcs) * (d - 1.0) ** e[0] - pc, [exponent], xtol=1e-14, ftol=1e-14)
        exponent = float(sol.x[0])
    elif space != "log":
        raise ParameterError(f"unknown fit space {space!r}")
    residuals = predict_pc_from_d(d, pcs, exponent) - pc
    return FitResult("exponent_power_law", [exponent], np.atleast_1d(residuals), pcs, space)


def fit_quadratic(points) -> FitResult:
    """Ordinary least-squares ``pc = a q^2 + b q + c``; coefficients ``[a, b, c]``."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    q, pc = pts[:, 0], pts[:, 1]
    if len(np.unique(q)) < 3:
        raise SingularFitError("quadratic fit needs at least three distinct q values")
    design = np.vander(q, 3)
    coeffs, *_ = np.linalg.lstsq(design, pc, rcond=None)
    residuals = design @ coeffs - pc
    return FitResult("quadratic", [float(c) for c in coeffs], residuals, space="pc")
