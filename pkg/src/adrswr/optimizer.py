"""Search for the optimized transmission parameter alpha* (with beta* = -alpha*).

alpha* balances the optimized contraction factor at the two ends of the
resolvable frequency band,

    h(alpha) = |rho(alpha, -alpha, i omega_min)| - |rho(alpha, -alpha, i omega_max)| = 0,

with omega_min = pi/T and omega_max = pi/dt. ``h`` may have several zeros; all
are located by a uniform scan for sign changes followed by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoRootError
from .stencil import CoupledProblem, StencilCoefficients, nonlinear_stencil_coefficients, stencil_coefficients
from .symbol import characteristic_roots, optimized_factor


@dataclass(frozen=True)
class OptimizationSetup:
    omega_min: float
    omega_max: float
    alpha_interval: tuple = (1e-4, 64.0)
    scan_points: int = 4096
    tolerance: float = 1e-8

    def __post_init__(self):
        if not 0 < self.omega_min < self.omega_max:
            raise ValueError(f"need 0 < omega_min < omega_max, got {self.omega_min}, {self.omega_max}")
        lo, hi = self.alpha_interval
        if not 0 < lo < hi:
            raise ValueError(f"alpha interval must satisfy 0 < lo < hi, got {self.alpha_interval}")
        if self.scan_points < 2:
            raise ValueError("scan_points must be at least 2")

    @classmethod
    def for_horizon(cls, T: float, dt: float, **kwargs) -> OptimizationSetup:
        return cls(math.pi / T, math.pi / dt, **kwargs)


@dataclass(frozen=True)
class AlphaStarResult:
    roots: tuple
    objective_at_root: tuple  # |rho(i omega_min)| at each root
    h_residual: tuple
    surface_max: tuple  # max of |rho(i omega)| over the band, per root
    omega_min: float
    omega_max: float


class _Objective:
    """h(alpha) with the roots at both band ends cached."""

    def __init__(self, left, right, setup):
        s = np.array([1j * setup.omega_min, 1j * setup.omega_max])
        self.rp = characteristic_roots(left, s).r_plus
        self.rm = characteristic_roots(right, s).r_minus

    def ends(self, alpha):
        alpha = np.asarray(alpha, dtype=float)[..., None]
        return np.abs(optimized_factor(self.rm, self.rp, alpha, -alpha))

    def __call__(self, alpha):
        e = self.ends(alpha)
        return e[..., 0] - e[..., 1]


def _bisect(h, lo, hi, h_lo, tol):
    # shrink well past tol: the residual |h|, not the bracket width, is what is checked
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        h_mid = float(h(mid))
        if h_mid == 0.0 or (hi - lo) < 1e-3 * tol:
            return mid
        if (h_mid < 0) == (h_lo < 0):
            lo, h_lo = mid, h_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def band_max_abs_rho(left, right, alpha, beta, omega_min, omega_max, n=2001):
    """Max of the optimized |rho(i omega)| over [omega_min, omega_max]."""
    omega = np.union1d(np.linspace(omega_min, omega_max, n), np.geomspace(omega_min, omega_max, n))
    s = 1j * omega
    rp = characteristic_roots(left, s).r_plus
    rm = characteristic_roots(right, s).r_minus
    return float(np.max(np.abs(optimized_factor(rm, rp, alpha, beta))))


def optimize_alpha(left: StencilCoefficients, right: StencilCoefficients, setup: OptimizationSetup) -> AlphaStarResult:
    """All zeros of the equioscillation residual inside ``setup.alpha_interval``."""
    h = _Objective(left, right, setup)
    grid = np.linspace(*setup.alpha_interval, setup.scan_points)
    values = h(grid)
    roots = []
    for k in range(len(grid) - 1):
        if values[k] == 0.0:
            roots.append(float(grid[k]))
        elif values[k] * values[k + 1] < 0:
            roots.append(float(_bisect(h, grid[k], grid[k + 1], values[k], setup.tolerance)))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        raise NoRootError(
            f"no sign change of the equioscillation residual on alpha in {setup.alpha_interval}"
        )
    ends = h.ends(np.array(roots))
    return AlphaStarResult(
        roots=tuple(roots),
        objective_at_root=tuple(float(v) for v in ends[:, 0]),
        h_residual=tuple(float(v) for v in ends[:, 0] - ends[:, 1]),
        surface_max=tuple(
            band_max_abs_rho(left, right, r, -r, setup.omega_min, setup.omega_max) for r in roots
        ),
        omega_min=setup.omega_min,
        omega_max=setup.omega_max,
    )


def interface_coefficients(problem: CoupledProblem) -> tuple:
    """Stencil triples fed to the symbol analysis of ``problem``.

    Linear problems use their constant triples. Nonlinear ones are localized at
    the interfaces and frozen at the initial profile: the left triple at
    ``x2`` and the right triple at ``x1``.
    """
    if problem.is_linear:
        return stencil_coefficients(problem.left, problem.dx), stencil_coefficients(problem.right, problem.dx)
    left = nonlinear_stencil_coefficients(problem.left, float(problem.initial(problem.x2)), problem.dx)
    right = nonlinear_stencil_coefficients(problem.right, float(problem.initial(problem.x1)), problem.dx)
    return left, right


def optimize_problem(problem: CoupledProblem, **setup_kwargs) -> AlphaStarResult:
    left, right = interface_coefficients(problem)
    return optimize_alpha(left, right, OptimizationSetup.for_horizon(problem.T, problem.dt, **setup_kwargs))
