"""Schwarz waveform relaxation in the time domain.

Each Schwarz iteration sweeps both subdomains over the whole horizon with
backward Euler, closing the interface row with the other subdomain's
previous iterate (Jacobi style). Nonlinear coefficients are lagged at the
subdomain's own previous iterate (Picard), so every sweep is linear.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .errors import InsufficientDataError, InvalidParameterError, SingularSystemError
from .stencil import (
    ADRParameters,
    CoupledProblem,
    StencilCoefficients,
    SubdomainGrid,
    nonlinear_stencil_coefficients,
    stencil_coefficients,
)
from .symbol import TransmissionKind, TransmissionSpec

K = TransmissionKind


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 200
    tolerance: float = 1e-6
    reference_tolerance: float = 1e-12
    reference_max_iterations: int = 5000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class SpaceTimeField:
    """Solution of one subdomain; ``values[n, j]`` is time level n at grid position j."""

    values: np.ndarray
    grid: SubdomainGrid
    dt: float

    @property
    def n_steps(self) -> int:
        return self.values.shape[0] - 1

    def node(self, i: int) -> np.ndarray:
        """Time history at signed node index ``i``."""
        return self.values[:, self.grid.position(i)]

    @property
    def interface(self) -> np.ndarray:
        return self.values[:, self.grid.interface_position]

    def copy(self) -> SpaceTimeField:
        return SpaceTimeField(self.values.copy(), self.grid, self.dt)


@dataclass
class IterationTrace:
    residuals: list = field(default_factory=list)
    errors: list = field(default_factory=list)  # vs the converged reference, when one was given
    iterations_to_tolerance: int | None = None
    tolerance: float = 0.0
    snapshots: dict = field(default_factory=dict)  # iteration -> (left, right)

    @property
    def iterations(self) -> int:
        return len(self.residuals)

    @property
    def converged(self) -> bool:
        return self.iterations_to_tolerance is not None


# -- interface closures --------------------------------------------------------

@dataclass(frozen=True)
class ClosureRow:
    """Interface row ``sum own[i] u_i^{k+1} = sum other[j] u_j^{k}``.

    Keys are signed node indices on the own and the other grid. Weights may be
    scalars or arrays over time levels (nonlinear coefficients).
    """

    own: dict
    other: dict

    def rhs(self, other_field: SpaceTimeField) -> np.ndarray:
        total = np.zeros(other_field.n_steps + 1)
        for j, w in self.other.items():
            total = total + w * other_field.node(j)
        return total

    def lhs(self, own_field: SpaceTimeField) -> np.ndarray:
        total = np.zeros(own_field.n_steps + 1)
        for i, w in self.own.items():
            total = total + w * own_field.node(i)
        return total

    def residual(self, own_field: SpaceTimeField, other_field: SpaceTimeField) -> float:
        """dt-weighted 1-norm over levels 1..N of the row mismatch."""
        r = (self.lhs(own_field) - self.rhs(other_field))[1:]
        return float(own_field.dt * np.sum(np.abs(r)))


def interface_closure(spec: TransmissionSpec, side: str, left: StencilCoefficients | None = None,
                      right: StencilCoefficients | None = None) -> ClosureRow:
    """Interface row for ``side`` in the normalized update form (unit weight on u_0).

    The Robin and combined kinds need the stencil weights of both subdomains;
    ``left`` supplies (a1, c1) and ``right`` (a2, c2).
    """
    kind = spec.kind
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    left_side = side == "left"
    if kind is K.DIRICHLET:
        return ClosureRow({0: 1.0}, {1: 1.0}) if left_side else ClosureRow({0: 1.0}, {-1: 1.0})
    if kind is K.OPT_DIRICHLET:
        p, q = 1 + spec.alpha, 1 - spec.beta
        if left_side:
            return ClosureRow({0: 1.0, -1: -1 / p}, {0: -1 / p, 1: 1.0})
        return ClosureRow({0: 1.0, 1: -1 / q}, {-1: 1.0, 0: -1 / q})
    if kind is K.COMBINED2 and left_side:
        return ClosureRow({0: 1.0}, {1: 1.0})
    if kind is K.COMBINED3 and left_side:
        return ClosureRow({0: 1.0}, {2: 1.0})

    if left is None or right is None:
        raise InvalidParameterError(f"{kind.value} closure needs both stencils")
    a1, _, c1 = left
    a2, _, c2 = right
    if kind is K.ROBIN2:
        if left_side:
            return ClosureRow({0: 1.0, -1: -a1 / c1}, {0: -a2 / c1, 1: c2 / c1})
        return ClosureRow({0: 1.0, 1: -c2 / a2}, {-1: a1 / a2, 0: -c1 / a2})
    if kind is K.COMBINED2:
        return ClosureRow({0: 1.0, 1: -c2 / a2}, {-1: a1 / a2, 0: -c1 / a2})
    if kind is K.ROBIN3 and left_side:
        return ClosureRow({0: 1.0, -1: -a1 / c1}, {1: -a2 / c1, 2: c2 / c1})
    if kind in (K.ROBIN3, K.COMBINED3):
        # right-grid neighbour of w_0 is w_1; there is no w_{-1}
        return ClosureRow({0: 1.0, 1: -c2 / a2}, {-1: -c1 / a2, -2: a1 / a2})
    # optimized flux closure
    p, q = 1 + spec.alpha, 1 - spec.beta
    if left_side:
        return ClosureRow(
            {0: 1.0, -2: a1 / (p * c1), -1: -(p * a1 + c1) / (p * c1)},
            {0: a2 / (p * c1), 1: -(p * a2 + c2) / (p * c1), 2: c2 / c1},
        )
    return ClosureRow(
        {0: 1.0, 1: -(a2 + q * c2) / (q * a2), 2: c2 / (q * a2)},
        {-2: a1 / a2, -1: -(a1 + q * c1) / (q * a2), 0: c1 / (q * a2)},
    )


# -- one subdomain sweep ---------------------------------------------------------

def _level_coefficients(params: ADRParameters, prev: SpaceTimeField) -> StencilCoefficients:
    if params.is_linear:
        return stencil_coefficients(params, prev.grid.dx)
    return nonlinear_stencil_coefficients(params, prev.values, prev.grid.dx)


def _at(w, n):
    return w[n] if np.ndim(w) else w


def backward_euler_sweep(params: ADRParameters, own_prev: SpaceTimeField, other_prev: SpaceTimeField,
                         closure: ClosureRow, boundary_value: float = 0.0) -> SpaceTimeField:
    """Advance one subdomain over all time levels with the interface row from ``closure``.

    Row 0 of ``own_prev`` is the initial profile. Interior stencil weights are
    constant for linear parameters, otherwise evaluated node by node from
    ``own_prev`` at the level being solved.
    """
    grid, dt = own_prev.grid, own_prev.dt
    n_nodes, n_steps = grid.n_nodes, own_prev.n_steps
    ip, bp = grid.interface_position, grid.boundary_position
    coeffs = _level_coefficients(params, own_prev)
    linear = np.ndim(coeffs.a) == 0
    interface_rhs = closure.rhs(other_prev)
    interior = np.ones(n_nodes, dtype=bool)
    interior[[ip, bp]] = False

    # banded storage with two sub- and super-diagonals: ab[2 + r - col, col]
    def assemble(a, b, c, n):
        ab = np.zeros((5, n_nodes))
        ab[2, interior] = 1 / dt - b[interior]
        ab[3, :-1][interior[1:]] = -a[1:][interior[1:]]
        ab[1, 1:][interior[:-1]] = -c[:-1][interior[:-1]]
        ab[2, bp] = 1.0
        for i, w in closure.own.items():
            col = grid.position(i)
            ab[2 + ip - col, col] = _at(w, n)
        return ab

    values = np.empty((n_steps + 1, n_nodes))
    values[0] = own_prev.values[0]
    if linear:
        full = [np.full(n_nodes, v) for v in coeffs]
        ab = assemble(*full, None) if not any(np.ndim(w) for w in closure.own.values()) else None
    for n in range(1, n_steps + 1):
        if linear:
            mat = ab if ab is not None else assemble(*full, n)
        else:
            mat = assemble(coeffs.a[n], coeffs.b[n], coeffs.c[n], n)
        rhs = values[n - 1] / dt
        rhs[bp] = boundary_value
        rhs[ip] = interface_rhs[n]
        try:
            values[n] = solve_banded((2, 2), mat, rhs, check_finite=False)
        except (LinAlgError, ValueError) as exc:
            raise SingularSystemError(f"banded solve failed at time level {n}: {exc}") from None
        if not np.all(np.isfinite(values[n])):
            raise SingularSystemError(f"non-finite solution at time level {n}")
    return SpaceTimeField(values, grid, dt)


# -- the iteration ---------------------------------------------------------------

def initial_iterate(problem: CoupledProblem) -> tuple:
    """Iteration-0 fields: the initial profile held over time, zero at the interfaces.

    Outer-boundary columns carry the boundary values from level 1 on.
    """
    fields = []
    for grid, bval in ((problem.left_grid(), problem.boundary_left), (problem.right_grid(), problem.boundary_right)):
        values = np.tile(problem.initial(grid.x), (problem.n_steps + 1, 1))
        values[1:, grid.interface_position] = 0.0
        values[1:, grid.boundary_position] = bval
        fields.append(SpaceTimeField(values, grid, problem.dt))
    return tuple(fields)


def _closures(problem: CoupledProblem, spec: TransmissionSpec, left: SpaceTimeField, right: SpaceTimeField):
    needs_stencil = spec.kind not in (K.DIRICHLET, K.OPT_DIRICHLET)
    if not needs_stencil:
        return interface_closure(spec, "left"), interface_closure(spec, "right")
    if problem.is_linear:
        lc = stencil_coefficients(problem.left, problem.dx)
        rc = stencil_coefficients(problem.right, problem.dx)
    else:
        # localized at the interface nodes of the previous iterates
        lc = nonlinear_stencil_coefficients(problem.left, left.interface, problem.dx)
        rc = nonlinear_stencil_coefficients(problem.right, right.interface, problem.dx)
    return interface_closure(spec, "left", lc, rc), interface_closure(spec, "right", lc, rc)


def interface_update_norm(new: tuple, old: tuple) -> float:
    """dt * sum over levels 1..N of |v_0 change| + |w_0 change|."""
    dt = new[0].dt
    return float(dt * sum(np.sum(np.abs(a.interface[1:] - b.interface[1:])) for a, b in zip(new, old)))


def swr_solve(problem: CoupledProblem, spec: TransmissionSpec, config: SolverConfig = SolverConfig(),
              reference: tuple | None = None, snapshot_iterations=()) -> tuple:
    """Run the waveform-relaxation iteration.

    Returns ``(left, right, trace)``. Stops once the interface-update residual
    falls below ``config.tolerance`` or after ``config.max_iterations``;
    failure to converge is recorded in the trace, not raised. With
    ``reference`` (a converged field pair) the trace also records the
    interface error against it after every iteration.
    """
    if problem.overlap_nodes != spec.overlap_nodes:
        raise InvalidParameterError(
            f"{spec.kind.value} needs a {spec.overlap_nodes}-node overlap, problem has {problem.overlap_nodes}"
        )
    left, right = initial_iterate(problem)
    trace = IterationTrace(tolerance=config.tolerance)
    wanted = set(snapshot_iterations)
    if 0 in wanted:
        trace.snapshots[0] = (left.copy(), right.copy())
    for k in range(1, config.max_iterations + 1):
        cl, cr = _closures(problem, spec, left, right)
        new_left = backward_euler_sweep(problem.left, left, right, cl, problem.boundary_left)
        new_right = backward_euler_sweep(problem.right, right, left, cr, problem.boundary_right)
        res = interface_update_norm((new_left, new_right), (left, right))
        left, right = new_left, new_right
        trace.residuals.append(res)
        if reference is not None:
            trace.errors.append(interface_update_norm((left, right), reference))
        if k in wanted:
            trace.snapshots[k] = (left.copy(), right.copy())
        if not math.isfinite(res):
            break
        if res < config.tolerance:
            trace.iterations_to_tolerance = k
            break
    return left, right, trace


@functools.lru_cache(maxsize=32)
def converged_reference(problem: CoupledProblem, spec: TransmissionSpec, config: SolverConfig = SolverConfig()) -> tuple:
    """Fixed point of the iteration, converged to ``config.reference_tolerance``.

    Robin2 never converges, so its reference is the Dirichlet fixed point.
    Cached per (problem, spec, config); callers must not mutate the result.
    """
    if spec.kind is K.ROBIN2:
        spec = TransmissionSpec(K.DIRICHLET)
    ref_config = replace(config, tolerance=config.reference_tolerance,
                         max_iterations=config.reference_max_iterations)
    left, right, _ = swr_solve(problem, spec, ref_config)
    return left, right


def closure_residuals(problem: CoupledProblem, spec: TransmissionSpec, left: SpaceTimeField,
                      right: SpaceTimeField) -> tuple:
    """Mismatch of both interface rows when the same fields stand on both sides."""
    cl, cr = _closures(problem, spec, left, right)
    return cl.residual(left, right), cr.residual(right, left)


def observed_rate(trace, stride: int = 1) -> float:
    """Empirical contraction per ``stride`` iterations.

    Geometric mean of ``r[k+stride] / r[k]`` over the last half of the
    decaying part of the residual sequence (entries above 1e-13 of the first
    one). ``stride=2`` is the counterpart of the contraction factor, which
    relates iterates two steps apart.
    """
    res = np.asarray(trace.residuals if isinstance(trace, IterationTrace) else trace, dtype=float)
    if res.size == 0 or not res[0] > 0:
        raise InsufficientDataError("residual history is empty or starts at zero")
    keep = res > 1e-13 * res[0]
    tail = res[: np.argmin(keep) if not keep.all() else res.size]
    if tail.size < 4 or tail.size <= stride:
        raise InsufficientDataError(f"need at least 4 decaying residuals, got {tail.size}")
    half = tail[tail.size // 2:] if tail.size - tail.size // 2 > stride else tail[-(stride + 1):]
    ratios = half[stride:] / half[:-stride]
    return float(np.exp(np.mean(np.log(ratios))))
