"""Problem definition for two coupled 1-D advection-diffusion-reaction equations.

Holds the physical parameters of each subdomain, the uniform subdomain grids,
the three-point stencil weights of the central-difference semi-discretization

    du_i/dt = a u_{i-1} + b u_i + c u_{i+1},

and the registry of the seven experiment cases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Union

import numpy as np

from .errors import DegenerateStencilError, InvalidProblemError, UnknownCaseError

# relative to theta/dx**2
DEGENERACY_RTOL = 1e-12
_GRID_ATOL = 1e-9


class AdvectionLaw(str, Enum):
    """Closed set of solution-dependent advection speeds mu(u)."""

    IDENTITY = "identity"
    SQUARE = "square"
    SINE_PI = "sine-pi"

    def __call__(self, u):
        if self is AdvectionLaw.IDENTITY:
            return u
        if self is AdvectionLaw.SQUARE:
            return u * u
        return np.sin(np.pi * u)


Advection = Union[float, AdvectionLaw, Callable]


@dataclass(frozen=True)
class ADRParameters:
    """Coefficients of ``u_t + mu(u) u_x = theta u_xx - gamma u^kappa u``.

    ``mu`` is either a constant (linear problem) or an :class:`AdvectionLaw`
    / scalar callable evaluated at the lagged solution (nonlinear problem).
    """

    mu: Advection
    theta: float
    gamma: float = 0.0
    kappa: int = 0

    def __post_init__(self):
        if isinstance(self.mu, str) and not isinstance(self.mu, AdvectionLaw):
            object.__setattr__(self, "mu", AdvectionLaw(self.mu))
        if not self.theta > 0:
            raise InvalidProblemError(f"theta must be positive, got {self.theta}")
        if not self.gamma >= 0:
            raise InvalidProblemError(f"gamma must be nonnegative, got {self.gamma}")
        if self.kappa not in (0, 1):
            raise InvalidProblemError(f"kappa must be 0 or 1, got {self.kappa}")

    @property
    def is_linear(self) -> bool:
        return not callable(self.mu) and (self.kappa == 0 or self.gamma == 0)

    def advection(self, u):
        if callable(self.mu):
            return self.mu(u)
        if np.ndim(u):
            return np.full(np.shape(u), float(self.mu))
        return float(self.mu)


@dataclass(frozen=True)
class StencilCoefficients:
    """Stencil weights (a, b, c); scalars, or equal-shape arrays for per-node values.

    Construction does not validate, so raw triples outside the admissible set
    (e.g. the pure-advection limit b = 0) can be analysed directly.
    """

    a: float
    b: float
    c: float

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    @property
    def is_admissible(self) -> bool:
        """b < 0, 4ac < b**2 and c away from zero."""
        a, b, c = (np.asarray(v, dtype=float) for v in self)
        scale = np.maximum(np.maximum(abs(a), abs(b)), abs(c))
        return bool(
            np.all(b < 0) and np.all(4 * a * c < b * b) and np.all(abs(c) > DEGENERACY_RTOL * scale)
        )


def stencil_coefficients(params: ADRParameters, dx: float) -> StencilCoefficients:
    """Constant stencil weights of the linear semi-discretization."""
    if not dx > 0:
        raise InvalidProblemError(f"dx must be positive, got {dx}")
    if callable(params.mu):
        raise InvalidProblemError("stencil_coefficients needs a constant advection speed")
    diff = params.theta / dx**2
    adv = params.mu / (2 * dx)
    a = adv + diff
    b = -2 * diff - params.gamma
    c = -adv + diff
    if abs(c) <= DEGENERACY_RTOL * diff:
        raise DegenerateStencilError(
            f"c = {c!r} vanishes (cell Peclet number mu*dx/(2*theta) = 1)"
        )
    return StencilCoefficients(a, b, c)


def nonlinear_stencil_coefficients(params: ADRParameters, state_value, dx: float) -> StencilCoefficients:
    """Solution-dependent weights, evaluated at the lagged state ``u``.

    ``state_value`` may be a scalar or an array (one entry per node); the
    returned fields have the same shape. No degeneracy check is made here.
    """
    if not dx > 0:
        raise InvalidProblemError(f"dx must be positive, got {dx}")
    u = np.asarray(state_value, dtype=float)
    mu = params.advection(u)
    diff = params.theta / dx**2
    a = mu / (2 * dx) + diff
    b = -2 * diff - params.gamma * u**params.kappa
    c = -mu / (2 * dx) + diff
    if u.ndim == 0:
        return StencilCoefficients(float(a), float(b), float(c))
    return StencilCoefficients(np.asarray(a), np.asarray(b), np.asarray(c))


@dataclass(frozen=True)
class SubdomainGrid:
    """Uniform grid of one subdomain.

    Nodes are stored in ascending x. Signed node indices run
    ``i <= 0`` on the left grid and ``i >= 0`` on the right grid, node 0
    being the interface node carrying the transmitted value.
    """

    side: str
    x: np.ndarray = field(repr=False, compare=False)
    dx: float

    @property
    def n_nodes(self) -> int:
        return len(self.x)

    @property
    def interface_position(self) -> int:
        return self.n_nodes - 1 if self.side == "left" else 0

    @property
    def boundary_position(self) -> int:
        return 0 if self.side == "left" else self.n_nodes - 1

    def position(self, i: int) -> int:
        """Array position of signed node index ``i``."""
        pos = self.interface_position + i
        if not 0 <= pos < self.n_nodes or (self.side == "left" and i > 0) or (self.side == "right" and i < 0):
            raise IndexError(f"node index {i} is not on the {self.side} grid")
        return pos

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_nodes) - self.interface_position


def _uniform_nodes(start: float, stop: float, dx: float) -> np.ndarray:
    n = (stop - start) / dx
    if abs(n - round(n)) > _GRID_ATOL * max(1.0, abs(n)):
        raise InvalidProblemError(f"[{start}, {stop}] is not a whole number of steps dx = {dx}")
    return np.linspace(start, stop, int(round(n)) + 1)


def minus_sin_pi(x):
    return -np.sin(np.pi * np.asarray(x, dtype=float))


PROFILES = {"minus_sin_pi": minus_sin_pi}


@dataclass(frozen=True)
class CoupledProblem:
    """Two overlapping subdomains, left ``[x_left, x1]`` and right ``[x2, x_right]``.

    ``x2 < x1``; the overlap ``[x2, x1]`` spans ``overlap_nodes`` grid nodes.
    """

    left: ADRParameters
    right: ADRParameters
    x1: float
    x2: float
    overlap_nodes: int = 2
    domain: tuple = (-1.0, 1.0)
    T: float = 5.0
    dt: float = 0.05
    dx: float = 0.05
    profile: str = "minus_sin_pi"
    boundary_left: float = 0.0
    boundary_right: float = 0.0
    case_id: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(float(v) for v in self.domain))
        if not (self.dx > 0 and self.dt > 0 and self.T > 0):
            raise InvalidProblemError("dx, dt and T must be positive")
        if self.overlap_nodes not in (2, 3):
            raise InvalidProblemError(f"overlap_nodes must be 2 or 3, got {self.overlap_nodes}")
        if not self.x2 < self.x1:
            raise InvalidProblemError(f"need x2 < x1, got x1={self.x1}, x2={self.x2}")
        width = (self.x1 - self.x2) / self.dx + 1
        if abs(width - self.overlap_nodes) > _GRID_ATOL:
            raise InvalidProblemError(
                f"overlap [{self.x2}, {self.x1}] holds {width:g} nodes, expected {self.overlap_nodes}"
            )
        xl, xr = self.domain
        if not (xl < self.x2 and self.x1 < xr):
            raise InvalidProblemError("interfaces must lie strictly inside the domain")
        # raises unless both interfaces fall on grid nodes
        self.left_grid()
        self.right_grid()
        steps = self.T / self.dt
        if abs(steps - round(steps)) > _GRID_ATOL * max(1.0, steps):
            raise InvalidProblemError(f"T = {self.T} is not a whole number of steps dt = {self.dt}")
        if self.profile not in PROFILES:
            raise InvalidProblemError(f"unknown initial profile {self.profile!r}")

    @property
    def is_linear(self) -> bool:
        return self.left.is_linear and self.right.is_linear

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.n_steps * self.dt, self.n_steps + 1)

    def initial(self, x):
        return PROFILES[self.profile](x)

    def left_grid(self) -> SubdomainGrid:
        return SubdomainGrid("left", _uniform_nodes(self.domain[0], self.x1, self.dx), self.dx)

    def right_grid(self) -> SubdomainGrid:
        return SubdomainGrid("right", _uniform_nodes(self.x2, self.domain[1], self.dx), self.dx)

    def with_overlap(self, overlap_nodes: int) -> CoupledProblem:
        """Same problem with the left interface moved so the overlap has ``overlap_nodes`` nodes."""
        if overlap_nodes == self.overlap_nodes:
            return self
        x1 = round(self.x2 + (overlap_nodes - 1) * self.dx, 12)
        return replace(self, x1=x1, overlap_nodes=overlap_nodes)


_LINEAR = {
    1: ((1.5, 0.1, 0.0), (1.0, 0.1, 0.0)),
    2: ((0.2, 0.4, 1.0), (0.4, 0.2, 2.0)),
}

_NONLINEAR = {
    3: (("identity", 0.4, 1.0, 0), ("identity", 0.2, 2.0, 0)),
    4: (("square", 0.4, 1.0, 0), ("square", 0.2, 2.0, 0)),
    5: (("sine-pi", 0.4, 1.0, 0), ("sine-pi", 0.2, 2.0, 0)),
    6: (("identity", 0.4, 1.0, 1), ("identity", 0.2, 2.0, 1)),
    7: (("identity", 0.04, 0.0, 0), ("identity", 0.02, 0.0, 0)),
}

CASE_IDS = tuple(sorted(_LINEAR) + sorted(_NONLINEAR))


def case(case_id: int) -> CoupledProblem:
    """One of the registered experiment cases (1-2 linear, 3-7 nonlinear)."""
    if case_id in _LINEAR:
        left, right = _LINEAR[case_id]
        return CoupledProblem(
            left=ADRParameters(*left), right=ADRParameters(*right),
            x1=-0.15, x2=-0.2, T=5.0, case_id=case_id,
        )
    if case_id in _NONLINEAR:
        left, right = _NONLINEAR[case_id]
        return CoupledProblem(
            left=ADRParameters(*left), right=ADRParameters(*right),
            x1=-0.45, x2=-0.5, T=1.0, case_id=case_id,
        )
    raise UnknownCaseError(f"unknown case {case_id!r}; expected one of {CASE_IDS}")


# -- JSON registry -----------------------------------------------------------

def _params_to_dict(p: ADRParameters) -> dict:
    if isinstance(p.mu, AdvectionLaw):
        head = {"advection_law": p.mu.value}
    elif callable(p.mu):
        raise InvalidProblemError("user-supplied advection functions cannot be serialized")
    else:
        head = {"mu": float(p.mu)}
    return {**head, "theta": float(p.theta), "gamma": float(p.gamma), "kappa": int(p.kappa)}


def _params_from_dict(d: dict) -> ADRParameters:
    if ("mu" in d) == ("advection_law" in d):
        raise InvalidProblemError("exactly one of 'mu' and 'advection_law' is required")
    mu = AdvectionLaw(d["advection_law"]) if "advection_law" in d else float(d["mu"])
    return ADRParameters(mu, float(d["theta"]), float(d.get("gamma", 0.0)), int(d.get("kappa", 0)))


def problem_to_dict(problem: CoupledProblem) -> dict:
    return {
        "id": problem.case_id,
        "left": _params_to_dict(problem.left),
        "right": _params_to_dict(problem.right),
        "domain": list(problem.domain),
        "T": problem.T,
        "dt": problem.dt,
        "dx": problem.dx,
        "x1": problem.x1,
        "x2": problem.x2,
        "overlap_nodes": problem.overlap_nodes,
        "initial_profile": problem.profile,
        "boundary": [problem.boundary_left, problem.boundary_right],
    }


def problem_from_dict(d: dict) -> CoupledProblem:
    try:
        boundary = d.get("boundary", [0.0, 0.0])
        return CoupledProblem(
            left=_params_from_dict(d["left"]),
            right=_params_from_dict(d["right"]),
            x1=float(d["x1"]),
            x2=float(d["x2"]),
            overlap_nodes=int(d.get("overlap_nodes", 2)),
            domain=tuple(d.get("domain", (-1.0, 1.0))),
            T=float(d["T"]),
            dt=float(d["dt"]),
            dx=float(d["dx"]),
            profile=d.get("initial_profile", "minus_sin_pi"),
            boundary_left=float(boundary[0]),
            boundary_right=float(boundary[1]),
            case_id=d.get("id"),
        )
    except KeyError as exc:
        raise InvalidProblemError(f"missing key {exc.args[0]!r} in problem document") from None


def dumps_problem(problem: CoupledProblem) -> str:
    # json writes floats with repr(), the shortest round-trip form
    return json.dumps(problem_to_dict(problem), indent=2, sort_keys=True)


def loads_problem(text: str) -> CoupledProblem:
    return problem_from_dict(json.loads(text))
