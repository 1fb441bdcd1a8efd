"""Laplace-domain analysis of the Schwarz waveform-relaxation iteration.

After a Laplace transform in time, the stencil becomes the recurrence

    a u_{i-1} + (b - s) u_i + c u_{i+1} = 0,     s = sigma + i omega, sigma >= 0,

whose characteristic roots r- (|r-| < 1) and r+ (|r+| > 1) govern how interface
data propagate into the right and left subdomains. Contraction factors relate
interface values two Schwarz iterations apart.

All functions accept a scalar complex ``s`` or an array of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import BranchError, DegenerateStencilError, InvalidParameterError, PoleError
from .stencil import StencilCoefficients

_C_RTOL = 1e-12


class TransmissionKind(str, Enum):
    DIRICHLET = "dirichlet"
    ROBIN2 = "robin2"
    ROBIN3 = "robin3"
    COMBINED2 = "combined2"
    COMBINED3 = "combined3"
    OPT_DIRICHLET = "opt-dirichlet"
    OPT_ROBIN = "opt-robin"

    @property
    def overlap_nodes(self) -> int:
        three = (TransmissionKind.ROBIN3, TransmissionKind.COMBINED3, TransmissionKind.OPT_ROBIN)
        return 3 if self in three else 2

    @property
    def optimized(self) -> bool:
        return self in (TransmissionKind.OPT_DIRICHLET, TransmissionKind.OPT_ROBIN)


@dataclass(frozen=True)
class TransmissionSpec:
    """Interface closure kind, plus (alpha, beta) for the optimized kinds.

    When only ``alpha`` is given for an optimized kind, ``beta = -alpha``.
    """

    kind: TransmissionKind
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", TransmissionKind(self.kind))
        if not self.kind.optimized:
            return
        if self.alpha is None:
            raise InvalidParameterError(f"{self.kind.value} needs alpha")
        if self.beta is None:
            object.__setattr__(self, "beta", -self.alpha)
        alpha, beta = self.alpha, self.beta
        if not (alpha > 0 and beta < 0):
            raise InvalidParameterError(f"optimized kinds need alpha > 0 and beta < 0, got ({alpha}, {beta})")
        if (alpha + 1) * (beta - 1) + 1 == 0:
            raise InvalidParameterError("(alpha+1)(beta-1)+1 = 0: the closure would not recover continuity")

    @property
    def overlap_nodes(self) -> int:
        return self.kind.overlap_nodes


class RootPair(NamedTuple):
    r_minus: complex
    r_plus: complex


def _as_s(s):
    s = np.asarray(s, dtype=complex)
    if np.any(s.real < 0):
        raise ValueError("only the closed right half-plane Re(s) >= 0 is considered")
    return s


def _scalar(x):
    return complex(x) if np.ndim(x) == 0 else x


def _check_c(coeffs: StencilCoefficients):
    a, b, c = coeffs
    scale = max(np.max(abs(a)), np.max(abs(b)), np.max(abs(c)))
    if np.any(abs(c) <= _C_RTOL * scale):
        raise DegenerateStencilError(f"c = {c!r} is zero relative to the stencil")


def characteristic_roots(coeffs: StencilCoefficients, s, strict: bool = True) -> RootPair:
    """Roots of ``c r**2 + (b - s) r + a = 0``.

    The discriminant root is taken on the branch with positive real part.
    ``r-`` is formed as ``2a / (s - b + sqrt(...))``, equal to the textbook
    expression but free of cancellation.

    With ``strict=False`` a discriminant root on the imaginary axis (possible
    only outside the admissible set, e.g. pure advection) is accepted, taking
    the sign that is the limit from sigma > 0, i.e. the one making ``|r+|``
    the larger root.
    """
    _check_c(coeffs)
    a, b, c = coeffs
    s = _as_s(s)
    z = s - b
    d = np.sqrt(z * z - 4 * a * c)
    d = np.where(d.real < 0, -d, d)
    flat = d.real <= 0
    if np.any(flat):
        if strict:
            raise BranchError("discriminant root has zero real part; need 4ac < b**2")
        d = np.where(flat & (abs(z - d) > abs(z + d)), -d, d)
    num = z + d
    r_plus = num / (2 * c)
    r_minus = 2 * a / num
    return RootPair(_scalar(r_minus), _scalar(r_plus))


def root_condition_holds(coeffs: StencilCoefficients, omega: float) -> bool:
    """Sufficient condition for ``|r-| < 1`` on the imaginary axis."""
    _check_c(coeffs)
    a, b, c = coeffs
    z = 1j * omega - b
    d = np.sqrt(z * z - 4 * a * c)
    if d.real < 0:
        d = -d
    return bool(abs(z + d) > 2 * a)


def optimized_factor(r_minus, r_plus, alpha, beta):
    """Three-factor contraction of the optimized closures.

    Accepts complex ``alpha``/``beta`` so the pointwise-optimal pair
    ``alpha = 1/r- - 1``, ``beta = 1 - r+`` can be checked.
    """
    den = (1 + alpha - 1 / r_plus) * (1 - beta - r_minus)
    if np.any(den == 0):
        raise PoleError("optimized contraction factor has a vanishing denominator")
    return (1 + alpha - 1 / r_minus) * (1 - beta - r_plus) / den * (r_minus / r_plus)


def _combined2(left, right, rm, rp):
    return (left.c - left.a / rp) / (right.c - right.a / rm)


def contraction_factor(left: StencilCoefficients, right: StencilCoefficients, s, spec: TransmissionSpec):
    """Contraction factor rho(s) of the iteration with closure ``spec``.

    ``r+`` comes from the left stencil, ``r-`` from the right one.
    """
    if not isinstance(spec, TransmissionSpec):
        spec = TransmissionSpec(spec)
    kind = spec.kind
    s = _as_s(s)
    rp = characteristic_roots(left, s).r_plus
    rm = characteristic_roots(right, s).r_minus
    if kind is TransmissionKind.ROBIN2:
        return _scalar(np.ones_like(s))
    if kind in (TransmissionKind.DIRICHLET, TransmissionKind.ROBIN3):
        return rm / rp
    if kind is TransmissionKind.COMBINED2:
        return _combined2(left, right, rm, rp)
    if kind is TransmissionKind.COMBINED3:
        return _combined2(left, right, rm, rp) * (rm / rp)
    # both optimized kinds share one factor
    return optimized_factor(rm, rp, spec.alpha, spec.beta)


def combined_convergence_check(left: StencilCoefficients, right: StencilCoefficients, s, overlap: int) -> bool:
    """Convergence condition of the combined Dirichlet/Robin closure."""
    if overlap not in (2, 3):
        raise ValueError(f"overlap must be 2 or 3, got {overlap}")
    rp = characteristic_roots(left, s).r_plus
    rm = characteristic_roots(right, s).r_minus
    lhs = abs((left.a - left.c * rp) / (right.a - right.c * rm))
    return bool(np.all(lhs < abs(rp / rm) ** (overlap - 1)))


@dataclass(frozen=True)
class Surface:
    """|rho| sampled on a uniform (sigma, omega) grid; rows are sigma, columns omega."""

    omega: np.ndarray
    sigma: np.ndarray
    abs_rho: np.ndarray

    def rows(self):
        """(omega, sigma, |rho|) triples, sigma-major then omega."""
        for i, sg in enumerate(self.sigma):
            for j, om in enumerate(self.omega):
                yield float(om), float(sg), float(self.abs_rho[i, j])

    def argmax(self):
        i, j = np.unravel_index(np.argmax(self.abs_rho), self.abs_rho.shape)
        return float(self.omega[j]), float(self.sigma[i])


def sample_surface(left, right, spec, omega_range, sigma_range, n_omega=201, n_sigma=51) -> Surface:
    if n_omega < 2 or n_sigma < 2:
        raise ValueError("need at least two samples along each axis")
    if not all(np.isfinite(v) for v in (*omega_range, *sigma_range)):
        raise ValueError("sampling ranges must be finite")
    omega = np.linspace(omega_range[0], omega_range[1], n_omega)
    sigma = np.linspace(sigma_range[0], sigma_range[1], n_sigma)
    s = sigma[:, None] + 1j * omega[None, :]
    return Surface(omega, sigma, np.abs(contraction_factor(left, right, s, spec)))


def default_surface_ranges(dt: float):
    return (-np.pi / dt, np.pi / dt), (0.0, 10.0)


def interface_response(coeffs: StencilCoefficients, s: complex, side: str, n_nodes: int = 200) -> np.ndarray:
    """Direct solve of the truncated transformed subdomain system.

    Imposes ``u_0 = 1`` at the interface and ``u = 0`` at the far end of an
    ``n_nodes`` grid. Returns ``u_0, u_{-1}, ...`` (left) or ``u_0, u_1, ...``
    (right), ordered away from the interface.
    """
    from scipy.linalg import solve_banded

    a, b, c = coeffs
    n = n_nodes - 1  # unknowns between the interface and the far end
    # ascending storage: left grid unknowns are u_{-n},...,u_{-1}
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = c
    ab[1, :] = b - s
    ab[2, :-1] = a
    rhs = np.zeros(n, dtype=complex)
    if side == "left":
        rhs[-1] = -c
        u = solve_banded((1, 1), ab, rhs)[::-1]
    elif side == "right":
        rhs[0] = -a
        u = solve_banded((1, 1), ab, rhs)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return np.concatenate(([1.0 + 0j], u, [0j]))
