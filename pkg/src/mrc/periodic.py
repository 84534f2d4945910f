"""MRC for plane-wave scattering by a periodic sound-soft profile.

The incident wave exp(i k (x cos(theta) - y sin(theta))) hits the graph
y = f(x) of an L-periodic function. The scattered field is expanded in
quasiperiodic Green's functions of the strip above the floor y = -b, with
poles placed just below the profile.
"""
import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import ConfigurationError, DomainError, SingularityError, WoodAnomalyError
from .lsq import solve_cutoff
from .scattering import SolveReport

WOOD_TOL = 1e-10


@dataclass(frozen=True)
class QpParams:
    k: float
    theta: float
    L_period: float = math.pi

    def __post_init__(self):
        if self.k <= 0 or self.L_period <= 0:
            raise ConfigurationError("k and the period must be positive")
        if not 0.0 < self.theta <= math.pi / 2:
            raise ConfigurationError("theta must lie in (0, pi/2]")

    @property
    def nu(self):
        return cmath.exp(1j * self.k * self.L_period * math.cos(self.theta))

    @property
    def alpha(self):
        return np.array([math.cos(self.theta), -math.sin(self.theta)])

    def incident(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.exp(1j * self.k * (p @ self.alpha))


def ell_plus(j, params):
    """Quasiperiodic wavenumber k cos(theta) + 2 pi j / L."""
    return params.k * math.cos(params.theta) + 2 * math.pi * j / params.L_period


def _mu_array(js, params):
    ell = params.k * math.cos(params.theta) + 2 * np.pi * np.asarray(js) / params.L_period
    d = params.k**2 - ell**2
    if np.any(np.abs(d) < WOOD_TOL):
        bad = np.asarray(js)[np.abs(d) < WOOD_TOL]
        raise WoodAnomalyError(f"grazing mode(s) j = {bad.tolist()}")
    return ell, np.where(d > 0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d)))


def mu(j, params):
    """Vertical wavenumber of mode j: positive real or positive imaginary."""
    return complex(_mu_array(np.array([j]), params)[1][0])


def propagating_modes(params, j_max=120):
    js = np.arange(-j_max, j_max + 1)
    ell = params.k * math.cos(params.theta) + 2 * np.pi * js / params.L_period
    return js[np.abs(ell) < params.k]


@dataclass
class QpGreensFunction:
    """Truncated series for the quasiperiodic Green's function vanishing at y = -b."""

    params: QpParams
    b: float = 1.2
    j_max: int = 120

    def __post_init__(self):
        if self.b <= 0:
            raise ConfigurationError("floor depth b must be positive")
        if self.j_max < 20:
            raise ConfigurationError("j_max must be at least 20")
        self.js = np.arange(-self.j_max, self.j_max + 1)
        self.ell, self.mu = _mu_array(self.js, self.params)

    def matrix(self, x, xi):
        """g(x_i, xi_m) for all pairs; shape (len(x), len(xi))."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        if np.any(x[:, 1] < -self.b) or np.any(xi[:, 1] <= -self.b):
            raise DomainError("points must lie above the floor y = -b")
        dx = x[:, None, 0] - xi[None, :, 0]
        if np.any((dx == 0) & (x[:, None, 1] == xi[None, :, 1])):
            raise SingularityError("x coincides with the pole")
        hi = np.maximum(x[:, None, 1], xi[None, :, 1])
        lo = np.minimum(x[:, None, 1], xi[None, :, 1])
        out = np.zeros(dx.shape, dtype=complex)
        # v_j(max) psi_j(min) written with nonpositive exponents only:
        # (e^{i mu (max + min + 2b)} - e^{i mu (max - min)}) / (2 i mu)
        for ell, m in zip(self.ell, self.mu):
            gj = (np.exp(1j * m * (hi + lo + 2 * self.b)) - np.exp(1j * m * (hi - lo))) / (2j * m)
            out += np.exp(1j * ell * dx) * gj
        return out / self.params.L_period

    def __call__(self, x, xi):
        x = np.asarray(x, dtype=float)
        val = self.matrix(x.reshape(-1, 2), np.asarray(xi, dtype=float).reshape(-1, 2))
        return complex(val[0, 0]) if x.ndim == 1 else val[:, 0]


def qp_green(x, xi, green):
    """Quasiperiodic half-space Green's function g(x, xi)."""
    return green(x, xi)


def wronskian(j, params, b, y=0.0):
    """v_j psi_j' - v_j' psi_j at height y; equals 1 by construction."""
    m = mu(j, params)
    v, dv = cmath.exp(1j * m * y), 1j * m * cmath.exp(1j * m * y)
    psi = cmath.exp(1j * m * b) * cmath.sin(m * (y + b)) / m
    dpsi = cmath.exp(1j * m * b) * cmath.cos(m * (y + b))
    return v * dpsi - dv * psi


@dataclass
class PeriodicExpansion:
    green: QpGreensFunction
    poles: np.ndarray
    coeffs: np.ndarray
    profile: geometry.PeriodicProfile = field(default=None, repr=False)

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.profile is not None and np.any(self.profile.below(x)):
            raise DomainError("evaluation point lies below the profile")
        return self.green.matrix(x, self.poles) @ self.coeffs


def periodic_mrc(
    profile,
    params,
    N_nodes=256,
    M_poles=64,
    w_min=1e-8,
    eps=1e-3,
    b=1.2,
    j_max=120,
    retry=True,
):
    """Fit -u_0 on the profile with Green's functions centred at the poles.

    If the residual exceeds ``eps`` the node and pole counts are doubled once.
    """
    green = QpGreensFunction(params, b, j_max)
    history = []
    attempts = [(N_nodes, M_poles)] + ([(2 * N_nodes, 2 * M_poles)] if retry else [])
    for n_try, (n, m) in enumerate(attempts, start=1):
        nodes, poles = geometry.profile_nodes_and_poles(profile, n, m)
        if np.any(poles[:, 1] <= -b):
            raise ConfigurationError("poles must lie above the floor y = -b")
        A = green.matrix(nodes, poles)
        sol = solve_cutoff(A, params.incident(nodes), w_min)
        history.append(sol.r_min)
        if sol.r_min <= eps or n_try == len(attempts):
            expansion = PeriodicExpansion(green, poles, sol.coeffs, profile)
            return SolveReport(expansion, sol.r_min, n_try, sol.r_min <= eps, history)
