"""Analytic reference solutions for a sound-soft circle.

Also builds the classic ill-posedness example: a radiating field centred
off the origin whose far field matches the circle's almost exactly while its
boundary values are wildly different.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import specfun
from .errors import ConfigurationError, DomainError
from .lsq import normalized_norm, solve_cutoff


def _far_prefactor(k):
    return math.sqrt(2.0 / (math.pi * k)) * np.exp(-0.25j * math.pi)


@dataclass(frozen=True)
class CircleScatterer:
    a: float = 1.0
    k: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if self.a <= 0 or self.k <= 0:
            raise ConfigurationError("radius and wavenumber must be positive")

    @property
    def alpha(self):
        return np.array([math.cos(self.beta), math.sin(self.beta)])

    def l_max(self, tol=1e-12):
        """Smallest l with |J_l(ka)/H_l(ka)| < tol."""
        ka = self.k * self.a
        for ell in range(specfun.MAX_CYL_ORDER + 1):
            if abs(special.jv(ell, ka) / special.hankel1(ell, ka)) < tol:
                return ell
        return specfun.MAX_CYL_ORDER

    def near_l_max(self, tol=1e-16):
        """Smallest l with |J_l(ka)| < tol.

        Since |H_l(kr) / H_l(ka)| <= 1 for r >= a, this bounds every dropped
        near-field term, unlike the ratio rule used for the far field.
        """
        ka = self.k * self.a
        for ell in range(specfun.MAX_CYL_ORDER + 1):
            if abs(special.jv(ell, ka)) < tol:
                return ell
        return specfun.MAX_CYL_ORDER

    def ratios(self, l_max=None):
        """J_l(ka)/H_l(ka) for l = -l_max..l_max (even in l)."""
        l_max = self.l_max() if l_max is None else l_max
        orders = np.arange(-l_max, l_max + 1)
        n = np.abs(orders)
        ka = self.k * self.a
        return orders, special.jv(n, ka) / special.hankel1(n, ka)


def circle_far_field(c, theta, l_max=None):
    """Scattering amplitude A(theta) of the soft circle."""
    orders, ratio = c.ratios(l_max)
    theta = np.asarray(theta, dtype=float)
    phase = np.exp(1j * orders * (theta[..., None] - c.beta))
    return -_far_prefactor(c.k) * (phase @ ratio)


def circle_scattered_field(c, x, l_max=None):
    """Scattered field at points with |x| >= a.

    v = -sum_l i^l J_l(ka)/H_l(ka) H_l(k|x|) e^{il(theta - beta)}; the i^l
    factor comes from the Jacobi-Anger expansion of the incident wave.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.hypot(x[:, 0], x[:, 1])
    if np.any(r < c.a * (1 - 1e-12)):
        raise DomainError("point lies inside the circle")
    orders, ratio = c.ratios(c.near_l_max() if l_max is None else l_max)
    theta = np.arctan2(x[:, 1], x[:, 0])
    h = specfun.hankel1_table(int(np.max(np.abs(orders))), c.k * r)[:, np.abs(orders)]
    h = h * np.where((orders < 0) & (orders % 2 == 1), -1.0, 1.0)
    terms = (1j**orders) * ratio * h * np.exp(1j * orders * (theta[:, None] - c.beta))
    return -terms.sum(axis=1)


def circle_cross_section(c, l_max=None):
    """Total cross-section from the modal sum, (4/k) sum |J_l/H_l|^2."""
    _, ratio = c.ratios(l_max)
    return 4.0 / c.k * float(np.sum(np.abs(ratio) ** 2))


def optical_theorem_cross_section(c, l_max=None):
    """Total cross-section from the forward amplitude (2D optical theorem)."""
    a_fwd = circle_far_field(c, c.beta, l_max)
    return -math.sqrt(8 * math.pi / c.k) * float(np.real(np.exp(0.25j * math.pi) * a_fwd))


def vc_far_field_matrix(k, x1, L, thetas):
    """Far-field columns of H_l(k|x - x1|) e^{il theta_1}, l = -L..L."""
    x1 = np.asarray(x1, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    orders = np.arange(-L, L + 1)
    shift = np.exp(-1j * k * dirs @ x1)
    cols = (-1j) ** orders * np.exp(1j * orders * thetas[:, None])
    return _far_prefactor(k) * shift[:, None] * cols


@dataclass
class IllposednessResult:
    r_min_far: float
    coeffs: np.ndarray
    near_table: np.ndarray  # columns: angle, Re v_c, Im v_c, Re v, Im v

    @property
    def sup_gap(self):
        t = self.near_table
        return float(np.max(np.abs((t[:, 1] - t[:, 3]) + 1j * (t[:, 2] - t[:, 4]))))


def illposedness_demo(c, x1=(0.8, 0.0), L=5, M_dirs=120, w_min=1e-12, n_table=20):
    """Fit the circle's far field by multipoles at ``x1`` and compare near fields."""
    x1 = np.asarray(x1, dtype=float)
    if np.hypot(*x1) >= c.a:
        raise DomainError("expansion centre must lie inside the circle")
    thetas = 2 * np.pi * np.arange(M_dirs) / M_dirs
    A = vc_far_field_matrix(c.k, x1, L, thetas)
    target = circle_far_field(c, thetas)
    sol = solve_cutoff(A, -target, w_min)
    r_far = normalized_norm(A @ sol.coeffs - target)
    angles = 2 * np.pi * np.arange(n_table) / n_table
    pts = c.a * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    vc = specfun.basis_2d(pts, x1[None, :], c.k, L) @ sol.coeffs
    v = circle_scattered_field(c, pts)
    table = np.column_stack([angles, vc.real, vc.imag, v.real, v.imag])
    return IllposednessResult(r_far, sol.coeffs, table)
