"""MRC for the exterior Dirichlet problem of the Laplace equation in 3D.

The potential is fitted on the boundary by decaying harmonics
Y_lm(x/|x|) / |x|^(l+1); the degree L is raised until the node residual
drops below the tolerance.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import geometry, specfun
from .errors import ConfigurationError, DomainError, SingularityError
from .lsq import solve_cutoff
from .scattering import SolveReport

L_MAX = 20


@dataclass
class StaticProblem:
    """Boundary data ``f`` is a callable on (M, 3) node arrays or a node-sampled array."""

    boundary: geometry.Boundary
    f: object
    L: int = 2

    def __post_init__(self):
        if self.boundary.dim != 3:
            raise ConfigurationError("static problems are three-dimensional")
        if not self.boundary.contains(np.zeros((1, 3)))[0]:
            raise ConfigurationError("origin must be interior to the obstacle")
        if self.L < 0:
            raise ConfigurationError("L must be nonnegative")

    def data(self, nodes):
        vals = self.f(nodes) if callable(self.f) else self.f
        vals = np.asarray(vals, dtype=complex).reshape(-1)
        if len(vals) != len(nodes):
            raise ConfigurationError("boundary data does not match the node count")
        return vals


def _degree(n_coeffs):
    L = math.isqrt(n_coeffs) - 1
    if (L + 1) ** 2 != n_coeffs:
        raise DomainError("coefficient count must be a perfect square")
    return L


def eval_potential(coeffs, x):
    """Sum of c_lm Y_lm(x/|x|) / |x|^(l+1)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if np.any(np.linalg.norm(x, axis=1) == 0):
        raise SingularityError("harmonic basis is singular at the origin")
    return specfun.harmonic_basis(x, _degree(len(coeffs))) @ coeffs


@dataclass
class HarmonicExpansion:
    L: int
    coeffs: np.ndarray
    boundary: geometry.Boundary = None

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.boundary is not None and np.any(self.boundary.contains(x)):
            raise DomainError("evaluation point lies inside the obstacle")
        return eval_potential(self.coeffs, x)

    def coefficient(self, ell, m):
        return complex(self.coeffs[specfun.sph_index(ell, m)])


def static_mrc(problem, M_nodes=450, w_min=1e-12, eps=1e-4, L_max=L_MAX):
    """Fit +f with degree L, L+1, ... up to ``L_max`` until r_min <= eps."""
    if eps <= 0:
        raise ConfigurationError("eps must be positive")
    nodes = geometry.boundary_nodes(problem.boundary, M_nodes)
    f = problem.data(nodes)
    history = []
    L = problem.L
    if (L + 1) ** 2 > M_nodes:
        raise ConfigurationError("more basis functions than boundary nodes")
    while True:
        A = specfun.harmonic_basis(nodes, L)
        # solve_cutoff minimizes ||b + A c||; b = -f fits +f
        sol = solve_cutoff(A, -f, w_min)
        history.append(sol.r_min)
        done = sol.r_min <= eps
        if done or L >= L_max or (L + 2) ** 2 > M_nodes:
            expansion = HarmonicExpansion(L, sol.coeffs, problem.boundary)
            return SolveReport(expansion, sol.r_min, len(history), done, history)
        L += 1
