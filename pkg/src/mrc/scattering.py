"""MRC solvers for sound-soft obstacle scattering in 2D and 3D.

The scattered field is represented by outgoing multipoles centred at points
inside the obstacle. Coefficients are chosen so that the total field
(incident + scattered) is as small as possible on boundary nodes; by the
modified Rayleigh theorem a small boundary residual controls the error of the
scattered field everywhere outside the obstacle.
"""
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import geometry, specfun
from .errors import ConfigurationError, DomainError
from .lsq import normalized_norm, solve_cutoff
from .sim import BoxDomain, powell_minimize

FORMAT_VERSION = 1


def incident_field(k, alpha, x):
    """Plane wave exp(i k alpha . x)."""
    return np.exp(1j * k * (np.asarray(x, dtype=float) @ np.asarray(alpha, dtype=float)))


def direction_2d(angle):
    return np.array([math.cos(angle), math.sin(angle)])


def direction_3d(theta, phi):
    """Unit vector with azimuth ``theta`` and polar angle ``phi``."""
    return np.array([math.sin(phi) * math.cos(theta), math.sin(phi) * math.sin(theta), math.cos(phi)])


def n_basis(dim, L):
    return 2 * L + 1 if dim == 2 else (L + 1) ** 2


def design_matrix(dim, nodes, sources, k, L):
    sources = np.asarray(sources, dtype=float).reshape(-1, dim)
    if dim == 2:
        return specfun.basis_2d(nodes, sources, k, L)
    return specfun.basis_3d(nodes, sources, k, L)


@dataclass
class ScatteringProblem:
    boundary: geometry.Boundary
    k: float
    alpha: np.ndarray
    m_nodes: int

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.k <= 0:
            raise ConfigurationError("wavenumber must be positive")
        if self.alpha.shape != (self.boundary.dim,) or abs(np.linalg.norm(self.alpha) - 1) > 1e-12:
            raise ConfigurationError("incident direction must be a unit vector of the right dimension")

    @property
    def dim(self):
        return self.boundary.dim

    @cached_property
    def nodes(self):
        return geometry.boundary_nodes(self.boundary, self.m_nodes)

    @cached_property
    def u0(self):
        return incident_field(self.k, self.alpha, self.nodes)

    def design(self, sources, L):
        return design_matrix(self.dim, self.nodes, sources, self.k, L)


@dataclass
class Expansion:
    """Multipole sources with coefficients; evaluable outside the obstacle.

    ``coeffs[j]`` holds the coefficients of source ``j``: l = -L..L in 2D,
    (l, m) in the order (0,0), (1,-1), (1,0), (1,1), ... in 3D.
    """

    dim: int
    k: float
    L: int
    sources: np.ndarray = None
    coeffs: np.ndarray = None
    boundary: geometry.Boundary = field(default=None, repr=False)

    def __post_init__(self):
        nb = n_basis(self.dim, self.L)
        if self.sources is None:
            self.sources = np.empty((0, self.dim))
        if self.coeffs is None:
            self.coeffs = np.empty((0, nb), dtype=complex)
        self.sources = np.asarray(self.sources, dtype=float).reshape(-1, self.dim)
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1, nb)
        if len(self.sources) != len(self.coeffs):
            raise ValueError("one coefficient row per source is required")

    def append(self, sources, coeffs):
        nb = n_basis(self.dim, self.L)
        self.sources = np.concatenate([self.sources, np.reshape(sources, (-1, self.dim))])
        self.coeffs = np.concatenate([self.coeffs, np.reshape(coeffs, (-1, nb))])

    @property
    def n_sources(self):
        return len(self.sources)

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.n_sources == 0:
            return np.zeros(len(x), dtype=complex)
        A = design_matrix(self.dim, x, self.sources, self.k, self.L)
        return A @ self.coeffs.ravel()

    def far_field(self, directions):
        d = np.atleast_2d(np.asarray(directions, dtype=float))
        if np.any(np.abs(np.linalg.norm(d, axis=1) - 1.0) > 1e-12):
            raise DomainError("far-field direction must be a unit vector")
        if self.n_sources == 0:
            return np.zeros(len(d), dtype=complex)
        shift = np.exp(-1j * self.k * d @ self.sources.T)  # (n_dir, J)
        if self.dim == 2:
            orders = np.arange(-self.L, self.L + 1)
            theta = np.arctan2(d[:, 1], d[:, 0])
            ang = (-1j) ** orders * np.exp(1j * orders * theta[:, None])  # (n_dir, 2L+1)
            pref = math.sqrt(2.0 / (math.pi * self.k)) * np.exp(-0.25j * math.pi)
        else:
            ang = specfun.sph_harmonics_table(self.L, d)
            pref = 1.0 / self.k
        return pref * np.einsum("dj,jn,dn->d", shift, self.coeffs, ang)

    # -- plain-text record ------------------------------------------------

    def to_text(self):
        buf = io.StringIO()
        buf.write(f"# mrc-expansion v{FORMAT_VERSION}\n")
        buf.write(f"dim {self.dim}\nk {self.k!r}\nL {self.L}\n")
        labels = _labels(self.dim, self.L)
        for j, (z, row) in enumerate(zip(self.sources, self.coeffs)):
            zs = " ".join(repr(float(c)) for c in z)
            for (ell, m), c in zip(labels, row):
                buf.write(f"{j} {zs} {ell} {m} {float(c.real)!r} {float(c.imag)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text):
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("# mrc-expansion v"):
            raise ValueError("not an expansion record")
        version = int(lines[0].rsplit("v", 1)[1])
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported record version {version}")
        header = dict(ln.split(None, 1) for ln in lines[1:4])
        dim, k, L = int(header["dim"]), float(header["k"]), int(header["L"])
        nb = n_basis(dim, L)
        rows = [ln.split() for ln in lines[4:]]
        n_src = len(rows) // nb if rows else 0
        sources = np.zeros((n_src, dim))
        coeffs = np.zeros((n_src, nb), dtype=complex)
        for i, row in enumerate(rows):
            j = int(row[0])
            sources[j] = [float(v) for v in row[1 : 1 + dim]]
            coeffs[j, i % nb] = complex(float(row[-2]), float(row[-1]))
        return cls(dim, k, L, sources, coeffs)


def _labels(dim, L):
    if dim == 2:
        return [(abs(l), l) for l in range(-L, L + 1)]
    return [(ell, m) for ell in range(L + 1) for m in range(-ell, ell + 1)]


@dataclass
class SolveReport:
    expansion: Expansion
    r_min: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    far_field_increments: list = field(default_factory=list, repr=False)


def eval_scattered(expansion, x, k=None):
    """Scattered field at exterior points."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if expansion.boundary is not None and np.any(expansion.boundary.contains(x)):
        raise DomainError("evaluation point lies inside the obstacle")
    return expansion.evaluate(x)


def far_field(expansion, alpha_prime):
    """Scattering amplitude of the expansion in direction(s) ``alpha_prime``."""
    return expansion.far_field(alpha_prime)


def multipoint_mrc(problem, sources, L, w_min=1e-12, eps=1e-4):
    """Single least-squares fit with the given interior sources."""
    sources = np.asarray(sources, dtype=float).reshape(-1, problem.dim)
    if len(sources) and not np.all(problem.boundary.contains(sources)):
        raise ConfigurationError("all sources must lie inside the obstacle")
    expansion = Expansion(problem.dim, problem.k, L, boundary=problem.boundary)
    b = problem.u0
    if len(sources) == 0:
        r = normalized_norm(b)
        return SolveReport(expansion, r, 1, r <= eps, [r])
    A = problem.design(sources, L)
    sol = solve_cutoff(A, b, w_min)
    expansion.append(sources, sol.coeffs)
    return SolveReport(expansion, sol.r_min, 1, sol.r_min <= eps, [sol.r_min])


def random_mrc(
    problem,
    J,
    L,
    eps,
    N_max=6000,
    w_min=1e-12,
    rng=None,
    margin=0.0,
    initial_sources=None,
    callback=None,
):
    """Random multi-point MRC.

    Each round fits the current boundary data ``g`` with J random interior
    sources and adds the fitted field to ``g``; sources and coefficients are
    accumulated across rounds. If ``initial_sources`` is given, round 1 is the
    multi-point fit with those sources and random rounds follow.
    """
    if J < 1 or eps <= 0:
        raise ConfigurationError("need J >= 1 and eps > 0")
    rng = rng if rng is not None else np.random.default_rng()
    expansion = Expansion(problem.dim, problem.k, L, boundary=problem.boundary)
    g = problem.u0.copy()
    history = []
    r = normalized_norm(g)
    n = 0
    if initial_sources is not None:
        initial_sources = np.asarray(initial_sources, dtype=float).reshape(-1, problem.dim)
        if not np.all(problem.boundary.contains(initial_sources)):
            raise ConfigurationError("all sources must lie inside the obstacle")
    while n < N_max:
        n += 1
        if n == 1 and initial_sources is not None:
            pts = initial_sources
        else:
            pts = geometry.sample_interior(problem.boundary, J, margin, rng)
        A = problem.design(pts, L)
        sol = solve_cutoff(A, g, w_min)
        g = g + A @ sol.coeffs
        expansion.append(pts, sol.coeffs)
        r = sol.r_min
        history.append(r)
        if callback is not None:
            callback(n, r)
        if r <= eps:
            break
    return SolveReport(expansion, r, n, r <= eps, history)


def optimal_mrc(
    problem,
    L,
    eps,
    N_max=100,
    w_min=1e-12,
    rng=None,
    margin=0.05,
    n_seeds=8,
    powell_tol=1e-6,
    powell_cycles=20,
    callback=None,
):
    """MRC with one optimally placed source per round.

    Each round minimizes the boundary residual over the source location
    (modified Powell search from the best of ``n_seeds`` random interior
    points) and, for each trial location, over the coefficients (SVD).
    """
    if eps <= 0:
        raise ConfigurationError("eps must be positive")
    rng = rng if rng is not None else np.random.default_rng()
    boundary = problem.boundary
    lo, hi = boundary.bounding_box()
    c = boundary.center
    box = BoxDomain(c + (1 - margin) * (lo - c), c + (1 - margin) * (hi - c))
    expansion = Expansion(problem.dim, problem.k, L, boundary=boundary)
    g = problem.u0.copy()
    history, increments = [], []
    r = normalized_norm(g)
    n = 0
    while n < N_max:
        n += 1

        def objective(z, g=g):
            if not geometry.shrunk_contains(boundary, z, margin)[0]:
                return 1e3 + float(np.linalg.norm(z - c))
            A = problem.design(z, L)
            return solve_cutoff(A, g, w_min).r_min

        seeds = geometry.sample_interior(boundary, n_seeds, margin, rng)
        seed_vals = [objective(s) for s in seeds]
        z0 = seeds[int(np.argmin(seed_vals))]
        z = powell_minimize(objective, z0, box, tol=powell_tol, max_cycles=powell_cycles)
        A = problem.design(z, L)
        sol = solve_cutoff(A, g, w_min)
        g = g + A @ sol.coeffs
        expansion.append(z, sol.coeffs)
        increments.append(Expansion(problem.dim, problem.k, L, z, sol.coeffs))
        r = sol.r_min
        history.append(r)
        if callback is not None:
            callback(n, r)
        if r <= eps:
            break
    return SolveReport(expansion, r, n, r <= eps, history, increments)
