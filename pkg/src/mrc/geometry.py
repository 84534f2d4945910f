"""Obstacle boundaries, grating profiles, node and source placement."""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, SamplingError

TWO_PI = 2.0 * np.pi


class Boundary:
    """Closed obstacle boundary in 2D or 3D."""

    dim = 0
    shape_id = ""

    @property
    def center(self):
        return np.zeros(self.dim)

    def contains(self, points):
        """Boolean mask: strictly inside the obstacle."""
        raise NotImplementedError

    def nodes(self, m_nodes):
        raise NotImplementedError

    def bounding_box(self):
        raise NotImplementedError

    def __str__(self):
        return self.shape_id


class Boundary2D(Boundary):
    dim = 2

    def param(self, t):
        """r(t) for t in [0, 2 pi); returns shape (..., 2)."""
        raise NotImplementedError

    def nodes(self, m_nodes):
        if m_nodes < 1:
            raise ConfigurationError("need at least one node")
        t = TWO_PI * np.arange(m_nodes) / m_nodes
        return self.param(t)

    @cached_property
    def _polygon(self):
        return self.param(TWO_PI * np.arange(4096) / 4096)

    def contains(self, points):
        return _inside_polygon(np.atleast_2d(points), self._polygon)

    def bounding_box(self):
        poly = self._polygon
        return poly.min(axis=0), poly.max(axis=0)


@dataclass(eq=False)
class Ellipse(Boundary2D):
    a: float
    b: float

    @property
    def shape_id(self):
        return f"ellipse:{self.a:g},{self.b:g}"

    def param(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def contains(self, points):
        p = np.atleast_2d(points)
        return (p[:, 0] / self.a) ** 2 + (p[:, 1] / self.b) ** 2 < 1.0

    def bounding_box(self):
        return np.array([-self.a, -self.b]), np.array([self.a, self.b])


class Circle(Ellipse):
    def __init__(self, a=1.0):
        super().__init__(a, a)

    @property
    def shape_id(self):
        return f"circle:{self.a:g}"


class Kite(Boundary2D):
    shape_id = "kite"

    def param(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([-0.65 + np.cos(t) + 0.65 * np.cos(2 * t), 1.5 * np.sin(t)], axis=-1)


class Triangle(Boundary2D):
    """Triangle parametrized by polar angle about an interior pole.

    r(t) is the boundary point hit by the ray from ``pole`` in direction
    (cos t, sin t). Scaling toward the pole keeps points inside, so the pole
    doubles as the shape centre.
    """

    shape_id = "triangle"

    def __init__(self, vertices=((-1.0, 0.0), (1.0, -1.0), (1.0, 1.0)), pole=(0.0, 0.0)):
        self.vertices = np.asarray(vertices, dtype=float)
        self.pole = np.asarray(pole, dtype=float)
        if not self.contains(self.pole[None, :])[0]:
            raise ConfigurationError("triangle pole must be interior")

    @property
    def center(self):
        return self.pole

    def param(self, t):
        t = np.asarray(t, dtype=float)
        d = np.stack([np.cos(t), np.sin(t)], axis=-1)
        dist = np.full(t.shape, np.inf)
        for i in range(3):
            a, b = self.vertices[i], self.vertices[(i + 1) % 3]
            e = b - a
            # solve pole + s d = a + u e for (s, u)
            det = d[..., 1] * e[0] - d[..., 0] * e[1]
            w = a - self.pole
            with np.errstate(divide="ignore", invalid="ignore"):
                s = (w[1] * e[0] - w[0] * e[1]) / det
                u = (d[..., 0] * w[1] - d[..., 1] * w[0]) / det
            ok = (np.abs(det) > 1e-14) & (s > 0) & (u >= -1e-12) & (u <= 1 + 1e-12)
            dist = np.where(ok, np.minimum(dist, s), dist)
        return self.pole + dist[..., None] * d

    def contains(self, points):
        p = np.atleast_2d(points)
        v = self.vertices
        signs = []
        for i in range(3):
            a, b = v[i], v[(i + 1) % 3]
            signs.append((b[0] - a[0]) * (p[:, 1] - a[1]) - (b[1] - a[1]) * (p[:, 0] - a[0]))
        signs = np.array(signs)
        return np.all(signs > 0, axis=0) | np.all(signs < 0, axis=0)

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


class Boundary3D(Boundary):
    dim = 3


def _angle_grid(m_nodes):
    n_theta = int(round(np.sqrt(m_nodes / 2.0)))
    if n_theta < 2 or m_nodes % n_theta:
        raise ConfigurationError(f"cannot split {m_nodes} nodes into an equal-angle grid")
    n_phi = m_nodes // n_theta
    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = TWO_PI * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    return th.ravel(), ph.ravel()


@dataclass(eq=False)
class Ellipsoid(Boundary3D):
    a: float
    b: float
    c: float

    @property
    def shape_id(self):
        return f"ellipsoid:{self.a:g},{self.b:g},{self.c:g}"

    @property
    def axes(self):
        return np.array([self.a, self.b, self.c])

    def nodes(self, m_nodes):
        th, ph = _angle_grid(m_nodes)
        unit = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
        return unit * self.axes

    def contains(self, points):
        p = np.atleast_2d(points)
        return np.sum((p / self.axes) ** 2, axis=1) < 1.0

    def bounding_box(self):
        return -self.axes, self.axes.copy()


class Sphere(Ellipsoid):
    def __init__(self, a=1.0):
        super().__init__(a, a, a)

    @property
    def shape_id(self):
        return f"sphere:{self.a:g}"


@dataclass(eq=False)
class Cube(Boundary3D):
    half: float = 1.0

    @property
    def shape_id(self):
        return f"cube:{self.half:g}"

    def nodes(self, m_nodes):
        per_face = m_nodes // 6
        n = int(round(np.sqrt(per_face)))
        if m_nodes % 6 or n * n != per_face:
            raise ConfigurationError(f"cube needs 6*n^2 nodes, got {m_nodes}")
        c = self.half * (-1.0 + (2 * np.arange(n) + 1.0) / n)
        u, v = (g.ravel() for g in np.meshgrid(c, c, indexing="ij"))
        faces = []
        for axis in range(3):
            for sign in (-1.0, 1.0):
                pts = np.empty((per_face, 3))
                others = [i for i in range(3) if i != axis]
                pts[:, axis] = sign * self.half
                pts[:, others[0]] = u
                pts[:, others[1]] = v
                faces.append(pts)
        return np.concatenate(faces)

    def contains(self, points):
        p = np.atleast_2d(points)
        return np.max(np.abs(p), axis=1) < self.half

    def bounding_box(self):
        h = np.full(3, self.half)
        return -h, h


def _inside_polygon(points, poly):
    """Crossing-number test against a closed polygon (vertices in order)."""
    x, y = points[:, 0:1], points[:, 1:2]
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    straddle = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    hits = straddle & (x < xcross)
    return (hits.sum(axis=1) % 2) == 1


def parse_shape(spec):
    """Build a boundary from a catalog id such as ``ellipse:2,1`` or ``kite``."""
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    if name == "profile":
        return PeriodicProfile(args.strip() or "I")
    try:
        vals = [float(a) for a in args.split(",")] if args else []
    except ValueError as exc:
        raise ConfigurationError(f"bad shape parameters in {spec!r}") from exc
    builders = {
        "ellipse": (Ellipse, 2, (2.0, 1.0)),
        "circle": (Circle, 1, (1.0,)),
        "kite": (Kite, 0, ()),
        "triangle": (Triangle, 0, ()),
        "sphere": (Sphere, 1, (1.0,)),
        "cube": (Cube, 1, (1.0,)),
        "ellipsoid": (Ellipsoid, 3, (4.0, 1.0, 1.0)),
    }
    if name not in builders:
        raise ConfigurationError(f"unknown shape {spec!r}")
    cls, nargs, default = builders[name]
    if not vals:
        vals = list(default)
    if len(vals) != nargs:
        raise ConfigurationError(f"{name} takes {nargs} parameters, got {len(vals)}")
    if any(v <= 0 for v in vals):
        raise ConfigurationError(f"shape parameters must be positive: {spec!r}")
    return cls(*vals)


def boundary_nodes(boundary, m_nodes):
    """Boundary nodes: uniform parameter in 2D, grid rules in 3D."""
    if m_nodes < 8 and boundary.dim == 3:
        raise ConfigurationError("need at least 8 nodes")
    return boundary.nodes(m_nodes)


def contains(boundary, point):
    """True iff ``point`` is strictly inside the obstacle."""
    point = np.asarray(point, dtype=float)
    mask = boundary.contains(point)
    return bool(mask[0]) if point.ndim == 1 else mask


def shrunk_contains(boundary, points, margin):
    """Inside test for the obstacle contracted by (1 - margin) toward its center."""
    p = np.atleast_2d(points)
    if margin == 0:
        return boundary.contains(p)
    c = boundary.center
    grown = c + (p - c) / (1.0 - margin)
    return boundary.contains(p) & boundary.contains(grown)


def sample_interior(boundary, n_points, margin, rng, max_rejections=10**6):
    """Uniform points in the margin-shrunk interior by rejection sampling."""
    if not 0.0 <= margin < 1.0:
        raise ConfigurationError("margin must lie in [0, 1)")
    lo, hi = boundary.bounding_box()
    c = boundary.center
    lo = c + (1.0 - margin) * (lo - c)
    hi = c + (1.0 - margin) * (hi - c)
    out = []
    rejected = 0
    batch = max(16, 2 * n_points)
    while len(out) < n_points:
        cand = rng.uniform(lo, hi, size=(batch, boundary.dim))
        ok = shrunk_contains(boundary, cand, margin)
        for p, good in zip(cand, ok):
            if good:
                out.append(p)
                rejected = 0
                if len(out) == n_points:
                    break
            else:
                rejected += 1
                if rejected >= max_rejections:
                    raise SamplingError("interior region appears to be empty")
    return np.array(out).reshape(n_points, boundary.dim)


def scaled_boundary_sources(boundary, n_sources, scale):
    """x_j = c + scale (r(2 pi (j-1)/J) - c), c the shape's center."""
    if boundary.dim != 2:
        raise ConfigurationError("scaled boundary sources are defined for 2D shapes")
    t = TWO_PI * np.arange(n_sources) / n_sources
    c = boundary.center
    pts = c + scale * (boundary.param(t) - c)
    if not np.all(boundary.contains(pts)):
        raise ConfigurationError("scaled source lies outside the obstacle")
    return pts


# --- periodic profiles ---------------------------------------------------

_PROFILE_IDS = ("I", "II", "III", "IV")


@dataclass(eq=False)
class PeriodicProfile:
    """One period of a grating profile y = f(x), 0 <= x <= period."""

    profile_id: str
    period: float = np.pi
    pole_shift: tuple = field(default=None)

    def __post_init__(self):
        self.profile_id = self.profile_id.upper()
        if self.profile_id not in _PROFILE_IDS:
            raise ConfigurationError(f"unknown profile {self.profile_id!r}")
        if self.pole_shift is None:
            self.pole_shift = (-0.03, -0.05) if self.profile_id == "IV" else (0.0, -0.1)

    dim = 2

    @property
    def shape_id(self):
        return f"profile:{self.profile_id}"

    def f(self, x):
        x = np.asarray(x, dtype=float)
        if self.profile_id == "I":
            return np.sin(2 * x)
        if self.profile_id == "II":
            return np.sin(0.2 * x)
        if self.profile_id == "III":
            return np.where(x <= self.period / 2, x, self.period - x)
        return x.copy()

    def height_at(self, x):
        """Profile height with the periodic extension.

        x is reduced into (0, L] so the height at a jump (x = L for II and IV)
        is the left limit f(L).
        """
        L = self.period
        xm = L - np.mod(L - np.asarray(x, dtype=float), L)
        return self.f(xm)

    def below(self, points):
        p = np.atleast_2d(points)
        return p[:, 1] < self.height_at(p[:, 0])

    def __str__(self):
        return self.shape_id


def profile_nodes_and_poles(profile, n_nodes, m_poles):
    """Nodes on one period of the profile and poles below it."""
    L = profile.period
    if profile.profile_id == "IV":
        if n_nodes % 2:
            raise ConfigurationError("profile IV needs an even node count")
        half = n_nodes // 2
        t = 2.0 * np.arange(1, half + 1) * L / n_nodes
        slant = np.stack([t, profile.f(t)], axis=-1)
        vertical = np.stack([np.full(half, L), profile.f(t)], axis=-1)
        nodes = np.concatenate([slant, vertical])
    else:
        t = np.arange(1, n_nodes + 1) * L / n_nodes
        nodes = np.stack([t, profile.f(t)], axis=-1)
    if n_nodes < 4 * m_poles:
        raise ConfigurationError(f"{m_poles} poles need at least {4 * m_poles} nodes")
    idx = 4 * np.arange(1, m_poles + 1) - 1
    poles = nodes[idx] + np.asarray(profile.pole_shift)
    if not np.all(profile.below(poles)):
        raise ConfigurationError("pole not strictly below the profile")
    return nodes, poles
