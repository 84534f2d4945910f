"""Stability Index Method (SIM) for global minimization on a box.

SIM runs a sequence of Stable Minimizing Set (SMS) searches: first with
uniform trial points, then with normal trial points of shrinking spread
around the current best point. Each SMS round combines a random batch with
local searches by a modified Powell method. The run stops when the
minimizing set fits in a small cube around its best point (stable) or when
the spread gets too small to resolve the set (unstable).
"""
import math
from dataclasses import dataclass

import numpy as np

GOLD = 1.618033988749895
CGOLD = 0.3819660112501051


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box ``[lower, upper]``; ``symmetric`` builds ``[-M, M]^N``."""

    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def symmetric(cls, n_dim, m_half):
        if not 1 <= n_dim <= 64:
            raise ValueError("dimension must be in 1..64")
        if m_half <= 0:
            raise ValueError("box half-size must be positive")
        return cls(np.full(n_dim, -float(m_half)), np.full(n_dim, float(m_half)))

    @property
    def n_dim(self):
        return len(self.lower)

    @property
    def m_half(self):
        return float(np.max(self.upper - self.lower) / 2.0)

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)

    def contains(self, x):
        x = np.asarray(x)
        return np.all((x >= self.lower) & (x <= self.upper), axis=-1)


@dataclass(frozen=True)
class SimParams:
    alpha: float = 0.8
    delta: float = 0.001
    gamma: float = 0.001
    K: int = 30
    L_batch: int = 5000
    P: int = 6
    N_max: int = 30

    def __post_init__(self):
        for name in ("alpha", "delta", "gamma"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.K < 1 or self.L_batch <= self.K or self.P < 1 or self.N_max < 1:
            raise ValueError("need K >= 1, L_batch > K, P >= 1, N_max >= 1")


@dataclass
class MinimizingSet:
    points: np.ndarray
    values: np.ndarray
    iterations: int = 0

    @property
    def minimizer(self):
        return self.points[int(np.argmin(self.values))]

    @property
    def min_value(self):
        return float(np.min(self.values))

    @property
    def radius(self):
        return float(np.max(np.linalg.norm(self.points - self.minimizer, axis=1)))

    @property
    def diameter(self):
        d = self.points[:, None, :] - self.points[None, :, :]
        return float(np.max(np.linalg.norm(d, axis=-1)))


@dataclass
class SimResult:
    x_p: np.ndarray
    f_p: float
    stable: bool
    stability_index: float
    rounds: int
    final_set: MinimizingSet
    n_evals: int = 0


class _Counted:
    """Objective wrapper counting point evaluations."""

    def __init__(self, f):
        self.f = f
        self.count = 0

    def __call__(self, x):
        self.count += 1
        return float(self.f(x))

    def batch(self, pts):
        self.count += len(pts)
        try:
            vals = np.asarray(self.f(pts), dtype=float)
            if vals.shape == (len(pts),):
                return vals
        except Exception:  # objective not vectorized
            pass
        return np.array([float(self.f(p)) for p in pts])


# --- line search -----------------------------------------------------------


def _brent(phi, a, b, x, fx, tol=1.5e-8, max_iter=100):
    """Brent's minimization on [a, b] starting from the interior point x."""
    w = v = x
    fw = fv = fx
    d = e = 0.0
    for _ in range(max_iter):
        xm = 0.5 * (a + b)
        tol1 = tol * abs(x) + 1e-11
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            break
        golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            etemp = e
            e = d
            if abs(p) < abs(0.5 * q * etemp) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = math.copysign(tol1, xm - x)
                golden = False
        if golden:
            e = (a - x) if x >= xm else (b - x)
            d = CGOLD * e
        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        fu = phi(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v = u
                fv = fu
    return x, fx


def line_minimize(phi, f0, t_lo, t_hi, step, f_step=None):
    """Minimize phi(t) on [t_lo, t_hi] (t_lo <= 0 <= t_hi) starting at t = 0.

    Bracketing by golden expansion from (0, step), then Brent. Never returns
    a value above ``f0``.
    """
    if t_hi - t_lo <= 0.0:
        return 0.0, f0

    def clipped(t):
        return min(max(t, t_lo), t_hi)

    if t_hi <= 0.0:
        step = -abs(step)
    elif t_lo >= 0.0:
        step = abs(step)
    b = clipped(step)
    fb = phi(b) if (f_step is None or b != step) else f_step
    a, fa = 0.0, f0
    if fb > fa:
        b2 = clipped(-b)
        if b2 == 0.0:
            return _brent(phi, min(0.0, b), max(0.0, b), 0.0, f0)
        fb2 = phi(b2)
        if fb2 > fa:
            return _brent(phi, min(b, b2), max(b, b2), 0.0, f0)
        b, fb = b2, fb2
    # now fb <= fa: expand beyond b
    while True:
        if b in (t_lo, t_hi):
            lo, hi = (a, b) if a < b else (b, a)
            return _brent(phi, lo, hi, b, fb)
        c = clipped(b + GOLD * (b - a))
        fc = phi(c)
        if fc >= fb:
            lo, hi = (a, c) if a < c else (c, a)
            return _brent(phi, lo, hi, b, fb)
        a, fa, b, fb = b, fb, c, fc


def _t_range(p, d, lower, upper):
    """Parameter interval keeping p + t d inside the box."""
    t_lo, t_hi = -np.inf, np.inf
    for pi, di, lo, hi in zip(p, d, lower, upper):
        if di > 0:
            t_lo = max(t_lo, (lo - pi) / di)
            t_hi = min(t_hi, (hi - pi) / di)
        elif di < 0:
            t_lo = max(t_lo, (hi - pi) / di)
            t_hi = min(t_hi, (lo - pi) / di)
    return min(t_lo, 0.0), max(t_hi, 0.0)


def powell_minimize(f, x0, box, tol=1e-8, max_cycles=50, step=None):
    """Modified Powell search: coordinate sweeps plus the aggregate direction.

    Each cycle minimizes along every coordinate axis in turn (p_0 -> p_N) and
    then along v = p_N - p_0 starting from p_0. Iterates stay in ``box``.
    Returns a point with ``f(p) <= f(x0)``.
    """
    lower, upper = np.asarray(box.lower, float), np.asarray(box.upper, float)
    n = len(lower)
    p0 = np.clip(np.asarray(x0, dtype=float), lower, upper)
    f0 = float(f(p0))
    if step is None:
        step = 0.1 * float(np.max(upper - lower) / 2.0)
    steps = np.full(n, step)
    floor = 1e-6 * step

    for _ in range(max_cycles):
        f_start = f0
        p, fp = p0.copy(), f0
        for i in range(n):
            d = np.zeros(n)
            d[i] = 1.0

            def phi(t, p=p, d=d):
                return float(f(p + t * d))

            t_lo, t_hi = _t_range(p, d, lower, upper)
            t, ft = line_minimize(phi, fp, t_lo, t_hi, steps[i])
            if ft < fp:
                p = np.clip(p + t * d, lower, upper)
                fp = ft
            steps[i] = max(abs(t), floor)
        v = p - p0
        if np.any(v != 0.0):

            def phi(t, p0=p0, v=v):
                return float(f(p0 + t * v))

            t_lo, t_hi = _t_range(p0, v, lower, upper)
            t, ft = line_minimize(phi, f0, t_lo, t_hi, 1.0, f_step=fp)
            if ft < fp:
                p, fp = np.clip(p0 + t * v, lower, upper), ft
        p0, f0 = p, fp
        if 2.0 * (f_start - f0) <= tol * (abs(f_start) + abs(f0)) + 1e-300:
            break
    return p0


# --- SMS / SIM -------------------------------------------------------------


def _k_best(points, values, flags, k):
    order = np.argsort(values, kind="stable")[:k]
    return points[order], values[order], flags[order]


def _normal_batch(rng, mean, sigma, n, box, tries=100):
    pts = rng.normal(mean, sigma, size=(n, box.n_dim))
    bad = ~box.contains(pts)
    for _ in range(tries):
        if not bad.any():
            break
        pts[bad] = rng.normal(mean, sigma, size=(int(bad.sum()), box.n_dim))
        bad = ~box.contains(pts)
    return box.clip(pts)


def sms(f, box, params, rng, mean=None, sigma=None, carry=None, local_search=None):
    """Stable Minimizing Set search.

    With ``sigma is None`` trial batches are uniform in ``box``; otherwise
    they are normal with standard deviation ``sigma`` around ``mean`` (first
    batch) and then around the current best point. ``carry`` is the previous
    round's set, merged into the first candidate pool.
    """
    fc = f if isinstance(f, _Counted) else _Counted(f)
    if local_search is None:

        def local_search(x):
            return powell_minimize(fc, x, box)

    if sigma is not None and carry is None:
        raise ValueError("normal sampling needs the previous minimizing set")
    M = box.m_half
    K = params.K
    prev_pts = carry.points if carry is not None else np.empty((0, box.n_dim))
    prev_vals = carry.values if carry is not None else np.empty(0)
    prev_flags = np.zeros(len(prev_vals), dtype=bool)
    center = mean
    radii = []
    j = 0
    while True:
        j += 1
        if sigma is None:
            batch = rng.uniform(box.lower, box.upper, size=(params.L_batch, box.n_dim))
        else:
            batch = _normal_batch(rng, center, sigma, params.L_batch, box)
        vals = fc.batch(batch)
        pts = np.concatenate([batch, prev_pts])
        allv = np.concatenate([vals, prev_vals])
        flg = np.concatenate([np.zeros(len(batch), dtype=bool), prev_flags])
        qu_pts, qu_vals, qu_flags = _k_best(pts, allv, flg, K)

        new_pts, new_vals = [], []
        for u in qu_pts[~qu_flags]:
            v = local_search(u)
            new_pts.append(v)
            new_vals.append(fc(v))
        qv_pts = np.array(new_pts).reshape(-1, box.n_dim)
        qv_vals = np.array(new_vals)

        union_pts = np.concatenate([qu_pts, qv_pts])
        union_vals = np.concatenate([qu_vals, qv_vals])
        union_flags = np.ones(len(union_vals), dtype=bool)
        prev_pts, prev_vals, prev_flags = _k_best(union_pts, union_vals, union_flags, K)
        q = prev_pts[0]
        radii.append(float(np.max(np.linalg.norm(prev_pts - q, axis=1))))
        center = q
        if j >= params.N_max:
            break
        if j >= params.P:
            r_avg = sum(radii[-params.P:]) / params.P
            if abs(radii[-1] - r_avg) <= 2.0 * params.gamma * M:
                break
    return MinimizingSet(prev_pts.copy(), prev_vals.copy(), iterations=j)


def in_stability_cube(mset, x, delta, m_half):
    """S subset of the cube centred at x with side 2 delta M (L-infinity)."""
    return bool(np.all(np.abs(mset.points - x) <= delta * m_half))


def sim_minimize(f, box, params=None, rng=None, seed=None):
    """Global minimization by the Stability Index Method."""
    params = params or SimParams()
    if rng is None:
        rng = np.random.default_rng(seed)
    fc = _Counted(f)
    M = box.m_half
    mset = sms(fc, box, params, rng)
    x = mset.minimizer
    n = 0
    stable = in_stability_cube(mset, x, params.delta, M)
    while not stable:
        n += 1
        mu = params.alpha**n
        mset = sms(fc, box, params, rng, mean=x, sigma=mu, carry=mset)
        x = mset.minimizer
        stable = in_stability_cube(mset, x, params.delta, M)
        if not stable and 3.0 * mu < 2.0 * params.delta * M:
            break
    return SimResult(
        x_p=x.copy(),
        f_p=mset.min_value,
        stable=stable,
        stability_index=mset.diameter,
        rounds=n + 1,
        final_set=mset,
        n_evals=fc.count,
    )


# --- test functions ----------------------------------------------------------


def test_fn1(x):
    x = np.asarray(x, dtype=float)
    i = np.arange(1, 6)
    sx = np.sum(i * np.cos((i + 1) * x[..., 0:1] + i), axis=-1)
    sy = np.sum(i * np.cos((i + 1) * x[..., 1:2] + i), axis=-1)
    return sx * sy + 0.5 * ((x[..., 0] + 1.4213) ** 2 + (x[..., 1] + 0.80032) ** 2)


def test_fn2(x):
    x = np.asarray(x, dtype=float)
    a, b = x[..., 0], x[..., 1]
    return (
        np.exp(np.sin(50 * a))
        + np.sin(60 * np.exp(b))
        + np.sin(70 * np.sin(a))
        + np.sin(np.sin(80 * b))
        - np.sin(10 * (a + b))
        + (a * a + b * b) / 4
    )


def test_fn3(x):
    # Levy-type coupling sin^2(pi y_{i+1}); this is the reading whose minimum
    # at (1, ..., 1) is exactly 0
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    y = 1.0 + 0.25 * (x - 1.0)
    s = 10.0 * np.sin(np.pi * y[..., 0]) ** 2
    s = s + np.sum((y[..., :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[..., 1:]) ** 2), axis=-1)
    s = s + (y[..., -1] - 1.0) ** 2
    return np.pi / n * s


TEST_FUNCTIONS = {
    1: (test_fn1, 2, 5.0),
    2: (test_fn2, 2, 1.0),
    3: (test_fn3, None, 10.0),
}


def test_function(fn_id, x):
    """Evaluate test function 1, 2 or 3 at ``x``."""
    if fn_id not in TEST_FUNCTIONS:
        raise ValueError(f"unknown test function {fn_id}")
    func, dim, _ = TEST_FUNCTIONS[fn_id]
    x = np.asarray(x, dtype=float)
    if dim is not None and x.shape[-1] != dim:
        raise ValueError(f"test function {fn_id} is {dim}-dimensional")
    return func(x)


test_fn1.__test__ = test_fn2.__test__ = test_fn3.__test__ = test_function.__test__ = False
