"""Acceptance criteria, one test each.

Every test prints a single ``CRITERION n PASS|FAIL`` line (also collected in
the terminal summary). Tolerances are the pinned ones; several runs take
minutes, see the README for the expected total.
"""
import math
import time

import numpy as np
import pytest

from mrc import geometry, oracle, periodic, presets, scattering, sim, specfun
from mrc.lsq import normalized_norm, solve_cutoff
from mrc.static import StaticProblem, static_mrc

# printed residuals of the grating experiments, (profile, theta in degrees)
GRATING_REFERENCE = {
    ("I", 45): 0.000424, ("I", 60): 0.000407, ("I", 90): 0.000371,
    ("II", 45): 0.001491, ("II", 60): 0.001815, ("II", 90): 0.002089,
    ("III", 45): 0.009623, ("III", 60): 0.011903, ("III", 90): 0.013828,
    ("IV", 45): 0.014398, ("IV", 60): 0.017648, ("IV", 90): 0.020451,
}

# printed exact near field (Re v, Im v) on the unit circle at alpha' = 2 pi i / 20
NEAR_FIELD_REFERENCE = [
    (-0.54030, -0.84147), (-0.58082, -0.81403), (-0.69021, -0.72361), (-0.83217, -0.55452),
    (-0.95263, -0.30412), (-1.00000, 0.00000), (-0.95263, 0.30412), (-0.83217, 0.55452),
    (-0.69021, 0.72361), (-0.58082, 0.81403), (-0.54030, 0.84147), (-0.58082, 0.81403),
    (-0.69021, 0.72361), (-0.83217, 0.55452), (-0.95263, 0.30412), (-1.00000, 0.00000),
    (-0.95263, -0.30412), (-0.83217, -0.55452), (-0.69021, -0.72361), (-0.58082, -0.81403),
]


@pytest.fixture
def record(request):
    def _record(n, ok, detail):
        line = f"CRITERION {n} {'PASS' if ok else 'FAIL'}: {detail}"
        print(line)
        request.config.acceptance_lines.append(line)
        return ok

    return _record


def _problem_2d(shape, k, deg=0.0, m=720):
    return scattering.ScatteringProblem(geometry.parse_shape(shape), k, scattering.direction_2d(math.radians(deg)), m)


def _problem_3d(shape, k, polar, m):
    theta, phi = (math.radians(float(v)) for v in polar.split(","))
    return scattering.ScatteringProblem(geometry.parse_shape(shape), k, scattering.direction_3d(theta, phi), m)


def _seed_ensemble(run, needed, total):
    """Run seeds until the verdict is decided; returns (successes, tried, details)."""
    ok, tried, details = 0, 0, []
    for seed in range(total):
        good, info = run(seed)
        ok += good
        tried += 1
        details.append(info)
        if ok >= needed or (tried - ok) > total - needed:
            break
    return ok, tried, details


def test_criterion_1_circle_exactness(record):
    pr = _problem_2d("circle:1", 1.0)
    t = time.perf_counter()
    rep = scattering.optimal_mrc(pr, 5, 2e-3, N_max=100, rng=np.random.default_rng(0))
    dt = time.perf_counter() - t
    ok = rep.iterations == 1 and rep.r_min <= 1e-6 and dt < 1.0
    record(1, ok, f"circle k=1 L=5: iterations={rep.iterations} r_min={rep.r_min:.3e} (need <=1e-6) time={dt:.2f}s")
    assert ok


def test_criterion_2_oracle_equivalence(record):
    t = time.perf_counter()
    worst, runs = 0.0, []
    ring = 2.0 * np.stack([np.cos(np.linspace(0, 2 * np.pi, 200, endpoint=False)),
                           np.sin(np.linspace(0, 2 * np.pi, 200, endpoint=False))], axis=1)
    for k in (1.0, 5.0):
        pr = _problem_2d("circle:1", k)
        init = geometry.scaled_boundary_sources(pr.boundary, 8, 0.5)
        reports = [
            scattering.random_mrc(pr, 1, 5, 1e-3, N_max=200, rng=np.random.default_rng(0), initial_sources=init),
        ]
        if k == 1.0:
            reports.append(scattering.optimal_mrc(pr, 5, 1e-3, N_max=30, rng=np.random.default_rng(0)))
        exact = oracle.circle_scattered_field(oracle.CircleScatterer(1.0, k, 0.0), ring)
        for rep in reports:
            if rep.converged and rep.r_min <= 1e-3:
                err = normalized_norm(rep.expansion.evaluate(ring) - exact) / normalized_norm(exact)
                worst = max(worst, err)
                runs.append(f"k={k:g}:{err:.1e}")
    dt = time.perf_counter() - t
    ok = bool(runs) and worst <= 1e-2 and dt < 10.0
    record(2, ok, f"relative error on |x|=2 worst={worst:.2e} (need <=1e-2) over {len(runs)} converged solves, time={dt:.1f}s")
    assert ok


TABLE1_CASES = [f"table1-{s}-k{k}-a10" for s in presets.SHAPES_2D for k in (1, 5)]


def test_criterion_3_random_2d(record):
    failing, summary = [], []
    for name in TABLE1_CASES:
        cfg = presets.get_preset(name)
        pr = _problem_2d(cfg["shape"], cfg["k"], cfg["alpha_deg"], cfg["nodes"])
        _, J0, scale = cfg["init"].split(":")
        init = geometry.scaled_boundary_sources(pr.boundary, int(J0), float(scale))

        def run(seed):
            rep = scattering.random_mrc(
                pr, cfg["J"], cfg["L"], cfg["eps"], cfg["nmax"], cfg["wmin"],
                np.random.default_rng(seed), initial_sources=init,
            )
            return rep.converged, f"{rep.iterations}:{rep.r_min:.1e}"

        ok, tried, details = _seed_ensemble(run, 4, 5)
        summary.append(f"{name.removeprefix('table1-')} {ok}/{tried} [{' '.join(details)}]")
        if ok < 4:
            failing.append(name)
    ok = not failing
    record(3, ok, f"cases converged on >=4/5 seeds: {len(TABLE1_CASES) - len(failing)}/{len(TABLE1_CASES)}; " + "; ".join(summary))
    assert ok


def test_criterion_4_random_3d(record):
    sphere = _problem_3d("sphere:1", 1.0, presets.DIRS_3D["dir1"], 450)
    cube = _problem_3d("cube:1", 1.0, presets.DIRS_3D["dir1"], 1350)

    def sphere_run(seed):
        rep = scattering.random_mrc(sphere, 80, 0, 2e-4, N_max=5, w_min=1e-12, rng=np.random.default_rng(seed))
        return rep.converged, f"{rep.iterations}:{rep.r_min:.1e}"

    def cube_run(seed):
        rep = scattering.random_mrc(cube, 80, 0, 2e-3, N_max=1200, w_min=1e-12, rng=np.random.default_rng(seed))
        return rep.converged, f"{rep.iterations}:{rep.r_min:.1e}"

    s_ok, s_n, s_det = _seed_ensemble(sphere_run, 4, 5)
    c_ok, c_n, c_det = _seed_ensemble(cube_run, 4, 5)
    ok = s_ok >= 4 and c_ok >= 4
    record(
        4, ok,
        f"sphere k=1 r<=2e-4 in <=5 it: {s_ok}/{s_n} [{' '.join(s_det)}]; "
        f"cube k=1 dir1 r<=2e-3 in <=1200 it: {c_ok}/{c_n} [{' '.join(c_det)}]",
    )
    assert ok


def test_criterion_5_optimal(record):
    parts, ok = [], True
    for deg in (0.0, 90.0):
        rep = scattering.optimal_mrc(_problem_2d("kite", 1.0, deg), 5, 2e-3, N_max=100, rng=np.random.default_rng(0))
        ok &= rep.converged
        parts.append(f"kite a={deg:g}: {rep.iterations} it r={rep.r_min:.2e}")
    for tag in ("dir1", "dir2"):
        pr = _problem_3d("cube:1", 1.0, presets.DIRS_3D[tag], 1350)
        rep = scattering.optimal_mrc(pr, presets.OPTIMAL_L_3D, 2e-3, N_max=100, rng=np.random.default_rng(0))
        ok &= rep.converged
        parts.append(f"cube {tag} L={presets.OPTIMAL_L_3D}: {rep.iterations} it r={rep.r_min:.2e}")
    for deg in (0.0, 90.0):
        rep = scattering.optimal_mrc(_problem_2d("ellipse:0.1,1", 1.0, deg), 5, 2e-3, N_max=100, rng=np.random.default_rng(0))
        ok &= rep.converged or rep.r_min <= 1e-2
        parts.append(f"ellipse(0.1,1) a={deg:g}: {rep.iterations} it r={rep.r_min:.2e} (<=1e-2 allowed)")
    record(5, ok, "; ".join(parts))
    assert ok


def test_criterion_6_gratings(record):
    worst, slow, parts = 0.0, 0.0, []
    for (pid, deg), ref in GRATING_REFERENCE.items():
        t = time.perf_counter()
        rep = periodic.periodic_mrc(
            geometry.PeriodicProfile(pid), periodic.QpParams(1.0, math.radians(deg)),
            N_nodes=256, M_poles=64, w_min=1e-8, eps=2 * ref, b=1.2, j_max=120, retry=False,
        )
        slow = max(slow, time.perf_counter() - t)
        worst = max(worst, rep.r_min / ref)
        parts.append(f"{pid}/{deg}:{rep.r_min:.2e}")
    ok = worst <= 2.0 and slow <= 120.0
    record(6, ok, f"max r_min/printed={worst:.2f} (need <=2), slowest={slow:.1f}s; " + " ".join(parts))
    assert ok


def test_criterion_7_illposedness(record):
    c = oracle.CircleScatterer(1.0, 1.0, 0.0)
    res = oracle.illposedness_demo(c, x1=(0.8, 0.0), L=5, M_dirs=120)
    t = res.near_table
    pts = np.stack([np.cos(t[:, 0]), np.sin(t[:, 0])], axis=1)
    u0 = np.exp(1j * pts @ c.alpha)
    v = t[:, 3] + 1j * t[:, 4]
    boundary_err = float(np.max(np.abs(v + u0)))
    ref = np.array(NEAR_FIELD_REFERENCE)
    table_err = float(np.max(np.abs(t[:, 3:5] - ref)))
    ok = res.r_min_far <= 5e-4 and boundary_err <= 1e-8 and table_err <= 5e-6 and res.sup_gap > 100
    record(
        7, ok,
        f"far-field residual={res.r_min_far:.4e} (<=5e-4); |v+u0| on S={boundary_err:.1e} (<=1e-8); "
        f"table deviation={table_err:.1e} (<=5e-6); sup gap={res.sup_gap:.1f} (>100)",
    )
    assert ok


def _sim_rate(fn, dim, target, tol, runs=20):
    func, _, m_half = sim.TEST_FUNCTIONS[fn]
    box = sim.BoxDomain.symmetric(dim, m_half)
    t = time.perf_counter()
    hits = sum(abs(sim.sim_minimize(func, box, seed=s).f_p - target) <= tol for s in range(runs))
    return hits / runs, time.perf_counter() - t


def test_criterion_8_sim(record):
    rates = {
        "fn1": _sim_rate(1, 2, -186.73091, 1e-3),
        "fn2": _sim_rate(2, 2, -3.30686865, 1e-4),
        "fn3 N=5": _sim_rate(3, 5, 0.0, 1e-6),
        "fn3 N=10": _sim_rate(3, 10, 0.0, 1e-6),
        "fn3 N=20": _sim_rate(3, 20, 0.0, 1e-6),
    }
    ok = all(rates[k][0] >= 0.8 for k in ("fn1", "fn2", "fn3 N=5", "fn3 N=10"))
    ratio = rates["fn3 N=20"][1] / rates["fn3 N=5"][1]
    ok = ok and rates["fn3 N=20"][0] >= 0.5 and ratio <= 5.0
    detail = " ".join(f"{k}:{r:.0%}" for k, (r, _) in rates.items())
    record(8, ok, f"success rates over 20 seeds {detail}; N=20/N=5 runtime ratio={ratio:.2f} (<=5)")
    assert ok


def test_criterion_9_properties(record):
    checks = {}
    x = np.linspace(0.1, 50, 300)
    w = max(
        float(np.max(np.abs(
            specfun.cyl_bessel("J", n, x) * (specfun.cyl_bessel("Y", n - 1, x) - n / x * specfun.cyl_bessel("Y", n, x))
            - (specfun.cyl_bessel("J", n - 1, x) - n / x * specfun.cyl_bessel("J", n, x)) * specfun.cyl_bessel("Y", n, x)
            - 2 / (np.pi * x)
        ) * x))
        for n in range(0, 30, 3)
    )
    checks["wronskian"] = w < 1e-10
    t = specfun.sph_hankel_out_table(30, x[10:]) / (1j ** (np.arange(31) + 1))
    xr = x[10:, None]
    rec = t[:, 2:] - ((2 * np.arange(1, 30) + 1) / xr * t[:, 1:-1] - t[:, :-2])
    checks["recurrence"] = float(np.max(np.abs(rec) / np.abs(t[:, 2:]))) < 1e-9

    rng = np.random.default_rng(0)
    A = (rng.normal(size=(40, 10)) + 1j * rng.normal(size=(40, 10))) * np.logspace(0, -6, 10)
    b = rng.normal(size=40) + 1j * rng.normal(size=40)
    sol = solve_cutoff(A, b, 1e-12)
    deltas = 1e-4 * (rng.normal(size=(50, 10)) + 1j * rng.normal(size=(50, 10)))
    checks["lsq optimality"] = all(normalized_norm(b + A @ (sol.coeffs + d)) >= sol.r_min - 1e-12 for d in deltas)
    r = [solve_cutoff(A, b, w).r_min for w in np.logspace(-8, 1, 12)]
    checks["cutoff monotone"] = all(r2 >= r1 - 1e-12 for r1, r2 in zip(r, r[1:]))

    p = periodic.QpParams(1.0, math.pi / 3)
    g = periodic.QpGreensFunction(p)
    xi = np.array([0.7, -0.4])
    pts = rng.uniform([0, -1], [math.pi, 2], size=(10, 2))
    qp = max(abs(g(q + [math.pi, 0], xi) - p.nu * g(q, xi)) for q in pts)
    checks["quasiperiodicity"] = qp <= 1e-10

    sphere = geometry.parse_shape("sphere:1.5")
    st = max(
        static_mrc(StaticProblem(sphere, lambda y, e=e, m=m: specfun.harmonic_exterior(e, m, y), L=e)).r_min
        for e, m in ((0, 0), (2, 1), (4, -3))
    )
    checks["static exactness"] = st <= 1e-10

    box = sim.BoxDomain.symmetric(2, 5.0)
    a = sim.sim_minimize(sim.test_fn1, box, seed=11)
    b2 = sim.sim_minimize(sim.test_fn1, box, seed=11)
    s1 = sim.sms(sim.test_fn2, sim.BoxDomain.symmetric(2, 1.0), sim.SimParams(), np.random.default_rng(4))
    s2 = sim.sms(sim.test_fn2, sim.BoxDomain.symmetric(2, 1.0), sim.SimParams(), np.random.default_rng(4))
    checks["sim determinism"] = (
        a.f_p == b2.f_p and np.array_equal(a.x_p, b2.x_p) and np.array_equal(s1.points, s2.points)
    )
    ok = all(checks.values())
    record(9, ok, " ".join(f"{k}={'ok' if v else 'FAILED'}" for k, v in checks.items()))
    assert ok
