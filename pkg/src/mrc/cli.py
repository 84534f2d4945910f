"""Command-line front end: ``mrc <subcommand> [flags]``.

Values are resolved in the order built-in defaults < preset < config file
< explicit flags. Results go to CSV (``--out`` or stdout); a short summary
goes to stderr. Exit status: 0 converged, 2 not converged, 1 bad input.
"""
import argparse
import configparser
import csv
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import geometry, oracle, periodic, scattering, sim, static
from .errors import ConfigurationError, MRCError
from .presets import PRESETS, get_preset

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2

DEFAULTS = {
    "solve": {
        "solver": "optimal",
        "shape": "circle:1",
        "k": 1.0,
        "alpha_deg": 0.0,
        "alpha_polar": "0,90",
        "L": 5,
        "J": 1,
        "eps": 2e-3,
        "wmin": 1e-12,
        "nodes": None,
        "nmax": None,
        "init": None,
        "margin": None,
        "seed": 0,
        "repeat": 1,
        "expansion": None,
    },
    "minimize": {"fn": 1, "dim": None, "seed": 0, "repeat": 1},
    "periodic": {
        "profile": "I",
        "theta_deg": 45.0,
        "k": 1.0,
        "nodes": 256,
        "poles": 64,
        "wmin": 1e-8,
        "b": 1.2,
        "jmax": 120,
        "eps": 0.05,
    },
    "static": {"shape": "sphere:1", "data": "constant", "L": 2, "eps": 1e-4, "wmin": 1e-12, "nodes": 450},
    "illposed-demo": {"k": 1.0, "alpha_deg": 0.0, "L": 5, "x1": "0.8,0", "dirs": 120, "wmin": 1e-12},
}

KNOWN_MINIMA = {1: (-186.73091, 1e-3), 2: (-3.30686865, 1e-4), 3: (0.0, 1e-6)}

CSV_COLUMNS = {
    "solve": [
        "case", "solver", "shape", "k", "alpha", "L", "J", "nodes", "eps", "wmin", "seed",
        "iterations", "n_sources", "r_min", "converged", "seconds",
    ],
    "minimize": ["case", "fn", "dim", "seed", "f_min", "x_min", "stable", "rounds", "n_evals", "success", "seconds"],
    "periodic": [
        "case", "profile", "theta", "k", "nodes", "poles", "b", "jmax", "wmin",
        "attempts", "r_min", "converged", "seconds",
    ],
    "static": ["case", "shape", "data", "L", "nodes", "eps", "r_min", "converged", "seconds"],
    "illposed-demo": ["alpha_prime", "re_vc", "im_vc", "re_v", "im_v"],
    "presets": ["name", "command", "description"],
}


# --- argument parsing ----------------------------------------------------


def _common(p):
    p.add_argument("--preset", help="named experiment (see `mrc presets`)")
    p.add_argument("--config", help="INI file; keys of the section named after the subcommand")
    p.add_argument("--out", help="CSV output path (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="mrc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="obstacle scattering (multipoint, random, optimal)")
    _common(p)
    p.add_argument("--solver", choices=["multipoint", "random", "optimal"])
    p.add_argument("--shape", help="e.g. ellipse:2,1  kite  triangle  circle:1  sphere:1  cube:1  ellipsoid:4,1,1")
    p.add_argument("--k", type=float)
    p.add_argument("--alpha-deg", type=float, dest="alpha_deg", help="2D incident angle in degrees")
    p.add_argument("--alpha-polar", dest="alpha_polar", help="3D incident direction 'theta,phi' in degrees")
    p.add_argument("--L", type=int)
    p.add_argument("--J", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--wmin", type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--init", help="sources of the first round, 'scaled:J:scale' (random, multipoint)")
    p.add_argument("--margin", type=float, help="interior sampling margin")
    p.add_argument("--seed", type=int)
    p.add_argument("--repeat", type=int)
    p.add_argument("--expansion", help="write the fitted expansion as a text record")

    p = sub.add_parser("minimize", help="stability index method on a test function")
    _common(p)
    p.add_argument("--fn", type=int, choices=[1, 2, 3])
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--repeat", type=int)

    p = sub.add_parser("periodic", help="periodic grating profile")
    _common(p)
    p.add_argument("--profile", choices=["I", "II", "III", "IV"])
    p.add_argument("--theta-deg", type=float, dest="theta_deg")
    p.add_argument("--k", type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--poles", type=int)
    p.add_argument("--wmin", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--jmax", type=int)
    p.add_argument("--eps", type=float)

    p = sub.add_parser("static", help="exterior Dirichlet problem for the Laplace equation")
    _common(p)
    p.add_argument("--shape")
    p.add_argument("--data", help="constant | spherical-harmonic:l,m | point-charge:x,y,z")
    p.add_argument("--L", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--wmin", type=float)
    p.add_argument("--nodes", type=int)

    p = sub.add_parser("illposed-demo", help="far-field fit from a shifted centre (circle)")
    _common(p)
    p.add_argument("--k", type=float)
    p.add_argument("--alpha-deg", type=float, dest="alpha_deg")
    p.add_argument("--L", type=int)
    p.add_argument("--x1", help="expansion centre 'x,y'")
    p.add_argument("--dirs", type=int)
    p.add_argument("--wmin", type=float)

    p = sub.add_parser("presets", help="list named experiments")
    p.add_argument("--out")
    return parser


CONFIG_TYPES = {
    "k": float, "alpha_deg": float, "eps": float, "wmin": float, "margin": float,
    "theta_deg": float, "b": float, "L": int, "J": int, "nodes": int, "nmax": int,
    "seed": int, "repeat": int, "fn": int, "dim": int, "poles": int, "jmax": int, "dirs": int,
}


def resolve(args):
    """Merge defaults, preset, config file and flags into (command, config)."""
    command = args.command
    preset = None
    if getattr(args, "preset", None):
        preset = get_preset(args.preset)
        command = preset.pop("command")
        preset.pop("description", None)
    cfg = dict(DEFAULTS[command])
    if preset:
        cfg.update(preset)
    if getattr(args, "config", None):
        parser = configparser.ConfigParser()
        if not parser.read(args.config):
            raise FileNotFoundError(args.config)
        if parser.has_section(command):
            for key, value in parser.items(command):
                key = key.replace("-", "_")
                key = {"l": "L", "j": "J"}.get(key, key)  # configparser lowercases keys
                if key not in cfg:
                    raise ConfigurationError(f"unknown config key {key!r}")
                cfg[key] = CONFIG_TYPES.get(key, str)(value)
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    cfg["case"] = getattr(args, "preset", None) or "custom"
    return command, cfg


# --- runners -----------------------------------------------------------------


def _floats(text, n=None):
    vals = [float(v) for v in str(text).split(",")]
    if n is not None and len(vals) != n:
        raise ConfigurationError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _incident(boundary, cfg):
    if boundary.dim == 2:
        return scattering.direction_2d(math.radians(cfg["alpha_deg"]))
    theta, phi = _floats(cfg["alpha_polar"], 2)
    return scattering.direction_3d(math.radians(theta), math.radians(phi))


def _alpha_label(boundary, cfg):
    return f"{cfg['alpha_deg']:g}" if boundary.dim == 2 else str(cfg["alpha_polar"])


def _init_sources(boundary, spec):
    kind, _, rest = spec.partition(":")
    if kind != "scaled":
        raise ConfigurationError(f"unknown source layout {spec!r}")
    J, scale = rest.split(":")
    return geometry.scaled_boundary_sources(boundary, int(J), float(scale))


def run_solve_case(cfg, seed):
    boundary = geometry.parse_shape(cfg["shape"])
    if isinstance(boundary, geometry.PeriodicProfile):
        raise ConfigurationError("use the periodic subcommand for grating profiles")
    nodes = cfg["nodes"] or (720 if boundary.dim == 2 else 450)
    problem = scattering.ScatteringProblem(boundary, cfg["k"], _incident(boundary, cfg), nodes)
    rng = np.random.default_rng(seed)
    solver = cfg["solver"]
    init = _init_sources(boundary, cfg["init"]) if cfg["init"] else None
    start = time.perf_counter()
    if solver == "multipoint":
        if init is None:
            raise ConfigurationError("multipoint needs --init scaled:J:scale")
        report = scattering.multipoint_mrc(problem, init, cfg["L"], cfg["wmin"], cfg["eps"])
    elif solver == "random":
        kw = {} if cfg["margin"] is None else {"margin": cfg["margin"]}
        report = scattering.random_mrc(
            problem, cfg["J"], cfg["L"], cfg["eps"], cfg["nmax"] or 6000, cfg["wmin"], rng,
            initial_sources=init, **kw,
        )
    else:
        kw = {} if cfg["margin"] is None else {"margin": cfg["margin"]}
        report = scattering.optimal_mrc(problem, cfg["L"], cfg["eps"], cfg["nmax"] or 100, cfg["wmin"], rng, **kw)
    row = {
        "case": cfg["case"],
        "solver": solver,
        "shape": boundary.shape_id,
        "k": cfg["k"],
        "alpha": _alpha_label(boundary, cfg),
        "L": cfg["L"],
        "J": cfg["J"] if solver == "random" else (len(init) if solver == "multipoint" else 1),
        "nodes": nodes,
        "eps": cfg["eps"],
        "wmin": cfg["wmin"],
        "seed": seed,
        "iterations": report.iterations,
        "n_sources": report.expansion.n_sources,
        "r_min": f"{report.r_min:.6e}",
        "converged": int(report.converged),
        "seconds": f"{time.perf_counter() - start:.2f}",
    }
    return row, report.expansion.to_text()


def run_minimize_case(cfg, seed):
    fn = cfg["fn"]
    func, dim, m_half = sim.TEST_FUNCTIONS[fn]
    n_dim = cfg["dim"] or dim or 5
    if dim is not None and n_dim != dim:
        raise ConfigurationError(f"test function {fn} is {dim}-dimensional")
    box = sim.BoxDomain.symmetric(n_dim, m_half)
    start = time.perf_counter()
    res = sim.sim_minimize(func, box, seed=seed)
    target, tol = KNOWN_MINIMA[fn]
    row = {
        "case": cfg["case"],
        "fn": fn,
        "dim": n_dim,
        "seed": seed,
        "f_min": f"{res.f_p:.10g}",
        "x_min": " ".join(f"{v:.6f}" for v in res.x_p),
        "stable": int(res.stable),
        "rounds": res.rounds,
        "n_evals": res.n_evals,
        "success": int(abs(res.f_p - target) <= tol),
        "seconds": f"{time.perf_counter() - start:.2f}",
    }
    return row, None


def _workers():
    try:
        return max(1, int(os.environ.get("MRC_THREADS", "1")))
    except ValueError:
        return 1


def _run_many(func, cfg, seeds):
    n = min(_workers(), len(seeds))
    if n <= 1:
        return [func(cfg, s) for s in seeds]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, [cfg] * len(seeds), seeds))


def cmd_solve(cfg):
    seeds = [cfg["seed"] + i for i in range(cfg["repeat"])]
    results = _run_many(run_solve_case, cfg, seeds)
    rows = [r for r, _ in results]
    if cfg["expansion"]:
        for i, (_, text) in enumerate(results):
            path = cfg["expansion"] if len(results) == 1 else f"{cfg['expansion']}.{i}"
            with open(path, "w") as fh:
                fh.write(text)
    for r in rows:
        _say(f"{r['case']}: {r['solver']} {r['shape']} k={r['k']} r_min={r['r_min']} "
             f"iterations={r['iterations']} converged={bool(r['converged'])} ({r['seconds']} s)")
    ok = all(r["converged"] for r in rows)
    return rows, EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_minimize(cfg):
    seeds = [cfg["seed"] + i for i in range(cfg["repeat"])]
    rows = [r for r, _ in _run_many(run_minimize_case, cfg, seeds)]
    rate = sum(r["success"] for r in rows) / len(rows)
    best = min(float(r["f_min"]) for r in rows)
    mean_t = sum(float(r["seconds"]) for r in rows) / len(rows)
    _say(f"{cfg['case']}: fn={cfg['fn']} runs={len(rows)} best={best:.10g} "
         f"success rate={100 * rate:.0f}% mean time={mean_t:.2f} s")
    return rows, EXIT_OK if rate >= 0.8 else EXIT_NOT_CONVERGED


def cmd_periodic(cfg):
    start = time.perf_counter()
    profile = geometry.PeriodicProfile(cfg["profile"])
    params = periodic.QpParams(cfg["k"], math.radians(cfg["theta_deg"]), profile.period)
    rep = periodic.periodic_mrc(
        profile, params, cfg["nodes"], cfg["poles"], cfg["wmin"], cfg["eps"], cfg["b"], cfg["jmax"]
    )
    row = {
        "case": cfg["case"],
        "profile": profile.profile_id,
        "theta": f"{cfg['theta_deg']:g}",
        "k": cfg["k"],
        "nodes": cfg["nodes"],
        "poles": cfg["poles"],
        "b": cfg["b"],
        "jmax": cfg["jmax"],
        "wmin": cfg["wmin"],
        "attempts": rep.iterations,
        "r_min": f"{rep.r_min:.6e}",
        "converged": int(rep.converged),
        "seconds": f"{time.perf_counter() - start:.2f}",
    }
    _say(f"{row['case']}: profile {row['profile']} theta={row['theta']} r_min={row['r_min']}")
    return [row], EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def _static_data(spec):
    kind, _, rest = spec.partition(":")
    if kind == "constant":
        return lambda x: np.ones(len(x))
    if kind == "spherical-harmonic":
        ell, m = (int(v) for v in rest.split(","))
        from .specfun import harmonic_basis, sph_index

        return lambda x: harmonic_basis(x, ell)[:, sph_index(ell, m)]
    if kind == "point-charge":
        q = np.array(_floats(rest, 3))
        return lambda x: 1.0 / np.linalg.norm(x - q, axis=1)
    raise ConfigurationError(f"unknown static data {spec!r}")


def cmd_static(cfg):
    start = time.perf_counter()
    boundary = geometry.parse_shape(cfg["shape"])
    problem = static.StaticProblem(boundary, _static_data(cfg["data"]), cfg["L"])
    rep = static.static_mrc(problem, cfg["nodes"], cfg["wmin"], cfg["eps"])
    row = {
        "case": cfg["case"],
        "shape": boundary.shape_id,
        "data": cfg["data"],
        "L": rep.expansion.L,
        "nodes": cfg["nodes"],
        "eps": cfg["eps"],
        "r_min": f"{rep.r_min:.6e}",
        "converged": int(rep.converged),
        "seconds": f"{time.perf_counter() - start:.2f}",
    }
    _say(f"{row['case']}: static {row['shape']} L={row['L']} r_min={row['r_min']}")
    return [row], EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def cmd_illposed(cfg):
    c = oracle.CircleScatterer(1.0, cfg["k"], math.radians(cfg["alpha_deg"]))
    res = oracle.illposedness_demo(c, _floats(cfg["x1"], 2), cfg["L"], cfg["dirs"], cfg["wmin"])
    rows = [dict(zip(CSV_COLUMNS["illposed-demo"], (f"{v:.5f}" for v in line))) for line in res.near_table]
    _say(f"far-field residual {res.r_min_far:.8f}; max |v_c - v| on the circle {res.sup_gap:.5g}")
    return rows, EXIT_OK


def cmd_presets(cfg):
    rows = [{"name": n, "command": p["command"], "description": p.get("description", "")} for n, p in PRESETS.items()]
    return rows, EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "minimize": cmd_minimize,
    "periodic": cmd_periodic,
    "static": cmd_static,
    "illposed-demo": cmd_illposed,
    "presets": cmd_presets,
}


def _say(msg):
    print(msg, file=sys.stderr)


def _write_csv(command, rows, out):
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS[command])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out:
            fh.close()


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            command, cfg = "presets", {}
        else:
            command, cfg = resolve(args)
        rows, status = COMMANDS[command](cfg)
    except (MRCError, ValueError, KeyError, FileNotFoundError) as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR
    _write_csv(command, rows, getattr(args, "out", None))
    return status


if __name__ == "__main__":
    sys.exit(main())
