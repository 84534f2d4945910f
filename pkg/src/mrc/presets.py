"""Named experiment configurations, one per row of the reference tables."""

# 2D obstacles: (preset tag, shape spec, multi-point J, source scale)
SHAPES_2D = {
    "ellipse": ("ellipse:2,1", 4, 0.7),
    "kite": ("kite", 16, 0.9),
    "triangle": ("triangle", 16, 0.9),
    "thinellipse": ("ellipse:0.1,1", 32, 0.95),
}
SHAPES_3D = {"sphere": ("sphere:1", 450), "cube": ("cube:1", 1350), "ellipsoid": ("ellipsoid:4,1,1", 450)}
DIRS_3D = {"dir1": "0,90", "dir2": "90,45"}
ALPHAS_2D = {"a10": 0.0, "a01": 90.0}
OPTIMAL_L_3D = 10


def _table1():
    out = {}
    for tag, (shape, J, scale) in SHAPES_2D.items():
        for k in (1, 5):
            for atag, deg in ALPHAS_2D.items():
                out[f"table1-{tag}-k{k}-{atag}"] = {
                    "command": "solve",
                    "solver": "random",
                    "shape": shape,
                    "k": float(k),
                    "alpha_deg": deg,
                    "L": 5,
                    "J": 1,
                    "init": f"scaled:{J}:{scale}",
                    "eps": 1e-4,
                    "wmin": 1e-12,
                    "nodes": 720,
                    "nmax": 6000,
                    "description": f"random MRC, J=1 after a {J}-source multi-point first round",
                }
    return out


def _table2():
    rows = [("sphere", 1, None, 2e-4), ("sphere", 5, None, 1e-3)]
    rows += [("cube", 1, "dir1", 1e-3), ("cube", 1, "dir2", 1e-3), ("cube", 5, "dir1", 3.5e-3), ("cube", 5, "dir2", 2e-3)]
    rows += [("ellipsoid", 1, "dir1", 1e-3), ("ellipsoid", 1, "dir2", 1e-3)]
    rows += [("ellipsoid", 5, "dir1", 2.6e-3), ("ellipsoid", 5, "dir2", 1e-3)]
    out = {}
    for tag, k, d, eps in rows:
        shape, M = SHAPES_3D[tag]
        name = f"table2-{tag}-k{k}" + (f"-{d}" if d else "")
        out[name] = {
            "command": "solve",
            "solver": "random",
            "shape": shape,
            "k": float(k),
            "alpha_polar": DIRS_3D[d or "dir1"],
            "L": 0,
            "J": 80,
            "eps": eps,
            "wmin": 1e-12,
            "nodes": M,
            "nmax": 6000,
            "description": "random MRC with monopole batches",
        }
    return out


def _table3():
    out = {}
    for tag, (shape, _, _) in SHAPES_2D.items():
        for k in (1, 5):
            for atag, deg in ALPHAS_2D.items():
                out[f"table3-{tag}-k{k}-{atag}"] = _optimal_2d(shape, k, deg)
    out["table3-circle-k1-a10"] = _optimal_2d("circle:1", 1, 0.0)
    out["table3-circle-k5-a10"] = _optimal_2d("circle:1", 5, 0.0)
    return out


def _optimal_2d(shape, k, deg):
    return {
        "command": "solve",
        "solver": "optimal",
        "shape": shape,
        "k": float(k),
        "alpha_deg": deg,
        "L": 5,
        "eps": 2e-3,
        "wmin": 1e-12,
        "nodes": 720,
        "nmax": 100,
        "description": "optimal-source MRC",
    }


def _table4():
    out = {}
    rows = [("sphere", 1, None), ("sphere", 5, None)]
    rows += [(s, k, d) for s in ("cube", "ellipsoid") for k in (1, 5) for d in ("dir1", "dir2")]
    for tag, k, d in rows:
        shape, M = SHAPES_3D[tag]
        name = f"table4-{tag}-k{k}" + (f"-{d}" if d else "")
        out[name] = {
            "command": "solve",
            "solver": "optimal",
            "shape": shape,
            "k": float(k),
            "alpha_polar": DIRS_3D[d or "dir1"],
            "L": OPTIMAL_L_3D,
            "eps": 2e-3,
            "wmin": 1e-12,
            "nodes": M,
            "nmax": 100,
            "description": "optimal-source MRC",
        }
    return out


def _table5():
    out = {}
    for pid in ("I", "II", "III", "IV"):
        for deg in (45, 60, 90):
            out[f"table5-profile{pid}-theta{deg}"] = {
                "command": "periodic",
                "profile": pid,
                "theta_deg": float(deg),
                "k": 1.0,
                "nodes": 256,
                "poles": 64,
                "wmin": 1e-8,
                "b": 1.2,
                "jmax": 120,
                "eps": 0.05,
                "description": "periodic grating MRC",
            }
    return out


def _table6():
    return {
        "table6-illposed": {
            "command": "illposed-demo",
            "k": 1.0,
            "alpha_deg": 0.0,
            "L": 5,
            "x1": "0.8,0",
            "dirs": 120,
            "wmin": 1e-12,
            "description": "far-field fit from a shifted centre versus the exact near field",
        }
    }


def _table7():
    rows = [("fn1", 1, 2), ("fn2", 2, 2), ("fn3-n5", 3, 5), ("fn3-n10", 3, 10), ("fn3-n20", 3, 20)]
    return {
        f"table7-{tag}": {
            "command": "minimize",
            "fn": fn,
            "dim": dim,
            "repeat": 20,
            "description": "stability index method, 20 seeded runs",
        }
        for tag, fn, dim in rows
    }


PRESETS = {}
for _build in (_table1, _table2, _table3, _table4, _table5, _table6, _table7):
    PRESETS.update(_build())


def presets():
    """All preset names in table order."""
    return list(PRESETS)


def get_preset(name):
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}") from None
