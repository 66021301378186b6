"""Command-line front end.

Four subcommands share one configuration: ``spectrum``, ``bound``,
``verify`` and ``converge``. Settings come from an optional INI-style file
(``--config``) and from flags, which take precedence. Results are written as
JSON (floats as round-trip decimal strings) or CSV (17 significant digits).

Exit codes: 0 success, 1 a verification threshold failed, 2 invalid
configuration, 3 a solver did not converge.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import ConvergenceError, DiracBoundError

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


class ConfigError(Exception):
    """Invalid configuration; reported with exit code 2."""


# -- configuration -------------------------------------------------------------

GEOMETRY_KEYS = ("L1", "L2", "spin", "radius", "r_in", "r_out", "length", "circumference", "n")

SCHEMA = {
    "geometry": ("kind", "twist") + GEOMETRY_KEYS,
    "bc": ("kind", "b", "sign"),
    "solver": ("k", "resolution", "modes", "tol", "seed"),
    "output": ("out", "format"),
    "bound": ("theorem", "gamma"),
    "verify": ("suite", "sigma"),
    "converge": ("refinements", "quantity"),
}

# config-file location of every RunConfig field that is not a geometry parameter
FIELD_SECTION = {
    "geometry": ("geometry", "kind"), "twist": ("geometry", "twist"),
    "bc": ("bc", "kind"), "b": ("bc", "b"), "sign": ("bc", "sign"),
    "k": ("solver", "k"), "resolution": ("solver", "resolution"),
    "modes": ("solver", "modes"), "tol": ("solver", "tol"), "seed": ("solver", "seed"),
    "out": ("output", "out"), "format": ("output", "format"),
    "theorem": ("bound", "theorem"), "gamma": ("bound", "gamma"),
    "suite": ("verify", "suite"), "sigma": ("verify", "sigma"),
    "refinements": ("converge", "refinements"), "quantity": ("converge", "quantity"),
}

DEFAULT_PARAMS = {
    "torus": {"L1": 1.0, "L2": 1.0},
    "disk": {"radius": 1.0},
    "sphere": {"radius": 1.0},
    "annulus": {"r_in": 0.5, "r_out": 1.0},
    "cylinder": {"length": 1.0, "circumference": 2 * math.pi},
    "ball": {"radius": 1.0},
}

THEOREM_TAGS = ("t1", "thm2", "aps", "maps", "vol-aps", "vol-maps")
SUITES = ("identities", "boundary", "scaling", "all")
QUANTITIES = ("lambda", "bochner")


def parse_real(text) -> float:
    """A real number, optionally a multiple of pi: ``2``, ``0.5``, ``pi``, ``4pi``, ``2*pi``."""
    if isinstance(text, (int, float)):
        return float(text)
    t = str(text).strip().lower().replace(" ", "")
    try:
        if t.endswith("pi"):
            head = t[:-2].rstrip("*")
            return (float(head) if head not in ("", "+", "-") else float(head + "1")) * math.pi
        return float(t)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def _parse_int(text, name) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {text!r}") from None


def _parse_spin(text):
    parts = [p for p in str(text).replace(" ", "").split(",") if p]
    try:
        vals = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"spin must be integers, got {text!r}") from None
    return vals if len(vals) > 1 else vals[0]


@dataclass
class RunConfig:
    """Validated settings shared by all subcommands."""

    geometry: str = "torus"
    params: dict = field(default_factory=dict)
    twist: float = 0.0
    bc: str | None = None
    b: float = 0.0
    sign: int = 1
    k: int = 6
    resolution: int | None = None
    modes: int | None = None
    tol: float = 1e-10
    seed: int = 0
    out: str = "-"
    format: str = "json"
    theorem: str = "t1"
    gamma: float | None = None
    suite: str = "all"
    sigma: float = 2.0
    refinements: int = 4
    quantity: str = "lambda"

    def bundle(self):
        from .geometry import bundle

        return bundle(self.geometry, twist=self.twist, **self.params)

    def condition(self):
        from .operators import BoundaryCondition

        if self.bc is None:
            return None
        return BoundaryCondition(self.bc, self.sign, self.b)

    def echo(self) -> dict:
        d = asdict(self)
        d["params"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()}
        return d


def read_config_file(path) -> dict:
    """Parse ``[section]`` / ``key = value`` text into a flat field mapping."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str           # keys are case sensitive (L1, L2)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    values = {}
    lookup = {v: k for k, v in FIELD_SECTION.items()}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            if section == "geometry" and key in GEOMETRY_KEYS:
                values.setdefault("params", {})[key] = raw
            else:
                values[lookup[(section, key)]] = raw
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge file values and flags, then validate everything before any computation."""
    raw = read_config_file(args.config) if getattr(args, "config", None) else {}
    params = dict(raw.pop("params", {}))
    for key in GEOMETRY_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            params[key] = flag
    for name in FIELD_SECTION:
        flag = getattr(args, name, None)
        if flag is not None:
            raw[name] = flag

    cfg = RunConfig()
    cfg.geometry = str(raw.get("geometry", cfg.geometry)).lower()
    if cfg.geometry not in DEFAULT_PARAMS:
        raise ConfigError(f"unknown geometry {cfg.geometry!r}")
    merged = dict(DEFAULT_PARAMS[cfg.geometry])
    for key, value in params.items():
        if key == "spin":
            merged[key] = _parse_spin(value)
        elif key == "n":
            merged[key] = _parse_int(value, "n")
        else:
            merged[key] = parse_real(value)
    cfg.params = merged
    cfg.twist = parse_real(raw.get("twist", 0.0))
    if "bc" in raw:
        cfg.bc = str(raw["bc"]).lower()
        if cfg.bc in ("none", ""):
            cfg.bc = None
    cfg.b = parse_real(raw.get("b", cfg.b))
    cfg.sign = _parse_int(raw.get("sign", cfg.sign), "sign")
    cfg.k = _parse_int(raw.get("k", cfg.k), "k")
    if "resolution" in raw:
        cfg.resolution = _parse_int(raw["resolution"], "resolution")
    if "modes" in raw:
        cfg.modes = _parse_int(raw["modes"], "modes")
    cfg.tol = parse_real(raw.get("tol", cfg.tol))
    cfg.seed = _parse_int(raw.get("seed", cfg.seed), "seed")
    cfg.out = str(raw.get("out", cfg.out))
    cfg.format = str(raw.get("format", cfg.format)).lower()
    cfg.theorem = str(raw.get("theorem", cfg.theorem)).lower()
    if raw.get("gamma") is not None:
        cfg.gamma = parse_real(raw["gamma"])
    cfg.suite = str(raw.get("suite", cfg.suite)).lower()
    cfg.sigma = parse_real(raw.get("sigma", cfg.sigma))
    cfg.refinements = _parse_int(raw.get("refinements", cfg.refinements), "refinements")
    cfg.quantity = str(raw.get("quantity", cfg.quantity)).lower()
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, got {cfg.format!r}")
    if cfg.k < 1:
        raise ConfigError("k must be positive")
    if cfg.resolution is not None and cfg.resolution < 4:
        raise ConfigError("resolution must be at least 4")
    if cfg.modes is not None and cfg.modes < 0:
        raise ConfigError("modes must be non-negative")
    if not cfg.tol > 0:
        raise ConfigError("tol must be positive")
    if cfg.theorem not in THEOREM_TAGS:
        raise ConfigError(f"theorem must be one of {', '.join(THEOREM_TAGS)}")
    if cfg.suite not in SUITES:
        raise ConfigError(f"suite must be one of {', '.join(SUITES)}")
    if cfg.quantity not in QUANTITIES:
        raise ConfigError(f"quantity must be one of {', '.join(QUANTITIES)}")
    if not cfg.sigma > 0:
        raise ConfigError("sigma must be positive")
    if cfg.bc is not None and cfg.bc not in ("mit", "local", "aps", "maps"):
        raise ConfigError(f"unknown boundary condition {cfg.bc!r}")
    try:
        b = cfg.bundle()
        cfg.condition()
    except DiracBoundError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.bc is not None and not b.geometry.has_boundary:
        raise ConfigError(f"{cfg.geometry} has no boundary; drop --bc")


# -- output ----------------------------------------------------------------------

def num(x) -> str:
    """Round-trip decimal string of a float."""
    return repr(float(x))


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return num(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return v


def write_output(cfg: RunConfig, kind: str, records: list[dict], extra: dict | None = None) -> None:
    if cfg.format == "json":
        doc = {"kind": kind, "version": __version__, "config": _jsonable(cfg.echo()),
               "tolerance": num(cfg.tol), **_jsonable(extra or {}),
               "results": _jsonable(records)}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        flat = [{k: v for k, v in r.items() if not isinstance(v, (dict, list))} for r in records]
        header = []
        for r in flat:
            header += [k for k in r if k not in header]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        for r in flat:
            writer.writerow({k: _csv_cell(v) for k, v in r.items()})
        text = buf.getvalue()
    if cfg.out in ("-", ""):
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- commands --------------------------------------------------------------------

def _default_resolution(cfg: RunConfig, bundle) -> int:
    if cfg.resolution is not None:
        return cfg.resolution
    if bundle.geometry.kind == "torus":
        return 64 if bundle.twist else 32
    return 256


def _oracle(bundle, count):
    """Closed-form spectrum and its provenance tag, when one is known."""
    from .operators.torus import exact_landau_spectrum, exact_torus_spectrum

    g = bundle.geometry
    if g.kind == "torus":
        if bundle.twist:
            vals = exact_landau_spectrum(bundle.twist, count)
            return np.sort(np.concatenate([vals, -vals[vals > 0]])), "landau-levels"
        L1, L2 = g.length("L1"), g.length("L2")
        cutoff = 2 * math.pi * (math.sqrt(count) + 2) / min(L1, L2)
        return exact_torus_spectrum(L1, L2, g.spin, cutoff), "fourier-closed-form"
    if g.kind == "sphere":
        n, R = g.dim, g.length("radius")
        ks = np.arange(count)
        vals = (ks + n / 2) / R
        return np.sort(np.concatenate([vals, -vals])), "round-sphere-closed-form"
    return None, None


def _spectrum(cfg: RunConfig, bundle, resolution=None, k=None):
    from .eigensolve.spectrum import dirac_spectrum

    return dirac_spectrum(bundle, cfg.condition(), resolution or _default_resolution(cfg, bundle),
                          k or cfg.k, cfg.tol, max_level=cfg.modes)


def cmd_spectrum(cfg: RunConfig) -> int:
    bundle = cfg.bundle()
    res = _spectrum(cfg, bundle)
    oracle, tag = _oracle(bundle, cfg.k + 4)
    labels = res.info.get("labels", [None] * len(res.eigenvalues))
    records = []
    for i, (lam, r) in enumerate(zip(res.eigenvalues, res.residuals)):
        rec = {"index": i, "re": float(lam.real), "im": float(lam.imag), "abs": float(abs(lam)),
               "residual": float(r), "method": res.method}
        if labels[i] is not None:
            rec["mode"] = int(labels[i])
        if oracle is not None:
            ref = float(oracle[np.argmin(abs(oracle - lam))])
            rec.update(oracle=ref, oracleError=float(abs(lam - ref)), provenance=tag)
        records.append(rec)
    write_output(cfg, "spectrum", records, {"resolution": _default_resolution(cfg, bundle)})
    return EXIT_OK


def _bound_rhs(cfg: RunConfig, bundle):
    from . import bounds

    n = bundle.dim
    if cfg.theorem == "t1":
        return "T1", bounds.bound_t1(bundle)
    if cfg.theorem == "thm2":
        return "Thm2", bounds.bound_thm2(bundle)
    if cfg.theorem == "aps":
        return "ThmAPS", bounds.bound_aps(bundle, cfg.b)
    if cfg.theorem == "maps":
        return "ThmModAPS", bounds.bound_maps(bundle, cfg.b)
    raise AssertionError(n)


def _condition_for(cfg: RunConfig, bundle):
    """The boundary condition a theorem speaks about, filled in from the tag."""
    if not bundle.geometry.has_boundary:
        return None
    if cfg.theorem in ("aps", "vol-aps"):
        return "aps"
    if cfg.theorem in ("maps", "vol-maps"):
        return "maps"
    return cfg.bc or "local"


def cmd_bound(cfg: RunConfig) -> int:
    from . import bounds
    from .errors import CapabilityError, DimensionError
    from .eigensolve import gamma_estimate

    bundle = cfg.bundle()
    n = bundle.dim
    if cfg.theorem == "t1" and n != 2:
        raise DimensionError(f"t1 is a surface bound; the geometry has dimension {n}")
    if cfg.theorem in ("thm2", "vol-aps", "vol-maps") and n < 3:
        raise DimensionError(f"{cfg.theorem} needs dimension at least 3, got {n}")
    cfg.bc = _condition_for(cfg, bundle)
    provenance = "computed-spectrum"
    try:
        res = _spectrum(cfg, bundle, k=1)
        lam = complex(res.eigenvalues[0])
        lhs = abs(lam) ** 2
    except CapabilityError as exc:
        res, lam, lhs, provenance = None, None, math.nan, f"unavailable: {exc}"
    if cfg.theorem.startswith("vol-"):
        gamma = cfg.gamma if cfg.gamma is not None else gamma_estimate(bundle.geometry)
        report = bounds.bound_volume(bundle, cfg.b, gamma, lhs, modified=cfg.theorem == "vol-maps")
    else:
        theorem, rhs = _bound_rhs(cfg, bundle)
        report = bounds.BoundReport(theorem, lhs, rhs, lhs - rhs, True, tol=cfg.tol)
    if res is not None and res.vectors and res.vectors[0] is not None:
        try:
            report.equalityDiag = bounds.equality_diagnostics(bundle, res, 0)
        except DiracBoundError:
            report.equalityDiag = None
    rec = report.to_dict()
    diag = rec.pop("equalityDiag") or {}
    rec.update({f"diag_{k}": v for k, v in diag.items()})
    rec.update(rec.pop("info"))
    rec["provenance"] = provenance
    rec["condition"] = cfg.condition().label() if cfg.bc else "none"
    if lam is not None:
        rec["lambdaRe"], rec["lambdaIm"] = float(lam.real), float(lam.imag)
    write_output(cfg, "bound", [rec])
    return EXIT_OK


# -- verify ------------------------------------------------------------------------

IDENTITY_INSTANCES = 100
MAPS_INSTANCES = 50


def _identity_checks(cfg, bundle):
    from .identities import (TorusGrid, WEIGHTED_VARIANTS, check_bochner,
                             check_weighted_identity, est2_limit, random_instance)

    g = bundle.geometry
    if g.kind != "torus":
        raise ConfigError("the identity suite runs on the flat torus")
    checks = []
    grid_size = cfg.resolution or 64
    if not bundle.twist:
        grid = TorusGrid.for_bundle(bundle, grid_size)

        def weighted(variant):
            def run():
                rng = np.random.default_rng([cfg.seed, WEIGHTED_VARIANTS.index(variant)])
                worst = None
                for _ in range(IDENTITY_INSTANCES):
                    s, w, tp = random_instance(grid, rng, variant)
                    rep = check_weighted_identity(bundle, None, grid.field(s), w, tp, variant)
                    if worst is None or rep.relative > worst.relative:
                        worst = rep
                worst.info["instances"] = IDENTITY_INSTANCES
                return worst, worst.relative <= 1e-10, 1e-10
            return run

        for v in WEIGHTED_VARIANTS:
            checks.append((f"weighted/{v}", weighted(v)))

        def limit():
            rng = np.random.default_rng([cfg.seed, 99])
            s, w, _ = random_instance(grid, rng, "est2")
            rep = est2_limit(grid, s, w)
            return rep, abs(rep.order - 1.0) <= 0.1, 0.1

        checks.append(("weighted/est2-limit", limit))
    for B in sorted({0.0, bundle.twist}):
        tb = bundle if B == bundle.twist else type(bundle)(g, B)

        def bochner(tb=tb):
            rep = check_bochner(tb, 16)
            return rep, rep.residual <= 1e-12 * rep.scale, 1e-12
        checks.append((f"bochner/twist={B:g}", bochner))
    return checks


def _boundary_checks(cfg, bundle):
    from .identities import check_boundary_identity
    from .operators import local, maps, mit

    if not bundle.geometry.has_boundary:
        raise ConfigError(f"{bundle.geometry.kind} has no boundary")
    if bundle.dim != 2:
        raise ConfigError("boundary identities are checked on surfaces")
    base = cfg.resolution or 64
    checks = []
    for bc in (mit(1), mit(-1), local(1), local(-1)):
        for variant in ("b1", "DD", "D"):
            def series(bc=bc, variant=variant):
                rep = check_boundary_identity(bundle, bc, variant=variant, points=base, levels=4,
                                              seed=cfg.seed)
                exact = check_boundary_identity(bundle, bc, variant=variant, points=base,
                                                seed=cfg.seed, derivative="spectral")
                rep.info["spectralPointwise"] = exact.pointwise
                ok = (rep.order >= 1.0 or rep.pointwise <= 1e-12) and exact.pointwise <= 1e-10
                return rep, ok, 1.0
            checks.append((f"boundary/{variant}/{bc.label()}", series))

        def b2(bc=bc):
            rep = check_boundary_identity(bundle, bc, variant="b2", points=base, seed=cfg.seed)
            return rep, rep.pointwise <= 1e-10, 1e-10
        checks.append((f"boundary/b2/{bc.label()}", b2))
    for b in (-1.0, 0.0, 0.5):
        for sign in (1, -1):
            def pairing(b=b, sign=sign):
                worst = None
                for i in range(MAPS_INSTANCES):
                    rep = check_boundary_identity(bundle, maps(b, sign), variant="maps",
                                                  points=base, seed=cfg.seed * 1000 + i)
                    if worst is None or rep.relative > worst.relative:
                        worst = rep
                return worst, worst.residual <= 1e-10 * worst.scale, 1e-10
            checks.append((f"boundary/maps/{maps(b, sign).label()}", pairing))
    return checks


def _scaling_checks(cfg, bundle):
    from . import bounds
    from .identities import check_scaling

    bc = cfg.condition()
    if bundle.geometry.has_boundary and bc is None:
        from .operators import local
        bc = local(1)

    def run():
        rep = check_scaling(bundle, cfg.sigma, min(cfg.k, 4), bc, cfg.resolution or 128)
        ok = rep.relative <= 1e-8 and rep.info["curvatureResidual"] <= 1e-12
        ok = ok and rep.info["meanCurvatureResidual"] <= 1e-12
        if bundle.dim == 2:
            r0, r1 = bounds.bound_t1(bundle), bounds.bound_t1(bundle.rescaled(cfg.sigma))
            err = abs(r1 - r0 / cfg.sigma**2) / max(abs(r0), 1e-300) if r0 else abs(r1)
            rep.info["boundScalingResidual"] = err
            ok = ok and err <= 1e-8
        rep.info.pop("values", None)
        rep.info.pop("scaledValues", None)
        return rep, ok, 1e-8
    return [(f"scaling/sigma={cfg.sigma:g}", run)]


def _threads() -> int:
    raw = os.environ.get("DIRACBOUND_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"DIRACBOUND_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("DIRACBOUND_THREADS must be a positive integer")
    return n


def cmd_verify(cfg: RunConfig) -> int:
    bundle = cfg.bundle()
    g = bundle.geometry
    checks = []
    if cfg.suite in ("identities", "all"):
        if cfg.suite == "identities" or g.kind == "torus":
            checks += _identity_checks(cfg, bundle)
    if cfg.suite in ("boundary", "all"):
        if cfg.suite == "boundary" or (g.has_boundary and g.dim == 2):
            checks += _boundary_checks(cfg, bundle)
    if cfg.suite in ("scaling", "all"):
        checks += _scaling_checks(cfg, bundle)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = {name: pool.submit(fn) for name, fn in checks}
        outcomes = {name: fut.result() for name, fut in futures.items()}
    records, failures = [], []
    for name in sorted(outcomes):
        rep, ok, threshold = outcomes[name]
        rec = {"check": name, **rep.to_dict(), "threshold": threshold, "passed": bool(ok)}
        records.append(rec)
        if not ok:
            failures.append(name)
    write_output(cfg, "verify", records, {"suite": cfg.suite})
    if failures:
        print("failed checks:", file=sys.stderr)
        for name in failures:
            print(f"  {name}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# -- converge ----------------------------------------------------------------------

def cmd_converge(cfg: RunConfig) -> int:
    from .identities import check_bochner, fitted_order

    if cfg.refinements < 3:
        raise ConfigError("refinements must be at least 3")
    bundle = cfg.bundle()
    g = bundle.geometry
    base = cfg.resolution or (16 if g.kind == "torus" else 64)
    rows = []
    for level in range(cfg.refinements):
        res = base * 2**level
        if g.kind == "torus":
            h = min(g.length("L1"), g.length("L2")) / res
        else:
            prof = g.profile()
            h = (prof.b - prof.a) / res
        if cfg.quantity == "bochner":
            rep = check_bochner(bundle, res)
            value, residual = rep.residual, rep.residual
        else:
            spec = _spectrum(cfg, bundle, resolution=res, k=1)
            value, residual = float(abs(spec.eigenvalues[0])), float(spec.residuals[0])
        rows.append({"level": level, "resolution": res, "h": h, "value": value,
                     "residual": residual})
    values = [r["value"] for r in rows]
    if cfg.quantity == "bochner":
        series = [(r["h"], r["value"]) for r in rows]
    else:
        # successive differences decay like h^p for a method of order p
        series = [(rows[i]["h"], abs(values[i + 1] - values[i])) for i in range(len(rows) - 1)]
    order = fitted_order(series)
    spread = max(values) - min(values)
    for r in rows:
        r["order"] = order
    write_output(cfg, "converge", rows, {"quantity": cfg.quantity, "order": order,
                                         "spread": spread})
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "bound": cmd_bound, "verify": cmd_verify,
            "converge": cmd_converge}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style file with [section] key = value lines")
    common.add_argument("--geometry", choices=sorted(DEFAULT_PARAMS))
    common.add_argument("--L1")
    common.add_argument("--L2")
    common.add_argument("--spin", help="spin structure, e.g. 1,1 on the torus or 1 on the cylinder")
    common.add_argument("--radius")
    common.add_argument("--r-in", dest="r_in")
    common.add_argument("--r-out", dest="r_out")
    common.add_argument("--length")
    common.add_argument("--circumference")
    common.add_argument("--n", help="dimension of the sphere or ball")
    common.add_argument("--twist", help="constant line-bundle curvature B (multiples of pi allowed)")
    common.add_argument("--bc", choices=("mit", "local", "aps", "maps"))
    common.add_argument("--b", help="spectral cut of the APS conditions")
    common.add_argument("--sign", help="branch of the MIT, local or modified APS condition")
    common.add_argument("-k", dest="k", help="number of eigenvalues")
    common.add_argument("--resolution")
    common.add_argument("--modes", help="highest fiber level searched")
    common.add_argument("--tol")
    common.add_argument("--seed")
    common.add_argument("--out", help="output path, - for stdout")
    common.add_argument("--format", choices=("json", "csv"))

    parser = argparse.ArgumentParser(prog="diracbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="smallest Dirac eigenvalues")
    p = sub.add_parser("bound", parents=[common], help="eigenvalue bound against the spectrum")
    p.add_argument("--theorem", choices=THEOREM_TAGS)
    p.add_argument("--gamma")
    p = sub.add_parser("verify", parents=[common], help="identity and scaling checks")
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--sigma")
    p = sub.add_parser("converge", parents=[common], help="refinement study")
    p.add_argument("--refinements")
    p.add_argument("--quantity", choices=QUANTITIES)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DiracBoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
