"""Command-line front end.

    scatter1d spectrum  --potential poschl_teller:6
    scatter1d scatter   --potential dirac:1 --kgrid 0.1,5,50
    scatter1d transform --potential poschl_teller:6 --state gaussian:-3,1,1
    scatter1d evolve    --potential poschl_teller:6 --times 1,5,10
    scatter1d verify    --only 1,2,3

Every artifact starts with a versioned header line and prints floats with
17 significant digits, so identical inputs give byte-identical files.
Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 solver failure.
"""

import argparse
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import ConfigurationError, OracleError, Scatter1DError, SolverError, UsageError, ValidationError
from .oracle import crank_nicolson, fd_eigenvalues, fd_hamiltonian
from .potential import Potential, SpatialGrid, from_spec, norms
from .propagator import CSV_COLUMNS as EVOLVE_COLUMNS
from .propagator import scatter_profile
from .scattering import ScatteringData, scattering_coefficients
from .spectrum import exceptional_scan, spectrum
from .transform import WaveFunction, build_basis, forward, frequency_grid, gaussian_packet

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class Tolerances:
    solver: float = 1e-6
    tail: float = 1e-8
    condition: float = 1e8
    guard: float = 1e-4

    def check(self):
        for name, v in vars(self).items():
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigurationError(f"tolerances.{name}: must be a positive number, got {v!r}")


@dataclass
class RunConfig:
    potential: dict = field(default_factory=lambda: {"name": "poschl_teller", "params": [6.0]})
    grid: tuple = (-40.0, 40.0, 4096)
    kgrid: tuple = (0.05, 8.0, 512)
    tolerances: Tolerances = field(default_factory=Tolerances)
    out: Optional[str] = None
    seed: int = 0
    oracle: bool = False
    state: tuple = (0.0, 1.0, 1.0)
    times: tuple = (1.0, 5.0, 10.0)
    only: tuple = ()

    def spatial_grid(self) -> SpatialGrid:
        return SpatialGrid(*self.grid)

    def make_potential(self) -> Potential:
        return from_spec(self.potential, self.spatial_grid())

    def describe(self) -> str:
        p = self.potential
        pot = p.get("label") or p.get("name") or "samples"
        if "params" in p:
            pot += "(" + ",".join("%.17g" % float(v) for v in p["params"]) + ")"
        g, k = self.grid, self.kgrid
        return (f"potential={pot} grid={g[0]:.17g},{g[1]:.17g},{g[2]} "
                f"kgrid={k[0]:.17g},{k[1]:.17g},{k[2]} seed={self.seed}")


def _triple(text: str, what: str):
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 3:
        raise ConfigurationError(f"{what}: expected 'min,max,n', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError:
        raise ConfigurationError(f"{what}: could not parse {text!r} as 'min,max,n'") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi and n >= 2):
        raise ConfigurationError(f"{what}: need finite min < max and n >= 2, got {text!r}")
    return (lo, hi, n)


def _floats(text, what: str) -> tuple:
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [p for p in str(text).split(",") if p.strip()]
    try:
        return tuple(float(v) for v in items)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _number(v, what: str):
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            raise ConfigurationError(f"{what}: must be a positive number, got {v!r}") from None
    return v


def parse_potential(text: str) -> dict:
    """``name``, ``name:p1,p2``, an inline JSON object, or a path to a JSON/YAML file."""
    text = text.strip()
    if text.startswith("{"):
        return _load_mapping(text, "--potential")
    if os.path.isfile(text):
        return _load_mapping(_read(text), text)
    name, _, params = text.partition(":")
    spec = {"name": name.strip()}
    if params.strip():
        spec["params"] = list(_floats(params, "--potential"))
    return spec


def parse_state(text: str) -> tuple:
    """``gaussian:center,width,k0``."""
    name, _, params = text.partition(":")
    if name.strip() != "gaussian":
        raise ConfigurationError(f"--state: only 'gaussian:center,width,k0' is supported, got {text!r}")
    vals = _floats(params, "--state")
    if len(vals) != 3 or not vals[1] > 0:
        raise ConfigurationError(f"--state: need center,width>0,k0, got {text!r}")
    return vals


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from None


def _load_mapping(text: str, source: str) -> dict:
    """Parse JSON, falling back to YAML; errors carry line and column."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as jexc:
        try:
            import yaml
        except ImportError:  # pragma: no cover
            raise ConfigurationError(f"{source}: line {jexc.lineno}, column {jexc.colno}: {jexc.msg}") from None
        try:
            obj = yaml.safe_load(text)
        except yaml.YAMLError as yexc:
            mark = getattr(yexc, "problem_mark", None)
            where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
            raise ConfigurationError(f"{source}: {where}{getattr(yexc, 'problem', yexc)}") from None
    if not isinstance(obj, dict):
        raise ConfigurationError(f"{source}: expected a mapping at the top level")
    return obj


_CONFIG_KEYS = {"potential", "grid", "kgrid", "tolerances", "tol", "out", "seed", "oracle", "state", "times", "only"}


def apply_config_file(cfg: RunConfig, path: str) -> RunConfig:
    """Values from the file override the command line."""
    data = _load_mapping(_read(path), path)
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigurationError(f"{path}: unknown field(s) {unknown}; allowed: {sorted(_CONFIG_KEYS)}")
    upd = {}
    if "potential" in data:
        p = data["potential"]
        upd["potential"] = parse_potential(p) if isinstance(p, str) else p
        if not isinstance(upd["potential"], dict):
            raise ConfigurationError(f"{path}: field 'potential' must be a mapping or a string")
    for key in ("grid", "kgrid"):
        if key in data:
            v = data[key]
            upd[key] = _triple(",".join(map(str, v)) if isinstance(v, (list, tuple)) else v, f"{path}: field '{key}'")
    tol = cfg.tolerances
    if "tol" in data:
        tol = replace(tol, solver=_number(data["tol"], "tol"))
    if "tolerances" in data:
        t = data["tolerances"]
        if not isinstance(t, dict) or set(t) - set(vars(Tolerances())):
            raise ConfigurationError(f"{path}: field 'tolerances' must map some of {sorted(vars(Tolerances()))}")
        # YAML 1.1 reads exponents without a sign ("1.0e8") as strings
        tol = replace(tol, **{k: _number(v, f"tolerances.{k}") for k, v in t.items()})
    upd["tolerances"] = tol
    if "out" in data:
        upd["out"] = None if data["out"] is None else str(data["out"])
    if "seed" in data:
        if not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
            raise ConfigurationError(f"{path}: field 'seed' must be an integer")
        upd["seed"] = data["seed"]
    if "oracle" in data:
        upd["oracle"] = bool(data["oracle"])
    if "state" in data:
        s = data["state"]
        upd["state"] = parse_state(s) if isinstance(s, str) else _floats(s, f"{path}: field 'state'")
    if "times" in data:
        upd["times"] = _floats(data["times"], f"{path}: field 'times'")
    if "only" in data:
        upd["only"] = tuple(int(v) for v in _floats(data["only"], f"{path}: field 'only'"))
    return replace(cfg, **upd)


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    upd = {}
    if args.potential is not None:
        upd["potential"] = parse_potential(args.potential)
    if args.grid is not None:
        upd["grid"] = _triple(args.grid, "--grid")
    if args.kgrid is not None:
        upd["kgrid"] = _triple(args.kgrid, "--kgrid")
    if args.tol is not None:
        upd["tolerances"] = replace(cfg.tolerances, solver=args.tol)
    if args.out is not None:
        upd["out"] = args.out
    if args.seed is not None:
        upd["seed"] = args.seed
    if args.oracle:
        upd["oracle"] = True
    if getattr(args, "state", None):
        upd["state"] = parse_state(args.state)
    if getattr(args, "times", None):
        upd["times"] = _floats(args.times, "--times")
    if getattr(args, "only", None):
        upd["only"] = tuple(int(v) for v in _floats(args.only, "--only"))
    cfg = replace(cfg, **upd)
    if args.config:
        cfg = apply_config_file(cfg, args.config)
    cfg.tolerances.check()
    if cfg.kgrid[0] <= 0:
        raise ConfigurationError("kgrid: kmin must be positive")
    if not cfg.times:
        raise ConfigurationError("times: need at least one time")
    bad = [n for n in cfg.only if not 1 <= n <= 12]
    if bad:
        raise ConfigurationError(f"only: criteria are numbered 1-12, got {bad}")
    cfg.spatial_grid()
    return cfg


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    return "%.17g" % v


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if v is None:
        return "null"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def dump_json(obj) -> str:
    """JSON with every float printed to 17 significant digits."""
    return _json_value(obj) + "\n"


def header(kind: str, cfg: RunConfig) -> str:
    return f"# scatter1d {kind} schema={SCHEMA_VERSION} version={__version__} {cfg.describe()}"


def csv_text(head: str, columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write(head + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def emit(cfg: RunConfig, filename: str, text: str):
    if cfg.out is None:
        sys.stdout.write(text)
        return
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, filename), "w", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> int:
    V = cfg.make_potential()
    grid = cfg.spatial_grid()
    kmin, kmax, n = cfg.kgrid
    data = spectrum(V, grid, guard=cfg.tolerances.guard, tol=cfg.tolerances.solver * 1e-4)
    scan = exceptional_scan(V, np.linspace(kmin, kmax, min(n, 16)), grid, cond_threshold=cfg.tolerances.condition)
    nv = norms(V, grid, tail_tol=cfg.tolerances.tail)
    report = {
        "schema": f"scatter1d.spectrum/{SCHEMA_VERSION}",
        "config": cfg.describe(),
        "norms": {"l1": nv.l1, "l2": nv.l2, "l1_weighted2": nv.l1_weighted2},
        "bound_states": [
            {"lambda": b.lam, "kappa": b.kappa, "residual": b.residual, "edge_amplitude": b.edge_amplitude}
            for b in data.bound_states
        ],
        "exceptional_scan": {
            "k": scan.k_grid, "condition": scan.condition, "flagged": scan.flags, "threshold": scan.threshold
        },
        "notes": data.notes,
    }
    status = EXIT_OK
    if cfg.oracle:
        fd = fd_eigenvalues(fd_hamiltonian(V, grid), select=(-1e6, 0.0))
        lam = data.eigenvalues
        agree = fd.size == lam.size and bool(np.all(np.abs(fd - lam) <= 1e-3 * np.maximum(1.0, np.abs(lam))))
        report["oracle"] = {"fd_eigenvalues": fd, "agree": agree}
        if not agree:
            status = EXIT_VERIFY
    emit(cfg, "spectrum.json", dump_json(report))
    return status


def cmd_scatter(cfg: RunConfig) -> int:
    V = cfg.make_potential()
    k = np.linspace(*cfg.kgrid[:2], cfg.kgrid[2])
    sd = scattering_coefficients(V, k, cfg.spatial_grid(), guard=cfg.tolerances.guard)
    emit(cfg, "scatter.csv", csv_text(header("scatter", cfg), ScatteringData.CSV_COLUMNS, sd.to_rows()))
    return EXIT_OK


def _basis(cfg: RunConfig, V: Potential):
    freq = frequency_grid(*cfg.kgrid)
    return build_basis(V, freq, cfg.spatial_grid(), cond_threshold=cfg.tolerances.condition,
                       residual_tol=cfg.tolerances.solver)


def cmd_transform(cfg: RunConfig) -> int:
    V = cfg.make_potential()
    B = _basis(cfg, V)
    f = gaussian_packet(B.grid, *cfg.state)
    r = forward(B, f)
    fs2 = B.freq.norm2(r.f_sharp)
    pp2 = float(np.sum(np.abs(r.pp_coefficients) ** 2))
    defect = r.parseval(B.freq)
    head = header("transform", cfg) + (
        f" state=gaussian:{cfg.state[0]:.17g},{cfg.state[1]:.17g},{cfg.state[2]:.17g}"
        f"\n# parseval norm2={_fmt(r.norm2)} fsharp_norm2={_fmt(fs2)} pp_norm2={_fmt(pp2)} defect={_fmt(defect)}"
    )
    xi = B.freq.xi_values
    rows = zip(xi, r.f_sharp.real, r.f_sharp.imag, B.freq.weights)
    emit(cfg, "transform.csv", csv_text(head, ("xi", "re_f_sharp", "im_f_sharp", "weight"), rows))
    return EXIT_VERIFY if cfg.oracle and defect > 1e-3 * r.norm2 else EXIT_OK


def cmd_evolve(cfg: RunConfig) -> int:
    V = cfg.make_potential()
    B = _basis(cfg, V)
    phi = gaussian_packet(B.grid, *cfg.state)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = scatter_profile(B, phi, cfg.times)
    cols = list(EVOLVE_COLUMNS) + ["pp_removed"]
    rows = [tuple(r) + (d.pp_removed,) for r in d.rows()]
    status = EXIT_OK
    if cfg.oracle:
        # the spectral part of the comparison uses the projected state, as does scatter_profile
        from .propagator import evolve_many, project_ac

        H = fd_hamiltonian(V, B.grid)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pac, _ = project_ac(B, phi)
        evs = evolve_many(B, pac, cfg.times)
        errs = []
        for t, ev in zip(cfg.times, evs):
            cn = crank_nicolson(H, pac.samples, t)
            errs.append((WaveFunction(cn, B.grid) - ev.state).norm() / max(pac.norm(), 1e-300))
        cols.append("oracle_error")
        rows = [r + (e,) for r, e in zip(rows, errs)]
        if max(errs) > 1e-3:
            status = EXIT_VERIFY
    head = header("evolve", cfg) + f" state=gaussian:{cfg.state[0]:.17g},{cfg.state[1]:.17g},{cfg.state[2]:.17g}"
    emit(cfg, "evolve.csv", csv_text(head, cols, rows))
    return status


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import run_checks

    checks = run_checks(cfg.only or None, seed=cfg.seed)
    for c in checks:
        print(c.line(), flush=True)
    n_fail = sum(not c.passed for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} criteria passed")
    if cfg.out is not None:
        report = {
            "schema": f"scatter1d.verify/{SCHEMA_VERSION}",
            "seed": cfg.seed,
            "checks": [
                {"number": c.number, "name": c.name, "passed": c.passed, "values": c.values,
                 "tolerance": c.tolerance, "error": c.error}
                for c in checks
            ],
        }
        emit(cfg, "verify.json", dump_json(report))
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


COMMANDS = {
    "spectrum": cmd_spectrum,
    "scatter": cmd_scatter,
    "transform": cmd_transform,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--potential", help="name[:p1,p2,...], inline JSON, or a JSON/YAML spec file")
    common.add_argument("--grid", help="spatial grid 'xmin,xmax,n' (default -40,40,4096)")
    common.add_argument("--kgrid", help="frequency grid 'kmin,kmax,n' (default 0.05,8,512)")
    common.add_argument("--tol", type=float, help="solver tolerance (default 1e-6)")
    common.add_argument("--out", help="output directory; stdout if omitted")
    common.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
    common.add_argument("--oracle", action="store_true", help="cross-check against the finite-difference oracle")
    common.add_argument("--config", help="JSON or YAML config file; its values override flags")

    p = _Parser(prog="scatter1d", description="Spectral and scattering theory for -d^2/dx^2 + V on the line.")
    p.add_argument("--version", action="version", version=f"scatter1d {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="bound states and exceptional scan (JSON)")
    sub.add_parser("scatter", parents=[common], help="t and r tables with unitarity residuals (CSV)")
    for name, helptext in (("transform", "perturbed Fourier transform and Parseval ledger (CSV)"),
                           ("evolve", "time evolution and scattering diagnostics (CSV)")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--state", help="initial state 'gaussian:center,width,k0' (default gaussian:0,1,1)")
        if name == "evolve":
            sp.add_argument("--times", help="comma-separated times (default 1,5,10)")
    sp = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    sp.add_argument("--only", help="comma-separated criterion numbers (default: all)")
    return p


_VALUE_FLAGS = ("--potential", "--grid", "--kgrid", "--state", "--times")


def _join_negative_values(argv: List[str]) -> List[str]:
    """Turn ``--grid -20,20,512`` into ``--grid=-20,20,512``.

    argparse reads a leading minus as the start of an option unless the
    token is a plain number, which comma lists are not.
    """
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and len(argv[i + 1]) > 1 and argv[i + 1][0] == "-" \
                and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise ConfigurationError("a command is required: " + ", ".join(COMMANDS))
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except (ConfigurationError, UsageError, ValidationError) as exc:
        print(f"scatter1d: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, OracleError) as exc:
        print(f"scatter1d: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except Scatter1DError as exc:
        print(f"scatter1d: error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
