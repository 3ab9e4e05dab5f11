"""The ``flatlab`` command line.

Each subcommand is a pure function from a parameter dict to output text.
The click layer writes that text atomically, records a :class:`RunManifest`
next to it, and maps errors to exit codes: 1 for usage, 2 for domain errors
(reported as one JSON object on stderr).
"""

from __future__ import annotations

import ast
import csv
import hashlib
import io as _io
import json
import math
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional

import click

from . import __version__
from .errors import FlatlabError, HashMismatch, OutputDrift
from .exactfield import QuadNum, sqrt_d
from .io import (
    DEFAULT_SEED,
    RunManifest,
    atomic_write,
    csv_text,
    dumps,
    file_hash,
    load_surface,
    manifest_path_for,
    read_json,
    surface_to_json,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


# -- number parsing ----------------------------------------------------------------------


def parse_number(text: Any) -> Any:
    """Exact value of an expression such as ``"3/2 - sqrt(2)"`` or ``"(1+sqrt(5))/2"``.

    Also accepts ints and the JSON object form of a field element. Decimal
    literals are read exactly (``"0.1"`` is 1/10).
    """
    if isinstance(text, dict):
        return QuadNum.from_json(text)
    if isinstance(text, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(text, int):
        return QuadNum(text)
    if isinstance(text, float):
        return QuadNum(Fraction(repr(text)))
    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse number {text!r}") from exc
    val = _eval(tree.body)
    return val if isinstance(val, QuadNum) else QuadNum(val)


def _eval(node: ast.AST) -> Any:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return Fraction(repr(node.value)) if isinstance(node.value, float) else Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        a, b = _eval(node.left), _eval(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            return a / b
        if isinstance(node.op, ast.Pow) and isinstance(b, Fraction) and b.denominator == 1:
            return a ** int(b)
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "sqrt"
        and len(node.args) == 1
        and not node.keywords
    ):
        arg = _eval(node.args[0])
        if not (isinstance(arg, Fraction) and arg.denominator == 1 and arg > 0):
            raise ValueError("sqrt takes a positive integer")
        n = int(arg)
        r = math.isqrt(n)
        if r * r == n:
            return Fraction(r)
        # pull out square factors so that the radicand is squarefree
        k, core = 1, n
        for p in range(2, math.isqrt(n) + 1):
            while core % (p * p) == 0:
                core //= p * p
                k *= p
        return k * sqrt_d(core)
    if isinstance(node, ast.Name) and node.id == "phi":
        return (1 + sqrt_d(5)) / 2
    raise ValueError(f"unsupported expression: {ast.dump(node)}")


def parse_pair(text: str) -> tuple:
    parts = [p for p in str(text).split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(parse_number(p) for p in parts)


# -- commands as pure functions -----------------------------------------------------------


@dataclass
class Outcome:
    text: str
    exact: bool = True
    tolerance: Optional[float] = None
    summary: Optional[dict] = None
    extra: dict = field(default_factory=dict)  # suffix -> text, written next to the main output


def _surface(params: dict) -> Any:
    return load_surface(params["surface"])


def cmd_build(p: dict) -> Outcome:
    from . import constructions as c

    kind = p["kind"]
    raw = p.get("params") or {}
    if isinstance(raw, str):
        raw = json.loads(raw)
    vals = {k: parse_number(v) for k, v in raw.items()}
    if kind == "octagon":
        S = c.regular_2n_gon(4)
    elif kind == "decagon":
        S = c.regular_2n_gon(5)
    elif kind == "square":
        S = c.square_torus()
    elif kind == "ltable":
        S = c.l_table(c.LTableParams(**vals))
    elif kind == "ztable":
        S = c.z_table(c.ZTableParams(**vals))
    elif kind == "decagon-eigenform":
        S = c.decagon_eigenform_model()
    else:
        raise click.UsageError(f"unknown surface kind {kind!r}")
    return Outcome(dumps(surface_to_json(S)), exact=S.exact)


def cmd_validate(p: dict) -> Outcome:
    S = _surface(p)
    cones = S.cone_data()
    excess = sum(cp.angle_multiple - 1 for cp in cones)
    report = {
        "label": S.label,
        "exact": S.exact,
        "d": S.d,
        "genus": S.genus(),
        "stratum": str(S.stratum()),
        "cones": [{"id": cp.id, "angle_over_2pi": cp.angle_multiple, "order": cp.order} for cp in cones],
        "area": S.area().to_json() if isinstance(S.area(), QuadNum) else S.area(),
        "gauss_bonnet": excess == 2 * S.genus() - 2,
    }
    return Outcome(dumps(report))


def _direction(p: dict) -> Any:
    from .cylinders import Direction

    a, b = parse_pair(p.get("dir") or "1,0")
    return Direction.of(a, b)


def cmd_cylinders(p: dict) -> Outcome:
    from .cylinders import periodic_direction_decompose

    S = _surface(p)
    res = periodic_direction_decompose(S, _direction(p), budget=int(p.get("budget") or 10**6), on_budget="report")
    return Outcome(dumps(res.to_json()))


def cmd_check_lm(p: dict) -> Outcome:
    from .cylinders import check_lm, normalize_params, periodic_direction_decompose, NotPeriodic
    from .errors import TraceBudgetExceeded

    S = _surface(p)
    dec = periodic_direction_decompose(S, _direction(p), budget=int(p.get("budget") or 10**6), on_budget="report")
    if isinstance(dec, NotPeriodic):
        raise TraceBudgetExceeded("direction did not close within the budget", direction=str(dec.direction))
    np_ = dec.normalized or normalize_params(dec)
    v = check_lm(np_)
    out = v.to_json()
    out["params"] = np_.to_json()
    out["summary"] = str(v)
    return Outcome(dumps(out))


def cmd_saddles(p: dict) -> Outcome:
    from .saddles import enumerate_saddle_connections, horizontal_saddle_connections

    S = _surface(p)
    L = parse_number(p["bound"])
    if p.get("horizontal_only"):
        scs = horizontal_saddle_connections(S, L)
    else:
        scs = enumerate_saddle_connections(S, L, max_nodes=int(p.get("max_nodes") or 2_000_000))
    return Outcome(dumps([s.to_json() for s in scs]))


def cmd_act(p: dict) -> Outcome:
    from .surface import apply_sl2, delaunay_canonicalize

    S = _surface(p)
    vals = [parse_number(x) for x in str(p["matrix"]).split(",")]
    if len(vals) != 4:
        raise click.UsageError("--matrix takes four comma-separated entries a,b,c,d")
    out = apply_sl2(S, ((vals[0], vals[1]), (vals[2], vals[3])))
    if p.get("canonicalize"):
        out = delaunay_canonicalize(out)
    return Outcome(dumps(surface_to_json(out)))


def cmd_rel(p: dict) -> Outcome:
    from .rel import DegenerationReport, rel_translate

    S = _surface(p)
    v = parse_pair(p["vector"])
    res = rel_translate(S, v, int(p.get("cls") or 0))
    if isinstance(res, DegenerationReport):
        return Outcome(dumps({"kind": "degeneration", "report": res.to_json()}))
    return Outcome(dumps({"kind": "surface", "surface": surface_to_json(res)}))


def _observable(p: dict) -> Any:
    from .ergodic import make_observable

    name = p.get("obs") or "systole"
    kw: dict = {}
    if p.get("cap") is not None and name in ("systole", "hi_width"):
        kw["cap"] = float(p["cap"])
    if p.get("L") is not None and name in ("sc_count", "sc_bump"):
        kw["L"] = str(p["L"])
    if name == "constant":
        kw["c"] = float(p.get("value", 1.0))
    return make_observable(name, **kw)


def cmd_average(p: dict) -> Outcome:
    from .ergodic import average_A_U, average_A_UX, exact_param

    S = _surface(p)
    obs = _observable(p)
    T = exact_param(p["T"])
    dt = exact_param(p["dt"])
    if p.get("ds") is not None:
        r = average_A_UX(obs, S, T, dt, exact_param(p["ds"]), workers=int(p.get("threads") or 1))
        mode = "UX"
    else:
        r = average_A_U(obs, S, T, dt)
        mode = "U"
    text = csv_text(["T", "value", "err_estimate"], [(str(T), r.value, r.err_estimate)])
    return Outcome(text, exact=False, tolerance=r.err_estimate,
                   summary={"mode": mode, "observable": obs.name, **r.to_json()})


def cmd_equidist(p: dict) -> Outcome:
    from .ergodic import equidistribution_experiment, make_observable

    cfg = read_json(p["manifest"])
    base = Path(p["manifest"]).parent
    surfaces = []
    for entry in cfg["surfaces"]:
        path = Path(entry["path"])
        if not path.is_absolute():
            path = base / path
        surfaces.append((entry.get("ref", path.stem), load_surface(path)))
    ob = cfg.get("observable", {"name": "systole"})
    obs = make_observable(ob["name"], **ob.get("params", {}))
    table = equidistribution_experiment(
        surfaces,
        obs,
        cfg["T_schedule"],
        n_t=int(cfg.get("n_t", 64)),
        n_s=int(cfg.get("n_s", 2)),
        workers=int(p.get("threads") or 1),
    )
    rows = []
    for run in table.runs:
        inc = [None] + run.increments()
        for T, v, e, st, dv in zip(run.T_schedule, run.results, run.err_estimates, run.status, inc):
            rows.append((run.surface_ref, str(T), "" if v is None else v, "" if e is None else e, st,
                         "" if dv is None else dv))
    text = csv_text(["surface", "T", "value", "err_estimate", "status", "increment"], rows)
    tol = max((e for r in table.runs for e in r.err_estimates if e is not None), default=0.0)
    return Outcome(text, exact=False, tolerance=tol, extra={".runs.json": dumps(table.to_json())},
                   summary={"monotone_increments": table.monotone, "spread": table.spread})


def cmd_divergence_verify(p: dict) -> Outcome:
    from .divergence import family_example_a, family_example_b, limit_region_check, random_family

    seed = int(p.get("seed") if p.get("seed") is not None else DEFAULT_SEED)
    delta = Fraction(str(p.get("delta", "0.1")))
    kmax = int(float(p.get("kmax", 1e6)))
    tol = float(p.get("tol", 1e-3))
    fam = p.get("family", "caseA")
    if fam == "caseA":
        seq = family_example_a(delta)
    elif fam == "caseB":
        seq = family_example_b(delta)
    elif fam == "custom":
        rng = random.Random(seed)
        seq = random_family(rng, p.get("case") or "A", float(delta))
    else:
        raise click.UsageError(f"unknown family {fam!r}")
    ks = []
    k = 1
    while k < kmax:
        ks.append(k)
        k *= 4
    rep = limit_region_check(seq, K=kmax, tol=tol, sample_ks=ks)
    text = csv_text(["k", "diag_part", "x_part", "distance"], rep.rows)
    exact_family = fam != "custom"
    return Outcome(text, exact=exact_family, tolerance=None if exact_family else 1e-12,
                   summary={"case": rep.case, "passed": rep.passed, "distance": rep.distance_to_region,
                            "cauchy": rep.cauchy, "residuals": rep.residuals})


COMMANDS: dict[str, Callable[[dict], Outcome]] = {
    "build": cmd_build,
    "validate": cmd_validate,
    "cylinders": cmd_cylinders,
    "check-lm": cmd_check_lm,
    "saddles": cmd_saddles,
    "act": cmd_act,
    "rel": cmd_rel,
    "average": cmd_average,
    "equidist": cmd_equidist,
    "divergence-verify": cmd_divergence_verify,
}

INPUT_KEYS = ("surface", "manifest")


def _inputs(params: dict) -> dict:
    out = {}
    for key in INPUT_KEYS:
        if params.get(key):
            out[str(params[key])] = file_hash(params[key])
    if params.get("manifest"):
        cfg = read_json(params["manifest"])
        base = Path(params["manifest"]).parent
        for entry in cfg.get("surfaces", []):
            path = Path(entry["path"])
            if not path.is_absolute():
                path = base / path
            out[str(path)] = file_hash(path)
    return out


def execute(command: str, params: dict, out: Optional[str], manifest: Optional[str], seed: int) -> Outcome:
    """Run a command, write its output and its manifest."""
    t0 = time.perf_counter()
    inputs = _inputs(params)
    res = COMMANDS[command](params)
    wall = time.perf_counter() - t0
    outputs = {}
    if out and out != "-":
        atomic_write(out, res.text)
        outputs[str(out)] = file_hash(out)
        for suffix, text in res.extra.items():
            atomic_write(str(out) + suffix, text)
            outputs[str(out) + suffix] = file_hash(str(out) + suffix)
        if manifest is None:
            manifest = str(manifest_path_for(out))
    else:
        sys.stdout.write(res.text)
        outputs["-"] = hashlib.sha256(res.text.encode()).hexdigest()
    if manifest:
        clean = {k: v for k, v in params.items() if v is not None}
        man = RunManifest(command, clean, inputs, outputs, __version__, seed, res.exact, res.tolerance, wall)
        data = man.to_json()
        if res.summary is not None:
            data["summary"] = res.summary
        atomic_write(manifest, dumps(data))
    if res.summary is not None and out and out != "-":
        click.echo(json.dumps(res.summary, sort_keys=True, default=str))
    return res


def _csv_rows(text: str) -> list:
    return list(csv.reader(_io.StringIO(text)))


def _cells_close(a: str, b: str, tol: float) -> bool:
    if a == b:
        return True
    try:
        x, y = float(a), float(b)
    except ValueError:
        return False
    if math.isnan(x) and math.isnan(y):
        return True
    return abs(x - y) <= tol + 1e-12 * max(1.0, abs(x))


def replay(manifest_path: str) -> dict:
    """Re-run a recorded command and compare with the recorded outputs."""
    data = read_json(manifest_path)
    data.pop("summary", None)
    man = RunManifest.from_json(data)
    for path, digest in man.inputs.items():
        if not os.path.exists(path) or file_hash(path) != digest:
            raise HashMismatch("input changed since the recorded run", path=path)
    res = COMMANDS[man.command](dict(man.params))
    main_out = man.params.get("out")
    texts = {str(main_out) if main_out else "-": res.text}
    for suffix, text in res.extra.items():
        texts[str(main_out) + suffix] = text
    report = {"command": man.command, "outputs": {}}
    for path, digest in man.outputs.items():
        new = texts.get(path)
        if new is None:
            raise OutputDrift("replay did not produce a recorded output", path=path)
        new_digest = hashlib.sha256(new.encode()).hexdigest()
        if new_digest == digest:
            report["outputs"][path] = "identical"
            continue
        if man.exact or path == "-":
            raise OutputDrift("output differs from the recorded run", path=path)
        if not os.path.exists(path) or file_hash(path) != digest:
            raise OutputDrift("recorded output file is missing or was modified", path=path)
        old = Path(path).read_text()
        tol = man.tolerance or 0.0
        if path.endswith(".json"):
            ok = old == new
        else:
            ra, rb = _csv_rows(old), _csv_rows(new)
            ok = len(ra) == len(rb) and all(
                len(x) == len(y) and all(_cells_close(a, b, tol) for a, b in zip(x, y)) for x, y in zip(ra, rb)
            )
        if not ok:
            raise OutputDrift("floating output drifted beyond the recorded tolerance", path=path, tolerance=tol)
        report["outputs"][path] = f"within {tol}"
    return report


# -- click layer ----------------------------------------------------------------------------


def _load_config(ctx: click.Context, _param: Any, value: Optional[str]) -> Optional[str]:
    if value:
        with open(value, "rb") as fh:
            cfg = tomllib.load(fh)
        ctx.default_map = {k.replace("_", "-"): v for k, v in cfg.items() if isinstance(v, dict)}
        ctx.default_map.update({k: v for k, v in cfg.items() if not isinstance(v, dict)})
    return value


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="flatlab")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), callback=_load_config, is_eager=True,
              expose_value=False, help="TOML file with per-command defaults; flags win.")
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="Seed for randomized drivers.")
@click.pass_context
def cli(ctx: click.Context, threads: int, seed: int) -> None:
    """Exact computations on genus-two translation surfaces."""
    ctx.obj = {"threads": threads, "seed": seed}


_out = click.option("--out", "-o", default="-", show_default=True, help="Output file ('-' for stdout).")
_manifest = click.option("--manifest-out", default=None, help="Manifest path (default: <out>.manifest.json).")
_surf = click.option("--surface", "-s", required=True, type=click.Path(exists=True, dir_okay=False))


def _run(ctx: click.Context, command: str, params: dict, out: str, manifest_out: Optional[str]) -> None:
    params = dict(params, out=None if out == "-" else out)
    execute(command, params, params["out"], manifest_out, ctx.obj["seed"])


@cli.command()
@click.argument("kind", type=click.Choice(["octagon", "decagon", "square", "ltable", "ztable", "decagon-eigenform"]))
@click.option("--params", default=None, help='JSON object, e.g. \'{"a": "2", "b": "1+sqrt(2)"}\'.')
@_out
@_manifest
@click.pass_context
def build(ctx: click.Context, kind: str, params: Optional[str], out: str, manifest_out: Optional[str]) -> None:
    """Build a named surface and write it as JSON."""
    _run(ctx, "build", {"kind": kind, "params": params}, out, manifest_out)


@cli.command()
@_surf
@_out
@_manifest
@click.pass_context
def validate(ctx: click.Context, surface: str, out: str, manifest_out: Optional[str]) -> None:
    """Check a surface file and print its cone report."""
    _run(ctx, "validate", {"surface": surface}, out, manifest_out)


@cli.command()
@_surf
@click.option("--dir", "direction", default="1,0", show_default=True, help="Direction a,b.")
@click.option("--budget", type=int, default=10**6, show_default=True)
@_out
@_manifest
@click.pass_context
def cylinders(ctx: click.Context, surface: str, direction: str, budget: int, out: str, manifest_out: Optional[str]) -> None:
    """Cylinder decomposition of a periodic direction."""
    _run(ctx, "cylinders", {"surface": surface, "dir": direction, "budget": budget}, out, manifest_out)


@cli.command("check-lm")
@_surf
@click.option("--dir", "direction", default="1,0", show_default=True, help="Three-cylinder direction a,b.")
@click.option("--budget", type=int, default=10**6, show_default=True)
@_out
@_manifest
@click.pass_context
def check_lm_cmd(ctx: click.Context, surface: str, direction: str, budget: int, out: str, manifest_out: Optional[str]) -> None:
    """Test the eigenform equations on the cylinder parameters."""
    _run(ctx, "check-lm", {"surface": surface, "dir": direction, "budget": budget}, out, manifest_out)


@cli.command()
@_surf
@click.option("--bound", "-L", required=True, help="Length bound (exact expression).")
@click.option("--horizontal-only", is_flag=True, default=False)
@click.option("--max-nodes", type=int, default=2_000_000, show_default=True)
@_out
@_manifest
@click.pass_context
def saddles(ctx: click.Context, surface: str, bound: str, horizontal_only: bool, max_nodes: int, out: str,
            manifest_out: Optional[str]) -> None:
    """Saddle connections up to a length bound."""
    _run(ctx, "saddles", {"surface": surface, "bound": bound, "horizontal_only": horizontal_only,
                          "max_nodes": max_nodes}, out, manifest_out)


@cli.command()
@_surf
@click.option("--matrix", required=True, help="Entries a,b,c,d of a determinant-one matrix.")
@click.option("--canonicalize", is_flag=True, default=False)
@_out
@_manifest
@click.pass_context
def act(ctx: click.Context, surface: str, matrix: str, canonicalize: bool, out: str, manifest_out: Optional[str]) -> None:
    """Apply a matrix in SL(2,R) to a surface."""
    _run(ctx, "act", {"surface": surface, "matrix": matrix, "canonicalize": canonicalize}, out, manifest_out)


@cli.command()
@_surf
@click.option("--vector", required=True, help="Translation x,y of the moving cone.")
@click.option("--cls", type=click.IntRange(0, 1), default=0, show_default=True)
@_out
@_manifest
@click.pass_context
def rel(ctx: click.Context, surface: str, vector: str, cls: int, out: str, manifest_out: Optional[str]) -> None:
    """Rel translation of one cone point."""
    _run(ctx, "rel", {"surface": surface, "vector": vector, "cls": cls}, out, manifest_out)


@cli.command()
@_surf
@click.option("--obs", type=click.Choice(["systole", "sc_count", "sc_bump", "hi_width", "constant"]), default="systole",
              show_default=True)
@click.option("--T", "T", required=True, help="Time horizon.")
@click.option("--dt", required=True, help="Time step.")
@click.option("--ds", default=None, help="Rel step; when given the average is over u and x.")
@click.option("--cap", type=float, default=None, help="Truncation for systole / hi_width.")
@click.option("--L", "L", default=None, help="Length bound for sc_count / sc_bump.")
@click.option("--value", type=float, default=1.0, help="Value of the constant observable.")
@_out
@_manifest
@click.pass_context
def average(ctx: click.Context, surface: str, obs: str, T: str, dt: str, ds: Optional[str], cap: Optional[float],
            L: Optional[str], value: float, out: str, manifest_out: Optional[str]) -> None:
    """Averages along horocycle (and rel) orbits; CSV of T, value, err_estimate."""
    _run(ctx, "average", {"surface": surface, "obs": obs, "T": T, "dt": dt, "ds": ds, "cap": cap, "L": L,
                          "value": value, "threads": ctx.obj["threads"]}, out, manifest_out)


@cli.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Experiment description: surfaces, observable, T_schedule, n_t, n_s.")
@_out
@_manifest
@click.pass_context
def equidist(ctx: click.Context, manifest: str, out: str, manifest_out: Optional[str]) -> None:
    """Equidistribution experiment over several surfaces and horizons."""
    _run(ctx, "equidist", {"manifest": manifest, "threads": ctx.obj["threads"]}, out, manifest_out)


@cli.command("divergence-verify")
@click.option("--family", type=click.Choice(["caseA", "caseB", "custom"]), default="caseA", show_default=True)
@click.option("--case", type=click.Choice(["A", "B"]), default="A", show_default=True, help="Case for --family custom.")
@click.option("--delta", default="0.1", show_default=True)
@click.option("--kmax", default="1e6", show_default=True)
@click.option("--tol", type=float, default=1e-3, show_default=True)
@_out
@_manifest
@click.pass_context
def divergence_verify(ctx: click.Context, family: str, case: str, delta: str, kmax: str, tol: float, out: str,
                      manifest_out: Optional[str]) -> None:
    """Limit-region check for a transverse-divergence sequence; CSV of k, diag_part, x_part, distance."""
    _run(ctx, "divergence-verify", {"family": family, "case": case, "delta": delta, "kmax": kmax, "tol": tol,
                                    "seed": ctx.obj["seed"]}, out, manifest_out)


@cli.command("replay")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
def replay_cmd(manifest: str) -> None:
    """Re-run a recorded command and compare outputs."""
    click.echo(json.dumps(replay(manifest), sort_keys=True))


def main(argv: Optional[list] = None) -> int:
    try:
        cli.main(args=argv, prog_name="flatlab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except FlatlabError as exc:
        click.echo(json.dumps(exc.to_json(), sort_keys=True), err=True)
        return 2
    except (ValueError, json.JSONDecodeError) as exc:
        click.echo(json.dumps({"code": "InvalidInput", "module": "cli", "message": str(exc), "context": {}}), err=True)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
