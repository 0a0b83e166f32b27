"""Command-line entry point: ``dyson-lab <command> [options]``.

Parameters come from flags, optionally layered over a JSON config file given
with ``--config`` (flags win). Every run prints one JSON summary line on
stdout. Exit status is 0 on success, 1 when an embedded check fails and 2 for
invalid configuration or input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, dpp, harness, jko
from .configspace import Configuration, Window
from .dynamics import SdeConfig, Speed, evolve_batch, evolve_coupled_batch
from .errors import CheckFailure, ConfigError, DysonLabError, NoConvergence, SubstepExhausted
from .extension import lipschitz_ladder
from .functionals import GaussianLaw, ou_evolve
from .matching import distance_matrix
from .model import ModelSpec, Regime
from .sampling import RngStream, sample_airy_window, sample_mu_k_batch, sample_sine_window
from .transport import Ground, optimal_plan


@dataclass(frozen=True)
class Param:
    type: Callable
    default: Any = None
    choices: tuple | None = None
    required: bool = False
    flag: bool = False


COMMON = {"out": Param(str), "format": Param(str, "csv", ("csv", "json"))}

TABLE: dict[str, dict[str, Param]] = {
    "sample": {
        "model": Param(str, None, ("bulk", "edge", "sine", "airy"), required=True),
        "k": Param(int, 8),
        "n": Param(int, 1),
        "window": Param(float, 2.0),
        "seed": Param(int),
    },
    "dist": {
        "ground": Param(str, "full", ("full", "partial")),
        "radius": Param(float),
        "p": Param(float, 2.0),
        "files": Param(list, required=True),
    },
    "wasserstein": {
        "ground": Param(str, "full", ("full", "partial")),
        "radius": Param(float),
        "p": Param(float, 2.0),
        "files": Param(list, required=True),
    },
    "evolve": {
        "model": Param(str, "bulk", ("bulk", "edge")),
        "k": Param(int, 4),
        "t": Param(float, 1.0),
        "dt": Param(float, 1e-3),
        "paths": Param(int, 100),
        "seed": Param(int),
        "half_speed": Param(bool, False, flag=True),
        "coupled": Param(bool, False, flag=True),
        "record_every": Param(int, 10),
    },
    "fredholm": {
        "kernel": Param(str, "sine", ("sine", "airy")),
        "radius": Param(float, 1.0),
        "t": Param(float, 0.0),
        "nodes": Param(int, dpp.DEFAULT_NODES),
    },
    "jko": {
        "tau": Param(float, 0.1),
        "horizon": Param(float, 1.0),
        "grid": Param(int, 512),
        "start_mean": Param(float, 1.0),
        "start_var": Param(float, 1.0),
    },
    "verify": {
        "suite": Param(str, "closed-form", ("closed-form", "monte-carlo", "all")),
        "seed": Param(int),
        "quick": Param(bool, False, flag=True),
    },
    "extension": {
        "k": Param(int, 2),
        "lmax": Param(int, 3),
        "pairs": Param(int, 10000),
        "seed": Param(int),
        "radius": Param(float, 1.0),
    },
    "rigidity": {
        "kernel": Param(str, "sine", ("sine", "airy")),
        "kmax": Param(int, 20),
        "samples": Param(int, 0),
        "seed": Param(int),
    },
}

STOCHASTIC = {"sample", "evolve", "verify", "extension"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyson-lab", description="Desk-scale numerics for Dyson-type interacting Brownian motions.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, table in TABLE.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON file with parameters; flags override it")
        for key, spec in {**table, **COMMON}.items():
            if key == "files":
                p.add_argument("files", nargs="*", default=argparse.SUPPRESS)
            elif spec.flag:
                p.add_argument("--" + key.replace("_", "-"), dest=key, action="store_true", default=argparse.SUPPRESS)
            else:
                p.add_argument("--" + key.replace("_", "-"), dest=key, type=spec.type, choices=spec.choices, default=argparse.SUPPRESS)
    return parser


def resolve(command: str, flags: dict, config_path: str | None) -> dict:
    """Merge defaults, config file and flags; reject unknown keys and missing required ones."""
    table = {**TABLE[command], **COMMON}
    values = {k: v.default for k, v in table.items()}
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        data.pop("command", None)
        unknown = sorted(set(data) - set(table))
        if unknown:
            raise ConfigError(f"unknown keys for {command}: {', '.join(unknown)}")
        for key, raw in data.items():
            spec = table[key]
            try:
                value = spec.type(raw) if raw is not None else None
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
            if spec.choices and value not in spec.choices:
                raise ConfigError(f"{key} must be one of {spec.choices}")
            values[key] = value
    values.update(flags)
    for key, spec in table.items():
        if spec.required and values.get(key) in (None, []):
            raise ConfigError(f"missing required parameter {key}")
    if command in STOCHASTIC and values.get("seed") is None:
        raise ConfigError(f"{command} needs --seed")
    if command == "rigidity" and values["samples"] and values.get("seed") is None:
        raise ConfigError("rigidity with --samples needs --seed")
    return values


# ---------------------------------------------------------------- output


def _plain(v):
    """numpy scalars and arrays as built-in Python values."""
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _fmt(v) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


class Output:
    """Serialised writer for tables (CSV or JSON) to a file or stdout."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.written: list[str] = []

    def table(self, header: list[str], rows: list[list], suffix: str = "") -> None:
        if self.cfg["format"] == "json":
            text = json.dumps([dict(zip(header, r)) for r in rows], sort_keys=True, default=_plain) + "\n"
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
            buf.write(f"# seed={self.cfg.get('seed')}, version={__version__}\n")
            text = buf.getvalue()
        self._emit(text, suffix)

    def json(self, payload, suffix: str = "") -> None:
        self._emit(json.dumps(payload, sort_keys=True, indent=1, default=_plain) + "\n", suffix)

    def _emit(self, text: str, suffix: str) -> None:
        out = self.cfg.get("out")
        if out:
            path = Path(out)
            if suffix:
                path = path.with_name(path.stem + suffix + path.suffix)
            path.write_text(text)
            self.written.append(str(path))
        else:
            sys.stdout.write(text)


# ---------------------------------------------------------------- input files


def read_configurations(path: str) -> list[Configuration]:
    """Configurations from a JSON list of point lists, or from a long CSV (sample, point)."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"no such file: {path}")
    suffix = p.suffix.lower()
    if suffix == ".json":
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, list) or not all(isinstance(m, list) for m in data):
            raise ConfigError(f"{path}: expected a list of point lists")
        return [Configuration(tuple(float(x) for x in m)) for m in data]
    if suffix == ".csv":
        groups: dict[int, list[float]] = {}
        lines = [ln for ln in p.read_text().splitlines() if ln and not ln.startswith("#")]
        reader = csv.DictReader(lines)
        if reader.fieldnames is None or not {"sample", "point"} <= set(reader.fieldnames):
            raise ConfigError(f"{path}: CSV needs columns sample and point")
        for row in reader:
            groups.setdefault(int(row["sample"]), [])
            if row["point"] != "":
                groups[int(row["sample"])].append(float(row["point"]))
        return [Configuration(tuple(groups[s])) for s in sorted(groups)]
    raise ConfigError(f"{path}: unsupported format {suffix or '(none)'}")


def _pair_files(cfg: dict) -> tuple[list, list]:
    files = cfg["files"]
    if len(files) != 2:
        raise ConfigError("expected exactly two input files")
    a, b = files
    if Path(a).suffix.lower() != Path(b).suffix.lower():
        raise ConfigError(f"input formats differ: {Path(a).suffix} vs {Path(b).suffix}")
    return read_configurations(a), read_configurations(b)


def _ground(cfg: dict) -> Ground:
    if cfg["ground"] == "partial":
        if not cfg.get("radius") or cfg["radius"] <= 0:
            raise ConfigError("partial ground needs a positive --radius")
        return Ground("partial", cfg["radius"])
    return Ground("full")


# ---------------------------------------------------------------- commands


def cmd_sample(cfg: dict, out: Output) -> dict:
    g = RngStream(cfg["seed"], 0).generator()
    k, n, model = cfg["k"], cfg["n"], cfg["model"]
    if k < 1 or n < 1:
        raise ConfigError("k and n must be positive")
    rows = []
    if model in ("bulk", "edge"):
        states = sample_mu_k_batch(ModelSpec(Regime(model), k), g, n)
        for s, state in enumerate(states):
            rows.extend([s, float(x)] for x in sorted(state))
    else:
        r = cfg["window"]
        Window(r)
        for s in range(n):
            conf = sample_sine_window(k, r, g) if model == "sine" else sample_airy_window(k, (-r, r), g)
            rows.extend([s, float(x)] for x in conf.points)
            if not len(conf):
                rows.append([s, None])
    out.table(["sample", "point"], rows)
    return {"samples": n, "points": sum(r[1] is not None for r in rows)}


def cmd_dist(cfg: dict, out: Output) -> dict:
    A, B = _pair_files(cfg)
    ground = _ground(cfg)
    mat = distance_matrix(A, B, ground.kind, ground.radius, cfg["p"])
    out.table([""] + [f"b{j}" for j in range(len(B))], [[f"a{i}"] + [float(v) for v in row] for i, row in enumerate(mat)])
    finite = mat[np.isfinite(mat)]
    return {"rows": len(A), "cols": len(B), "max_finite": float(finite.max()) if finite.size else None}


def cmd_wasserstein(cfg: dict, out: Output) -> dict:
    A, B = _pair_files(cfg)
    if len(A) != len(B):
        raise ConfigError(f"laws have {len(A)} and {len(B)} members")
    plan = optimal_plan(A, B, cfg["p"], _ground(cfg))
    value = plan.cost if math.isfinite(plan.cost) else "inf"
    out.table(["member", "partner"], [[i, j] for i, j in enumerate(plan.assignment)])
    return {"value": value, "p": cfg["p"]}


def cmd_evolve(cfg: dict, out: Output) -> dict:
    k, n = cfg["k"], cfg["paths"]
    if k < 1 or n < 1 or cfg["t"] < 0 or cfg["dt"] <= 0:
        raise ConfigError("need k, paths >= 1, t >= 0 and dt > 0")
    model = ModelSpec(Regime(cfg["model"]), k)
    sde = SdeConfig(dt=cfg["dt"], t_end=cfg["t"], speed=Speed.HALF if cfg["half_speed"] else Speed.FULL)
    g = RngStream(cfg["seed"], 0).generator()
    x0 = sample_mu_k_batch(model, g, n)
    if not cfg["coupled"]:
        xt = evolve_batch(model, x0, cfg["t"], sde, g)
        out.table(["path"] + [f"x{i + 1}" for i in range(k)], [[p] + [float(v) for v in row] for p, row in enumerate(xt)])
        return {"paths": n, "k": k, "t": cfg["t"]}
    y0 = 1.0 + 1.5 * sample_mu_k_batch(model, g, n)
    _, _, trace = evolve_coupled_batch(model, x0, y0, cfg["t"], sde, g, record=True)
    steps = trace.shape[0] - 1
    h = cfg["t"] / steps if steps else 0.0
    every = max(1, cfg["record_every"])
    idx = list(range(0, steps + 1, every))
    if idx[-1] != steps:
        idx.append(steps)
    out.table(["time"] + [f"path{p}" for p in range(n)], [[i * h] + [float(v) for v in trace[i]] for i in idx])
    increments = np.diff(trace, axis=0)
    violations = int(np.count_nonzero(increments > 1e-6 * h))
    return {"paths": n, "k": k, "t": cfg["t"], "max_increment": float(increments.max()) if steps else 0.0, "violations": violations}


def cmd_fredholm(cfg: dict, out: Output) -> dict:
    spec = dpp.KernelSpec.parse(cfg["kernel"])
    r, t = cfg["radius"], cfg["t"]
    if r <= 0 or t < 0:
        raise ConfigError("need radius > 0 and t >= 0")
    op = dpp.discretize(spec, -r, r, cfg["nodes"])
    value = dpp.fredholm_det(op, t - 1.0)
    payload = {"value": value, "trace": op.trace, "bound": math.exp((t - 1.0) * op.trace), "nodes": cfg["nodes"]}
    out.json(payload)
    return payload


def cmd_jko(cfg: dict, out: Output) -> dict:
    g0 = GaussianLaw(cfg["start_mean"], cfg["start_var"])
    traj = jko.jko_trajectory(jko.quantile_of_gaussian(g0, cfg["grid"]), cfg["tau"], cfg["horizon"])
    rows, worst = [], 0.0
    for n, q in enumerate(traj):
        t = n * cfg["tau"]
        exact = jko.quantile_of_gaussian(ou_evolve(g0, t), cfg["grid"])
        err = jko.w2_q(q, exact)
        worst = max(worst, err)
        mean = q.mean()
        rows.append([t, mean, float(np.mean(q.values**2)) - mean**2, jko.entropy_q(q), err])
    out.table(["t", "mean", "variance", "entropy", "w2_to_exact"], rows)
    return {"steps": len(traj) - 1, "max_w2_error": worst}


def cmd_verify(cfg: dict, out: Output) -> dict:
    reports = harness.run_suite(cfg["suite"], cfg["seed"], cfg["quick"])
    out.json([r.to_dict() for r in reports])
    failed = [r.name for r in reports if not r.passed]
    summary = {"checks": len(reports), "failed": failed}
    if failed:
        raise CheckFailure(json.dumps(summary))
    return summary


def cmd_extension(cfg: dict, out: Output) -> dict:
    if not 1 <= cfg["k"] <= 4 or not 0 <= cfg["lmax"] <= 4 or cfg["pairs"] < 1:
        raise ConfigError("need 1 <= k <= 4, 0 <= lmax <= 4 and pairs >= 1")
    rows = lipschitz_ladder(cfg["k"], cfg["lmax"], cfg["pairs"], RngStream(cfg["seed"], 0).generator(), cfg["radius"])
    out.table(["function", "k", "level", "estimate", "bound", "pairs_used", "pass"],
              [[r.function, r.k, r.level, r.estimate, r.bound, r.pairs_used, r.ok] for r in rows])
    failed = [f"{r.function}@{r.level}" for r in rows if not r.ok]
    summary = {"rows": len(rows), "failed": failed}
    if failed:
        raise CheckFailure(json.dumps(summary))
    return summary


def cmd_rigidity(cfg: dict, out: Output) -> dict:
    g = RngStream(cfg["seed"], 0).generator() if cfg["samples"] else None
    try:
        rows = harness.shell_occupancy_stats(cfg["kernel"], cfg["kmax"], cfg["samples"], g)
    except AssertionError as exc:
        raise CheckFailure(str(exc)) from exc
    out.table(["k", "occupancy", "bound", "mc_frequency", "mc_error"], [[r.k, r.occupancy, r.bound, r.mc_frequency, r.mc_error] for r in rows])
    summary = {"shells": len(rows), "partial_sum": sum(r.occupancy for r in rows)}
    mc = [r for r in rows if r.mc_frequency is not None]
    off = [r.k for r in mc if abs(r.mc_frequency - r.occupancy) > 3 * r.mc_error + 1e-12]
    summary["mc_outside_3se"] = off
    if off:
        raise CheckFailure(json.dumps(summary))
    return summary


COMMANDS = {
    "sample": cmd_sample,
    "dist": cmd_dist,
    "wasserstein": cmd_wasserstein,
    "evolve": cmd_evolve,
    "fredholm": cmd_fredholm,
    "jko": cmd_jko,
    "verify": cmd_verify,
    "extension": cmd_extension,
    "rigidity": cmd_rigidity,
}

RUNTIME_ERRORS = (SubstepExhausted, NoConvergence)


def main(argv: list[str] | None = None) -> int:
    command = None
    summary: dict = {}
    try:
        ns = vars(build_parser().parse_args(argv))
        command = ns.pop("command")
        config_path = ns.pop("config", None)
        cfg = resolve(command, ns, config_path)
        out = Output(cfg)
        summary = COMMANDS[command](cfg, out)
        status, code = "ok", 0
        if out.written:
            summary["written"] = out.written
    except CheckFailure as exc:
        status, code, summary = "check_failed", exc.exit_code, {"message": str(exc)}
    except RUNTIME_ERRORS as exc:
        status, code, summary = "runtime_error", 1, {"message": str(exc)}
    except (ConfigError, DysonLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        status, code, summary = "config_error", 2, {"message": str(exc)}
    except Exception as exc:  # noqa: BLE001 - the summary line must still be printed
        print(f"error: {exc!r}", file=sys.stderr)
        status, code, summary = "internal_error", 1, {"message": repr(exc)}
    print(json.dumps({"command": command, "status": status, "exit": code, **summary}, sort_keys=True, default=_plain))
    return code


def run(argv: list[str] | None = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
