"""Command-line front end: ``charur report|sweep|search|validate``.

Exit codes: 0 success, 1 an uncertainty relation was violated (a bug),
2 configuration error, 3 truncation did not converge.

A JSON config file (``--config``) supplies defaults; flags given on the
command line override it. Unknown config keys are rejected. When
``--output`` is omitted and ``CHARUR_OUTPUT_DIR`` is set, artifacts are
written there; otherwise to stdout.

Sweep CSV columns, in order: one column per swept parameter, ``dim``,
``tail_mass``, then ``lhs_r, rhs_r, gap_r, saturated_r`` for each order r,
then ``mean_<label>`` per observable, then ``error``.
"""

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .algebra import RepSpec, build_observables
from .moments import moment_pair
from .mussearch import SearchSpec, TheoremViolation, minimize_gap, sweep
from .states import FAMILIES, TruncationError, make_state
from .truncation import MAX_DIM, START_DIM, NonConvergenceError, converge
from .urengine import characteristic_ur, trace_ur

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_TRUNCATION = 0, 1, 2, 3
STATE_PARAMS = ("zeta", "tau", "z", "u", "v", "w", "r", "alpha", "n", "m", "nbar")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    rep: dict = field(default_factory=dict)
    state: dict = field(default_factory=dict)
    orders: list | None = None
    trace_orders: list = field(default_factory=list)
    tol: float = 1e-8
    truncation: object = "auto"
    output: dict = field(default_factory=lambda: {"format": None, "path": None})
    seed: int = 0
    search: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    suite: str = "all"

    def validate(self):
        if self.command not in ("report", "sweep", "search", "validate"):
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command == "validate":
            return self
        try:
            rep = RepSpec.from_dict({**self.rep, "dim": None})
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad representation: {exc}") from exc
        if self.truncation != "auto":
            try:
                dim = int(self.truncation)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"truncation must be 'auto' or an int, got {self.truncation!r}") from exc
            if rep.kind != "su2" and dim < 4:
                raise ConfigError("truncation dim must be >= 4")
        if self.command in ("report", "sweep"):
            family = self.state.get("family")
            if family not in FAMILIES:
                raise ConfigError(f"unknown state family {family!r}")
        if self.output.get("format") not in (None, "json", "csv"):
            raise ConfigError(f"unknown output format {self.output.get('format')!r}")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        return self

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _number(text):
    """Parse a real or complex literal such as ``0.5`` or ``1+0.5j``."""
    value = complex(str(text).replace(" ", ""))
    return value.real if value.imag == 0 else value


def _int_list(text):
    return [int(t) for t in str(text).split(",") if t.strip()]


def _grid(text):
    """``start:stop:step`` (stop inclusive) or a comma list."""
    if ":" in text:
        start, stop, step = (float(t) for t in text.split(":"))
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [_number(t) for t in text.split(",")]


def _bounds(text):
    out = {}
    for item in text.split(","):
        name, _, rng = item.partition("=")
        lo, hi = (float(t) for t in rng.split(":"))
        out[name.strip()] = (lo, hi)
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def build_parser():
    parser = argparse.ArgumentParser(
        prog="charur", description="Characteristic uncertainty relations toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--rep", choices=["su2", "su11", "fock"])
        p.add_argument("--j", type=float, help="spin for su2")
        p.add_argument("--k", type=float, help="Bargmann index for su11")
        p.add_argument("--modes", type=int, help="fock mode count (1 or 2)")
        p.add_argument("--dim", help="truncation dim (per mode for fock) or 'auto'")
        p.add_argument("--state", help=f"state family: {', '.join(FAMILIES)}")
        for name in STATE_PARAMS:
            p.add_argument(f"--{name}", help=f"state parameter {name}")
        p.add_argument("--parity", choices=["even", "odd"])
        p.add_argument("--orders", help="comma list of orders r")
        p.add_argument("--tol", type=float)
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--output", help="output path ('-' for stdout)")
        p.add_argument("--seed", type=int)

    rep = sub.add_parser("report", help="evaluate relations for one state")
    common(rep)
    rep.add_argument("--trace-orders", help="comma list of k for the trace relation")
    sw = sub.add_parser("sweep", help="tabulate relations over a parameter grid")
    common(sw)
    sw.add_argument("--param", help="swept parameter name")
    sw.add_argument("--grid", help="start:stop:step or comma list")
    se = sub.add_parser("search", help="minimize a characteristic gap")
    common(se)
    se.add_argument("--order", type=int)
    se.add_argument("--family", help="'pure' or a state family")
    se.add_argument("--bounds", help="name=lo:hi,... for family search")
    se.add_argument("--restarts", type=int)
    se.add_argument("--max-evals", type=int)
    se.add_argument("--simplex-scale", type=float)
    va = sub.add_parser("validate", help="run the property suites")
    va.add_argument("--config")
    va.add_argument("--suite", default=None)
    va.add_argument("--draws", type=int, help="override randomized draw counts")
    va.add_argument("--output")
    va.add_argument("--format", choices=["json"])
    return parser


def config_from_args(args):
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    data["command"] = args.command
    if args.command == "validate":
        if args.suite:
            data["suite"] = args.suite
        if args.output:
            data["output"] = {"format": "json", "path": args.output}
        return RunConfig.from_dict(data).validate()

    rep = dict(data.get("rep", {}))
    if args.rep:
        rep["kind"] = args.rep
    if args.j is not None:
        rep["weight"] = args.j
    if args.k is not None:
        rep["weight"] = args.k
    if args.modes is not None:
        rep["modes"] = args.modes
    if "dim" in rep:
        data.setdefault("truncation", rep.pop("dim") or "auto")
    data["rep"] = rep
    if args.dim is not None:
        data["truncation"] = "auto" if args.dim == "auto" else args.dim
    state = dict(data.get("state", {}))
    params = dict(state.get("params", {}))
    if args.state:
        state["family"] = args.state
    for name in STATE_PARAMS:
        val = getattr(args, name)
        if val is not None:
            params[name] = _number(val)
    if args.parity:
        state["family"] = f"{args.parity}_cs"
    if params:
        state["params"] = params
    data["state"] = state
    if args.orders:
        data["orders"] = _int_list(args.orders)
    if getattr(args, "trace_orders", None):
        data["trace_orders"] = _int_list(args.trace_orders)
    if args.tol is not None:
        data["tol"] = args.tol
    if args.seed is not None:
        data["seed"] = args.seed
    output = dict(data.get("output", {"format": None, "path": None}))
    if args.format:
        output["format"] = args.format
    if args.output:
        output["path"] = args.output
    data["output"] = output
    if args.command == "sweep":
        sw = dict(data.get("sweep", {}))
        if args.param:
            sw["param"] = args.param
        if args.grid:
            sw["values"] = _grid(args.grid)
        data["sweep"] = sw
    if args.command == "search":
        se = dict(data.get("search", {}))
        for key, attr in (("order", "order"), ("family", "family"), ("restarts", "restarts"),
                          ("max_evals", "max_evals"), ("simplex_scale", "simplex_scale")):
            if getattr(args, attr) is not None:
                se[key] = getattr(args, attr)
        if args.bounds:
            se["bounds"] = _bounds(args.bounds)
        data["search"] = se
    try:
        return RunConfig.from_dict(data).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _rep(config, dim):
    base = RepSpec.from_dict({**config.rep, "dim": None})
    if base.kind == "su2":
        return base
    return RepSpec(base.kind, base.weight, dim, base.modes)


def _evaluate_report(config, dim):
    rep = _rep(config, dim)
    obs = build_observables(rep)
    state = make_state(config.state["family"], config.state.get("params"), rep)
    report = characteristic_ur(obs, state, config.tol, config.orders)
    mp = moment_pair(obs, state)
    scalars = [o.lhs for o in report.orders] + [o.rhs for o in report.orders]
    scalars += mp.means.tolist() + mp.sigma.ravel().tolist()
    trace = None
    if config.trace_orders:
        trace = trace_ur(obs, state, config.trace_orders)
        scalars += [t.lhs for t in trace.orders] + [t.rhs for t in trace.orders]
    return (obs, state, report, mp, trace), scalars


def _dim_cap(config):
    modes = config.rep.get("modes", 1)
    return MAX_DIM if modes == 1 else int(np.sqrt(MAX_DIM))


def _run_with_truncation(config, evaluate):
    if config.rep.get("kind") == "su2":
        return evaluate(config, None)[0], None
    if config.truncation == "auto":
        result, dim = converge(lambda d: evaluate(config, d), START_DIM, _dim_cap(config))
        return result, dim
    dim = int(config.truncation)
    return evaluate(config, dim)[0], dim


def cmd_report(config):
    (obs, state, report, mp, trace), dim = _run_with_truncation(config, _evaluate_report)
    payload = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "report",
        "rep": _rep(config, dim).to_dict(),
        "state": {
            "family": config.state["family"],
            "params": config.state.get("params", {}),
            "dim": state.dim,
            "tailMass": state.tail_mass,
        },
        "observables": list(obs.labels),
        "characteristic": report.to_dict(),
        "moments": mp.to_dict(),
    }
    if trace is not None:
        payload["trace"] = trace.to_dict()
    violated = report.violated or (trace is not None and not all(t.holds for t in trace.orders))
    return payload, EXIT_VIOLATION if violated else EXIT_OK


SWEEP_FIXED = ("dim", "tail_mass")


def sweep_rows_to_csv(rows, param_names, orders, labels):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(param_names) + list(SWEEP_FIXED)
    for r in orders:
        header += [f"lhs_{r}", f"rhs_{r}", f"gap_{r}", f"saturated_{r}"]
    header += [f"mean_{lab}" for lab in labels] + ["error"]
    writer.writerow(header)

    def fmt(x):
        if isinstance(x, bool) or x is None:
            return "" if x is None else str(x).lower()
        if isinstance(x, complex):
            return f"{x.real:.17g}{x.imag:+.17g}j"
        if isinstance(x, float):
            return f"{x:.17g}"
        return str(x)

    for row in rows:
        line = [fmt(row["params"].get(p)) for p in param_names]
        line += [fmt(row.get("dim")), fmt(row.get("tail_mass"))]
        for r in orders:
            o = row.get("orders", {}).get(r)
            line += [fmt(o.lhs), fmt(o.rhs), fmt(o.gap), fmt(o.saturated)] if o else [""] * 4
        means = row.get("means", {})
        line += [fmt(means.get(lab)) for lab in labels]
        line.append(row.get("error") or "")
        writer.writerow(line)
    return buf.getvalue()


def cmd_sweep(config):
    sw = config.sweep
    if "param" not in sw or "values" not in sw:
        raise ConfigError("sweep needs --param and --grid")
    family = config.state["family"]
    base = dict(config.state.get("params", {}))
    grid = [{**base, sw["param"]: v} for v in sw["values"]]
    rows = []
    labels = None
    n = None
    for point in grid:
        point_config = RunConfig(**{**config.__dict__, "state": {"family": family, "params": point}})

        def evaluate(cfg, dim):
            rep = _rep(cfg, dim)
            obs = build_observables(rep)
            row = sweep(family, [point], obs, rep, cfg.orders, cfg.tol)[0]
            if row["error"] is not None and "tail mass" in row["error"]:
                raise TruncationError(row["error"])
            scalars = []
            if row["error"] is None:
                scalars = [o.lhs for o in row["orders"].values()] + list(row["means"].values())
            return (row, obs), scalars

        try:
            (row, obs), _ = _run_with_truncation(point_config, evaluate)
            labels = labels or list(obs.labels)
            n = n or obs.n
        except (NonConvergenceError, TruncationError) as exc:
            row = {"params": point, "error": str(exc)}
        rows.append(row)
    if labels is None:
        raise NonConvergenceError("no grid point converged")
    orders = config.orders or list(range(1, n + 1))
    violated = any(
        o.gap < -1e-10 * max(1.0, abs(o.lhs))
        for row in rows
        for o in row.get("orders", {}).values()
    )
    text = sweep_rows_to_csv(rows, [sw["param"]], orders, labels)
    return text, EXIT_VIOLATION if violated else EXIT_OK


def cmd_search(config):
    se = config.search
    family = se.get("family", "pure")
    dim = None if config.truncation == "auto" else int(config.truncation)
    if dim is None and config.rep.get("kind") != "su2":
        dim = 20 if family == "pure" else 256
    rep = _rep(config, dim)
    obs = build_observables(rep)
    order = se.get("order", 2)
    spec = SearchSpec(
        obs,
        order,
        family,
        {k: tuple(v) for k, v in se.get("bounds", {}).items()},
        rep,
        restarts=se.get("restarts", 8),
        max_evals=se.get("max_evals", 20000),
        simplex_scale=se.get("simplex_scale", 0.5),
        seed=config.seed,
        tol=config.tol if config.tol != 1e-8 else 1e-6,
    )
    try:
        result = minimize_gap(spec)
    except TheoremViolation as exc:
        return {"schemaVersion": SCHEMA_VERSION, "command": "search", "error": str(exc)}, EXIT_VIOLATION
    payload = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "search",
        "rep": rep.to_dict(),
        "order": order,
        "family": family,
        "seed": config.seed,
        "result": result.to_dict(),
    }
    return payload, EXIT_OK


def cmd_validate(config, draws=None, stream=None):
    from .validation import run_suites

    stream = stream or sys.stdout
    checks = run_suites(config.suite, draws=draws)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}", file=stream)
    payload = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "validate",
        "suite": config.suite,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    }
    return payload, EXIT_OK if all(c.passed for c in checks) else EXIT_VIOLATION


def _write(payload, config, default_format):
    fmt = config.output.get("format") or default_format
    path = config.output.get("path")
    if path is None and os.environ.get("CHARUR_OUTPUT_DIR"):
        path = os.path.join(os.environ["CHARUR_OUTPUT_DIR"], f"{config.command}.{fmt}")
    if isinstance(payload, str):
        text = payload
    else:
        text = json.dumps(_jsonable(payload), indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if config.command == "report":
            payload, code = cmd_report(config)
            _write(payload, config, "json")
        elif config.command == "sweep":
            payload, code = cmd_sweep(config)
            _write(payload, config, "csv")
        elif config.command == "search":
            payload, code = cmd_search(config)
            _write(payload, config, "json")
        else:
            payload, code = cmd_validate(config, args.draws)
            if config.output.get("path") not in (None, "-"):
                _write(payload, config, "json")
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergenceError, TruncationError) as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
