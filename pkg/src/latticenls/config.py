"""Run configuration: parsing, validation with key paths, and problem construction.

A config is a YAML (or JSON) mapping::

    command: solve            # solve | verify | sweep | truncate | compare
    graph:                    # kind: lattice | preset | custom
      kind: lattice
      dimension: 1
      sides: [16]
      mode: periodic_torus    # dirichlet_box (default) | periodic_torus
    potential:                # kind: constant | periodic | well
      kind: constant
      value: 1.0
    nonlinearity:
      exponents: [4]
      coefficients: [1.0]     # default: 1.0 for every exponent
    solver: {seed: 0, init: bump_at_vertex}
    output: {dir: results, name: run, trace: false}
    sweep:                    # sweep command only
      axes:
        - {parameter: "nonlinearity.exponents[0]", values: [3, 4, 6]}
      workers: 2
    truncate: {sizes: [3, 5, 7], workers: 1}
    compare: {workers: 2}
"""

from __future__ import annotations

import copy
import os
import dataclasses
import re
from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ConfigError
from .functional import Problem
from .graph import PRESETS, Graph, build_graph, build_lattice_box, build_preset
from .model import constant_potential, periodic_potential, power_nonlinearity, well_potential
from .solver import INIT_KINDS, SolverOptions

COMMANDS = ("solve", "verify", "sweep", "truncate", "compare")
_SECTIONS = {"command", "graph", "potential", "nonlinearity", "solver", "output", "sweep", "truncate", "compare"}
_SOLVER_KEYS = {f.name for f in dataclasses.fields(SolverOptions)}


@dataclass
class RunConfig:
    command: str
    graph: dict
    potential: dict
    nonlinearity: dict
    solver: dict
    output: dict
    sweep: dict | None = None
    truncate: dict | None = None
    compare: dict | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    def solver_options(self) -> SolverOptions:
        opts = dict(self.solver)
        if opts.get("init_field") is not None:
            opts["init_field"] = tuple(opts["init_field"])
        return SolverOptions(**opts)


def _num(value, key, positive=False, integer=False, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(key, f"must be > 0, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value!r}")
    return int(value) if integer else float(value)


def _list(value, key):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(key, f"expected a list, got {value!r}")
    return list(value)


def _mapping(value, key):
    if not isinstance(value, dict):
        raise ConfigError(key, f"expected a mapping, got {value!r}")
    return value


def _unknown(section: dict, allowed, prefix):
    for k in section:
        if k not in allowed:
            raise ConfigError(f"{prefix}.{k}", "unknown key")


def _graph(section) -> dict:
    section = _mapping(section, "graph")
    kind = section.get("kind", "lattice")
    if kind == "lattice":
        _unknown(section, {"kind", "dimension", "sides", "mode"}, "graph")
        sides = _list(section.get("sides"), "graph.sides")
        dim = _num(section.get("dimension", len(sides)), "graph.dimension", integer=True, minimum=1)
        if len(sides) != dim:
            raise ConfigError("graph.sides", f"expected {dim} entries, got {len(sides)}")
        mode = section.get("mode", "dirichlet_box")
        if mode not in ("dirichlet_box", "periodic_torus"):
            raise ConfigError("graph.mode", f"must be dirichlet_box or periodic_torus, got {mode!r}")
        least = 3 if mode == "periodic_torus" else 1
        sides = [_num(s, f"graph.sides[{i}]", integer=True, minimum=least) for i, s in enumerate(sides)]
        return {"kind": kind, "dimension": dim, "sides": sides, "mode": mode}
    if kind == "preset":
        _unknown(section, {"kind", "name", "size"}, "graph")
        name = section.get("name")
        if name not in PRESETS:
            raise ConfigError("graph.name", f"must be one of {', '.join(PRESETS)}, got {name!r}")
        return {"kind": kind, "name": name, "size": _num(section.get("size"), "graph.size", integer=True, minimum=3)}
    if kind == "custom":
        _unknown(section, {"kind", "vertex_count", "edges"}, "graph")
        n = _num(section.get("vertex_count"), "graph.vertex_count", integer=True, minimum=1)
        edges = []
        for i, e in enumerate(_list(section.get("edges", []), "graph.edges")):
            e = _list(e, f"graph.edges[{i}]")
            if len(e) != 2:
                raise ConfigError(f"graph.edges[{i}]", "an edge is a pair of vertex indices")
            a, b = (_num(v, f"graph.edges[{i}]", integer=True, minimum=0) for v in e)
            if a >= n or b >= n or a == b:
                raise ConfigError(f"graph.edges[{i}]", f"invalid edge ({a}, {b}) for {n} vertices")
            edges.append([a, b])
        return {"kind": kind, "vertex_count": n, "edges": edges}
    raise ConfigError("graph.kind", f"must be lattice, preset or custom, got {kind!r}")


def _potential(section) -> dict:
    section = _mapping(section, "potential")
    kind = section.get("kind", "constant")
    if kind == "constant":
        _unknown(section, {"kind", "value"}, "potential")
        return {"kind": kind, "value": _num(section.get("value", 1.0), "potential.value", positive=True)}
    if kind == "periodic":
        _unknown(section, {"kind", "cell", "period"}, "potential")
        cell = [_num(c, f"potential.cell[{i}]", positive=True) for i, c in enumerate(_list(section.get("cell"), "potential.cell"))]
        period = section.get("period")
        if isinstance(period, (list, tuple)):
            period = [_num(t, f"potential.period[{i}]", integer=True, minimum=1) for i, t in enumerate(period)]
        else:
            period = _num(period, "potential.period", integer=True, minimum=1)
        return {"kind": kind, "cell": cell, "period": period}
    if kind == "well":
        _unknown(section, {"kind", "vinf", "dips"}, "potential")
        vinf = _num(section.get("vinf"), "potential.vinf", positive=True)
        dips = {}
        for x, d in _mapping(section.get("dips", {}) or {}, "potential.dips").items():
            try:
                xi = int(x)
            except (TypeError, ValueError):
                raise ConfigError(f"potential.dips.{x}", "dip keys are vertex indices") from None
            depth = _num(d, f"potential.dips.{x}", minimum=0)
            if not vinf - depth > 0:
                raise ConfigError(f"potential.dips.{x}", f"depth {depth} leaves V <= 0 (vinf = {vinf})")
            dips[xi] = depth
        return {"kind": kind, "vinf": vinf, "dips": dips}
    raise ConfigError("potential.kind", f"must be constant, periodic or well, got {kind!r}")


def _nonlinearity(section) -> dict:
    section = _mapping(section, "nonlinearity")
    _unknown(section, {"exponents", "coefficients"}, "nonlinearity")
    exps = _list(section.get("exponents"), "nonlinearity.exponents")
    if not exps:
        raise ConfigError("nonlinearity.exponents", "at least one exponent is required")
    exps = [_num(q, f"nonlinearity.exponents[{i}]") for i, q in enumerate(exps)]
    for i, q in enumerate(exps):
        if not q > 2:
            raise ConfigError(f"nonlinearity.exponents[{i}]", f"must be > 2, got {q}")
    coeffs = _list(section.get("coefficients", [1.0] * len(exps)), "nonlinearity.coefficients")
    if len(coeffs) != len(exps):
        raise ConfigError("nonlinearity.coefficients", f"expected {len(exps)} entries, got {len(coeffs)}")
    coeffs = [_num(a, f"nonlinearity.coefficients[{i}]", positive=True) for i, a in enumerate(coeffs)]
    return {"exponents": exps, "coefficients": coeffs}


def _solver(section) -> dict:
    section = dict(_mapping(section or {}, "solver"))
    _unknown(section, _SOLVER_KEYS, "solver")
    if "init" in section and section["init"] not in INIT_KINDS:
        raise ConfigError("solver.init", f"must be one of {', '.join(INIT_KINDS)}, got {section['init']!r}")
    for key in ("max_iters", "seed"):
        if key in section:
            section[key] = _num(section[key], f"solver.{key}", integer=True, minimum=0)
    if section.get("init_vertex") is not None:
        section["init_vertex"] = _num(section["init_vertex"], "solver.init_vertex", integer=True, minimum=0)
    for key in ("tol_grad", "tol_point", "tol_nehari", "step", "armijo", "min_step", "noise_floor", "grow", "max_step"):
        if key in section:
            section[key] = _num(section[key], f"solver.{key}", positive=True)
    if "backtrack" in section:
        b = _num(section["backtrack"], "solver.backtrack", positive=True)
        if not b < 1:
            raise ConfigError("solver.backtrack", f"must lie in (0, 1), got {b}")
        section["backtrack"] = b
    try:
        opts = SolverOptions(**{k: tuple(v) if k == "init_field" and v is not None else v for k, v in section.items()})
    except (ValueError, TypeError) as exc:
        raise ConfigError("solver", str(exc)) from None
    out = dataclasses.asdict(opts)
    if out["init_field"] is not None:
        out["init_field"] = list(out["init_field"])
    return out


def _workers(section, key):
    return _num(section.get("workers", 1), f"{key}.workers", integer=True, minimum=1)


_PATH_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)|\[(\d+)\]")


def parse_path(path: str) -> list:
    """``"nonlinearity.exponents[0]"`` -> ``["nonlinearity", "exponents", 0]``."""
    tokens = []
    for part in path.split("."):
        matches = list(_PATH_TOKEN.finditer(part))
        if not matches or matches[0].group(1) is None or "".join(m.group(0) for m in matches) != part:
            raise ConfigError(path, "malformed parameter path")
        tokens.extend(m.group(1) if m.group(1) is not None else int(m.group(2)) for m in matches)
    return tokens


def set_path(cfg: dict, path: str, value):
    tokens = parse_path(path)
    node = cfg
    for tok in tokens[:-1]:
        try:
            node = node[tok]
        except (KeyError, IndexError, TypeError):
            raise ConfigError(path, "path does not exist in the config") from None
    try:
        if isinstance(tokens[-1], int):
            node[tokens[-1]]
        node[tokens[-1]] = value
    except (IndexError, TypeError):
        raise ConfigError(path, "path does not exist in the config") from None


def _sweep(section) -> dict:
    section = _mapping(section, "sweep")
    _unknown(section, {"axes", "parameter", "values", "workers"}, "sweep")
    if "axes" in section:
        axes = _list(section["axes"], "sweep.axes")
    else:
        axes = [{"parameter": section.get("parameter"), "values": section.get("values")}]
    if not axes:
        raise ConfigError("sweep.axes", "at least one axis is required")
    out = []
    for i, ax in enumerate(axes):
        ax = _mapping(ax, f"sweep.axes[{i}]")
        param = ax.get("parameter")
        if not isinstance(param, str):
            raise ConfigError(f"sweep.axes[{i}].parameter", "expected a dotted parameter path")
        parse_path(param)
        values = _list(ax.get("values"), f"sweep.axes[{i}].values")
        if not values:
            raise ConfigError(f"sweep.axes[{i}].values", "must be non-empty")
        out.append({"parameter": param, "values": values})
    return {"axes": out, "workers": _workers(section, "sweep")}


def validate(raw) -> RunConfig:
    raw = _mapping(raw, "<root>")
    for k in raw:
        if k not in _SECTIONS:
            raise ConfigError(k, "unknown top-level key")
    command = raw.get("command", "solve")
    if command not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}, got {command!r}")
    for key in ("graph", "nonlinearity"):
        if key not in raw:
            raise ConfigError(key, "missing required section")
    cfg = RunConfig(
        command=command,
        graph=_graph(raw["graph"]),
        potential=_potential(raw.get("potential", {"kind": "constant", "value": 1.0})),
        nonlinearity=_nonlinearity(raw["nonlinearity"]),
        solver=_solver(raw.get("solver")),
        output=_output(raw.get("output")),
    )
    if command == "sweep":
        if "sweep" not in raw:
            raise ConfigError("sweep", "missing required section for the sweep command")
        cfg.sweep = _sweep(raw["sweep"])
    if command == "truncate":
        section = _mapping(raw.get("truncate"), "truncate")
        _unknown(section, {"sizes", "workers"}, "truncate")
        if cfg.graph["kind"] != "lattice":
            raise ConfigError("graph.kind", "truncate needs a lattice graph")
        if cfg.potential["kind"] != "constant":
            raise ConfigError("potential.kind", "truncate needs a constant potential")
        sizes = [_num(s, f"truncate.sizes[{i}]", integer=True, minimum=1) for i, s in enumerate(_list(section.get("sizes"), "truncate.sizes"))]
        if not sizes:
            raise ConfigError("truncate.sizes", "must be non-empty")
        for i in range(1, len(sizes)):
            if sizes[i] <= sizes[i - 1]:
                raise ConfigError(f"truncate.sizes[{i}]", "sizes must be strictly increasing")
        cfg.truncate = {"sizes": sizes, "workers": _workers(section, "truncate")}
    if command == "compare":
        section = _mapping(raw.get("compare", {}) or {}, "compare")
        _unknown(section, {"workers"}, "compare")
        if cfg.potential["kind"] not in ("well", "constant"):
            raise ConfigError("potential.kind", "compare needs a well (or constant) potential")
        cfg.compare = {"workers": _workers(section, "compare")}
    # build once so graph-dependent errors (e.g. period vs sides) surface as config errors
    build_problem(cfg)
    return cfg


def _output(section) -> dict:
    section = _mapping(section or {}, "output")
    _unknown(section, {"dir", "name", "trace"}, "output")
    name = section.get("name", "run")
    if not isinstance(name, str) or not name or "/" in name:
        raise ConfigError("output.name", f"expected a plain file stem, got {name!r}")
    trace = section.get("trace", False)
    if not isinstance(trace, bool):
        raise ConfigError("output.trace", "expected true or false")
    return {"dir": str(section.get("dir", ".")), "name": name, "trace": trace}


def load(path, command=None) -> RunConfig:
    """Read and validate a config file; ``command`` overrides the file's own."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML/JSON: {exc}") from None
    if command is not None:
        raw = dict(_mapping(raw, "<root>"), command=command)
    cfg = validate(raw)
    # output.dir is relative to the config file, not the working directory
    cfg.output["dir"] = os.path.normpath(path.parent / cfg.output["dir"]) if "dir" in (raw.get("output") or {}) else str(path.parent)
    return cfg


def build_graph_from(section: dict) -> Graph:
    if section["kind"] == "lattice":
        return build_lattice_box(section["dimension"], section["sides"], section["mode"])
    if section["kind"] == "preset":
        return build_preset(section["name"], section["size"])
    return build_graph(section["vertex_count"], section["edges"])


def build_problem(cfg: RunConfig | dict) -> Problem:
    from .errors import GraphError, ModelError

    d = cfg.to_dict() if isinstance(cfg, RunConfig) else cfg
    try:
        g = build_graph_from(d["graph"])
    except GraphError as exc:
        raise ConfigError("graph", str(exc)) from None
    pot = d["potential"]
    try:
        if pot["kind"] == "constant":
            V = constant_potential(g, pot["value"])
        elif pot["kind"] == "periodic":
            V = periodic_potential(g, pot["cell"], pot["period"])
        else:
            V = well_potential(g, pot["vinf"], pot["dips"])
    except ModelError as exc:
        raise ConfigError("potential", str(exc)) from None
    nl = d["nonlinearity"]
    try:
        f = power_nonlinearity(list(nl["coefficients"]), nl["exponents"])
    except ModelError as exc:
        raise ConfigError("nonlinearity", str(exc)) from None
    return Problem(g, V, f)


def sweep_entries(cfg: RunConfig):
    """``(index, {parameter: value}, RunConfig)`` for the Cartesian product of the sweep axes."""
    from itertools import product

    axes = cfg.sweep["axes"]
    base = cfg.to_dict()
    base.pop("sweep", None)
    base["command"] = "solve"
    for idx, combo in enumerate(product(*(ax["values"] for ax in axes))):
        entry = copy.deepcopy(base)
        for ax, val in zip(axes, combo):
            set_path(entry, ax["parameter"], val)
        try:
            sub = validate(entry)
        except ConfigError as exc:
            raise ConfigError(f"sweep[{idx}].{exc.key}", str(exc).split(": ", 1)[-1]) from None
        sub.output = dict(cfg.output)
        yield idx, {ax["parameter"]: v for ax, v in zip(axes, combo)}, sub
