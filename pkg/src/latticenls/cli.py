"""Batch command line: ``latticenls <command> ...``.

Exit status: 0 on success, 1 on configuration or input errors, 2 when a solve
does not converge or a verification check fails.  Set ``LATTICENLS_LOG`` to a
logging level name (``INFO``, ``DEBUG``) for progress output.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import records
from .config import RunConfig, build_problem, load, sweep_entries, validate
from .errors import ConfigError, LatticeError
from .functional import phi_gradient, residuals
from .solver import GroundStateResult, compare_limit_energy, minimize, truncation_study, verify

log = logging.getLogger("latticenls")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
ROUNDTRIP_TOL = 1e-12


def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.output["dir"])
    d.mkdir(parents=True, exist_ok=True)
    return d


def _result_items(cfg: RunConfig, r: GroundStateResult, solution_csv, trace_csv=None, extra=()):
    res = r.residuals
    return [
        ("command", cfg.command),
        ("converged", r.converged),
        ("message", r.message),
        ("energy", r.energy),
        ("iterations", r.iterations),
        ("wall_time", r.wall_time),
        ("tangent_grad", r.tangent_grad),
        ("residual.pointwise_sup", res.pointwise_sup),
        ("residual.nehari", res.nehari),
        ("residual.grad_norm", res.grad_norm),
        ("u_sup", float(np.max(np.abs(r.u_star)))),
        ("vertex_count", r.u_star.size),
        *extra,
        ("seed", cfg.solver["seed"]),
        ("solution_csv", solution_csv),
        ("trace_csv", trace_csv),
        ("config", cfg.to_dict()),
    ]


def write_solve_outputs(cfg: RunConfig, r: GroundStateResult, stem: str, extra=()) -> Path:
    out = _out_dir(cfg)
    g = build_problem(cfg).graph
    sol = f"{stem}.solution.csv"
    records.write_field(out / sol, g.coordinates, r.u_star)
    trace = None
    if cfg.output["trace"]:
        trace = f"{stem}.trace.csv"
        records.write_table(out / trace, ["iter", "s_w", "psi", "tangent_grad_sup"], r.trace_rows())
    path = out / f"{stem}.result.txt"
    records.write_record(path, _result_items(cfg, r, sol, trace, extra))
    return path


def cmd_solve(cfg: RunConfig) -> int:
    p = build_problem(cfg)
    r = minimize(p, cfg.solver_options())
    path = write_solve_outputs(cfg, r, cfg.output["name"])
    print(f"energy = {records.fmt(r.energy)}  converged = {r.converged}  iterations = {r.iterations}")
    print(f"wrote {path}")
    return EXIT_OK if r.converged else EXIT_NUMERIC


def load_result(result_path):
    """``(record, RunConfig, Problem, u)`` from a result file and its solution CSV."""
    result_path = Path(result_path)
    try:
        rec = records.read_record(result_path)
    except OSError as exc:
        raise ConfigError("<result>", f"cannot read {result_path}: {exc.strerror}") from None
    except ValueError as exc:
        raise ConfigError("<result>", str(exc)) from None
    cfg = validate(rec["config"])
    cfg.output["dir"] = str(result_path.parent)
    p = build_problem(cfg)
    sol = result_path.parent / rec["solution_csv"]
    if not sol.exists():
        raise ConfigError("solution_csv", f"missing solution file {sol}")
    u = records.read_field(sol)
    if u.size != p.graph.vertex_count:
        raise ConfigError("solution_csv", f"{u.size} values for {p.graph.vertex_count} vertices")
    return rec, cfg, p, u


def cmd_verify(result_path, directions=100) -> int:
    rec, cfg, p, u = load_result(result_path)
    r = GroundStateResult(
        u_star=u,
        energy=rec["energy"],
        residuals=residuals(p, u),
        iterations=rec["iterations"],
        converged=rec["converged"],
        wall_time=0.0,
        tangent_grad=rec["tangent_grad"],
        options=cfg.solver_options(),
    )
    rep = verify(p, r, directions=directions, seed=cfg.solver["seed"])
    drift = max(
        abs(r.residuals.pointwise_sup - rec["residual.pointwise_sup"]),
        abs(r.residuals.grad_norm - rec["residual.grad_norm"]),
        abs((r.residuals.nehari or 0.0) - (rec["residual.nehari"] or 0.0)),
    )
    roundtrip_ok = drift <= ROUNDTRIP_TOL
    items = [
        ("command", "verify"),
        ("result", Path(result_path).name),
        ("pointwise_ok", rep.pointwise_ok),
        ("pointwise_sup", rep.pointwise_sup),
        ("pointwise_tol", rep.pointwise_tol),
        ("nehari_ok", rep.nehari_ok),
        ("nehari", rep.nehari),
        ("nehari_tol", rep.nehari_tol),
        ("infmax_ok", rep.infmax_ok),
        ("min_ray_max", rep.min_ray_max),
        ("energy", rep.energy),
        ("directions", directions),
        ("roundtrip_ok", roundtrip_ok),
        ("roundtrip_drift", drift),
        ("seed", cfg.solver["seed"]),
        ("config", cfg.to_dict()),
    ]
    stem = Path(result_path).name.removesuffix(".result.txt")
    out = Path(result_path).parent / f"{stem}.verify.txt"
    records.write_record(out, items)
    for key in ("pointwise_ok", "nehari_ok", "infmax_ok", "roundtrip_ok"):
        print(f"{key} = {records.fmt(dict(items)[key])}")
    print(f"wrote {out}")
    return EXIT_OK if rep.ok and roundtrip_ok else EXIT_NUMERIC


def _solve_entry(entry):
    idx, params, sub = entry
    r = minimize(build_problem(sub), sub.solver_options())
    return idx, params, sub, r


def cmd_sweep(cfg: RunConfig) -> int:
    entries = list(sweep_entries(cfg))
    workers = cfg.sweep["workers"]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_solve_entry, entries))
    else:
        done = [_solve_entry(e) for e in entries]
    name = cfg.output["name"]
    params = [ax["parameter"] for ax in cfg.sweep["axes"]]
    rows = []
    for idx, values, sub, r in done:
        path = write_solve_outputs(sub, r, f"{name}.sweep{idx:03d}")
        rows.append([idx, *values.values(), r.energy, r.converged, r.iterations, r.residuals.pointwise_sup, path.name])
    table = _out_dir(cfg) / f"{name}.sweep.csv"
    records.write_table(table, ["index", *params, "energy", "converged", "iterations", "pointwise_sup", "result_file"], rows)
    print(f"wrote {table} ({len(rows)} rows)")
    return EXIT_OK if all(r.converged for *_, r in done) else EXIT_NUMERIC


def cmd_truncate(cfg: RunConfig) -> int:
    p = build_problem(cfg)
    rows = truncation_study(
        cfg.graph["dimension"],
        cfg.truncate["sizes"],
        cfg.potential["value"],
        p.nonlinearity,
        cfg.solver_options(),
        workers=cfg.truncate["workers"],
    )
    out = _out_dir(cfg)
    table = out / f"{cfg.output['name']}.truncation.csv"
    records.write_table(
        table,
        ["size", "vertex_count", "energy", "difference", "converged", "iterations"],
        [[r.size, r.vertex_count, r.energy, r.difference, r.converged, r.iterations] for r in rows],
    )
    monotone = all(r.difference is None or r.difference <= 0 for r in rows)
    records.write_record(
        out / f"{cfg.output['name']}.result.txt",
        [
            ("command", "truncate"),
            ("sizes", [r.size for r in rows]),
            ("energies", [r.energy for r in rows]),
            ("non_increasing", monotone),
            ("converged", all(r.converged for r in rows)),
            ("table_csv", table.name),
            ("seed", cfg.solver["seed"]),
            ("config", cfg.to_dict()),
        ],
    )
    for r in rows:
        print(f"L = {r.size:4d}  c_L = {records.fmt(r.energy)}  converged = {r.converged}")
    print(f"wrote {table}")
    return EXIT_OK if all(r.converged for r in rows) else EXIT_NUMERIC


def cmd_compare(cfg: RunConfig) -> int:
    p = build_problem(cfg)
    cmp = compare_limit_energy(p, cfg.solver_options(), workers=cfg.compare["workers"])
    out = _out_dir(cfg)
    name = cfg.output["name"]
    g = p.graph
    records.write_field(out / f"{name}.well.solution.csv", g.coordinates, cmp.well.u_star)
    records.write_field(out / f"{name}.limit.solution.csv", g.coordinates, cmp.limit.u_star)
    records.write_record(
        out / f"{name}.compare.txt",
        [
            ("command", "compare"),
            ("c", cmp.c),
            ("c_inf", cmp.c_inf),
            ("gap", cmp.gap),
            ("converged", cmp.well.converged and cmp.limit.converged),
            ("well.iterations", cmp.well.iterations),
            ("limit.iterations", cmp.limit.iterations),
            ("well.solution_csv", f"{name}.well.solution.csv"),
            ("limit.solution_csv", f"{name}.limit.solution.csv"),
            ("seed", cfg.solver["seed"]),
            ("config", cfg.to_dict()),
        ],
    )
    print(f"c = {records.fmt(cmp.c)}  c_inf = {records.fmt(cmp.c_inf)}  gap = {records.fmt(cmp.gap)}")
    ok = cmp.well.converged and cmp.limit.converged
    return EXIT_OK if ok else EXIT_NUMERIC


def export_plotdata(result_path, out_path) -> int:
    """Tidy CSV, one row per vertex: coordinates, u, V, pointwise residual."""
    _, _, p, u = load_result(result_path)
    coords = p.graph.coordinates
    resid = np.abs(phi_gradient(p, u))
    records.write_table(
        out_path,
        [f"x{i}" for i in range(coords.shape[1])] + ["u", "V", "residual"],
        [[*(int(c) for c in coords[x]), u[x], p.V[x], resid[x]] for x in range(u.size)],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="latticenls", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("solve", "sweep", "truncate", "compare"):
        sp = sub.add_parser(name, help=f"run the {name} command from a config file")
        sp.add_argument("config")
    sp = sub.add_parser("verify", help="re-check a stored result")
    sp.add_argument("result")
    sp.add_argument("--directions", type=int, default=100)
    sp = sub.add_parser("export-plotdata", help="per-vertex CSV for plotting")
    sp.add_argument("result")
    sp.add_argument("out")
    return ap


def main(argv=None) -> int:
    level = os.environ.get("LATTICENLS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.result, args.directions)
        if args.command == "export-plotdata":
            return export_plotdata(args.result, args.out)
        cfg = load(args.config, command=args.command)
        return {"solve": cmd_solve, "sweep": cmd_sweep, "truncate": cmd_truncate, "compare": cmd_compare}[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
