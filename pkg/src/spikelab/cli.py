"""Command-line runner: ``spikelab <subcommand> [options]``.

Beside its CSV artifacts every run writes the resolved configuration,
headed by the version string, plus a ``key=value`` summary that is also
printed.  Exit status: 0 success, 1 numerical failure, 2 config error.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import functools
import logging
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .config import build_problem, dump_config, ladder_of, load_config
from .discretization import assemble, build_grid
from .errors import ConfigError, ResolutionWarning, SpikeLabError
from .gamma import find_critical_points, gamma, gamma_on_lattice
from .ground_state import profile_moments, solve_ground_state
from .reduction import (ansatz_residual_norm, coercivity_estimate, loglog_slope,
                        reduced_energy, solve_correction)
from .solver import SolveParams, continuation

log = logging.getLogger("spikelab")

REDUCE_COLUMNS = ["eps", "A_eps", "c0_gamma", "gap", "grad_ratio", "ansatz_residual",
                  "w_norm", "coercivity", "status"]

# declared thresholds for the pass/fail lines in summaries
SLOPE_MIN = 0.9
GAP_SLOPE_MIN = 1.5
RATIO_TOL = 0.1
TRACK_MAX_SPACINGS = 2.0


def _num(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows, comment=None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([_num(v) for v in row])


def _vector(key, text):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise ConfigError(key, f"expected comma-separated numbers, got {text!r}") from None


@functools.lru_cache(maxsize=8)
def _ground_state(N, p, tol):
    base = solve_ground_state(N, p, tol=tol)
    return base, profile_moments(base)


def _setup(cfg):
    data = build_problem(cfg)
    data.validate()
    num = cfg["numerics"]
    base, mom = _ground_state(data.N, data.p, num["ground_state_tol"])
    return data, base, mom


def _grid(cfg, data):
    num = cfg["numerics"]
    try:
        return build_grid(data.domain, num["resolution"], num.get("subsample"))
    except ValueError as exc:
        raise ConfigError("numerics.resolution", str(exc)) from None


class Run:
    """Output locations for one invocation: a file stem or a directory."""

    def __init__(self, out, is_dir, cfg, name):
        self.is_dir = is_dir
        if is_dir:
            os.makedirs(out, exist_ok=True)
            self.dir, self.stem = out, os.path.join(out, name)
        else:
            parent = os.path.dirname(os.path.abspath(out))
            os.makedirs(parent, exist_ok=True)
            self.dir, self.stem = parent, os.path.splitext(out)[0]
        self.cfg = cfg
        self.summary = {}

    def path(self, suffix):
        return self.stem + suffix

    def finish(self, extra_cfg=None):
        cfg = dict(self.cfg or {})
        if extra_cfg:
            cfg["run"] = extra_cfg
        with open(self.path(".config.ini"), "w") as fh:
            fh.write(dump_config(cfg, __version__))
        lines = [f"version={__version__}"] + [f"{k}={_num(v)}" for k, v in self.summary.items()]
        with open(self.path(".summary.txt"), "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print("\n".join(lines))


# ---------------------------------------------------------------- subcommands

def cmd_ground_state(args, cfg):
    if cfg is not None:
        N, p = cfg["problem"]["N"], cfg["problem"]["p"]
        tol = cfg["numerics"]["ground_state_tol"]
    else:
        N, p, tol = args.dim, args.p, 1e-12
    N = args.dim if args.dim is not None else N
    p = args.p if args.p is not None else p
    tol = args.tol if args.tol is not None else tol
    if N is None or p is None:
        raise ConfigError("dim" if N is None else "p", "required (flag or config)")
    prof = solve_ground_state(int(N), float(p), tol=float(tol))
    mom = profile_moments(prof)
    run = Run(args.out, False, cfg, "ground_state")
    head = " ".join(f"{k}={_num(v)}" for k, v in [
        ("N", prof.dimension), ("p", float(prof.exponent)), ("u0", prof.u0),
        ("decay_rate", prof.decay_rate), ("m_pp1", mom.m_pp1), ("m_grad2", mom.m_grad2),
        ("m_sq", mom.m_sq), ("c0_bar", mom.c0_bar)])
    write_csv(args.out, ["r", "u", "du"], zip(prof.r_nodes, prof.u_values, prof.du_values), head)
    run.summary.update(N=prof.dimension, p=prof.exponent, u0=prof.u0, r_max=prof.r_max,
                       decay_rate=prof.decay_rate, c0_bar=mom.c0_bar,
                       pohozaev_defect=mom.pohozaev_defect)
    run.finish({"tol": tol})
    return 0


def cmd_gamma_scan(args, cfg):
    data = build_problem(cfg)
    k = args.lattice or cfg["experiment"]["lattice"]
    axes, vals = gamma_on_lattice(data, k)
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, data.N)
    flat = vals.reshape(-1)
    keep = np.isfinite(flat)
    run = Run(args.out, False, cfg, "gamma")
    qcols = [f"Q{i + 1}" for i in range(data.N)]
    write_csv(args.out, qcols + ["gamma"],
              (list(q) + [v] for q, v in zip(pts[keep], flat[keep])))

    s = cfg["experiment"]["seeds"]
    lo, hi = data.domain.bounds()
    # seeds at cell centres of an s^N lattice, kept strictly inside Ω
    seed_axes = [a + (np.arange(s) + 0.5) * (b - a) / s for a, b in zip(lo, hi)]
    seeds = np.stack(np.meshgrid(*seed_axes, indexing="ij"), axis=-1).reshape(-1, data.N)
    seeds = seeds[data.domain.contains(seeds)]
    finite = flat[keep]
    constant = bool(np.ptp(finite) <= 1e-12 * np.max(np.abs(finite)))
    failures = []
    crit = [] if constant else find_critical_points(data, seeds, failures=failures)
    ccols = qcols + ["value", "kind"] + [f"eig{i + 1}" for i in range(data.N)] + \
        ["gradient_norm", "isolated_strict"]
    write_csv(run.path("_critical.csv"), ccols,
              (list(c.location) + [c.value, c.kind] + list(c.hessian_eigs)
               + [c.gradient_norm, str(c.isolated_strict).lower()] for c in crit))
    kinds = [c.kind for c in crit]
    run.summary.update(
        lattice=k, gamma_constant=str(constant).lower(), gamma_min=float(finite.min()),
        gamma_max=float(finite.max()), critical_points=len(crit),
        nondegenerate=sum(kd != "degenerate" for kd in kinds),
        minima=kinds.count("min"), maxima=kinds.count("max"), saddles=kinds.count("saddle"),
        degenerate=kinds.count("degenerate"), seeds=len(seeds), seeds_failed=len(failures),
    )
    run.finish()
    return 0


def _q0(args, cfg, data):
    if getattr(args, "q0", None):
        Q0 = _vector("q0", args.q0)
    elif "q0" in cfg["experiment"]:
        Q0 = np.array(cfg["experiment"]["q0"])
    else:
        raise ConfigError("experiment.q0", "spike centre required (--q0 or experiment.q0)")
    if Q0.size != data.N:
        raise ConfigError("q0", f"needs {data.N} coordinates")
    data.check_point(Q0)
    return Q0


def _ladder(args, cfg):
    if getattr(args, "eps_ladder", None):
        return ladder_of(cfg, [float(t) for t in _vector("eps_ladder", args.eps_ladder)])
    return ladder_of(cfg)


def cmd_solve(args, cfg):
    data, base, mom = _setup(cfg)
    grid = _grid(cfg, data)
    Q0 = _q0(args, cfg, data)
    ladder = _ladder(args, cfg)
    num = cfg["numerics"]
    params = SolveParams(newton_tol=num["newton_tol"], max_iters=num["max_iters"])
    run = Run(args.out, True, cfg, "solve")
    sols = []
    try:
        continuation(data, grid, Q0, ladder, base, params, solutions=sols)
    finally:
        _write_track(run, data, grid, sols, Q0, mom)
        run.finish({"q0": list(Q0), "eps_ladder": ladder})
    return 0


def _write_track(run, data, grid, sols, Q0, mom):
    qcols = [f"x{i + 1}" for i in range(data.N)]
    for s in sols:
        write_csv(os.path.join(run.dir, f"u_eps_{s.eps!r}.csv"), qcols + ["u"],
                  (list(x) + [v] for x, v in zip(grid.points, s.u)))
    rows = [[s.eps] + list(s.location) + [s.height, s.energy, s.energy_rescaled, s.residual,
                                          s.iterations] for s in sols]
    write_csv(os.path.join(run.dir, "summary.csv"),
              ["eps"] + qcols + ["height", "energy", "energy_rescaled", "residual", "iterations"],
              rows)
    # every rung starts from the (re-centred) ansatz, so the largest converged
    # rung is the empirical ε0 of this configuration
    run.summary.update(rungs_converged=len(sols),
                       eps0_proxy=max((s.eps for s in sols), default=math.nan))
    if sols:
        d = [float(np.linalg.norm(s.location - Q0)) for s in sols]
        s = sols[-1]
        run.summary.update(final_eps=s.eps, final_distance=d[-1],
                           final_distance_spacings=d[-1] / grid.h, final_height=s.height,
                           final_energy_rescaled=s.energy_rescaled,
                           c0_gamma=mom.c0_bar * float(gamma(Q0, data)))
    return sols


def _reduce_rung(task):
    """One ε of a reduce / verify-expansion sweep (runs in a worker)."""
    cfg, eps, points, coercivity = task
    data, base, mom = _setup(cfg)
    grid = _grid(cfg, data)
    op = assemble(grid, data, eps)
    tol = cfg["numerics"]["correction_tol"]
    rows = []
    for Q in points:
        Q = np.array(Q)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            res = ansatz_residual_norm(Q, op, base)
            coer = math.nan
            if coercivity:
                try:
                    coer = coercivity_estimate(Q, op, base)
                except SpikeLabError as exc:
                    log.warning("coercivity at Q=%s eps=%s failed: %s", Q.tolist(), eps, exc)
            try:
                s = reduced_energy(Q, op, base, mom.c0_bar, tol=tol)
                vals = [s.A_eps, s.c0_gamma, s.gap, s.grad_ratio(data, mom.c0_bar), res,
                        s.diagnostics["w_norm"], coer, "ok"]
            except SpikeLabError as exc:
                log.warning("sample Q=%s eps=%s failed: %s", Q.tolist(), eps, exc)
                vals = [math.nan, mom.c0_bar * float(gamma(Q, data)), math.nan, math.nan, res,
                        math.nan, coer, type(exc).__name__]
        rows.append([float(q) for q in Q] + [eps] + vals)
    return rows


def _sweep(cfg, ladder, points, coercivity, jobs):
    tasks = [(cfg, eps, points, coercivity) for eps in ladder]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_reduce_rung, tasks))
    else:
        chunks = [_reduce_rung(t) for t in tasks]
    # rows ordered by point, then ε, whatever the execution order was
    rows = [r for chunk in chunks for r in chunk]
    N = len(points[0])
    return sorted(rows, key=lambda r: (tuple(r[:N]), -r[N]))


def _fit(rows, N, col):
    """Slope over the last four rungs with a finite, nonzero value."""
    idx = N + REDUCE_COLUMNS.index(col)
    pairs = [(r[N], r[idx]) for r in rows if np.isfinite(r[idx]) and r[idx] != 0]
    if len(pairs) < 2:
        return math.nan, math.nan
    eps, vals = zip(*pairs)
    return loglog_slope(eps, vals, last=min(4, len(vals)))


def cmd_reduce(args, cfg):
    data, base, mom = _setup(cfg)
    if args.q:
        points = [_vector("q", t) for t in args.q]
    elif "q" in cfg["experiment"]:
        points = [np.array(q) for q in cfg["experiment"]["q"]]
    else:
        raise ConfigError("experiment.q", "sample point required (--q or experiment.q)")
    for Q in points:
        if Q.size != data.N:
            raise ConfigError("q", f"needs {data.N} coordinates")
        data.check_point(Q)
    ladder = _ladder(args, cfg)
    run = Run(args.out, False, cfg, "reduce")
    rows = _sweep(cfg, ladder, [tuple(map(float, q)) for q in points], True, args.jobs)
    N = data.N
    write_csv(args.out, [f"Q{i + 1}" for i in range(N)] + REDUCE_COLUMNS, rows)

    grid = _grid(cfg, data)
    for j, Q in enumerate(points):
        mine = [r for r in rows if np.allclose(r[:N], Q)]
        tag = "" if len(points) == 1 else f"q{j + 1}_"
        res_slope, res_fit = _fit(mine, N, "ansatz_residual")
        w_slope, _ = _fit(mine, N, "w_norm")
        gap_slope, _ = _fit(mine, N, "gap")
        coer = np.array([r[N + REDUCE_COLUMNS.index("coercivity")] for r in mine])
        coer = coer[np.isfinite(coer)] if np.any(np.isfinite(coer)) else np.array([math.nan])
        ratio = mine[-1][N + REDUCE_COLUMNS.index("grad_ratio")]
        gaps = [r[N + REDUCE_COLUMNS.index("gap")] for r in mine]
        gaps = np.sign([g for g in gaps if np.isfinite(g) and g != 0])
        # a log-log fit of |gap| means nothing across a sign change
        flips = int(np.sum(gaps[1:] != gaps[:-1]))
        run.summary.update({
            f"{tag}residual_slope": res_slope, f"{tag}residual_fit_rms": res_fit,
            f"{tag}w_slope": w_slope, f"{tag}gap_slope": gap_slope,
            f"{tag}grad_ratio_final": ratio,
            f"{tag}coercivity_min": float(np.min(coer)),
            f"{tag}coercivity_spread": float(np.max(coer) / np.min(coer)),
            f"{tag}pass_residual_slope": str(res_slope >= SLOPE_MIN).lower(),
            f"{tag}pass_w_slope": str(w_slope >= SLOPE_MIN).lower(),
            f"{tag}gap_sign_changes": flips,
            f"{tag}pass_gap_slope": str(gap_slope >= GAP_SLOPE_MIN and flips == 0).lower(),
            f"{tag}pass_grad_ratio": str(abs(ratio - 1) <= RATIO_TOL).lower(),
            f"{tag}pass_coercivity": str(bool(np.all(coer > 0) and np.max(coer) < 2 * np.min(coer))).lower(),
        })
        # uniqueness probe at the finest rung: w from zero and from a random start
        op = assemble(grid, data, ladder[-1])
        tol = cfg["numerics"]["correction_tol"]
        rng = np.random.default_rng(args.seed if args.seed is not None else cfg["experiment"]["seed"])
        try:
            a = solve_correction(Q, op, base, tol=tol)
            w0 = 1e-3 * np.max(np.abs(a.spike.U)) * rng.standard_normal(grid.n_nodes)
            b = solve_correction(Q, op, base, tol=tol, w0=w0)
            diff = op.energy_norm(a.w - b.w) * op.eps ** (-N / 2)
            run.summary[f"{tag}uniqueness_diff"] = diff
        except SpikeLabError as exc:
            run.summary[f"{tag}uniqueness_diff"] = f"failed:{type(exc).__name__}"
    run.summary["failed_rows"] = sum(r[-1] != "ok" for r in rows)
    run.finish({"eps_ladder": ladder})
    return 0


def expansion_points(data, k, margin=0.3):
    """k^N lattice over the bounding box shrunk by ``margin`` on each side,
    restricted to Ω."""
    lo, hi = data.domain.bounds()
    width = hi - lo
    axes = [np.linspace(a + margin * w, b - margin * w, k) for a, b, w in zip(lo, hi, width)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, data.N)
    return [tuple(map(float, q)) for q in pts[data.domain.contains(pts)]]


def cmd_verify_expansion(args, cfg):
    data, base, mom = _setup(cfg)
    k = args.lattice or cfg["experiment"]["lattice"]
    points = expansion_points(data, k)
    if not points:
        raise ConfigError("lattice", "no lattice point inside the domain")
    ladder = _ladder(args, cfg)
    run = Run(args.out, False, cfg, "expansion")
    rows = _sweep(cfg, ladder, points, False, args.jobs)
    N = data.N
    write_csv(args.out, [f"Q{i + 1}" for i in range(N)] + REDUCE_COLUMNS, rows)
    gi = N + REDUCE_COLUMNS.index("gap")
    ai = N + REDUCE_COLUMNS.index("A_eps")
    ci = N + REDUCE_COLUMNS.index("c0_gamma")
    scaled = []
    gmin = min(points, key=lambda q: float(gamma(np.array(q), data)))
    same = []
    for eps in ladder:
        rung = [r for r in rows if r[N] == eps and r[-1] == "ok"]
        if not rung:
            scaled.append(math.nan)
            same.append(False)
            continue
        scaled.append(max(abs(r[gi]) for r in rung) / eps)
        amin = min(rung, key=lambda r: r[ai])
        same.append(tuple(amin[:N]) == gmin)
    gamma_const = bool(np.ptp([r[ci] for r in rows]) <= 1e-12 * max(abs(r[ci]) for r in rows))
    run.summary.update(
        lattice=k, points=len(points), failed_rows=sum(r[-1] != "ok" for r in rows),
        gamma_constant=str(gamma_const).lower(),
        max_gap_over_eps=";".join(_num(v) for v in scaled),
        gap_over_eps_nonincreasing=str(all(b <= a for a, b in zip(scaled, scaled[1:]))).lower(),
        argmin_matches=";".join(str(s).lower() for s in same),
        argmin_threshold_eps=_argmin_threshold(ladder, same),
    )
    run.finish({"eps_ladder": ladder})
    return 0


def _argmin_threshold(ladder, same):
    """Largest ε below which the lattice argmins of A_ε and Γ always agree."""
    thr = math.nan
    for eps, ok in zip(reversed(ladder), reversed(same)):
        if not ok:
            break
        thr = eps
    return thr


def cmd_spike_track(args, cfg):
    data, base, mom = _setup(cfg)
    grid = _grid(cfg, data)
    if getattr(args, "q0", None) or "q0" in cfg["experiment"]:
        Q0 = _q0(args, cfg, data)
    else:
        Q0 = _gamma_minimum(data, cfg)
    ladder = _ladder(args, cfg)
    num = cfg["numerics"]
    params = SolveParams(newton_tol=num["newton_tol"], max_iters=num["max_iters"])
    run = Run(args.out, True, cfg, "track")
    sols = []
    status = 0
    try:
        continuation(data, grid, Q0, ladder, base, params, solutions=sols)
    except SpikeLabError as exc:
        log.error("continuation failed: %s", exc)
        run.summary["error"] = type(exc).__name__
        status = 1
    _write_track(run, data, grid, sols, Q0, mom)
    d = [float(np.linalg.norm(s.location - Q0)) for s in sols]
    run.summary["distance_nonincreasing"] = str(all(b <= a + 1e-12 for a, b in zip(d, d[1:]))).lower()
    if sols:
        run.summary["pass_concentration"] = str(
            status == 0 and d[-1] <= TRACK_MAX_SPACINGS * grid.h
            and run.summary["distance_nonincreasing"] == "true").lower()

    # residual orders at an offset point along the same ladder
    qs = cfg["experiment"].get("q")
    Q = np.array(qs[0]) if qs else Q0
    res, wn = [], []
    for eps in ladder:
        op = assemble(grid, data, eps)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            res.append(ansatz_residual_norm(Q, op, base))
            try:
                wn.append(solve_correction(Q, op, base, tol=num["correction_tol"]).w_norm)
            except SpikeLabError:
                wn.append(math.nan)
    write_csv(os.path.join(run.dir, "residuals.csv"), ["eps", "ansatz_residual", "w_norm"],
              zip(ladder, res, wn))
    rs = loglog_slope(ladder, res, last=min(4, len(ladder))) if len(ladder) > 1 else (math.nan,) * 2
    ws = (loglog_slope(ladder, wn, last=min(4, len(ladder)))
          if len(ladder) > 1 and np.all(np.isfinite(wn)) else (math.nan,) * 2)
    run.summary.update(residual_point=";".join(_num(v) for v in Q), residual_slope=rs[0],
                       residual_fit_rms=rs[1], w_slope=ws[0],
                       pass_residual_slope=str(rs[0] >= SLOPE_MIN).lower())
    run.finish({"q0": list(Q0), "eps_ladder": ladder})
    return status


def _gamma_minimum(data, cfg):
    s = cfg["experiment"]["seeds"]
    lo, hi = data.domain.bounds()
    axes = [a + (np.arange(s) + 0.5) * (b - a) / s for a, b in zip(lo, hi)]
    seeds = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, data.N)
    crit = [c for c in find_critical_points(data, seeds[data.domain.contains(seeds)])
            if c.kind == "min"]
    if not crit:
        raise SpikeLabError("no nondegenerate minimum of Γ found; give experiment.q0")
    return min(crit, key=lambda c: (c.value, tuple(c.location))).location


# ---------------------------------------------------------------- entry point

def build_parser():
    ap = argparse.ArgumentParser(prog="spikelab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"spikelab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_help):
        p.add_argument("--config", help="INI configuration file")
        p.add_argument("--out", required=True, help=out_help)
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--seed", type=int, default=None, help="seed for multistart probes")
        p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, e.g. numerics.resolution=257")
        p.add_argument("-v", "--verbose", action="store_true")
        return p

    p = common(sub.add_parser("ground-state", help="radial ground state and moments"), "CSV file")
    p.add_argument("--dim", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_ground_state, needs_config=False)

    p = common(sub.add_parser("gamma-scan", help="Γ on a lattice and its critical points"), "CSV file")
    p.add_argument("--lattice", type=int)
    p.set_defaults(func=cmd_gamma_scan, needs_config=True)

    p = common(sub.add_parser("solve", help="Newton continuation down an eps ladder"), "directory")
    p.add_argument("--q0")
    p.add_argument("--eps-ladder")
    p.set_defaults(func=cmd_solve, needs_config=True)

    p = common(sub.add_parser("reduce", help="reduced energy at given points"), "CSV file")
    p.add_argument("--q", action="append", help="sample point x,y[,z]; may repeat")
    p.add_argument("--eps-ladder")
    p.set_defaults(func=cmd_reduce, needs_config=True)

    p = common(sub.add_parser("verify-expansion", help="A_eps against c0 Γ over a lattice"), "CSV file")
    p.add_argument("--lattice", type=int)
    p.add_argument("--eps-ladder")
    p.set_defaults(func=cmd_verify_expansion, needs_config=True)

    p = common(sub.add_parser("spike-track", help="continuation plus concentration and order checks"),
               "directory")
    p.add_argument("--q0")
    p.add_argument("--eps-ladder")
    p.set_defaults(func=cmd_spike_track, needs_config=True)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config:
            cfg = load_config(args.config, args.override)
        elif args.needs_config:
            raise ConfigError("config", "--config is required for this subcommand")
        else:
            cfg = None
        if args.jobs < 1:
            raise ConfigError("jobs", "must be at least 1")
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpikeLabError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
