"""Command-line experiment runner.

    groverlab simulate --n 1024 --t-max 50 --plot p.svg
    groverlab bounds --n 64
    groverlab parallel --n 8 --s 2 --t-max 4 --seeds 100
    groverlab discriminate --n 16
    groverlab restart --n 4 --n-max 1048576
    groverlab verify-all

Exit codes: 0 success, 1 verification failure or internal error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Sequence

import numpy as np

from . import analytic, bounds, core, discrimination, parallel
from ._numerics import haar_unitary
from .svg import line_chart

FULL_TRACE_CAP = 2**14

SIMULATE_COLUMNS = ["n", "t", "p_simulated", "p_analytic", "abs_error"]
BOUNDS_COLUMNS = ["n", "t", "lhs_divergence", "rhs_improved", "rhs_crude", "ceiling_p", "p_grover", "saturation_gap"]
PARALLEL_COLUMNS = [
    "kind", "n", "s", "t", "seed", "lhs_divergence", "rhs_improved", "rhs_crude", "holds",
    "per_engine_size", "t_per_engine", "success_prob", "speedup",
]
DISCRIMINATE_COLUMNS = ["n", "p", "distance_sum", "bound_value", "gap"]
RESTART_COLUMNS = ["n", "t_full", "t_stop", "expected_queries", "savings"]


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(rows: Iterable[dict], columns: Sequence[str], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    if out is None or out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def power_of_two_range(lo: int, hi: int | None) -> list[int]:
    if hi is None:
        return [lo]
    if hi < lo:
        raise UsageError(f"empty n-range: {lo}..{hi}")
    out, n = [], lo
    while n <= hi:
        out.append(n)
        n *= 2
    return out


def t_range(t_lo: int, t_hi: int) -> range:
    if t_lo < 0 or t_hi < t_lo:
        raise UsageError(f"empty t-range: {t_lo}..{t_hi}")
    return range(t_lo, t_hi + 1)


# --- row builders -----------------------------------------------------------


def simulate_rows(ns: Sequence[int], t_lo: int = 0, t_hi: int | None = None) -> list[dict]:
    rows = []
    for n in ns:
        if n < 2:
            raise UsageError(f"n must be >= 2, got {n}")
        hi = math.ceil(2 * math.sqrt(n)) if t_hi is None else t_hi
        ts = t_range(t_lo, hi)
        oracle = core.OracleSpec(n, 0)
        state = core.grover_final(core.init_uniform(n), oracle, ts.start)
        for t in ts:
            if t > ts.start:
                state = core.grover_step(state, oracle)
            p_sim = core.success_probability(state, oracle)
            p_an = analytic.success_after(n, t)
            rows.append(dict(n=n, t=t, p_simulated=p_sim, p_analytic=p_an, abs_error=abs(p_sim - p_an)))
    return rows


def bounds_rows(ns: Sequence[int], t_lo: int = 0, t_hi: int | None = None) -> list[dict]:
    rows = []
    for n in ns:
        if n > FULL_TRACE_CAP:
            raise UsageError(f"n={n} exceeds the full-trace cap {FULL_TRACE_CAP}")
        hi = math.floor(analytic.optimal_iterations(n).t_star_fractional) if t_hi is None else t_hi
        for t in t_range(t_lo, hi):
            rep = bounds.grover_report(n, t)
            rows.append(dict(
                n=n, t=t,
                lhs_divergence=rep.lhs_divergence,
                rhs_improved=rep.rhs_improved,
                rhs_crude=rep.rhs_crude,
                ceiling_p=rep.ceiling_p,
                p_grover=analytic.success_after(n, t),
                saturation_gap=rep.saturation_gap,
            ))
    return rows


def _seed_reports(args) -> list[dict]:
    n, s, t_max, seed, algorithm = args
    rng = np.random.default_rng(seed)
    dim = n**s
    rows = []
    for t in range(t_max + 1):
        if algorithm == "grover":
            steps = [parallel.tensor_diffusion(n, s)] * t
        else:
            steps = [haar_unitary(dim, rng) for _ in range(t)]
        rep = parallel.parallel_bound_report(n, s, t, steps)
        rows.append(dict(
            kind="bound", n=n, s=s, t=t, seed=seed,
            lhs_divergence=rep.lhs_divergence, rhs_improved=rep.rhs_improved,
            rhs_crude=rep.rhs_crude, holds=rep.holds,
        ))
    return rows


def parallel_rows(
    n: int,
    s: int,
    t_max: int,
    seeds: Sequence[int],
    algorithm: str = "random",
    workers: int = 1,
    baseline_n: int | None = None,
    baseline_s: Sequence[int] = (),
    target_p: float = 0.99,
) -> list[dict]:
    if n**s > parallel.MAX_COMPOSITE_DIM:
        raise UsageError(f"composite dimension {n}^{s} exceeds cap {parallel.MAX_COMPOSITE_DIM}")
    if t_max < 0:
        raise UsageError("t-max must be >= 0")
    jobs = [(n, s, t_max, seed, algorithm) for seed in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_seed_reports, jobs))
    else:
        chunks = [_seed_reports(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]

    if baseline_n is not None and baseline_s:
        stats = []
        for k in baseline_s:
            if baseline_n % k:
                raise UsageError(f"s={k} does not divide n={baseline_n}")
            stats.append(parallel.partition_baseline(baseline_n, k, target_p))
        ref = stats[0].t_per_engine
        for st in stats:
            rows.append(dict(
                kind="partition", n=st.n, s=st.s, t=st.t_per_engine,
                per_engine_size=st.per_engine_size, t_per_engine=st.t_per_engine,
                success_prob=st.success_prob,
                speedup=ref / st.t_per_engine if st.t_per_engine else None,
            ))
    return rows


def discriminate_rows(n: int, points: int = 11) -> list[dict]:
    if n < 2 or points < 1:
        raise UsageError("need n >= 2 and at least one p point")
    rows = []
    for p in np.linspace(1.0 / n, 1.0, points):
        fam = discrimination.grover_final_family(n, float(p))
        ds = discrimination.distance_sum(fam)
        bv = discrimination.bound_value(n, float(p))
        rows.append(dict(n=n, p=float(p), distance_sum=ds, bound_value=bv, gap=ds - bv))
    return rows


def restart_rows(ns: Sequence[int]) -> list[dict]:
    rows = []
    for n in ns:
        if n < 4:
            raise UsageError(f"restart analysis needs n >= 4, got {n}")
        plan = analytic.restart_optimum(n)
        rows.append(dict(
            n=n, t_full=analytic.optimal_iterations(n).t_best, t_stop=plan.stop_at,
            expected_queries=plan.expected_queries, savings=plan.savings_vs_full,
        ))
    t_star, savings = analytic.restart_continuum()
    # asymptote: t_stop holds the optimal rotation angle, not an iteration count
    rows.append(dict(n="inf", t_full=None, t_stop=t_star, expected_queries=None, savings=savings))
    return rows


# --- commands ---------------------------------------------------------------


def cmd_simulate(args) -> int:
    ns = power_of_two_range(args.n or 4, args.n_max)
    rows = simulate_rows(ns, args.t or 0, args.t_max)
    write_csv(rows, SIMULATE_COLUMNS, args.out)
    if args.plot:
        series = []
        for n in ns:
            sub = [r for r in rows if r["n"] == n]
            series.append((f"N={n}", [r["t"] for r in sub], [r["p_simulated"] for r in sub]))
        line_chart(args.plot, series, title="Grover success probability", xlabel="oracle calls T", ylabel="p_T")
    tol = args.tolerance if args.tolerance is not None else 1e-10
    bad = [r for r in rows if r["abs_error"] > tol]
    if bad:
        raise VerificationFailure(f"{len(bad)} rows disagree with the closed form beyond {tol}")
    return 0


def cmd_bounds(args) -> int:
    ns = power_of_two_range(args.n or 16, args.n_max)
    rows = bounds_rows(ns, args.t or 0, args.t_max)
    write_csv(rows, BOUNDS_COLUMNS, args.out)
    tol = args.tolerance if args.tolerance is not None else bounds.CHAIN_TOL
    bad = [r for r in rows if r["saturation_gap"] < -tol or r["ceiling_p"] < r["p_grover"] - tol]
    if bad:
        raise VerificationFailure(f"{len(bad)} rows violate the bound chain")
    return 0


def cmd_parallel(args) -> int:
    rows = parallel_rows(
        n=args.n or 8,
        s=args.s or 2,
        t_max=args.t_max if args.t_max is not None else 4,
        seeds=range(args.seed, args.seed + (args.seeds if args.seeds is not None else 100)),
        algorithm=args.algorithm,
        workers=args.workers,
        baseline_n=args.baseline_n,
        baseline_s=args.baseline_s,
        target_p=args.target_p,
    )
    write_csv(rows, PARALLEL_COLUMNS, args.out)
    violations = sum(1 for r in rows if r["kind"] == "bound" and not r["holds"])
    print(f"parallel: {sum(r['kind'] == 'bound' for r in rows)} reports, violations={violations}", file=sys.stderr)
    if violations:
        raise VerificationFailure(f"{violations} parallel bound violations")
    return 0


def cmd_discriminate(args) -> int:
    n = args.n or 16
    rows = discriminate_rows(n, args.points)
    write_csv(rows, DISCRIMINATE_COLUMNS, args.out)
    rng = np.random.default_rng(args.seed)
    trials = args.trials if args.trials is not None else 1000
    sound = discrimination.soundness_trials(n, trials, rng)
    lag = discrimination.lagrange_optimum_check(n, max(args.p, 1.0 / n), args.lagrange_trials, rng)
    print(
        f"soundness: trials={sound.trials} violations={sound.violations} worst_slack={sound.worst_slack:.3e}\n"
        f"lagrange: trials={args.lagrange_trials} undercuts={lag.undercuts} "
        f"worst_margin={lag.worst_margin:.3e} min_hessian_eig={lag.min_hessian_eig:.3e}",
        file=sys.stderr,
    )
    tol = args.tolerance if args.tolerance is not None else 1e-10
    if any(abs(r["gap"]) > tol for r in rows) or sound.violations or lag.undercuts or not lag.min_hessian_eig > 0:
        raise VerificationFailure("discrimination bound check failed")
    return 0


def cmd_restart(args) -> int:
    ns = power_of_two_range(args.n or 4, args.n_max if args.n_max is not None else 2**20)
    write_csv(restart_rows(ns), RESTART_COLUMNS, args.out)
    return 0


def cmd_verify_all(args) -> int:
    """Acceptance-scale checks; one PASS/FAIL line each."""
    out_dir = args.out
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)

    def dump(name, rows, columns):
        if out_dir:
            write_csv(rows, columns, os.path.join(out_dir, name))

    results = []

    def record(name, ok, detail):
        results.append(ok)
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")

    sim = simulate_rows(power_of_two_range(4, 4096))
    dump("simulate.csv", sim, SIMULATE_COLUMNS)
    worst = max(r["abs_error"] for r in sim)
    record("formula agreement", worst <= 1e-10, f"max |p_sim - p_analytic| = {worst:.2e}")

    bnd = bounds_rows([16, 64, 256])
    dump("bounds.csv", bnd, BOUNDS_COLUMNS)
    rel = max(abs(r["saturation_gap"]) / r["rhs_improved"] for r in bnd if r["t"] > 0)
    ceil = [r["ceiling_p"] - r["p_grover"] for r in bnd]
    record("improved-bound saturation", rel <= 1e-6, f"max relative gap = {rel:.2e}")
    record("ceiling matches Grover", min(ceil) >= 0 and max(ceil) <= 1e-6,
           f"ceiling - p_grover in [{min(ceil):.2e}, {max(ceil):.2e}]")

    par = parallel_rows(8, 2, 4, range(100), workers=args.workers, baseline_n=2**16, baseline_s=(1, 4, 16))
    dump("parallel.csv", par, PARALLEL_COLUMNS)
    viol = sum(1 for r in par if r["kind"] == "bound" and not r["holds"])
    record("parallel bound soundness", viol == 0, f"violations = {viol}")
    speed = [(r["s"], r["speedup"]) for r in par if r["kind"] == "partition"]
    ok = all(abs(sp / math.sqrt(k) - 1) <= 0.05 for k, sp in speed)
    record("sqrt(S) partition speedup", ok, ", ".join(f"S={k}: {sp:.3f}" for k, sp in speed))

    disc = [r for n in (4, 16, 64) for r in discriminate_rows(n)]
    dump("discriminate.csv", disc, DISCRIMINATE_COLUMNS)
    gap = max(abs(r["gap"]) for r in disc)
    rng = np.random.default_rng(args.seed)
    sound = discrimination.soundness_trials(8, 1000, rng)
    lag = discrimination.lagrange_optimum_check(4, 0.7, 10000, rng)
    record("discrimination saturation", gap <= 1e-10, f"max |gap| = {gap:.2e}")
    record("discrimination soundness", sound.violations == 0, f"violations = {sound.violations}")
    record("lagrange optimum", lag.undercuts == 0 and lag.min_hessian_eig > 0,
           f"undercuts = {lag.undercuts}, min Hessian eigenvalue = {lag.min_hessian_eig:.3f}")

    rst = restart_rows(power_of_two_range(4, 2**20))
    dump("restart.csv", rst, RESTART_COLUMNS)
    asym = rst[-1]["savings"]
    big = rst[-2]["savings"]
    record("restart saving", abs(asym - 0.1214) <= 5e-4 and abs(big - asym) <= 3e-3,
           f"continuum {asym:.5f}, N=2^20 {big:.5f}")

    ratio = analytic.lower_bound_T(2**20, 1.0, 1, improved=False) / math.sqrt(2**19)
    record("crude bound asymptote", abs(ratio - 1) <= 0.02, f"T / sqrt(N/2) = {ratio:.5f}")

    if not all(results):
        raise VerificationFailure(f"{results.count(False)} checks failed")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "parallel": cmd_parallel,
    "discriminate": cmd_discriminate,
    "restart": cmd_restart,
    "verify-all": cmd_verify_all,
}


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="search-space size (start of the sweep with --n-max)")
    common.add_argument("--n-max", type=int, help="sweep n over powers of two up to this value")
    common.add_argument("--t", type=int, help="first query count")
    common.add_argument("--t-max", type=int, help="last query count")
    common.add_argument("--s", type=int, help="number of parallel oracles")
    common.add_argument("--seed", type=int, default=0, help="first RNG seed")
    common.add_argument("--seeds", type=int, help="number of consecutive seeds")
    common.add_argument("--trials", type=int, help="Monte Carlo trial count")
    common.add_argument("--out", help="output CSV path (directory for verify-all); default stdout")
    common.add_argument("--plot", help="SVG plot path")
    common.add_argument("--config", help="JSON file of flag values; explicit flags win")
    common.add_argument("--tolerance", type=float, help="override the verification tolerance")
    common.add_argument("--workers", type=int, default=1, help="process pool size for seed sweeps")

    parser = argparse.ArgumentParser(prog="groverlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="full simulation versus the closed form")
    sub.add_parser("bounds", parents=[common], help="divergence sum against the bound chain")
    p = sub.add_parser("parallel", parents=[common], help="S-oracle bound and partition baseline")
    p.add_argument("--algorithm", choices=["random", "grover"], default="random")
    p.add_argument("--baseline-n", type=int, default=2**16)
    p.add_argument("--baseline-s", type=_int_list, default=[1, 4, 16])
    p.add_argument("--target-p", type=float, default=0.99)
    d = sub.add_parser("discriminate", parents=[common], help="state-discrimination bound checks")
    d.add_argument("--points", type=int, default=11, help="size of the p grid")
    d.add_argument("--p", type=float, default=0.7, help="average success for the Lagrange check")
    d.add_argument("--lagrange-trials", type=int, default=10000)
    sub.add_parser("restart", parents=[common], help="early stopping with restarts")
    sub.add_parser("verify-all", parents=[common], help="run every verification suite")
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(config, dict):
            parser.error("config must be a flat JSON object")
        defaults = {k.replace("-", "_"): v for k, v in config.items()}
        unknown = set(defaults) - set(vars(args))
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        # re-parse so explicit flags override file values
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"groverlab {args.command}: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"groverlab {args.command}: verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
