"""Batch front door: parameter reports, solving, scanning, sieve self-tests,
exponential-sum scans, and main-term comparisons.

Human-readable summaries go to stdout; machine output (CSV/JSON) is written
only through --out.  Exit codes: 0 success, 2 usage/domain error, 3 capacity,
4 accuracy failure.  A config file of key=value lines can supply defaults;
explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import arith, circle, solver
from .errors import AccuracyError, AptriplesError, CapacityError, DomainError
from .params import derive_params, desk_params, r_bound, validate
from .sieve import F_of, build_weights, f_of, fundamental_inequality_check, make_support, sieve_sums

EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_ACCURACY = 4


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _table_for(limit: int):
    return arith.sieve_primes(max(int(limit) + 3, 5))


# ---------------------------------------------------------------------------
# commands


def cmd_params(args) -> int:
    if args.N:
        p = derive_params(args.c, args.N, mu=args.mu, A=args.A)
    else:
        p = derive_params(args.c, 10**6, mu=args.mu, A=args.A)
    print(f"c = {p.c}")
    print(f"xi = {p.xi}")
    print(f"delta = {p.delta}")
    print(f"kappa = {p.kappa}")
    print(f"eta = {p.eta}")
    print(f"s0 = {p.s0}")
    print(f"r = {p.r}")
    if args.N:
        for name in ("X", "z", "D", "Delta", "M"):
            print(f"{name} = {getattr(p, name)}")
        for rep in validate(p):
            print(f"constraint [{rep.name}]: {'OK' if rep.ok else 'VIOLATED'} slack={rep.slack:.6g}")
    if args.out:
        _write_json(args.out, json.loads(p.to_json()))
    return 0


def cmd_solve(args) -> int:
    p = desk_params(args.c, args.N, mu=args.mu)
    r = args.r if args.r else (r_bound(args.c) if 1 < args.c < 17 / 16 else 95)
    table = _table_for(p.X)
    res = solver.solve(args.N, p, r=r, limit=args.limit, table=table)
    truncated = args.limit > 0 and res.count >= args.limit
    prefix = ">=" if truncated else ""
    line = f"N={args.N} c={args.c} r={r}: {prefix}{res.count} unordered solution(s)"
    if res.triples:
        # the ordered count restores the permutations of each canonical triple
        ordered = sum(
            1 if t.p1 == t.p2 == t.p3 else 3 if len({t.p1, t.p2, t.p3}) == 2 else 6
            for t in res.triples
        )
        line += f", {prefix}{ordered} ordered"
    print(line)
    for t in res.triples[:20]:
        print(f"  p=({t.p1},{t.p2},{t.p3}) v=({t.v1},{t.v2},{t.v3}) omega=({t.omega1},{t.omega2},{t.omega3})")
    if len(res.triples) > 20:
        print(f"  ... {len(res.triples) - 20} more")
    if args.out:
        with open(args.out, "w") as fh:
            for t in res.triples:
                fh.write(json.dumps(t.to_json_dict(args.N, args.c), sort_keys=True) + "\n")
    return 0


def cmd_scan(args) -> int:
    lo, hi = args.N_range
    t0 = time.perf_counter()
    table = _table_for(hi ** (1.0 / args.c))
    r = args.r if args.r else (r_bound(args.c) if 1 < args.c < 17 / 16 else 95)
    rows = solver.scan(args.c, r, lo, hi, step=args.step, mu=args.mu, table=table)
    elapsed = time.perf_counter() - t0
    zero = [row.N for row in rows if row.count == 0]
    counts = [row.count for row in rows]
    print(f"scan c={args.c} r={r} N in [{lo},{hi}] step {args.step}: {len(rows)} rows in {elapsed:.2f}s")
    print(f"counts: min={min(counts)} max={max(counts)} mean={sum(counts)/len(counts):.2f}")
    if zero:
        print(f"FLAG: {len(zero)} N with no solution: {zero[:20]}")
    else:
        print("every N has at least one solution")
    if args.out:
        _write_csv(args.out, ["N", "count", "min_omega"], [(r_.N, r_.count, r_.min_omega) for r_ in rows])
    return 0


def cmd_sieve_selftest(args) -> int:
    z = args.z
    s0 = 2.95 if args.D is None else math.log(args.D) / math.log(z)
    D = args.D if args.D else z**s0
    sup = make_support(z, D)
    wl = build_weights(sup, "lower")
    wu = build_weights(sup, "upper")
    sums = sieve_sums((wl, wu), sup)
    rng = random.Random(args.seed)
    qs = sup.odd_primes.tolist()
    violations = 0
    for _ in range(args.samples):
        k = rng.randint(0, min(6, len(qs)))
        n = 1
        for q in rng.sample(qs, k):
            n *= q
        lo_s, mob, up_s = fundamental_inequality_check((wl, wu), n)
        if not lo_s <= mob <= up_s:
            violations += 1
    print(f"z={z} D={D:.6g} entries: lower={len(wl)} upper={len(wu)}")
    print(f"N- = {sums.N_minus}  B = {sums.B}  N+ = {sums.N_plus}  s0 = {sums.s0}")
    print(f"envelope: N- <= B <= N+ : {'OK' if sums.N_minus <= sums.B <= sums.N_plus else 'VIOLATED'}")
    print(f"sandwich check on {args.samples} random n: {violations} violations")
    print(f"F(2.95) = {F_of(2.95):.9f}  f(2.95) = {f_of(2.95):.9f}  3f-F = {3*f_of(2.95)-F_of(2.95):.9f}")
    if args.out:
        _write_csv(
            args.out,
            ["z", "D", "N_minus", "B", "N_plus", "s0", "sandwich_violations"],
            [(z, D, sums.N_minus, sums.B, sums.N_plus, sums.s0, violations)],
        )
    return 0 if violations == 0 else EXIT_ACCURACY


def _expsum_point(job):
    kind, x, cfg = job
    p = desk_params(cfg["c"], cfg["N"], mu=cfg["mu"], z=cfg.get("z"))
    if kind == "H":
        s = circle.h_sum(int(x), p)
        ratio = circle.vdc_ratio(int(x), p) if x else 0.0
        return (x, s.value.real, s.value.imag, s.abs_error_bound, ratio)
    if kind == "I":
        s = circle.i_alpha(x, p)
        env = min((1 - p.mu) * p.X + 1.0, 1.0 / (p.c * abs(x) * (p.mu * p.X) ** (p.c - 1.0))) if x else (1 - p.mu) * p.X + 1.0
        return (x, s.value.real, s.value.imag, s.abs_error_bound, abs(s.value) / env)
    table = _table_for(cfg["N"] ** (1 / cfg["c"]))
    sup = make_support(p.z, p.D)
    w = build_weights(sup, "upper")
    s = circle.l_weighted(x, w, p, table)
    trivial = float(np.sum(np.log(table.primes_between(p.mu * p.X, p.X).astype(float))))
    return (x, s.value.real, s.value.imag, s.abs_error_bound, abs(s.value) / trivial)


def cmd_expsum(args) -> int:
    cfg = {"c": args.c, "N": args.N, "mu": args.mu, "z": args.z}
    if args.kind == "H":
        pts = list(range(args.k_min, args.k_max + 1))
    else:
        lo, hi = args.alpha_range
        pts = np.linspace(lo, hi, args.grid).tolist()
    jobs = [(args.kind, x, cfg) for x in pts]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            rows = list(ex.map(_expsum_point, jobs, chunksize=max(1, len(jobs) // (4 * args.workers))))
    else:
        rows = [_expsum_point(j) for j in jobs]
    print(f"expsum kind={args.kind}: {len(rows)} points")
    worst = max(rows, key=lambda r: r[4])
    print(f"max bound ratio {worst[4]:.6g} at point {worst[0]}")
    if args.out:
        _write_csv(args.out, ["point", "real", "imag", "error_bound", "bound_ratio"], rows)
    return 0


def cmd_mainterm(args) -> int:
    p0 = desk_params(args.c, args.N, mu=args.mu)
    if p0.X > circle.GAMMA_X_CEILING:
        raise CapacityError(
            f"X = {p0.X:.4g} exceeds the exact-convolution ceiling {circle.GAMMA_X_CEILING}"
        )
    table = _table_for(p0.X)
    print(f"c={args.c} N={args.N} mu={args.mu} X={p0.X:.6g}")
    print(f"3f(2.95) - F(2.95) = {3*f_of(2.95)-F_of(2.95):.9f} (positive)")
    rows = []
    for z in args.z_grid:
        p = desk_params(args.c, args.N, mu=args.mu, z=z)
        sup = make_support(p.z, p.D)
        wl = build_weights(sup, "lower")
        wu = build_weights(sup, "upper")
        sums = sieve_sums((wl, wu), sup)
        b1_dens = circle.b1_density(p)
        window = circle.b1_auto_window(p)
        b1_osc = circle.b1_oscillatory(p, window=window)
        tail = circle.b1_window_tail_bound(p, window)
        pred = circle.predicted_main_term(p, sums, b1_dens)
        if args.arcs:
            rep = circle.gamma_report_full(p, table, sums=sums, b1=b1_dens)
        else:
            rep = circle.gamma_exact(p, table=table)
        lower = 3 * rep.gamma1 - 2 * rep.gamma4
        tol = 1e-9 * (abs(rep.gamma) + 3 * abs(rep.gamma1) + 2 * abs(rep.gamma4) + 1)
        ok = rep.gamma >= lower - tol
        print(
            f"z={z}: N-={sums.N_minus:.6f} B={sums.B:.6f} N+={sums.N_plus:.6f} "
            f"B1_dens={b1_dens:.6g} B1_osc={b1_osc:.6g} (window {window:.3g}, "
            f"tail <= {tail:.3g}) pred={pred:.6g}"
        )
        print(
            f"      Gamma={rep.gamma:.6g} Gamma1={rep.gamma1:.6g} Gamma4={rep.gamma4:.6g} "
            f"3G1-2G4={lower:.6g} Gamma>=3G1-2G4: {'PASS' if ok else 'FAIL'} "
            f"Gamma/pred={rep.gamma/pred if pred else math.inf:.4f}"
        )
        if args.arcs:
            split1 = rep.gamma1_major + rep.gamma1_minor
            split4 = rep.gamma4_major + rep.gamma4_minor
            print(
                f"      arcs: G1'={rep.gamma1_major:.6g} G1''={rep.gamma1_minor:.6g} "
                f"(sum {split1:.6g}) G4'={rep.gamma4_major:.6g} G4''={rep.gamma4_minor:.6g} "
                f"(sum {split4:.6g})"
            )
        rows.append(
            (z, sums.N_minus, sums.B, sums.N_plus, b1_dens, b1_osc, pred, rep.gamma, rep.gamma1, rep.gamma4)
        )
    if args.out:
        _write_csv(
            args.out,
            ["z", "N_minus", "B", "N_plus", "b1_density", "b1_oscillatory",
             "predicted_main_term", "gamma", "gamma1", "gamma4"],
            rows,
        )
    return 0


def cmd_report(args) -> int:
    p = derive_params(args.c, args.N or 10**6, mu=args.mu, A=args.A)
    doc = {
        "params": json.loads(p.to_json()),
        "constraints": [
            {"name": rep.name, "ok": rep.ok, "slack": rep.slack} for rep in validate(p)
        ],
        "r_bound": r_bound(args.c),
        "limit_functions": {
            "F_s0": F_of(p.s0),
            "f_s0": f_of(p.s0),
            "positivity_3f_minus_F": 3 * f_of(p.s0) - F_of(p.s0),
        },
    }
    if args.z:
        sup = make_support(args.z, args.z**2.95)
        sums = sieve_sums((build_weights(sup, "lower"), build_weights(sup, "upper")), sup)
        doc["sieve_sums"] = {
            "z": args.z, "D": sup.D,
            "N_minus": sums.N_minus, "B": sums.B, "N_plus": sums.N_plus,
        }
    print(json.dumps(doc, indent=2, sort_keys=True))
    if args.out:
        _write_json(args.out, doc)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


def _range_pair(text: str):
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def _float_pair(text: str):
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aptriples", description=__doc__)
    ap.add_argument("--config", help="key=value file merged under explicit flags")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, n_default=None):
        sp.add_argument("--c", type=float, required=False, default=1.02)
        sp.add_argument("--N", type=int, default=n_default)
        sp.add_argument("--mu", type=float, default=0.1)
        sp.add_argument("--A", type=float, default=12.0)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--out", help="machine-readable output path")

    sp = sub.add_parser("params", help="derive and validate the scalar parameters")
    common(sp)
    sp.set_defaults(fn=cmd_params)

    sp = sub.add_parser("solve", help="enumerate solutions for one N")
    common(sp, n_default=10**4)
    sp.add_argument("--r", type=int, default=0)
    sp.add_argument("--limit", type=int, default=1000)
    sp.set_defaults(fn=cmd_solve, mu=0.0)

    sp = sub.add_parser("scan", help="per-N solution counts over a range")
    common(sp)
    sp.add_argument("--r", type=int, default=0)
    sp.add_argument("--N-range", dest="N_range", type=_range_pair, default=(100, 2000))
    sp.add_argument("--step", type=int, default=1)
    sp.set_defaults(fn=cmd_scan, mu=0.0)

    sp = sub.add_parser("sieve-selftest", help="weight sandwich and envelope checks")
    common(sp)
    sp.add_argument("--z", type=float, default=100.0)
    sp.add_argument("--D", type=float, default=None)
    sp.add_argument("--samples", type=int, default=10000)
    sp.set_defaults(fn=cmd_sieve_selftest)

    sp = sub.add_parser("expsum", help="CSV scans of L(alpha), I(alpha) or H(k)")
    common(sp, n_default=10**4)
    sp.add_argument("--kind", choices=["L", "I", "H"], default="H")
    sp.add_argument("--z", type=float, default=20.0)
    sp.add_argument("--k-min", dest="k_min", type=int, default=1)
    sp.add_argument("--k-max", dest="k_max", type=int, default=50)
    sp.add_argument("--alpha-range", dest="alpha_range", type=_float_pair, default=(-0.4, 0.4))
    sp.add_argument("--grid", type=int, default=41)
    sp.set_defaults(fn=cmd_expsum)

    sp = sub.add_parser("mainterm", help="sieve sums, B1 oracles, exact Gamma comparison")
    common(sp, n_default=10**4)
    sp.add_argument("--z-grid", dest="z_grid", type=lambda s: [float(x) for x in s.split(",")],
                    default=[10.0, 20.0])
    sp.add_argument("--arcs", action="store_true",
                    help="also integrate the major/minor arc segments (slow)")
    sp.set_defaults(fn=cmd_mainterm)

    sp = sub.add_parser("report", help="one-stop JSON summary")
    common(sp)
    sp.add_argument("--z", type=float, default=None)
    sp.set_defaults(fn=cmd_report)
    return ap


def _merge_config(argv: list[str]) -> list[str]:
    """Prepend key=value pairs from --config as flags (explicit flags win)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    known = {"c", "N", "mu", "A", "seed", "workers", "out", "r", "limit", "step",
             "z", "D", "samples", "kind", "grid"}
    extra: list[str] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in known:
                raise DomainError(f"unknown config key: {key}")
            flag = f"--{key}"
            if flag not in argv:
                extra.extend([flag, val.strip()])
    rest = argv[:i] + argv[i + 2 :]
    # insert config-derived flags after the subcommand
    return rest[:1] + extra + rest[1:] if rest else extra


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = _build_parser()
    try:
        args = ap.parse_args(_merge_config(argv))
        return args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except AptriplesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
