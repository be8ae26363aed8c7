"""Command-line front end.

Every subcommand prints a short human summary, writes ``<command>.json``
(plus CSV tables where relevant) under ``--out`` and exits 0 iff all of its
asserted checks pass.  Wall-clock timings go to stderr so that the files
themselves are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, expsum, local
from .circle import CircleDecomposition, circle_table, exceptional_set, write_csv
from .errors import CostGuardError, SpecError, UnsaturatedBallError
from .group import (bianchi_spec, bottom_row_multiplicity, enumerate_ball, estimate_delta, load_spec)
from .ntheory import primes_upto
from .params import CircleParams
from .qform import height, represented_set

EXIT_OK, EXIT_FAIL, EXIT_SPEC, EXIT_COST = 0, 1, 2, 3


def _rat(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {s!r}") from exc


class Run:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.out = Path(args.out)
        self.asserted: dict[str, bool] = {}
        self.reported: dict = {}
        self.t0 = time.perf_counter()

    def spec(self):
        return load_spec(self.args.spec) if self.args.spec else bianchi_spec(self.args.D)

    def phase(self, name: str) -> None:
        print(f"[time] {name}: {time.perf_counter() - self.t0:.2f}s", file=sys.stderr)

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.asserted[name] = bool(ok)
        print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))

    def report(self, name: str, value) -> None:
        self.reported[name] = value
        print(f"[REPORT] {name}: {value if not isinstance(value, (list, dict)) else json.dumps(value)[:200]}")

    def params_echo(self) -> dict:
        a = self.args
        keys = ("spec", "D", "T", "T2", "N", "Q0", "K0", "sigma", "prime_bound", "seed")
        return {k: (str(getattr(a, k)) if isinstance(getattr(a, k), Fraction) else getattr(a, k)) for k in keys}

    def finish(self, command: str, extra_files: list[str] | None = None) -> int:
        self.out.mkdir(parents=True, exist_ok=True)
        doc = {"schema": 1, "command": command, "parameters": self.params_echo(),
               "asserted": self.asserted, "reported": self.reported, "files": extra_files or []}
        (self.out / f"{command}.json").write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default))
        self.phase("total")
        return EXIT_OK if all(self.asserted.values()) else EXIT_FAIL


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, set):
        return sorted(o)
    raise TypeError(type(o))


def _write_rows(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# -- subcommands -------------------------------------------------------------


def cmd_ball(run: Run) -> int:
    spec, T = run.spec(), run.args.T
    ball = enumerate_ball(spec, T=T)
    run.phase("enumerate")
    filt = ball.filter()
    run.report("size", len(ball))
    run.report("saturated", ball.saturated)
    run.report("filtered_size", len(filt))
    run.report("bottom_row_multiplicity", bottom_row_multiplicity(filt) if len(filt) else 0)
    if T >= 8:  # three radii, the smallest still holding a non-empty ball
        Ts = [T / 4, T / 2, T]
        est = estimate_delta(spec, Ts)
        run.report("delta_hat", {"T": [str(t) for t in Ts], "counts": list(map(int, est.counts)), "delta": est.delta})
    run.check("ball saturated", ball.saturated)
    return run.finish("ball")


def cmd_heights(run: Run) -> int:
    spec, T = run.spec(), run.args.T
    ball = enumerate_ball(spec, T=T)
    D = spec.D
    e = ball.entries
    H = e[:, 4] ** 2 + D * e[:, 5] ** 2 + e[:, 6] ** 2 + D * e[:, 7] ** 2
    vals, counts = np.unique(H, return_counts=True)
    _write_rows(run.out / "heights.csv", ["H", "count"], zip(vals.tolist(), counts.tolist()))
    bound = int(vals.max()) if len(vals) else 1
    rep = represented_set(D, bound)
    run.phase("heights")
    run.report("distinct_heights", len(vals))
    run.report("represented_upto_bound", {"bound": bound, "count": len(rep)})
    run.check("every ball height is a height of SL2(Z[w])", all(int(v) in rep for v in vals))
    return run.finish("heights", ["heights.csv"])


def _structure(run: Run):
    ball = enumerate_ball(run.spec(), T=run.args.admissible_T)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        st = local.admissible_structure(ball, prime_bound=run.args.prime_bound)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return st


def cmd_admissible(run: Run) -> int:
    st = _structure(run)
    run.phase("admissible")
    doc = st.to_json()
    run.report("L", st.L)
    run.report("admissible_classes", sorted(st.admissible_classes))
    run.report("bad_primes", sorted(st.bad_primes))
    run.reported["structure"] = doc
    return run.finish("admissible")


def cmd_density(run: Run) -> int:
    D = run.spec().D
    rows, bad = [], 0
    for p in primes_upto(run.args.prime_bound):
        if p == 2 or (2 * D) % p == 0:
            continue
        for n in range(p):
            t = local.tau_p(D, p, n)
            tc = local.tau_p_closed_form(D, p, n)
            up = local.u_q(D, p, n).value
            ok = t == tc and up == p * t - 1
            bad += not ok
            rows.append([p, n, str(t), str(tc), str(local.tau_p_printed(D, p, n)), str(up), int(ok)])
    _write_rows(run.out / "density.csv", ["p", "n", "tau", "tau_closed", "tau_printed", "U_p", "match"], rows)
    run.phase("density")
    run.check("tau_p and U_p match their closed forms", bad == 0, f"{len(rows)} rows")
    return run.finish("density", ["density.csv"])


def cmd_sums(run: Run) -> int:
    for c in acceptance.run_all(run.args.seed, only={1, 2, 3, 6}):
        run.check(c.name, bool(c.passed), c.detail)
    forms = acceptance._ball_forms(run.spec().D, 5)
    reps = expsum.kloosterman_bound_report(forms, run.spec().D, samples=100, seed=run.args.seed)
    run.phase("sums")
    run.report("bound_shapes", [r.summary() for r in reps])
    return run.finish("sums")


def _circle_params(run: Run) -> CircleParams:
    a = run.args
    if a.T2 is not None:
        return CircleParams(a.N, a.T2, Fraction(a.N) / a.T2, Q0=a.Q0, K0=a.K0)
    if a.T_given:
        return CircleParams.from_T(a.N, a.T, Q0=a.Q0, K0=a.K0)
    return CircleParams.from_sigma(a.N, a.sigma, Q0=a.Q0, K0=a.K0)


def cmd_circle(run: Run) -> int:
    p = _circle_params(run)
    ball = enumerate_ball(run.spec(), T2=p.T2, filtered=True)
    run.phase("enumerate")
    ns = np.arange(p.N, 2 * p.N + 1)
    st = _structure(run) if run.args.admissible else None
    rows = circle_table(ball, p, st, ns)
    run.out.mkdir(parents=True, exist_ok=True)
    write_csv(rows, run.out / "circle.csv")
    run.phase("circle")
    minor = np.array([r["minor"] for r in rows])
    smooth = np.array([r["R_smooth"] for r in rows])
    major = np.array([r["major"] for r in rows])
    scale = max(np.abs(smooth).max(), 1.0)
    run.report("T2", str(p.T2))
    run.report("X2", str(p.X2))
    run.report("ball_size", len(ball))
    run.report("minor_l2", float(np.sum(minor**2)))
    run.check("major + minor = R_smooth", np.abs(major + minor - smooth).max() <= 1e-9 * scale)
    return run.finish("circle", ["circle.csv"])


def cmd_lgp(run: Run) -> int:
    p = _circle_params(run)
    st = _structure(run)
    ball = enumerate_ball(run.spec(), T2=p.T2, filtered=True)
    r = exceptional_set(ball, p, st)
    run.phase("lgp")
    run.report("T2", str(p.T2))
    run.report("X2", str(p.X2))
    run.report("L", st.L)
    run.report("exceptional_count", r.count)
    run.report("admissible_count", r.admissible_count)
    run.report("ratio", r.ratio if r.ratio is not None else "undefined")
    run.reported["exceptional"] = r.exceptional
    return run.finish("lgp")


def cmd_verify(run: Run) -> int:
    only = set(run.args.only) if run.args.only else None
    checks = acceptance.run_all(run.args.seed, only=only)
    for c in checks:
        print(c.line())
        print(f"[time] criterion {c.criterion}: {c.seconds:.2f}s", file=sys.stderr)
        if c.asserted:
            run.asserted[f"{c.criterion}. {c.name}"] = bool(c.passed)
        else:
            run.reported[f"{c.criterion}. {c.name}"] = c.detail
    return run.finish("verify")


COMMANDS = {"ball": cmd_ball, "heights": cmd_heights, "admissible": cmd_admissible, "density": cmd_density,
            "sums": cmd_sums, "circle": cmd_circle, "lgp": cmd_lgp, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bianchi-heights", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--spec", help="group spec file (default: the Bianchi generators for --D)")
    ap.add_argument("--D", type=int, default=1)
    ap.add_argument("--T", type=_rat, default=None, help="ball radius (rational)")
    ap.add_argument("--T2", type=_rat, default=None, help="circle/lgp: T^2 directly (X^2 = N / T^2)")
    ap.add_argument("--N", type=int, default=2**10)
    ap.add_argument("--Q0", type=int, default=2)
    ap.add_argument("--K0", type=int, default=None)
    ap.add_argument("--sigma", type=_rat, default=Fraction(1, 8))
    ap.add_argument("--prime-bound", type=int, default=13)
    ap.add_argument("--admissible-T", type=_rat, default=Fraction(20))
    ap.add_argument("--admissible", action="store_true", help="circle: mark admissible n in the CSV")
    ap.add_argument("--only", type=int, nargs="*", help="verify: criterion numbers to run")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.T_given = args.T is not None
    if args.T is None:
        args.T = Fraction(8)
    try:
        return COMMANDS[args.command](Run(args))
    except SpecError as exc:
        print(f"error: bad group spec: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (CostGuardError, UnsaturatedBallError) as exc:
        print(f"error: cost guard: {exc}", file=sys.stderr)
        return EXIT_COST


if __name__ == "__main__":
    sys.exit(main())
