"""Command-line entry point: ``l1pph <subcommand> ...`` (or ``python -m l1pph``).

Exit codes: 0 on success (detect: a match), 1 when detect finds no match,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds, imaging, sim, store
from .metrics import PredicateParams
from .pph import samp

IMAGE_SUFFIXES = {".pgm", ".ppm", ".pnm"}


class UsageError(ValueError):
    pass


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if ":" in part:
            lo, hi, *step = (int(v) for v in part.split(":"))
            out.extend(range(lo, hi + 1, step[0] if step else 1))
        elif part:
            out.append(int(part))
    return out


def _shared() -> argparse.ArgumentParser:
    sp = argparse.ArgumentParser(add_help=False)
    g = sp.add_argument_group("shared options")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--t", type=int, help="image threshold (default ceil(0.01 q n))")
    g.add_argument("--t-plus", type=int)
    g.add_argument("--t-minus", type=int)
    g.add_argument("--delta", type=int, default=3)
    g.add_argument("--blocks", type=int, default=1)
    g.add_argument("--q", type=int, help="alphabet size (default 256; 5 for simulate-delta)")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--quiet", action="store_true")
    g.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    return sp


def _emit(args, header, rows) -> None:
    rows = [list(r) for r in rows]
    if args.format == "json":
        json.dump([dict(zip(header, r)) for r in rows], sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(sim.to_csv(header, rows))


def _note(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def _load_input(path: str):
    """An Image from netpbm, or a raw vector ('n q' then n integers)."""
    p = Path(path)
    buf = p.read_bytes()
    if buf[:2] in (b"P5", b"P6"):
        return imaging.load_image(buf)
    q, x = imaging.load_raw_vector(buf.decode("ascii"))
    if q != imaging.Q:
        raise UsageError(f"{path}: raw vectors must use q={imaging.Q}, got {q}")
    return x


def _length(img) -> int:
    return img.n if isinstance(img, imaging.Image) else int(np.asarray(img).size)


def _block_params(args, n: int) -> tuple[imaging.BlockPlan, PredicateParams]:
    """Validate the image-level split and scale it to one block."""
    t = args.t if args.t is not None else imaging.default_threshold(args.q, n)
    if args.t_plus is None and args.t_minus is None:
        whole = PredicateParams.balanced(t, args.delta)
    else:
        t_minus = args.t_minus if args.t_minus is not None else t - args.t_plus
        t_plus = args.t_plus if args.t_plus is not None else t - t_minus
        whole = PredicateParams(t, t_plus, t_minus, args.delta)
    plan = imaging.plan_blocks(n, args.blocks, t)
    t_minus_b = whole.t_minus * plan.t_B // t
    if plan.t_B - t_minus_b < 1:
        raise UsageError(f"per-block threshold {plan.t_B} leaves no room for t_plus")
    return plan, PredicateParams(plan.t_B, plan.t_B - t_minus_b, t_minus_b, min(args.delta, t_minus_b))


def _read_db(path: str, key_path: str | None) -> store.HashDatabase:
    a = None
    if key_path:
        a = store.load(Path(key_path).read_bytes()).key.a
    return store.load(Path(path).read_bytes(), a=a)


def _key_from(args, n: int):
    if getattr(args, "key", None):
        db = _read_db(args.key, None)
        if db.plan.n != n:
            raise store.KeyMismatch(f"key expects {db.plan.n} values, input has {n}")
        return db.key, db.plan
    plan, params = _block_params(args, n)
    return store.make_key(args.seed, plan, args.q, params=params), plan


def cmd_keygen(args) -> int:
    n = args.n if args.n is not None else _length(_load_input(args.like))
    key, plan = _key_from(args, n)
    Path(args.output).write_bytes(store.save_key(key, plan))
    _note(args, f"key: p={key.p} n_B={plan.n_B} B={plan.B} t_B={plan.t_B}")
    return 0


def cmd_hash(args) -> int:
    img = _load_input(args.image)
    key, plan = _key_from(args, _length(img))
    digests = store.prepare(key, plan, img)
    Path(args.output).write_bytes(store.save_digests(digests, key.p))
    _note(args, f"{len(digests)} digest block(s) of {plan.t_B + 1} coefficients")
    return 0


def _image_files(folder: str) -> list[Path]:
    files = sorted(p for p in Path(folder).iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise UsageError(f"no .pgm/.ppm images in {folder}")
    return files


def cmd_db_build(args) -> int:
    files = _image_files(args.folder)
    first = _load_input(str(files[0]))
    key, plan = _key_from(args, _length(first))
    skipped: list = []
    images = ((f.name, _load_input(str(f))) for f in files)
    db = store.setup(key, plan, images, on_error=args.on_error, skipped=skipped)
    for image_id, msg in skipped:
        _note(args, f"skipped {image_id}: {msg}")
    if args.split_key:
        Path(args.split_key).write_bytes(store.save_key(key, plan))
    Path(args.output).write_bytes(store.save(db, include_a=not args.split_key))
    _note(args, f"{len(db)} entries, B={plan.B}, t_B={plan.t_B}, p={key.p}")
    return 0


def cmd_detect(args) -> int:
    db = _read_db(args.db, args.key)
    if args.digest:
        query = store.load_digests(Path(args.digest).read_bytes(), db.key.p)
    else:
        query = store.prepare(db.key, db.plan, _load_input(args.image))
    rep = store.detect(db, query, min_blocks=args.min_blocks, all_matches=args.all, jobs=args.jobs)
    header = ["matched", "matched_id", "per_block_bits", "scanned", "all_matches"]
    row = [rep.matched, rep.matched_id or "", "".join(map(str, rep.per_block_bits)),
           rep.scanned, ";".join(rep.all_matches)]
    _emit(args, header, [row])
    return 0 if rep.matched else 1


def cmd_prepare(args) -> int:
    db = _read_db(args.key, None)
    img = _load_input(args.image)
    digests = store.prepare(db.key, db.plan, img)
    Path(args.output).write_bytes(store.save_digests(digests, db.key.p))
    return 0


def cmd_bounds(args) -> int:
    if args.preset == "paper":
        rows = bounds.compression_table(args.q)
    else:
        if args.n is None:
            raise UsageError("bounds needs --preset paper or --n")
        t_small = args.t if args.t is not None else args.n // 10
        rows = [
            bounds.bound_large_t(args.n, args.q),
            bounds.bound_small_t(args.n, args.q, t_small),
            bounds.scheme_row(args.n, args.q, t_small),
        ]
    _emit(args, bounds.CSV_HEADER, [
        [r.regime, r.color, r.t, r.n, r.baseline_bits, r.m_bits, round(r.compression_pct, 3)] for r in rows
    ])
    return 0


def cmd_ball(args) -> int:
    if args.n is None or args.t is None:
        raise UsageError("ball needs --n and --t")
    lower, upper = bounds.ball_bounds(args.n, args.q, args.t)
    exact = bounds.ball_size_exact(args.n, args.q, args.t)
    center = bounds.ball_center_upper(args.n, args.q, args.t) if args.q % 2 == 0 else ""
    row = [args.n, args.q, args.t, lower, upper, exact, center]
    header = ["n", "q", "t", "lower", "upper", "exact", "center_upper"]
    if args.brute:
        header.append("bruteforce")
        row.append(bounds.ball_bruteforce(args.n, args.q, args.t))
    _emit(args, header, [row])
    return 0


def cmd_simulate_delta(args) -> int:
    q = args.q if args.q is not None else 5
    t = args.t if args.t is not None else 10
    t_plus = args.t_plus if args.t_plus is not None else t - t // 2
    t_minus = args.t_minus if args.t_minus is not None else t - t_plus
    rows = sim.simulate_delta_sweep(args.n, q, args.p, t, t_plus, t_minus, _ints(args.deltas),
                                    args.trials, args.seed, args.jobs, control=args.control,
                                    statistic=args.statistic, excess=args.excess)
    _emit(args, sim.DELTA_HEADER, rows)
    return 0


def cmd_empirical_error(args) -> int:
    if args.folder:
        xs = [_load_input(str(f)) for f in _image_files(args.folder)]
    else:
        xs = sim.graded_corpus(args.n, args.q, args.count, args.seed)
    ts = _ints(args.ts)
    if args.via == "oracle":
        rows = sim.empirical_error_sweep(xs, ts, args.delta)
    else:
        n = _length(xs[0])
        rows = []
        for t in ts:
            prm = PredicateParams.balanced(t, args.delta)
            key = samp(args.seed, n, args.q, prm)
            rows.append((t, sim.empirical_error(xs, prm, via="eval", key=key)))
    _emit(args, sim.ERROR_HEADER, rows)
    return 0


def cmd_bench(args) -> int:
    if args.scaling:
        exponent, rows = sim.eval_scaling(_ints(args.scaling), reps=args.reps, seed=args.seed)
        _emit(args, ["t", "time_eval"], rows)
        _note(args, f"least-squares exponent: {exponent:.3f}")
        return 0
    grid = sim.TIMING_GRID if args.grid == "full" else sim.TIMING_GRID[3:]
    rows = sim.bench(grid, reps=args.reps, seed=args.seed, delta=args.delta)
    _emit(args, sim.BENCH_HEADER, [[r[h] for h in sim.BENCH_HEADER] for r in rows])
    for r in rows:
        if r["reference"]:
            ps, pi, pe = r["reference"]
            flag = "  REGRESSION (>10x reference)" if r["regression"] else ""
            _note(args, f"{r['size']} {r['color']}: eval {r['time_eval']:.4f}s vs reference {pe}s{flag}")
    return 0


def cmd_list_curve(args) -> int:
    ns = _ints(args.ns)
    t_range = range(args.t_min if args.t_min is not None else args.q + 1, args.t_max + 1)
    rows = sim.list_size_curve(ns, args.q, t_range)
    _emit(args, sim.CURVE_HEADER, rows)
    return 0


def cmd_transform(args) -> int:
    img = _load_input(args.image)
    if not isinstance(img, imaging.Image):
        raise UsageError("transform needs a netpbm image")
    out = imaging.adjust(img, args.kind, args.epsilon)
    imaging.write_image(args.output, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    shared = _shared()
    ap = argparse.ArgumentParser(prog="l1pph", description="l1-distance property-preserving hashing")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[shared], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("keygen", cmd_keygen, "sample a key and write a key file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--n", type=int, help="image length (values per image)")
    src.add_argument("--like", help="take the length from this image")
    p.add_argument("-o", "--output", required=True)

    p = add("hash", cmd_hash, "hash an image into a digest file")
    p.add_argument("image")
    p.add_argument("--key", help="key file (otherwise sampled from --seed)")
    p.add_argument("-o", "--output", required=True)

    p = add("db-build", cmd_db_build, "hash and invert every image in a folder")
    p.add_argument("folder")
    p.add_argument("--key", help="reuse an existing key file")
    p.add_argument("--split-key", metavar="PATH", help="write the key here and omit the points from the DB")
    p.add_argument("--on-error", choices=("abort", "skip"), default="abort")
    p.add_argument("-o", "--output", required=True)

    p = add("prepare", cmd_prepare, "hash a query image under a key or DB file")
    p.add_argument("image")
    p.add_argument("--key", required=True, help="key or DB file")
    p.add_argument("-o", "--output", required=True)

    p = add("detect", cmd_detect, "scan a database for a query")
    p.add_argument("--db", required=True)
    p.add_argument("--key", help="key file for a DB built with --split-key")
    q = p.add_mutually_exclusive_group(required=True)
    q.add_argument("--digest")
    q.add_argument("--image")
    p.add_argument("--min-blocks", type=float, default=1.0)
    p.add_argument("--all", action="store_true", help="report every matching entry")

    p = add("bounds", cmd_bounds, "compression bounds")
    p.add_argument("--preset", choices=("paper",))
    p.add_argument("--n", type=int)

    p = add("ball", cmd_ball, "l1-ball size bounds")
    p.add_argument("--n", type=int)
    p.add_argument("--brute", action="store_true")

    p = add("simulate-delta", cmd_simulate_delta, "false-match rate against p^-delta")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--p", type=int, default=11)
    p.add_argument("--deltas", default="0,1,2,3")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--control", action="store_true", help="use predicate-true pairs")
    p.add_argument("--statistic", choices=("matched", "quotient"), default="matched")
    p.add_argument("--excess", type=int, default=0, help="extra random units on each side of y")

    p = add("empirical-error", cmd_empirical_error, "pairwise error rate over a corpus")
    p.add_argument("folder", nargs="?")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--ts", default="20:400:20")
    p.add_argument("--via", choices=("oracle", "eval"), default="oracle")

    p = add("bench", cmd_bench, "timing of hash, invert and eval")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--grid", choices=("full", "small"), default="full")
    p.add_argument("--scaling", metavar="TS", help="time eval only, e.g. 256,512,1024,2048")

    p = add("list-curve", cmd_list_curve, "log2 of the list-size lower bound")
    p.add_argument("--ns", default="784,4096,16384,50176")
    p.add_argument("--t-min", type=int)
    p.add_argument("--t-max", type=int, default=266)

    p = add("transform", cmd_transform, "brightness or contrast adjustment")
    p.add_argument("image")
    p.add_argument("--kind", choices=("brightness", "contrast"), required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("-o", "--output", required=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.q is None and args.command != "simulate-delta":
        args.q = imaging.Q
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, OSError, UnicodeDecodeError, RuntimeError) as exc:
        print(f"l1pph {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
