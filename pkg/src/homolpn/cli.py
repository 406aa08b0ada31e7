"""Command-line front end.

Exit codes: 0 success, 1 criteria failure, 2 input or parameter error,
3 protocol failure (retries exhausted), 4 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .attack import (
    CpaTranscript,
    TooLarge,
    brute_force_recover,
    eliminate_randomness,
    empirical_noise,
    export_lpn,
    noise_lower_bound,
    xor_fold_estimate,
)
from .channel import (
    RANDOM,
    ZERO,
    RecordFormatError,
    RetryExhausted,
    SessionConfig,
    ack_rate,
    read_records,
    run_session,
    write_records,
    write_summary,
)
from .ecc import LinearBlockCode, hamming_7_4
from .gf2 import BitMatrix, BitVec, DimensionError, MatrixFormatError, load_vector, save_vector
from .homophonic import (
    LENIENT,
    STRICT,
    HomophonicCode,
    InfeasibleParams,
    SystemParams,
    build_generic,
    compose,
    infer_split,
    validate,
)
from .keystream import LinearKeystream, random_state_matrix

EXIT_OK = 0
EXIT_CRITERIA = 1
EXIT_INPUT = 2
EXIT_PROTOCOL = 3
EXIT_RESOURCE = 4


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit 2."""


def _load_ecc(spec: str) -> LinearBlockCode:
    if spec == "hamming74":
        return hamming_7_4()
    return LinearBlockCode.load(spec)


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(out: Path, command: str, argv: list[str], params: dict, outputs: list[str]) -> None:
    _write_json(
        out / "manifest.json",
        {
            "command": command,
            "argv": argv,
            "parameters": params,
            "outputs": sorted(outputs),
            "version": __version__,
            "backend": kernels.BACKEND,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    )


def _out_dir(path: str | None) -> Path | None:
    if path is None:
        return None
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_build(args, argv) -> int:
    ecc = _load_ecc(args.ecc)
    params = SystemParams(n=ecc.n, m=args.m, l=args.l, w=args.w)
    code = build_generic(params, ecc, args.target)
    report = validate(code, ecc)
    out = _out_dir(args.out)
    code.g_h.save(out / "GH.txt")
    code.g_h_inv.save(out / "GH_inv.txt")
    compose(code, ecc).save(out / "G.txt")
    _write_json(out / "report.json", report.to_dict())
    outputs = ["GH.txt", "GH_inv.txt", "G.txt", "report.json"]
    _write_manifest(
        out,
        "build",
        argv,
        {"n": ecc.n, "m": args.m, "l": args.l, "w": args.w, "ecc": args.ecc, "target": args.target},
        outputs,
    )
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    ok = report.passes_strict if args.target == STRICT else report.passes_lenient
    return EXIT_OK if ok else EXIT_CRITERIA


def cmd_validate(args, argv) -> int:
    g_h = BitMatrix.load(args.code)
    ecc = _load_ecc(args.ecc)
    l = args.l if args.l is not None else infer_split(g_h)  # noqa: E741
    if l is None:
        raise UsageError("cannot infer l from the matrix layout; pass --l")
    code = HomophonicCode.from_matrix(g_h, l, args.w)
    report = validate(code, ecc)
    payload = report.to_dict()
    print(json.dumps(payload, indent=2, sort_keys=True))
    out = _out_dir(args.out)
    if out is not None:
        _write_json(out / "report.json", payload)
        _write_manifest(out, "validate", argv, {"code": args.code, "ecc": args.ecc, "w": args.w, "l": l}, ["report.json"])
    return EXIT_OK if report.passes_strict else EXIT_CRITERIA


def _session_code(args, ecc: LinearBlockCode) -> HomophonicCode:
    if args.code is not None:
        g_h = BitMatrix.load(args.code)
        l = args.l if args.l is not None else infer_split(g_h)  # noqa: E741
        if l is None:
            raise UsageError("cannot infer l from the matrix layout; pass --l")
        return HomophonicCode.from_matrix(g_h, l, args.w)
    if args.l is None or args.m is None:
        raise UsageError("give either --code or both --l and --m")
    return build_generic(SystemParams(n=ecc.n, m=args.m, l=args.l, w=args.w), ecc)


def cmd_simulate(args, argv) -> int:
    ecc = _load_ecc(args.ecc)
    code = _session_code(args, ecc)
    if code.g_h_inv is None:
        raise UsageError("homophonic matrix is singular")
    n = ecc.n
    s = BitMatrix.load(args.s) if args.s else random_state_matrix(n, args.s_seed if args.s_seed is not None else args.seed + 2)
    if args.key:
        key = load_vector(args.key)
    else:
        key_seed = args.key_seed if args.key_seed is not None else args.seed + 1
        key = BitVec.random(n, np.random.default_rng(key_seed))
    params = SystemParams(n=n, m=code.m, l=code.l, w=code.w, p=args.p)
    cfg = SessionConfig(params, args.seed, args.tau, args.max_retries, args.mode)
    out = _out_dir(args.out)
    try:
        records = run_session(cfg, code, ecc, LinearKeystream(s, key))
    except RetryExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    meta = {"n": n, "m": code.m, "l": code.l, "w": code.w, "p": args.p, "mode": args.mode, "seed": args.seed}
    write_records(records, out / "records.tsv", meta)
    write_summary(records, out / "summary.csv")
    compose(code, ecc).save(out / "G.txt")
    code.g_h.save(out / "GH.txt")
    s.save(out / "S.txt")
    save_vector(key, out / "key.txt")
    stats = {
        "blocks": args.tau,
        "transmissions": len(records),
        "ack_rate": ack_rate(records),
        "max_attempts": max(r.attempts for r in records),
    }
    _write_json(out / "stats.json", stats)
    outputs = ["records.tsv", "summary.csv", "G.txt", "GH.txt", "S.txt", "key.txt", "stats.json"]
    _write_manifest(out, "simulate", argv, {**meta, "tau": args.tau, "max_retries": args.max_retries}, outputs)
    print(json.dumps(stats, sort_keys=True))
    return EXIT_OK


def cmd_attack(args, argv) -> int:
    transcript_path = Path(args.transcript)
    meta, records = read_records(transcript_path)
    if meta.get("mode", ZERO) != ZERO:
        raise UsageError("attack needs a zero-plaintext transcript (simulate --mode zero)")
    here = transcript_path.parent
    g = BitMatrix.load(args.g or here / "G.txt")
    s = BitMatrix.load(args.s or here / "S.txt")
    l = args.l if args.l is not None else int(meta["l"])  # noqa: E741
    p = args.p if args.p is not None else float(meta["p"])
    transcript = CpaTranscript.from_records(records, g, s, p, limit=args.limit)
    instance = eliminate_randomness(transcript, l)
    result = {
        "n": instance.n,
        "tau": instance.tau,
        "equations": len(instance),
        "epsilon_bound": instance.epsilon_bound,
        "w_effective": instance.w_effective,
        "degenerate_samples": len(instance.degenerate),
    }
    true_key = load_vector(args.true_key) if args.true_key else None
    if true_key is not None:
        result["empirical_noise"] = empirical_noise(instance, true_key)
    if args.recover:
        try:
            key, agreement = brute_force_recover(instance)
        except TooLarge as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
        result["recovered_key"] = key.to_str()
        result["agreement"] = agreement
        if true_key is not None:
            result["key_correct"] = key == true_key
    outputs = []
    out = _out_dir(args.out)
    if args.export:
        Path(args.export).parent.mkdir(parents=True, exist_ok=True)
        export_lpn(instance, args.export)
        if out is not None and Path(args.export).resolve().parent == out.resolve():
            outputs.append(Path(args.export).name)
    if out is not None:
        _write_json(out / "attack.json", result)
        outputs.append("attack.json")
        _write_manifest(out, "attack", argv, {"transcript": str(transcript_path), "l": l, "p": p, "limit": args.limit}, outputs)
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def _float_grid(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_grid(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def noise_curve_rows(p_grid, w_grid, trials: int, seed: int) -> list[dict]:
    grid = [(p, w) for p in p_grid for w in w_grid]
    seeds = np.random.SeedSequence(seed).spawn(len(grid))
    rows = []
    for (p, w), ss in zip(grid, seeds):
        formula = noise_lower_bound(p, w)
        emp = xor_fold_estimate(p, w + 1, trials, ss)
        rows.append({"p": p, "w": w, "formula_pw": formula, "empirical_pw": emp, "abs_error": abs(emp - formula)})
    return rows


def cmd_noise_curve(args, argv) -> int:
    p_grid, w_grid = _float_grid(args.p_grid), _int_grid(args.w_grid)
    if not p_grid or not w_grid:
        raise UsageError("grids must be non-empty")
    rows = noise_curve_rows(p_grid, w_grid, args.trials, args.seed)
    out = _out_dir(args.out)
    with open(out / "noise_curve.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["p", "w", "formula_pw", "empirical_pw", "abs_error"])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    _write_manifest(
        out, "noise-curve", argv, {"p_grid": p_grid, "w_grid": w_grid, "trials": args.trials, "seed": args.seed}, ["noise_curve.csv"]
    )
    print(f"wrote {len(rows)} rows to {out / 'noise_curve.csv'}")
    return EXIT_OK


def cmd_replay(args, argv) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    old = list(manifest["argv"])
    if args.out:
        if "--out" in old:
            prev = Path(old[old.index("--out") + 1])
            # outputs placed inside the old directory (e.g. --export) follow it
            for i, item in enumerate(old):
                path = Path(item)
                if path == prev or prev in path.parents:
                    old[i] = str(Path(args.out) / path.relative_to(prev))
        else:
            old += ["--out", args.out]
    return main(old)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _probability(text: str) -> float:
    value = float(text)
    if not 0 <= value < 0.5:
        raise argparse.ArgumentTypeError(f"probability must be in [0, 0.5), got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homolpn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a homophonic encoder and its criteria report")
    p.add_argument("--l", type=int, required=True, help="plaintext bits per block")
    p.add_argument("--m", type=int, required=True, help="ECC message length")
    p.add_argument("--w", type=int, required=True, help="weight parameter")
    p.add_argument("--ecc", default="hamming74", help="generator file or 'hamming74'")
    p.add_argument("--target", choices=[STRICT, LENIENT], default=STRICT, help="rank threshold w+1 or w")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("validate", help="check an encoder matrix against the design criteria")
    p.add_argument("--code", required=True, help="G_H matrix file")
    p.add_argument("--ecc", default="hamming74")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--l", type=int, help="plaintext bits (inferred from the layout if omitted)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run an ARQ session over a BSC")
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--tau", type=int, required=True, help="blocks to deliver")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[ZERO, RANDOM], default=ZERO)
    p.add_argument("--ecc", default="hamming74")
    p.add_argument("--code", help="G_H matrix file (else built from --l/--m/--w)")
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--w", type=int, default=1)
    p.add_argument("--key", help="key vector file")
    p.add_argument("--key-seed", type=int, help="seed for a random key (default seed+1)")
    p.add_argument("--s", help="state matrix file")
    p.add_argument("--s-seed", type=int, help="seed for a random state matrix (default seed+2)")
    p.add_argument("--max-retries", type=int, default=32)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attack", help="reduce a zero-plaintext transcript to LPN")
    p.add_argument("--transcript", required=True, help="records.tsv written by simulate")
    p.add_argument("--g", help="public G matrix (default: G.txt next to the transcript)")
    p.add_argument("--s", help="public S matrix (default: S.txt next to the transcript)")
    p.add_argument("--l", type=int)
    p.add_argument("--p", type=_probability)
    p.add_argument("--limit", type=int, help="use only the first N samples")
    p.add_argument("--true-key", help="key file, to measure empirical noise")
    p.add_argument("--recover", action="store_true", help="exhaustive key search (n <= 24)")
    p.add_argument("--export", help="write the LPN instance as CSV")
    p.add_argument("--out")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("noise-curve", help="formula vs Monte-Carlo noise after XOR folding")
    p.add_argument("--p-grid", default="0.01,0.05,0.1,0.2")
    p.add_argument("--w-grid", default="0,1,2,3")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_noise_curve)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write to this directory instead")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, argv)
    except (UsageError, InfeasibleParams, DimensionError, MatrixFormatError, RecordFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
