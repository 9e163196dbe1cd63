"""Command line interface.

Three subcommands: generate writes synthetic FASTA, analyze runs the
rolling periodicity pipeline on a sequence and emits a CSV or JSON
report, verify cross-checks the analytic kernels on random models.

Exit codes: 0 success, 1 usage or input error, 2 verification failure.
Environment overrides: SMCPERIOD_M_MAX and SMCPERIOD_WARMUP set the
defaults for --m-max and --warmup.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .estimation import EstimationConfig, ZERO_ROW_POLICIES
from .model import VARIANTS
from .periodicity import analyze_sequence
from .report import build_report, write_csv, write_json
from .seqio import (
    GENERATOR_KINDS,
    UNKNOWN_POLICIES,
    GeneratorSpec,
    generate,
    read_sequence,
    write_fasta,
)
from .verify import run_verification

__all__ = ["main", "console_main", "build_parser"]


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; we reserve 2 for verification
    def error(self, message):
        raise _CliError(message)


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise _CliError("environment variable %s=%r is not an integer" % (name, raw))


def _parse_intervals(text: str) -> tuple[tuple[int, int], ...]:
    if not text:
        return ()
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            a, b = part.split("-")
            out.append((int(a), int(b)))
        except ValueError:
            raise _CliError("bad interval %r; expected START-END, e.g. 1500-2000" % part)
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smcperiod",
                     description="Semi-Markov periodicity analysis of symbol sequences.")
    parser.add_argument("--version", action="version", version="smcperiod " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic FASTA sequence")
    gen.add_argument("--kind", choices=GENERATOR_KINDS, required=True)
    gen.add_argument("--length", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--period", type=int, default=3)
    gen.add_argument("--letter", default="A")
    gen.add_argument("--intervals", default="",
                     help="1-indexed inclusive ranges, e.g. 1500-2000,3000-3500")
    gen.add_argument("--width", type=int, default=70, help="FASTA line width")
    gen.add_argument("--out", default="-", help="output path, - for stdout")

    ana = sub.add_parser("analyze", help="periodicity report for a sequence")
    ana.add_argument("input", help="FASTA or plain text path, - for stdin")
    ana.add_argument("--d", type=int, default=3, help="repeat lag (cycle length)")
    ana.add_argument("--s", type=int, default=3, help="coding position modulus")
    ana.add_argument("--m-max", type=int, default=None,
                     help="holding-time truncation (default 30 or SMCPERIOD_M_MAX)")
    ana.add_argument("--warmup", type=int, default=None,
                     help="warm-up cycles (default 10 or SMCPERIOD_WARMUP)")
    ana.add_argument("--k-offset", type=int, default=0,
                     help="extra symbols past each cycle end before re-estimating")
    ana.add_argument("--variant", choices=VARIANTS, default="paper-survival")
    ana.add_argument("--zero-row-policy", choices=ZERO_ROW_POLICIES,
                     default="uniform-offdiagonal")
    ana.add_argument("--keep-censored", action="store_true",
                     help="count the trailing censored run instead of dropping it")
    ana.add_argument("--input-format", choices=("fasta", "plain"), default="fasta")
    ana.add_argument("--record", type=int, default=0, help="FASTA record index")
    ana.add_argument("--policy", choices=UNKNOWN_POLICIES, default="skip-unknown",
                     help="how to treat symbols outside ACGT")
    ana.add_argument("--format", choices=("csv", "json"), default="csv")
    ana.add_argument("--out", default="-", help="output path, - for stdout")

    ver = sub.add_parser("verify", help="cross-check closed-form kernels")
    ver.add_argument("--n", "--horizon", dest="horizon", type=int, default=12,
                     help="largest interval length checked; 0 checks only the identity at n=0")
    ver.add_argument("--nh-horizon", type=int, default=None)
    ver.add_argument("--models", type=int, default=20)
    ver.add_argument("--nh-models", type=int, default=10)
    ver.add_argument("--m-max", type=int, default=6)
    ver.add_argument("--seed", type=int, default=20260814)
    ver.add_argument("--perturb", type=float, default=0.0,
                     help="inject this much error (harness self-test)")
    return parser


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _cmd_generate(args) -> int:
    spec = GeneratorSpec(kind=args.kind, length=args.length, seed=args.seed,
                         period=args.period, letter=args.letter,
                         intervals=_parse_intervals(args.intervals))
    seq = generate(spec)
    handle, close = _open_out(args.out)
    try:
        write_fasta(seq, handle, header=spec.header(), width=args.width)
    finally:
        if close:
            handle.close()
    return 0


def _cmd_analyze(args) -> int:
    m_max = args.m_max if args.m_max is not None else _env_int("SMCPERIOD_M_MAX", 30)
    warmup = args.warmup if args.warmup is not None else _env_int("SMCPERIOD_WARMUP", 10)
    config = EstimationConfig(s=args.s, m_max=m_max,
                              zero_row_policy=args.zero_row_policy,
                              drop_censored_final_run=not args.keep_censored)
    if args.input == "-":
        seq = read_sequence(sys.stdin, fmt=args.input_format, policy=args.policy,
                            record=args.record)
    else:
        seq = read_sequence(args.input, fmt=args.input_format, policy=args.policy,
                            record=args.record)
    analysis = analyze_sequence(seq, d=args.d, config=config, variant=args.variant,
                                warmup_cycles=warmup, k_offset=args.k_offset)
    meta = {"sequence": seq.name or args.input, "length": len(seq),
            "s": args.s, "m_max": m_max, "warmup_cycles": warmup,
            "k_offset": args.k_offset, "zero_row_policy": args.zero_row_policy,
            "censored_final_run": "kept" if args.keep_censored else "dropped",
            "unknown_policy": args.policy,
            "n_cycles": len(analysis.models)}
    report = build_report(analysis, metadata=meta)
    handle, close = _open_out(args.out)
    try:
        if args.format == "csv":
            write_csv(report, handle)
        else:
            write_json(report, handle)
    finally:
        if close:
            handle.close()
    return 0


def _cmd_verify(args) -> int:
    result = run_verification(horizon=args.horizon, n_models=args.models,
                              n_nh_models=args.nh_models, nh_horizon=args.nh_horizon,
                              seed=args.seed, m_max=args.m_max, perturb=args.perturb)
    print(result.summary())
    return 0 if result.ok else 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_verify(args)
    except _CliError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except BrokenPipeError:
        # downstream consumer (e.g. head) closed the pipe; not our error
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
