"""Command-line front end.

Subcommands cover the full pipeline: ``simulate`` writes a tx/rx trace
pair, ``analyze`` runs the statistical battery and emits plot-ready CSVs,
``capacity`` reports parameter estimates and capacities (optionally per
RSSI bin), ``recover`` re-identifies corrupted frames with damaged
headers.  Every command is deterministic given its flags; the seed falls
back to the HYBRIDCHAN_SEED environment variable.

Exit codes: 0 success, 1 usage error, 2 trace parse error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import interleaver, recovery, sim, stats
from .capacity import capacity_report
from .runstest import RunsFlag
from .segments import mean_segment_duration, segment_corrupted_frames
from .trace import ChannelParams, ReceiveStatus, Trace, TraceError, TraceFormatError
from .traceio import load_pair, write_trace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse's default exit code for usage errors is 2; we reserve 2
    for trace parse failures, so remap usage errors to 1."""

    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _default_seed() -> int:
    return int(os.environ.get("HYBRIDCHAN_SEED", "0"))


def _add_common_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r", type=float, default=0.0, help="erasure probability")
    p.add_argument("--s", type=float, default=1.0,
                   help="P(error-free | not erased)")
    p.add_argument("--p", type=float, default=0.0,
                   help="bit crossover probability in corrupted frames")
    p.add_argument("--rate", type=float, default=54e6, help="PHY bit rate [bits/s]")
    p.add_argument("--frame-len", type=int, default=8000,
                   help="payload length [bits]")
    p.add_argument("--interval-us", type=int, default=20000,
                   help="inter-packet interval [us]")


def build_parser() -> _Parser:
    parser = _Parser(prog="hybridchan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_sim = sub.add_parser("simulate", help="generate a tx/rx trace pair")
    _add_common_sim_flags(p_sim)
    p_sim.add_argument("--frames", type=int, required=True,
                       help="number of frames")
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--skew-ppm", type=float, default=0.0,
                       help="rx clock rate error [ppm]")
    p_sim.add_argument("--offset-us", type=int, default=0,
                       help="rx clock offset [us]")
    p_sim.add_argument("--jitter-us", type=int, default=0,
                       help="uniform rx timestamp jitter amplitude [us]")
    p_sim.add_argument("--periodic", action="store_true",
                       help="use periodic window noise instead of the hybrid channel")
    p_sim.add_argument("--period", type=int, default=288,
                       help="window spacing for --periodic [bits]")
    p_sim.add_argument("--burst", type=int, default=32,
                       help="window length for --periodic [bits]")
    p_sim.add_argument("--p-burst", type=float, default=0.05,
                       help="flip probability inside windows for --periodic")
    p_sim.add_argument("--out", type=Path, required=True, help="output directory")

    p_an = sub.add_parser("analyze", help="run the statistical pipeline")
    p_an.add_argument("tx_trace", type=Path)
    p_an.add_argument("rx_trace", type=Path)
    p_an.add_argument("--alpha", type=float, default=0.05)
    p_an.add_argument("--seed", type=int, default=None,
                      help="base key for interleaving emulation")
    p_an.add_argument("--no-interleave", action="store_true",
                      help="analyze error vectors in raw (wire) bit order")
    p_an.add_argument("--out", type=Path, required=True)

    p_cap = sub.add_parser("capacity", help="estimate parameters and capacity")
    p_cap.add_argument("tx_trace", type=Path)
    p_cap.add_argument("rx_trace", type=Path)
    p_cap.add_argument("--rssi-bin", type=int, default=1,
                       help="RSSI bin width")
    p_cap.add_argument("--out", type=Path, required=True)

    p_rec = sub.add_parser("recover", help="recover corrupted frames' seq numbers")
    p_rec.add_argument("tx_trace", type=Path)
    p_rec.add_argument("rx_trace", type=Path)
    p_rec.add_argument("--window", type=int, default=recovery.DEFAULT_WINDOW_SIZE,
                       help="clock-fit anchor window size")
    p_rec.add_argument("--candidates", type=int,
                       default=recovery.DEFAULT_MAX_CANDIDATES,
                       help="tx candidates compared per frame")
    p_rec.add_argument("--threshold", type=float,
                       default=recovery.DEFAULT_MATCH_THRESHOLD,
                       help="normalized Hamming distance accept threshold")
    p_rec.add_argument("--scrub", action="store_true",
                       help="ignore stored seqs and score recovery against them")
    p_rec.add_argument("--out", type=Path, required=True)
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    params = ChannelParams(
        r=args.r, s=args.s, p=args.p, rate_bps=args.rate,
        frame_len=args.frame_len, interval_us=args.interval_us,
    )
    config = sim.SimConfig(
        params=params, seed=seed, n_frames=args.frames,
        clock_skew_ppm=args.skew_ppm, clock_offset_us=args.offset_us,
        timestamp_jitter_us=args.jitter_us,
    )
    tx = sim.generate_tx(config)
    if args.periodic:
        rx = sim.apply_periodic_noise(
            tx, args.period, args.burst, args.p_burst, seed,
            clock_skew_ppm=args.skew_ppm, clock_offset_us=args.offset_us,
        )
        noise = (f"periodic period={args.period} burst={args.burst} "
                 f"p_in_burst={args.p_burst}")
    else:
        rx = sim.apply_channel(tx, config)
        noise = f"hybrid r={args.r} s={args.s} p={args.p}"
    args.out.mkdir(parents=True, exist_ok=True)
    write_trace(tx, args.out / "tx.trace")
    write_trace(rx, args.out / "rx.trace")
    print(f"simulated {args.frames} frames ({noise}), seed={seed}")
    print(f"frame_len={args.frame_len} bits, interval={args.interval_us} us, "
          f"rate={args.rate:g} bits/s")
    print(f"wrote {args.out / 'tx.trace'} and {args.out / 'rx.trace'}")
    return EXIT_OK


def _verdict(result) -> str:
    if result.passed is None:
        return result.flag.value
    return "pass" if result.passed else "fail"


def _cmd_analyze(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    trace = load_pair(args.tx_trace, args.rx_trace)
    ev_transform = (
        None
        if args.no_interleave
        else lambda seq, ev: interleaver.whiten_error_vector(ev, seed, seq)
    )
    args.out.mkdir(parents=True, exist_ok=True)

    rows = stats.per_frame_runs_tests(trace, trace, args.alpha, ev_transform)
    segs = segment_corrupted_frames(trace, trace, args.alpha, ev_transform)
    seg_of: dict[int, int] = {}
    for i, seg in enumerate(segs):
        for row in rows:
            if seg.start_frame <= row.seq <= seg.end_frame:
                seg_of[row.seq] = i

    by_seq = {row.seq: row for row in rows}
    frame_rows = []
    for rec in trace.rx:
        row = by_seq.get(rec.seq) if rec.seq is not None else None
        frame_rows.append([
            "?" if rec.seq is None else rec.seq,
            rec.timestamp_us,
            rec.status.value,
            row.n_bit_errors if row else None,
            row.crossover if row else None,
            row.result.z if row else None,
            row.result.p_value if row else None,
            _verdict(row.result) if row else None,
            seg_of.get(rec.seq) if rec.seq is not None else None,
        ])
    _write_csv(
        args.out / "frames.csv",
        ["seq", "timestamp_us", "status", "bit_errors", "crossover",
         "runs_z", "runs_p", "runs_verdict", "segment"],
        frame_rows,
    )

    _write_csv(
        args.out / "segments.csv",
        ["segment", "start_frame", "end_frame", "n_frames", "n_corrupted",
         "duration_s", "pooled_p"],
        [
            [i, seg.start_frame, seg.end_frame, seg.n_frames, seg.n_corrupted,
             seg.duration_us / 1e6, seg.pooled_p]
            for i, seg in enumerate(segs)
        ],
    )

    if rows:
        profile = stats.bit_position_profile(trace, trace, ev_transform)
        profile_rows = [[i, float(f)] for i, f in enumerate(profile)]
    else:
        profile_rows = []
    _write_csv(args.out / "profile.csv", ["position", "error_frequency"],
               profile_rows)

    outcome_report = stats.outcome_iid_tests(trace, segs, args.alpha)
    _write_csv(
        args.out / "outcomes.csv",
        ["outcome", "fraction", "pass_frames", "valid_frames",
         "segments_tested", "excluded"],
        [
            [frac.outcome.value, frac.fraction, frac.n_pass_frames,
             frac.n_valid_frames, frac.n_segments_tested, frac.n_excluded]
            for frac in outcome_report.fractions.values()
        ],
    )

    decided = [r for r in rows if r.result.flag is RunsFlag.NORMAL]
    pass_rate = (
        sum(1 for r in decided if r.result.passed) / len(decided)
        if decided else None
    )
    symmetry = None
    if rows:
        rep = stats.symmetry_report(trace, trace)
        symmetry = {
            "n1": rep.n1, "n0": rep.n0, "mu1": rep.mu1, "se1": rep.se1,
            "mu0": rep.mu0, "se0": rep.se0, "z": rep.z,
            "symmetric": rep.symmetric,
        }
    summary = {
        "alpha": args.alpha,
        "interleave_emulation": not args.no_interleave,
        "n_tx_frames": len(trace.tx),
        "n_rx_frames": len(trace.rx),
        "n_corrupted": len(rows),
        "per_frame_pass_rate": pass_rate,
        "n_segments": len(segs),
        "mean_segment_duration_s": mean_segment_duration(
            segs, trace.meta.interval_us
        ),
        "covered_frames": outcome_report.covered_frames,
        "outcome_pass_fractions": {
            frac.outcome.value: frac.fraction
            for frac in outcome_report.fractions.values()
        },
        "symmetry": symmetry,
    }
    (args.out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"analyzed {len(trace.rx)} rx frames: {len(rows)} corrupted, "
          f"{len(segs)} segments")
    if pass_rate is not None:
        print(f"per-frame runs-test pass rate: {pass_rate:.4f}")
    print(f"reports written to {args.out}")
    return EXIT_OK


def _cmd_capacity(args: argparse.Namespace) -> int:
    trace = load_pair(args.tx_trace, args.rx_trace)
    report = capacity_report(trace, trace, rssi_bin_width=args.rssi_bin)
    args.out.mkdir(parents=True, exist_ok=True)
    if report.per_rssi_bins:
        _write_csv(
            args.out / "capacity.csv",
            ["rssi", "n", "fer", "s_hat", "p_hat", "C_hybrid", "C_erasure",
             "gain"],
            [
                [b.rssi, b.n_frames, b.fer, b.s_hat, b.p_hat, b.hybrid_bps,
                 b.erasure_bps, b.gain]
                for b in report.per_rssi_bins
            ],
        )
    est = report.params
    summary = {
        "n_frames": est.n_frames,
        "r_hat": est.r_hat,
        "s_hat": est.s_hat,
        "p_hat": est.p_hat,
        "fer_hat": est.fer_hat,
        "hybrid_bps": report.hybrid_bps,
        "erasure_bps": report.erasure_bps,
        "gain": report.gain,
        "n_rssi_bins": len(report.per_rssi_bins),
    }
    (args.out / "capacity_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"hybrid capacity:  {report.hybrid_bps:.6g} bits/s")
    print(f"erasure capacity: {report.erasure_bps:.6g} bits/s")
    if report.gain is not None:
        print(f"gain: {report.gain:.4f}")
    if report.per_rssi_bins:
        print(f"per-RSSI bins written to {args.out / 'capacity.csv'}")
    else:
        print("no RSSI data; per-bin section omitted")
    return EXIT_OK


def _cmd_recover(args: argparse.Namespace) -> int:
    trace = load_pair(args.tx_trace, args.rx_trace)
    recovered, summary = recovery.recover_trace(
        trace, trace,
        window_size=args.window,
        max_candidates=args.candidates,
        match_threshold=args.threshold,
        scrub=args.scrub,
    )
    n_ok = sum(1 for rec in trace.rx
               if rec.status is ReceiveStatus.OK and rec.seq is not None)
    if n_ok == 0 and summary.n_attempted:
        print("warning: no error-free frames available; "
              "all corrupted frames unresolved", file=sys.stderr)
    args.out.mkdir(parents=True, exist_ok=True)
    out_trace = Trace(meta=trace.meta, tx=[], rx=recovered.rx)
    write_trace(out_trace, args.out / "recovered.trace")
    print(f"corrupted frames: {summary.n_corrupted}, attempted: "
          f"{summary.n_attempted}, recovered: {summary.n_recovered}, "
          f"unresolved: {summary.n_unresolved}")
    if summary.accuracy is not None:
        print(f"recovery accuracy vs ground truth: {summary.accuracy:.4f}")
    print(f"wrote {args.out / 'recovered.trace'}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "analyze": _cmd_analyze,
    "capacity": _cmd_capacity,
    "recover": _cmd_recover,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except TraceFormatError as exc:
        print(f"hybridchan: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"hybridchan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TraceError as exc:
        print(f"hybridchan: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
