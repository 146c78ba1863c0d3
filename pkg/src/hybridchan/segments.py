"""Partitioning corrupted frames into i.i.d.-consistent segments.

Segmentation is greedy left to right: a segment opens at the first
corrupted frame; each subsequent corrupted frame is appended and the runs
test re-evaluated on the concatenated error sequence; on rejection the
segment closes before the offending frame, which opens the next one.  A
lone wildly different frame therefore ends up as its own one-frame
segment.  Run counts are maintained incrementally across frame boundaries,
so a whole pass is linear in the number of bits while producing exactly
the statistics of testing each concatenation from scratch.

Segment extents are transmit sequence numbers: a segment "spans" every
frame between its first and last corrupted frame, clean frames included,
and its duration is that span times the inter-packet interval.
"""

from __future__ import annotations

from dataclasses import dataclass

from .runstest import DEFAULT_ALPHA, RunsAccumulator
from .stats import EvTransform, corrupted_error_vectors
from .trace import Trace


@dataclass(frozen=True)
class Segment:
    start_frame: int
    end_frame: int
    n_frames: int
    n_corrupted: int
    duration_us: int
    pooled_p: float


def _close(
    seqs: list[int], flips: int, bits: int, interval_us: int
) -> Segment:
    start, end = seqs[0], seqs[-1]
    span = end - start + 1
    return Segment(
        start_frame=start,
        end_frame=end,
        n_frames=span,
        n_corrupted=len(seqs),
        duration_us=span * interval_us,
        pooled_p=flips / bits,
    )


def segment_corrupted_frames(
    tx: Trace,
    rx: Trace,
    alpha: float = DEFAULT_ALPHA,
    ev_transform: EvTransform | None = None,
) -> list[Segment]:
    """Split the corrupted frames of a trace pair into maximal segments.

    Only sequences the runs test can actually reject (non-degenerate,
    above the small-sample cutoff) can close a segment; anything else is
    treated as consistent and appended.
    """
    pairs = corrupted_error_vectors(tx, rx, ev_transform)
    if not pairs:
        return []
    interval_us = tx.meta.interval_us
    segments: list[Segment] = []

    seq0, ev0 = pairs[0]
    acc = RunsAccumulator()
    acc.add(ev0)
    seqs = [seq0]
    flips, bits = int(ev0.sum()), ev0.size

    for seq, ev in pairs[1:]:
        trial = acc.copy()
        trial.add(ev)
        if trial.result(alpha).rejects:
            segments.append(_close(seqs, flips, bits, interval_us))
            acc = RunsAccumulator()
            acc.add(ev)
            seqs = [seq]
            flips, bits = int(ev.sum()), ev.size
        else:
            acc = trial
            seqs.append(seq)
            flips += int(ev.sum())
            bits += ev.size
    segments.append(_close(seqs, flips, bits, interval_us))
    return segments


def mean_segment_duration(
    segments: list[Segment], interval_us: int
) -> float | None:
    """Arithmetic mean of segment durations in seconds; None when empty."""
    if not segments:
        return None
    total_frames = sum(seg.n_frames for seg in segments)
    return total_frames * interval_us / 1e6 / len(segments)
