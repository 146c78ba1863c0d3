"""Sequence-number recovery for corrupted frames.

A corrupted frame's header (and with it the sequence number) may itself be
damaged, but the frame can still be matched to its transmit record: fit an
affine clock model (rate and offset) to the timestamps of nearby
error-free receptions, map the corrupted frame's receive time to a
predicted transmit time, and compare the payload against the few transmit
frames closest to that prediction.  The true frame disagrees on roughly a
fraction p of bits while every other candidate disagrees on about half,
so a Hamming-distance threshold between the two is decisive.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .trace import FrameRecord, ReceiveStatus, Trace

DEFAULT_WINDOW_SIZE = 50
DEFAULT_MAX_CANDIDATES = 5
DEFAULT_MATCH_THRESHOLD = 0.4

# Header-seq agreement within this bit distance breaks payload-distance ties.
SEQ_TIEBREAK_BITS = 2


@dataclass(frozen=True)
class ClockFit:
    """Least-squares affine fit rx_time = rate * tx_time + offset."""

    rate: float
    offset_us: float
    window: tuple[tuple[int, int], ...]
    residual_rms_us: float


def fit_clock(
    anchors: list[tuple[int, int]],
    window_size: int | None = DEFAULT_WINDOW_SIZE,
    query_rx_time_us: int | None = None,
) -> ClockFit:
    """Ordinary least squares over the window_size anchors nearest a query.

    anchors are (tx_time, rx_time) pairs from error-free frames.  With no
    query time, the window centres on the median receive time.  Requires
    at least two anchors with distinct transmit times.
    """
    if len(anchors) < 2:
        raise ValueError("clock fit needs at least two anchors")
    if window_size is not None and len(anchors) > window_size:
        rx_times = np.array([a[1] for a in anchors], dtype=np.float64)
        centre = (
            float(np.median(rx_times))
            if query_rx_time_us is None
            else float(query_rx_time_us)
        )
        nearest = np.argsort(np.abs(rx_times - centre), kind="stable")[:window_size]
        anchors = [anchors[i] for i in sorted(nearest)]
    tx_t = np.array([a[0] for a in anchors], dtype=np.float64)
    rx_t = np.array([a[1] for a in anchors], dtype=np.float64)
    dx = tx_t - tx_t.mean()
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise ValueError("anchors share a single tx time; clock fit is degenerate")
    rate = float(np.dot(dx, rx_t - rx_t.mean())) / sxx
    if rate <= 0.0:
        raise ValueError(f"fitted clock rate {rate} is not positive")
    offset = float(rx_t.mean() - rate * tx_t.mean())
    residuals = rx_t - (rate * tx_t + offset)
    return ClockFit(
        rate=rate,
        offset_us=offset,
        window=tuple((int(a), int(b)) for a, b in anchors),
        residual_rms_us=float(np.sqrt(np.mean(residuals**2))),
    )


def _seq_bit_distance(a: int, b: int) -> int:
    return (a ^ b).bit_count()


def recover_sequence(
    corrupted: FrameRecord,
    rx_ok: list[FrameRecord],
    tx: Trace,
    window_size: int = DEFAULT_WINDOW_SIZE,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    match_threshold: float = DEFAULT_MATCH_THRESHOLD,
) -> int | None:
    """Best-matching tx sequence number for a corrupted frame, or None.

    Payload-distance ties prefer a candidate whose seq lies within
    SEQ_TIEBREAK_BITS of the (possibly damaged) header seq, then the
    candidate closest to the predicted transmit time.
    """
    if corrupted.status is not ReceiveStatus.CRC_ERROR:
        raise ValueError("only CRC-error frames carry a recoverable payload")
    anchors = [
        (tx.tx[rec.seq].timestamp_us, rec.timestamp_us)
        for rec in rx_ok
        if rec.status is ReceiveStatus.OK and rec.seq is not None
    ]
    if len(anchors) < 2:
        return None
    fit = fit_clock(anchors, window_size, query_rx_time_us=corrupted.timestamp_us)
    predicted_tx_us = (corrupted.timestamp_us - fit.offset_us) / fit.rate

    tx_times = np.array([rec.timestamp_us for rec in tx.tx], dtype=np.float64)
    order = np.argsort(np.abs(tx_times - predicted_tx_us), kind="stable")
    candidates = order[:max_candidates]
    if candidates.size == 0:
        return None

    scored = []
    for idx in candidates:
        cand = tx.tx[int(idx)]
        dist = int(np.count_nonzero(cand.payload != corrupted.payload))
        seq_close = (
            corrupted.seq is not None
            and _seq_bit_distance(cand.seq, corrupted.seq) <= SEQ_TIEBREAK_BITS
        )
        time_gap = abs(cand.timestamp_us - predicted_tx_us)
        scored.append((dist, not seq_close, time_gap, cand.seq))
    scored.sort()
    best_dist, _, _, best_seq = scored[0]
    if best_dist / tx.meta.frame_len < match_threshold:
        return best_seq
    return None


@dataclass
class RecoverySummary:
    n_corrupted: int
    n_attempted: int
    n_recovered: int
    n_unresolved: int
    n_correct: int | None = None

    @property
    def accuracy(self) -> float | None:
        if self.n_correct is None or self.n_attempted == 0:
            return None
        return self.n_correct / self.n_attempted


def recover_trace(
    tx: Trace,
    rx: Trace,
    window_size: int = DEFAULT_WINDOW_SIZE,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    match_threshold: float = DEFAULT_MATCH_THRESHOLD,
    scrub: bool = False,
) -> tuple[Trace, RecoverySummary]:
    """Recover sequence numbers across a whole rx trace.

    Normally only corrupted frames with unknown seq are attempted.  With
    scrub=True every corrupted frame is re-identified as if its seq were
    unknown, and the stored values serve as ground truth for the accuracy
    figure.
    """
    rx_ok = [
        rec for rec in rx.rx
        if rec.status is ReceiveStatus.OK and rec.seq is not None
    ]
    summary = RecoverySummary(0, 0, 0, 0, n_correct=0 if scrub else None)
    new_rx = []
    for rec in rx.rx:
        if rec.status is not ReceiveStatus.CRC_ERROR:
            new_rx.append(rec)
            continue
        summary.n_corrupted += 1
        if rec.seq is not None and not scrub:
            new_rx.append(rec)
            continue
        target = replace(rec, seq=None) if scrub else rec
        summary.n_attempted += 1
        recovered = recover_sequence(
            target, rx_ok, tx, window_size, max_candidates, match_threshold
        )
        if recovered is None:
            summary.n_unresolved += 1
            new_rx.append(target)
        else:
            summary.n_recovered += 1
            if scrub and recovered == rec.seq:
                summary.n_correct += 1
            new_rx.append(replace(rec, seq=recovered))
    out = Trace(meta=rx.meta, tx=[], rx=new_rx)
    return out, summary
