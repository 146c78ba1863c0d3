"""Per-frame and cross-frame error statistics.

Everything here consumes a (tx, rx) trace pair.  Operations that look at
bit positions accept an optional ``ev_transform`` hook, a callable
``(seq, error_vector) -> error_vector`` applied to each corrupted frame's
error vector before analysis; the CLI uses it to inject interleaving
emulation (see interleave.whiten_error_vector).  Statistics that only
count bits (crossover, symmetry) are permutation-invariant and take no
hook.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .runstest import DEFAULT_ALPHA, RunsFlag, RunsTestResult, runs_test
from .trace import FrameRecord, ReceiveStatus, Trace, xor_error_vector

if TYPE_CHECKING:
    from .segments import Segment

EvTransform = Callable[[int, np.ndarray], np.ndarray]

SYMMETRY_Z_THRESHOLD = 1.96


def corrupted_error_vectors(
    tx: Trace, rx: Trace, ev_transform: EvTransform | None = None
) -> list[tuple[int, np.ndarray]]:
    """(seq, error vector) for every corrupted rx frame with a known seq."""
    pairs = []
    for rec in rx.rx:
        if rec.status is not ReceiveStatus.CRC_ERROR or rec.seq is None:
            continue
        ev = xor_error_vector(tx.tx[rec.seq].payload, rec.payload)
        if ev_transform is not None:
            ev = ev_transform(rec.seq, ev)
        pairs.append((rec.seq, ev))
    return pairs


def per_frame_crossover(ev: np.ndarray) -> float:
    """Fraction of corrupted bits in an error vector."""
    ev = np.asarray(ev)
    return float(np.count_nonzero(ev)) / ev.size


def frame_error_runs_test(
    tx: Trace, rx_frame: FrameRecord, alpha: float = DEFAULT_ALPHA
) -> RunsTestResult:
    """Runs test on one corrupted frame's error vector.

    The frame must be a CRC-error reception with a known sequence number.
    An all-zero error vector (corruption confined to headers) comes back
    flagged DEGENERATE rather than as a verdict.
    """
    if rx_frame.status is not ReceiveStatus.CRC_ERROR:
        raise ValueError("frame is not a CRC-error reception")
    if rx_frame.seq is None:
        raise ValueError("frame has no recovered sequence number")
    ev = xor_error_vector(tx.tx[rx_frame.seq].payload, rx_frame.payload)
    return runs_test(ev, alpha)


@dataclass(frozen=True)
class FrameTestRow:
    seq: int
    n_bit_errors: int
    crossover: float
    result: RunsTestResult


def per_frame_runs_tests(
    tx: Trace,
    rx: Trace,
    alpha: float = DEFAULT_ALPHA,
    ev_transform: EvTransform | None = None,
) -> list[FrameTestRow]:
    """Within-frame runs test for every corrupted frame, in trace order."""
    rows = []
    for seq, ev in corrupted_error_vectors(tx, rx, ev_transform):
        rows.append(
            FrameTestRow(
                seq=seq,
                n_bit_errors=int(np.count_nonzero(ev)),
                crossover=per_frame_crossover(ev),
                result=runs_test(ev, alpha),
            )
        )
    return rows


@dataclass(frozen=True)
class SymmetryReport:
    """Flip rates of transmitted 1s and 0s inside corrupted frames.

    mu_i is the mean flip rate of bit value i, se_i its sample standard
    deviation over sqrt(N_i).  A pooled two-proportion z declares the
    channel symmetric when |z| stays below SYMMETRY_Z_THRESHOLD.  Fields
    are None when a bit value never occurs.
    """

    n1: int
    n0: int
    flips1: int
    flips0: int
    mu1: float | None
    se1: float | None
    mu0: float | None
    se0: float | None
    z: float | None
    symmetric: bool | None


def _rate_and_se(flips: int, n: int) -> tuple[float | None, float | None]:
    if n == 0:
        return None, None
    mu = flips / n
    if n < 2:
        return mu, None
    sample_sd = sqrt(mu * (1.0 - mu) * n / (n - 1.0))
    return mu, sample_sd / sqrt(n)


def symmetry_report(tx: Trace, rx: Trace) -> SymmetryReport:
    """Compare flip rates of 1s and 0s over all corrupted frames."""
    pairs = corrupted_error_vectors(tx, rx)
    if not pairs:
        raise ValueError("trace pair contains no corrupted frames")
    n1 = n0 = flips1 = flips0 = 0
    for seq, ev in pairs:
        tx_bits = tx.tx[seq].payload
        ones = tx_bits.astype(bool)
        n_ones = int(np.count_nonzero(ones))
        n1 += n_ones
        n0 += tx_bits.size - n_ones
        flips1 += int(np.count_nonzero(ev[ones]))
        flips0 += int(np.count_nonzero(ev[~ones]))
    mu1, se1 = _rate_and_se(flips1, n1)
    mu0, se0 = _rate_and_se(flips0, n0)
    z: float | None = None
    symmetric: bool | None = None
    if n1 > 0 and n0 > 0:
        pooled = (flips1 + flips0) / (n1 + n0)
        denom = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n0)
        if denom > 0.0:
            z = (mu1 - mu0) / sqrt(denom)
            symmetric = abs(z) < SYMMETRY_Z_THRESHOLD
        else:
            # No flips at all: nothing contradicts symmetry.
            symmetric = True
    return SymmetryReport(
        n1=n1, n0=n0, flips1=flips1, flips0=flips0,
        mu1=mu1, se1=se1, mu0=mu0, se0=se0, z=z, symmetric=symmetric,
    )


@dataclass(frozen=True)
class OutcomeFraction:
    outcome: ReceiveStatus
    fraction: float | None
    n_pass_frames: int
    n_valid_frames: int
    n_segments_tested: int
    n_excluded: int


@dataclass
class OutcomeIidReport:
    fractions: dict[ReceiveStatus, OutcomeFraction]
    covered_frames: int


def outcome_iid_tests(
    rx: Trace,
    segments: Sequence["Segment"],
    alpha: float = DEFAULT_ALPHA,
) -> OutcomeIidReport:
    """Per-outcome runs tests on the frame state sequence inside segments.

    For each outcome class the frames spanned by a segment are labelled 1
    (frame has that outcome) or 0, and the runs test applied per segment.
    The reported fraction weights passing segments by their frame span;
    segments whose label sequence is degenerate or too short to test are
    excluded from both numerator and denominator.  Frames missing from the
    rx side count as PHY errors (a frame never seen is an erasure).
    """
    status_by_seq: dict[int, ReceiveStatus] = {
        rec.seq: rec.status for rec in rx.rx if rec.seq is not None
    }
    fractions: dict[ReceiveStatus, OutcomeFraction] = {}
    covered = sum(seg.n_frames for seg in segments)
    for outcome in ReceiveStatus:
        pass_frames = valid_frames = tested = excluded = 0
        for seg in segments:
            labels = np.fromiter(
                (
                    status_by_seq.get(seq, ReceiveStatus.PHY_ERROR) is outcome
                    for seq in range(seg.start_frame, seg.end_frame + 1)
                ),
                dtype=np.uint8,
                count=seg.n_frames,
            )
            result = runs_test(labels, alpha)
            if result.flag is not RunsFlag.NORMAL:
                excluded += 1
                continue
            tested += 1
            valid_frames += seg.n_frames
            if result.passed:
                pass_frames += seg.n_frames
        fractions[outcome] = OutcomeFraction(
            outcome=outcome,
            fraction=pass_frames / valid_frames if valid_frames else None,
            n_pass_frames=pass_frames,
            n_valid_frames=valid_frames,
            n_segments_tested=tested,
            n_excluded=excluded,
        )
    return OutcomeIidReport(fractions=fractions, covered_frames=covered)


def bit_position_profile(
    tx: Trace, rx: Trace, ev_transform: EvTransform | None = None
) -> np.ndarray:
    """Per-position error frequency over all corrupted frames."""
    pairs = corrupted_error_vectors(tx, rx, ev_transform)
    if not pairs:
        raise ValueError("trace pair contains no corrupted frames")
    total = np.zeros(tx.meta.frame_len, dtype=np.int64)
    for _, ev in pairs:
        total += ev
    return total / len(pairs)
