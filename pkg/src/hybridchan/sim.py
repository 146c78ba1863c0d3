"""Hybrid BSC/packet-erasure channel simulator.

Each transmitted frame is independently erased (PHY error, probability r),
delivered clean (probability (1-r)*s), or corrupted (probability
(1-r)*(1-s)) with every payload bit flipped independently at crossover
probability p.  A periodic-noise variant concentrates flips inside fixed
windows to synthesize the structured error patterns that interleaving is
supposed to whiten.

All outcomes are drawn from per-frame counter-based streams (see rng), so
a config reproduces bit-identical traces regardless of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .trace import ChannelParams, FrameRecord, ReceiveStatus, Trace, TraceMeta


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters: channel, clock model, and regime changes.

    drift_schedule lists (frame_index, params) change-points applied from
    that frame onward; timestamp_jitter_us adds uniform +/- jitter to rx
    timestamps on top of the affine clock model.
    """

    params: ChannelParams
    seed: int = 0
    n_frames: int = 1
    clock_skew_ppm: float = 0.0
    clock_offset_us: int = 0
    drift_schedule: tuple[tuple[int, ChannelParams], ...] = field(default=())
    timestamp_jitter_us: int = 0

    def __post_init__(self) -> None:
        if self.n_frames <= 0:
            raise ValueError("n_frames must be positive")
        if self.timestamp_jitter_us < 0:
            raise ValueError("timestamp_jitter_us must be non-negative")
        prev = -1
        for idx, _ in self.drift_schedule:
            if not prev < idx < self.n_frames:
                raise ValueError(
                    "drift_schedule indices must be strictly increasing "
                    f"and < n_frames (got {idx})"
                )
            prev = idx

    def params_at(self, frame_index: int) -> ChannelParams:
        current = self.params
        for idx, params in self.drift_schedule:
            if frame_index >= idx:
                current = params
            else:
                break
        return current


def _meta(params: ChannelParams, description: str) -> TraceMeta:
    return TraceMeta(
        rate_bps=params.rate_bps,
        frame_len=params.frame_len,
        interval_us=params.interval_us,
        description=description,
    )


def generate_tx(config: SimConfig) -> Trace:
    """Generate the transmit side: uniform random payloads on a fixed cadence."""
    params = config.params
    tx = [
        FrameRecord(
            seq=k,
            timestamp_us=k * params.interval_us,
            status=ReceiveStatus.OK,
            payload=rng.stream(config.seed, rng.ROLE_TX_PAYLOAD, k).integers(
                0, 2, params.frame_len, dtype=np.uint8
            ),
        )
        for k in range(config.n_frames)
    ]
    return Trace(meta=_meta(params, f"tx seed={config.seed}"), tx=tx)


def _rx_timestamp(config: SimConfig, tx_ts: int, gen: np.random.Generator) -> int:
    ts = tx_ts * (1.0 + config.clock_skew_ppm * 1e-6) + config.clock_offset_us
    if config.timestamp_jitter_us:
        j = config.timestamp_jitter_us
        ts += gen.uniform(-j, j)
    return int(round(ts))


def apply_channel(tx: Trace, config: SimConfig) -> Trace:
    """Run every tx frame through the hybrid channel.

    Every frame yields an rx record: the simulator models no losses other
    than PHY erasures (which keep their timestamp but drop the payload).
    """
    rx: list[FrameRecord] = []
    for rec in tx.tx:
        params = config.params_at(rec.seq)
        gen = rng.stream(config.seed, rng.ROLE_CHANNEL, rec.seq)
        timestamp = _rx_timestamp(config, rec.timestamp_us, gen)
        u_erase = gen.random()
        u_clean = gen.random()
        if u_erase < params.r:
            rx.append(
                FrameRecord(seq=rec.seq, timestamp_us=timestamp,
                            status=ReceiveStatus.PHY_ERROR)
            )
            continue
        if u_clean < params.s:
            status, payload = ReceiveStatus.OK, rec.payload
        else:
            # The corrupted state is decided by the draw, not by whether any
            # flip landed; downstream code treats all-zero error vectors as
            # degenerate rather than clean.
            flips = gen.random(params.frame_len) < params.p
            payload = np.bitwise_xor(rec.payload, flips.astype(np.uint8))
            status = ReceiveStatus.CRC_ERROR
        rx.append(
            FrameRecord(seq=rec.seq, timestamp_us=timestamp,
                        status=status, payload=payload)
        )
    return Trace(meta=_meta(config.params, f"rx seed={config.seed}"), tx=[], rx=rx)


def periodic_window_mask(frame_len: int, period: int, burst_len: int) -> np.ndarray:
    """Boolean mask of the flip-eligible positions: burst_len bits every period."""
    mask = np.zeros(frame_len, dtype=bool)
    for start in range(0, frame_len, period):
        mask[start : start + burst_len] = True
    return mask


def apply_periodic_noise(
    tx: Trace,
    period: int,
    burst_len: int,
    p_in_burst: float,
    seed: int,
    clock_skew_ppm: float = 0.0,
    clock_offset_us: int = 0,
) -> Trace:
    """Corrupt frames with flips confined to periodic windows.

    Bits inside each window flip independently with p_in_burst; bits
    outside never flip.  burst_len == period degenerates to uniform
    Bernoulli flipping.  Frames that draw no flips are received clean.
    """
    frame_len = tx.meta.frame_len
    if not 0 < burst_len <= period <= frame_len:
        raise ValueError("need 0 < burst_len <= period <= frame_len")
    if not 0.0 <= p_in_burst <= 1.0:
        raise ValueError("p_in_burst outside [0, 1]")
    mask = periodic_window_mask(frame_len, period, burst_len)
    window_idx = np.flatnonzero(mask)
    config = SimConfig(
        params=ChannelParams(0.0, 1.0, 0.0, tx.meta.rate_bps, frame_len,
                             tx.meta.interval_us),
        seed=seed,
        n_frames=len(tx.tx),
        clock_skew_ppm=clock_skew_ppm,
        clock_offset_us=clock_offset_us,
    )
    rx: list[FrameRecord] = []
    for rec in tx.tx:
        gen = rng.stream(seed, rng.ROLE_PERIODIC, rec.seq)
        timestamp = _rx_timestamp(config, rec.timestamp_us, gen)
        flips = np.zeros(frame_len, dtype=np.uint8)
        flips[window_idx] = gen.random(window_idx.size) < p_in_burst
        if flips.any():
            payload = np.bitwise_xor(rec.payload, flips)
            status = ReceiveStatus.CRC_ERROR
        else:
            payload, status = rec.payload, ReceiveStatus.OK
        rx.append(
            FrameRecord(seq=rec.seq, timestamp_us=timestamp,
                        status=status, payload=payload)
        )
    return Trace(meta=_meta(config.params, f"rx periodic seed={seed}"), tx=[], rx=rx)
