"""Hybrid binary-symmetric/packet-erasure channel toolkit.

Simulates 802.11-style frame traces under a three-state channel model
(erased / corrupted / error-free) and runs the statistical pipeline that
validates the model on simulated or imported traces: runs tests,
interleaving emulation, segmentation, flip-rate symmetry, parameter
estimation, and capacity.
"""

from .capacity import (
    CapacityReport,
    ParamEstimate,
    binary_entropy,
    capacity_report,
    erasure_capacity,
    estimate_params,
    hybrid_capacity,
)
from .interleaver import deinterleave, frame_key, interleave, whiten_error_vector
from .recovery import ClockFit, fit_clock, recover_sequence, recover_trace
from .runstest import RunsAccumulator, RunsFlag, RunsTestResult, runs_test
from .segments import Segment, mean_segment_duration, segment_corrupted_frames
from .sim import SimConfig, apply_channel, apply_periodic_noise, generate_tx
from .stats import (
    OutcomeIidReport,
    SymmetryReport,
    bit_position_profile,
    frame_error_runs_test,
    outcome_iid_tests,
    per_frame_crossover,
    per_frame_runs_tests,
    symmetry_report,
)
from .trace import (
    ChannelParams,
    FrameRecord,
    ReceiveStatus,
    Trace,
    TraceError,
    TraceFormatError,
    TraceMeta,
    xor_error_vector,
)
from .traceio import load_pair, read_trace, write_trace

__version__ = "0.1.0"

__all__ = [
    "CapacityReport",
    "ChannelParams",
    "ClockFit",
    "FrameRecord",
    "OutcomeIidReport",
    "ParamEstimate",
    "ReceiveStatus",
    "RunsAccumulator",
    "RunsFlag",
    "RunsTestResult",
    "Segment",
    "SimConfig",
    "SymmetryReport",
    "Trace",
    "TraceError",
    "TraceFormatError",
    "TraceMeta",
    "apply_channel",
    "apply_periodic_noise",
    "binary_entropy",
    "bit_position_profile",
    "capacity_report",
    "deinterleave",
    "erasure_capacity",
    "estimate_params",
    "fit_clock",
    "frame_error_runs_test",
    "frame_key",
    "generate_tx",
    "hybrid_capacity",
    "interleave",
    "load_pair",
    "mean_segment_duration",
    "outcome_iid_tests",
    "per_frame_crossover",
    "per_frame_runs_tests",
    "read_trace",
    "recover_sequence",
    "recover_trace",
    "runs_test",
    "segment_corrupted_frames",
    "symmetry_report",
    "whiten_error_vector",
    "write_trace",
    "xor_error_vector",
]
