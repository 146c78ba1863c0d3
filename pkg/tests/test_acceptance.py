"""Acceptance suite.

One test per acceptance criterion, each printing a single pass/fail line
(run with ``pytest -s`` to see them all).  Monte-Carlo criteria use fixed
seeds so the whole suite is deterministic; configurations below were
cross-checked against independent oracles (exact binomial moments,
high-precision formula evaluation) before the expected values were frozen.
"""

import json
import time
from math import sqrt

import numpy as np
import pytest

import hybridchan as hc
from hybridchan import rng as hrng
from hybridchan.cli import main as cli_main
from hybridchan.runstest import RunsFlag
from hybridchan.segments import Segment
from hybridchan.stats import corrupted_error_vectors, per_frame_runs_tests

from conftest import make_params, sim_pair
from test_capacity import binned_trace


def report(num: str, name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num:>3}: {status} - {name} ({detail})")


def test_criterion_01_runs_test_formulas():
    seq = np.array([1, 1, 0, 0, 1, 1, 0, 1, 1, 1], dtype=np.uint8)
    start = time.perf_counter()
    res = hc.runs_test(seq)
    elapsed = time.perf_counter() - start
    ok = (
        res.n_runs == 5
        and res.n1 == 7
        and res.n0 == 3
        and abs(res.mu - 5.2) <= 1e-12 * 5.2
        and abs(res.sigma2 - 1.4933333333333333) <= 1e-12 * res.sigma2
        and elapsed < 1e-3
    )
    report("1", "runs-test formulas on 1100110111", ok,
           f"n_runs={res.n_runs} mu={res.mu} sigma2={res.sigma2} "
           f"t={elapsed * 1e6:.0f}us")
    assert ok


def test_criterion_02_calibration():
    start = time.perf_counter()
    rates = {}
    for p in (0.002, 0.01, 0.05):
        n_pass = n_valid = 0
        for i in range(1000):
            gen = hrng.stream(i, hrng.ROLE_CHANNEL, 0)
            seq = (gen.random(8000) < p).astype(np.uint8)
            res = hc.runs_test(seq, alpha=0.05)
            if res.flag is RunsFlag.NORMAL:
                n_valid += 1
                n_pass += res.passed
        rates[p] = n_pass / n_valid
    elapsed = time.perf_counter() - start
    ok = all(0.93 <= r <= 0.97 for r in rates.values()) and elapsed < 30
    report("2", "calibration 95% +/- 2% on i.i.d. Bernoulli", ok,
           f"rates={ {p: round(r, 4) for p, r in rates.items()} } "
           f"t={elapsed:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def periodic_run():
    cfg = hc.SimConfig(params=make_params(frame_len=8000), seed=33,
                       n_frames=5000)
    tx = hc.generate_tx(cfg)
    rx = hc.apply_periodic_noise(tx, period=288, burst_len=32,
                                 p_in_burst=0.05, seed=33)
    return tx, rx


def _decided_rates(rows):
    valid = [r for r in rows if r.result.flag is RunsFlag.NORMAL]
    n_fail = sum(1 for r in valid if not r.result.passed)
    return n_fail / len(valid), 1 - n_fail / len(valid)


def test_criterion_03a_periodic_noise_fails_before_interleaving(periodic_run):
    tx, rx = periodic_run
    start = time.perf_counter()
    fail_rate, _ = _decided_rates(per_frame_runs_tests(tx, rx))
    elapsed = time.perf_counter() - start
    ok = fail_rate >= 0.9 and elapsed < 120
    report("3a", "per-frame runs test fails >=90% before interleaving", ok,
           f"fail_rate={fail_rate:.4f} t={elapsed:.0f}s")
    assert ok


def test_criterion_03b_interleaving_whitens(periodic_run):
    tx, rx = periodic_run
    start = time.perf_counter()
    rows = per_frame_runs_tests(
        tx, rx,
        ev_transform=lambda seq, ev: hc.whiten_error_vector(ev, 33, seq),
    )
    _, pass_rate = _decided_rates(rows)
    elapsed = time.perf_counter() - start
    ok = pass_rate >= 0.9 and elapsed < 120
    report("3b", "per-frame runs test passes >=90% after interleaving", ok,
           f"pass_rate={pass_rate:.4f} t={elapsed:.0f}s")
    assert ok


def test_criterion_04_parameter_recovery():
    counts = {}
    for r, s, p in [(0.1, 0.7, 0.005), (0.02, 0.9, 0.002)]:
        hits = {"r": 0, "s": 0, "p": 0}
        for seed in range(100):
            tx, rx = sim_pair(r=r, s=s, p=p, n_frames=10000, frame_len=400,
                              seed=seed)
            est = hc.estimate_params(tx, rx)
            hits["r"] += abs(est.r_hat - r) <= 3 * est.r_se
            hits["s"] += abs(est.s_hat - s) <= 3 * est.s_se
            hits["p"] += abs(est.p_hat - p) <= 3 * est.p_se
        counts[(r, s, p)] = hits
    ok = all(v >= 99 for hits in counts.values() for v in hits.values())
    report("4", "estimates within 3 SE in >=99/100 seeds", ok,
           "; ".join(f"{cfg}: {hits}" for cfg, hits in counts.items()))
    assert ok


def test_criterion_05_segmentation():
    coverages = []
    for seed in range(100):
        tx, rx = sim_pair(r=0.0, s=0.9577, p=0.003, n_frames=10000,
                          frame_len=2000, seed=seed)
        segs = hc.segment_corrupted_frames(tx, rx)
        total = sum(s.n_corrupted for s in segs)
        coverages.append(max(s.n_corrupted for s in segs) / total)
    median_cov = float(np.median(coverages))

    localized = 0
    base = make_params(r=0.0, s=0.7, p=0.002, frame_len=2000)
    high = make_params(r=0.0, s=0.7, p=0.05, frame_len=2000)
    for seed in range(100):
        cfg = hc.SimConfig(params=base, seed=seed, n_frames=10000,
                           drift_schedule=((5000, high),))
        tx = hc.generate_tx(cfg)
        rx = hc.apply_channel(tx, cfg)
        segs = hc.segment_corrupted_frames(tx, rx)
        seqs = [s for s, _ in corrupted_error_vectors(tx, rx)]
        idx_of = {s: i for i, s in enumerate(seqs)}
        cp_idx = next(i for i, s in enumerate(seqs) if s >= 5000)
        bounds = [idx_of[seg.start_frame] for seg in segs[1:]]
        if bounds and min(abs(b - cp_idx) for b in bounds) <= 50:
            localized += 1

    ok = median_cov >= 0.95 and localized >= 90
    report("5", "dominant segment and change-point localization", ok,
           f"median_coverage={median_cov:.4f} localized={localized}/100")
    assert ok


def test_criterion_06_segment_duration_arithmetic():
    def seg(n):
        return Segment(start_frame=0, end_frame=n - 1, n_frames=n,
                       n_corrupted=n, duration_us=n * 20000, pooled_p=0.001)

    d1 = hc.mean_segment_duration([seg(3865)], 20000)
    d2 = hc.mean_segment_duration([seg(6118)], 20000)
    ok = d1 == 77.3 and d2 == 122.36
    report("6", "segment durations 3865->77.3s and 6118->122.36s", ok,
           f"d1={d1} d2={d2}")
    assert ok


def test_criterion_07_symmetry():
    n_symmetric = 0
    for seed in range(300, 400):
        tx, rx = sim_pair(r=0.0, s=0.5, p=0.005, n_frames=1000,
                          frame_len=1000, seed=seed)
        n_symmetric += hc.symmetry_report(tx, rx).symmetric

    # reference operating point: 54 Mbps, FER 0.0835, crossover 0.0018,
    # 10000 frames, all frame errors CRC
    tx, rx = sim_pair(r=0.0, s=1 - 0.0835, p=0.0018, n_frames=10000,
                      frame_len=8000, seed=3)
    rep = hc.symmetry_report(tx, rx)
    row_ok = (
        0.0016 <= rep.mu1 <= 0.0020
        and 0.0016 <= rep.mu0 <= 0.0020
        and 1.5e-5 <= rep.se1 <= 3.0e-5
        and 1.5e-5 <= rep.se0 <= 3.0e-5
    )
    ok = n_symmetric >= 94 and row_ok
    report("7", "symmetry declared and flip-rate row reproduced", ok,
           f"symmetric={n_symmetric}/100 mu1={rep.mu1:.5f} se1={rep.se1:.2e} "
           f"mu0={rep.mu0:.5f} se0={rep.se0:.2e}")
    assert ok


def test_criterion_08_capacity_formula():
    c = hc.hybrid_capacity(54e6, r=0.0, s=0.0, p=0.0018)
    entropy_ok = hc.binary_entropy(0.5) == 1.0 and hc.binary_entropy(0.0) == 0.0
    gen = np.random.default_rng(88)
    dominated = all(
        hc.hybrid_capacity(54e6, ri, si, pi)
        >= hc.erasure_capacity(54e6, ri, si)
        for ri, si, pi in zip(gen.random(100_000), gen.random(100_000),
                              gen.random(100_000))
    )
    ok = abs(c - 52.97e6) <= 0.02e6 and entropy_ok and dominated
    report("8", "hybrid capacity formula and dominance", ok,
           f"C={c:.6g} H(0.5)={hc.binary_entropy(0.5)} dominance={dominated}")
    assert ok


def test_criterion_09_capacity_gain():
    tx, rx = binned_trace([
        (-70, 20, 80, 10),   # s=0.20, p=0.010
        (-65, 33, 67, 2),    # s=0.33, p=0.002
        (-60, 25, 75, 5),    # s=0.25, p=0.005
    ])
    bins = hc.capacity_report(tx, rx).per_rssi_bins
    gains = {b.rssi: b.gain for b in bins}
    ok = len(bins) == 3 and all(b.gain > 1.0 for b in bins)
    report("9", "gain > 100% for s<=0.33, p<=0.01 bins", ok,
           f"gains={ {k: round(v, 3) for k, v in gains.items()} }")
    assert ok


def test_criterion_10_sequence_recovery():
    start = time.perf_counter()
    acc = {}
    for p, floor in ((0.01, 0.99), (0.05, 0.95)):
        tx, rx = sim_pair(r=0.0, s=0.5, p=p, n_frames=2200, frame_len=2000,
                          seed=42, clock_skew_ppm=50.0,
                          clock_offset_us=10_000, timestamp_jitter_us=50)
        _, summary = hc.recover_trace(tx, rx, scrub=True)
        assert summary.n_attempted >= 1000
        acc[p] = (summary.accuracy, floor)
    elapsed = time.perf_counter() - start
    ok = all(a >= floor for a, floor in acc.values()) and elapsed < 60
    report("10", "sequence recovery under skew/offset/jitter", ok,
           f"accuracy={ {p: round(a, 4) for p, (a, _) in acc.items()} } "
           f"t={elapsed:.0f}s")
    assert ok


def test_criterion_11_outcome_iid_fractions():
    tx, rx = sim_pair(r=0.1, s=0.7, p=0.005, n_frames=10000, frame_len=2000,
                      seed=0)
    segs = hc.segment_corrupted_frames(tx, rx)
    fractions = {
        frac.outcome.value: frac.fraction
        for frac in hc.outcome_iid_tests(rx, segs).fractions.values()
    }
    ok = all(f is not None and f >= 0.8 for f in fractions.values())
    report("11", "outcome i.i.d. pass fractions >= 0.8", ok,
           f"fractions={ {k: round(v, 3) for k, v in fractions.items()} }")
    assert ok


def test_criterion_12_cli_determinism(tmp_path):
    def run_once(tag):
        root = tmp_path / tag
        sim = root / "sim"
        cli_main(["simulate", "--frames", "200", "--frame-len", "500",
                  "--r", "0.1", "--s", "0.6", "--p", "0.01", "--seed", "7",
                  "--skew-ppm", "50", "--offset-us", "10000",
                  "--out", str(sim)])
        cli_main(["analyze", str(sim / "tx.trace"), str(sim / "rx.trace"),
                  "--seed", "7", "--out", str(root / "reports")])
        cli_main(["capacity", str(sim / "tx.trace"), str(sim / "rx.trace"),
                  "--out", str(root / "cap")])
        cli_main(["recover", str(sim / "tx.trace"), str(sim / "rx.trace"),
                  "--scrub", "--out", str(root / "rec")])
        return {
            str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()
        }

    first = run_once("a")
    second = run_once("b")
    ok = first == second and len(first) >= 9
    report("12", "repeated CLI invocations byte-identical", ok,
           f"files={len(first)} identical={first == second}")
    assert ok
