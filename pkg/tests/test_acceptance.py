"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (visible with `pytest -s tests/test_acceptance.py`).

Criterion 5, the absolute Eb/N0 threshold reproduction, needs hours of
simulation and is therefore shipped as scripts/reproduce_thresholds.py;
it appears here as an explicit skip so the criterion list stays complete.
"""

import math
import os

import numpy as np
import pytest

from ldpclab import (
    DecoderVariant,
    Modulation,
    SparseParityCheck,
    builtin_ids,
    decode,
    encode,
    load_alist,
    load_builtin,
    optimize_parameter,
    serialize_alist,
    svs_alpha,
    syndrome,
)
from ldpclab.sim import ROUND_FRAMES, FrameEvaluator, SimConfig, emit_csv, run_ber_sweep
from ldpclab.decoder import _check_step_minsum, _check_step_spa, _runtime
from tests.test_decoder import _random_disjoint_graph, bitwise_map_llrs
from tests.test_sim import ALL_VARIANTS, toy_config


def _report(number: int, ok: bool, detail: str):
    print(f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


# ---------------------------------------------------------------------------
# 1. staircase schedule
# ---------------------------------------------------------------------------

def test_criterion_1_svs_schedule():
    opening = [svs_alpha(i, 1) for i in (1, 2, 3, 4)]
    ok = opening == [0.5, 0.75, 0.875, 0.9375]
    for s in (7, 10, 13):
        for i in range(1, 8 * s + 1):
            block = (i - 1) // s  # 0-based staircase level
            ok = ok and svs_alpha(i, s) == 1.0 - 2.0 ** (-(block + 1))
        # each value held for exactly s iterations
        for block in range(8):
            vals = {svs_alpha(i, s)
                    for i in range(block * s + 1, (block + 1) * s + 1)}
            ok = ok and len(vals) == 1
        ok = ok and svs_alpha(32 * s + 1, s) == 1.0
    _report(1, ok, f"staircase schedule exact, opening {opening}")


# ---------------------------------------------------------------------------
# 2. sum-product equals bitwise MAP on cycle-free graphs
# ---------------------------------------------------------------------------

TREE_CODES = (
    SparseParityCheck(3, [[0, 1, 2]]),
    SparseParityCheck(4, [[0, 1], [1, 2], [2, 3]]),
    SparseParityCheck(5, [[0, 1, 2], [2, 3, 4]]),
    SparseParityCheck(7, [[0, 1, 2], [0, 3, 4], [0, 5, 6]]),
    SparseParityCheck(12, [[0, 1, 2, 3], [3, 4, 5], [5, 6, 7],
                           [1, 8, 9], [9, 10, 11]]),
    SparseParityCheck(16, [[0, 1, 2], [2, 3, 4, 5], [5, 6, 7],
                           [7, 8, 9, 10], [10, 11, 12], [12, 13, 14, 15]]),
)


def _is_forest(code: SparseParityCheck) -> bool:
    parent = list(range(code.n_vars + code.n_checks))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for m in range(code.n_checks):
        for v in code.check_adj(m):
            ra, rb = find(code.n_vars + m), find(int(v))
            if ra == rb:
                return False
            parent[ra] = rb
    return True


def _enumerate_codewords(code: SparseParityCheck) -> np.ndarray:
    words = np.arange(1 << code.n_vars, dtype=np.int64)
    bits = ((words[:, None] >> np.arange(code.n_vars)) & 1).astype(np.int8)
    keep = np.ones(words.size, dtype=bool)
    for m in range(code.n_checks):
        keep &= bits[:, code.check_adj(m)].sum(axis=1) % 2 == 0
    return bits[keep]


def test_criterion_2_map_oracle_equivalence():
    rng = np.random.default_rng(2024)
    sigma = 1.4
    worst = 0.0
    guard = 0.0
    for code in TREE_CODES:
        assert _is_forest(code)
        assert code.n_vars <= 16
        codewords = _enumerate_codewords(code)
        for _ in range(100):
            cw = codewords[rng.integers(0, len(codewords))]
            tx = 1.0 - 2.0 * cw
            u = tx + rng.normal(0.0, sigma, code.n_vars)
            llr = 2.0 * u / sigma**2
            res = decode(llr, code, DecoderVariant.spa(),
                         max_iterations=2 * code.n_vars, early_stop=False)
            ref = bitwise_map_llrs(code, llr)
            worst = max(worst, float(np.max(np.abs(res.posterior - ref))))
            guard = max(guard, float(np.max(np.abs(ref))))
    # the fixture must stay clear of the saturation/clamp regime where the
    # tanh representation itself cannot resolve 1e-9
    assert guard < 18.0, f"fixture outside the comparable regime: {guard}"
    _report(2, worst < 1e-9,
            f"{len(TREE_CODES)} tree codes x100 realizations, "
            f"max |posterior - MAP| = {worst:.3g}")


# ---------------------------------------------------------------------------
# 3. batch kernels equal the per-edge rules
# ---------------------------------------------------------------------------

def test_criterion_3_kernel_equivalence():
    rng = np.random.default_rng(31337)
    code = _random_disjoint_graph(rng, 100_000)
    rt = _runtime(code)
    q = rng.uniform(-8.0, 8.0, code.n_edges)
    q[rng.integers(0, code.n_edges, 200)] = 0.0       # sign(0) handling
    dup = rng.integers(0, code.n_edges - 1, 200)
    q[dup + 1] = q[dup]                               # magnitude ties
    r_ms = _check_step_minsum(q, rt)
    r_spa = _check_step_spa(q, rt)

    t = np.tanh(np.abs(q) / 2.0)
    sgn = np.where(q < 0, -1.0, 1.0)
    mag = np.abs(q)
    ms_ok = True
    spa_worst = 0.0
    checked = 0
    for d, edge_ids in rt.degree_groups:
        vals_sgn = sgn[edge_ids]
        vals_mag = mag[edge_ids]
        vals_t = t[edge_ids]
        cols = np.arange(d)
        for j in range(d):
            sel = cols != j
            naive_ms = (vals_sgn[:, sel].prod(axis=1)
                        * vals_mag[:, sel].min(axis=1))
            ms_ok = ms_ok and np.array_equal(r_ms[edge_ids[:, j]], naive_ms)
            prod = np.clip(np.prod(vals_t[:, sel], axis=1),
                           -1 + 1e-12, 1 - 1e-12)
            naive_spa = vals_sgn[:, sel].prod(axis=1) * 2 * np.arctanh(prod)
            spa_worst = max(spa_worst, float(
                np.max(np.abs(r_spa[edge_ids[:, j]] - naive_spa))))
            checked += edge_ids.shape[0]
    assert checked == code.n_edges
    _report(3, ms_ok and spa_worst < 1e-12,
            f"{code.n_checks} random message sets: min-sum exact, "
            f"max SPA deviation {spa_worst:.3g}")


# ---------------------------------------------------------------------------
# 4. variant quality ordering on the short rate-1/2 code
# ---------------------------------------------------------------------------

def _one_sided_not_worse(err_better: np.ndarray, err_worse: np.ndarray
                         ) -> tuple[bool, float]:
    """95% one-sided check that BER(better) <= BER(worse) on paired frames."""
    n = min(err_better.size, err_worse.size)
    d = (err_worse[:n] - err_better[:n]).astype(float)
    mean = d.mean()
    sd = d.std(ddof=1) if n > 1 else 0.0
    if sd == 0.0:
        return mean >= 0.0, mean
    z = mean / (sd / math.sqrt(n))
    return z >= -1.645, z


def test_criterion_4_variant_ordering(short_r12):
    workers = int(os.environ.get(
        "LDPCLAB_TEST_WORKERS", str(os.cpu_count() or 1)))
    variants = (
        DecoderVariant.spa(),
        DecoderVariant.svs(10),
        DecoderVariant.scaled(0.9375),
        DecoderVariant.min_sum(),
    )
    cfg = SimConfig(
        code=short_r12, modulation=Modulation(256), variants=variants,
        ebn0_db=(8.4,), master_seed=20260531, stop_frame_errors=100,
        max_frames=400_000, workers=workers,
    )
    target = cfg.stop_frame_errors
    nv = len(variants)
    errors = [[] for _ in range(nv)]
    frame_errors = [0] * nv
    active = [True] * nv
    done = 0
    with FrameEvaluator(cfg) as ev:
        while any(active) and done < cfg.max_frames:
            count = min(ROUND_FRAMES, cfg.max_frames - done)
            active_idx = tuple(i for i in range(nv) if active[i])
            res = ev.evaluate(0, done, count, active_idx)
            for vi, v in enumerate(active_idx):
                errors[v].extend(res[vi, :, 0].tolist())
                frame_errors[v] += int(np.count_nonzero(res[vi, :, 0]))
                if frame_errors[v] >= target:
                    active[v] = False
            done += count
    per_var = [np.asarray(e, dtype=np.int64) for e in errors]
    assert all(fe >= target for fe in frame_errors), (
        f"frame-error targets not reached within {cfg.max_frames} frames: "
        f"{frame_errors}"
    )
    k = short_r12.descriptor.k
    bers = [e.sum() / (e.size * k) for e in per_var]
    labels = [v.label for v in variants]
    ok = True
    detail = []
    for a, b in ((0, 1), (1, 2), (2, 3)):
        passed, z = _one_sided_not_worse(per_var[a], per_var[b])
        ok = ok and passed
        detail.append(f"{labels[a]}<={labels[b]} (z={z:.2f})")
    _report(4, ok,
            "8.4 dB, >=100 frame errors each: "
            + ", ".join(f"{lab}: ber={ber:.3g} ({e.size} frames)"
                        for lab, ber, e in zip(labels, bers, per_var))
            + " | " + ", ".join(detail))


# ---------------------------------------------------------------------------
# 5. absolute Eb/N0 thresholds (long-running, shipped as a script)
# ---------------------------------------------------------------------------

@pytest.mark.skip(reason=(
    "multi-hour Monte-Carlo gate; run scripts/reproduce_thresholds.py "
    "(documented in README) to check the 8.24/8.85 dB +-0.20 targets"
))
def test_criterion_5_threshold_reproduction():
    pass


# ---------------------------------------------------------------------------
# 6. determinism of sweeps
# ---------------------------------------------------------------------------

def test_criterion_6_determinism(toysim):
    cfg1 = toy_config(toysim, workers=1)
    a = emit_csv(run_ber_sweep(cfg1))
    b = emit_csv(run_ber_sweep(cfg1))
    c = emit_csv(run_ber_sweep(toy_config(toysim, workers=2)))
    ok = a == b == c
    _report(6, ok, f"identical CSV over reruns and worker counts "
                   f"({len(a.splitlines()) - 1} rows)")


# ---------------------------------------------------------------------------
# 7. format fidelity and encoder consistency for every shipped code
# ---------------------------------------------------------------------------

def test_criterion_7_format_fidelity():
    rng = np.random.default_rng(7)
    ok = True
    for code_id in builtin_ids():
        code = load_builtin(code_id)
        text = serialize_alist(code.matrix)
        again = load_alist(text)
        ok = ok and again.equals(code.matrix)
        ok = ok and serialize_alist(again) == text
        k = code.descriptor.k
        infos = rng.integers(0, 2, size=(1000, k), dtype=np.uint8)
        for info in infos:
            good, _ = syndrome(code.matrix, encode(code.table, info))
            if not good:
                ok = False
                break
    _report(7, ok, f"alist round-trip + 1000-frame encoder/syndrome "
                   f"consistency on {len(builtin_ids())} shipped codes")


# ---------------------------------------------------------------------------
# 8. grid-search methodology at desk scale
# ---------------------------------------------------------------------------

def test_criterion_8_optimization_smoke(toysim):
    cfg = toy_config(toysim, max_frames=128, stop_frame_errors=30)
    grid = (0.75, 0.875, 1.0)
    res = optimize_parameter(cfg, "alpha", grid=grid)
    ok = res.best in grid
    ok = ok and res.best == min(
        res.rows, key=lambda r: (r.ber, -r.value)).value
    # rerunning one grid point reproduces its recorded numbers
    again = optimize_parameter(cfg, "alpha", grid=(0.875,)).rows[0]
    recorded = [r for r in res.rows if r.value == 0.875][0]
    ok = ok and (again.bit_errors, again.bits_counted) == (
        recorded.bit_errors, recorded.bits_counted)
    # constructed tie: a noiseless probe gives zero BER everywhere, so the
    # tie-break must choose the largest candidate
    tie_cfg = toy_config(toysim, sigma_override=0.0, max_frames=16,
                         stop_frame_errors=5)
    tie = optimize_parameter(tie_cfg, "alpha", grid=grid)
    ok = ok and all(r.ber == 0.0 for r in tie.rows) and tie.best == 1.0
    single = optimize_parameter(tie_cfg, "step_s", grid=(4,))
    ok = ok and single.best == 4
    _report(8, ok,
            f"grid search returns a member (best alpha {res.best}), "
            f"reruns agree, tie-break chooses the larger value")
