"""Deterministic Monte-Carlo engine: BER/FER sweeps and grid search of
decoder scaling parameters.

Every frame's randomness is derived from (master_seed, point index, frame
index), with separate streams for the data bits and the channel noise, so
results are bit-identical regardless of worker count or scheduling.  All
configured decoder variants see the same demodulated LLR vector per frame
(paired comparison).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import channel as ch
from . import codes
from .decoder import DecoderVariant, decode

# frames per scheduling round; fixed so stopping decisions do not depend on
# the worker count
ROUND_FRAMES = 64

CSV_HEADER = ("variant,ebn0_db,frames,bits_counted,bit_errors,"
              "frame_errors,ber,fer,mean_iterations,low_confidence")


@dataclass(frozen=True)
class SimConfig:
    """Everything a sweep needs; immutable so it can be shipped to workers."""

    code: codes.Code
    modulation: ch.Modulation
    variants: tuple[DecoderVariant, ...]
    ebn0_db: tuple[float, ...]
    master_seed: int
    max_iterations: int = 50
    stop_frame_errors: int = 100
    max_frames: int = 1_000_000
    ber_over: str = "info_bits"
    demapper: str = "exact"
    all_zero: bool = False
    workers: int = 1
    sigma_override: float | None = None  # diagnostic hook; 0 = noiseless

    def __post_init__(self):
        if not self.ebn0_db:
            raise ValueError("ebn0_db list must not be empty")
        if not self.variants:
            raise ValueError("variants list must not be empty")
        if self.stop_frame_errors < 1:
            raise ValueError("stop_frame_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a non-negative integer")
        if self.ber_over not in ("info_bits", "all_bits"):
            raise ValueError(f"bad ber_over {self.ber_over!r}")
        if self.demapper not in ("exact", "maxlog"):
            raise ValueError(f"bad demapper {self.demapper!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.code.matrix.n_vars % self.modulation.bits_per_symbol:
            raise ValueError(
                f"codeword length {self.code.matrix.n_vars} is not a "
                f"multiple of {self.modulation.bits_per_symbol} bits/symbol"
            )
        if self.all_zero and self.modulation.order != 2:
            raise ValueError(
                "all-zero transmission is a BPSK-only diagnostic; QAM "
                "sweeps need randomly encoded data"
            )
        if not self.all_zero and self.code.table is None:
            raise ValueError(
                "code has no encoding table; only all_zero BPSK runs can "
                "use a bare matrix"
            )

    def counted_bits(self) -> slice:
        if self.ber_over == "info_bits":
            return slice(0, self.code.descriptor.k)
        return slice(0, self.code.matrix.n_vars)

    def params_for(self, point_index: int) -> ch.ChannelParams:
        p = ch.ebn0_to_params(
            self.ebn0_db[point_index], self.code.descriptor.rate,
            self.modulation,
        )
        if self.sigma_override is not None:
            s = float(self.sigma_override)
            return ch.ChannelParams(p.ebn0_db, p.rate, 2.0 * s * s, s)
        return p


@dataclass
class BerPoint:
    """One (variant, Eb/N0) operating point of a sweep."""

    variant: str
    ebn0_db: float
    frames: int
    bits_counted: int
    bit_errors: int
    frame_errors: int
    mean_iterations: float
    low_confidence: bool

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_counted if self.bits_counted else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0


# ---------------------------------------------------------------------------
# Frame evaluation
# ---------------------------------------------------------------------------

def _frame_channel(config: SimConfig, point_index: int, frame_index: int
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Transmit one frame: returns (codeword, demodulated LLR vector)."""
    params = config.params_for(point_index)
    ss = np.random.SeedSequence(
        [config.master_seed, point_index, frame_index]
    )
    bits_ss, noise_ss = ss.spawn(2)
    if config.all_zero:
        cw = np.zeros(config.code.matrix.n_vars, dtype=np.uint8)
    else:
        info = np.random.default_rng(bits_ss).integers(
            0, 2, size=config.code.descriptor.k, dtype=np.uint8
        )
        cw = codes.encode(config.code.table, info)
    sym = ch.modulate(cw, config.modulation)
    noisy = ch.awgn(sym, params, np.random.default_rng(noise_ss))
    llr = ch.demap_llr(noisy, config.modulation, params,
                       max_log=config.demapper == "maxlog")
    return cw, llr


def run_frame(config: SimConfig, point_index: int, frame_index: int
              ) -> list[tuple[int, bool, int]]:
    """Decode one frame with every variant on the identical LLR vector.

    Returns one (bit_errors, frame_error, iterations) tuple per variant,
    with errors counted over the configured bit set.
    """
    cw, llr = _frame_channel(config, point_index, frame_index)
    sel = config.counted_bits()
    ref = cw[sel]
    out = []
    for variant in config.variants:
        res = decode(llr, config.code.matrix, variant,
                     max_iterations=config.max_iterations)
        nerr = int(np.count_nonzero(res.bits[sel] != ref))
        out.append((nerr, nerr > 0, res.iterations_used))
    return out


def _eval_range(config: SimConfig, point_index: int, start: int, count: int,
                active_idx: tuple[int, ...]) -> np.ndarray:
    """Frames [start, start+count) for the given variants.

    Returns int64 array of shape (len(active_idx), count, 2) holding
    (bit_errors, iterations); frame errors are bit_errors > 0.
    """
    sel = config.counted_bits()
    out = np.zeros((len(active_idx), count, 2), dtype=np.int64)
    for f in range(count):
        cw, llr = _frame_channel(config, point_index, start + f)
        ref = cw[sel]
        for vi, v in enumerate(active_idx):
            res = decode(llr, config.code.matrix, config.variants[v],
                         max_iterations=config.max_iterations)
            out[vi, f, 0] = np.count_nonzero(res.bits[sel] != ref)
            out[vi, f, 1] = res.iterations_used
    return out


_WORKER_CONFIG: SimConfig | None = None


def _worker_init(config: SimConfig):
    global _WORKER_CONFIG
    _WORKER_CONFIG = config


def _worker_eval(point_index: int, start: int, count: int,
                 active_idx: tuple[int, ...]) -> np.ndarray:
    return _eval_range(_WORKER_CONFIG, point_index, start, count, active_idx)


class FrameEvaluator:
    """Evaluates frame ranges, optionally across a process pool.

    Splitting work over workers never changes the numbers: frames are
    seeded individually and results are concatenated in frame order.
    """

    def __init__(self, config: SimConfig, workers: int | None = None):
        self.config = config
        self.workers = config.workers if workers is None else workers
        self._pool = None
        if self.workers > 1:
            self._pool = ProcessPoolExecutor(
                max_workers=self.workers,
                initializer=_worker_init, initargs=(config,),
            )

    def evaluate(self, point_index: int, start: int, count: int,
                 active_idx: tuple[int, ...] | None = None) -> np.ndarray:
        if active_idx is None:
            active_idx = tuple(range(len(self.config.variants)))
        if self._pool is None:
            return _eval_range(self.config, point_index, start, count,
                               active_idx)
        chunk = math.ceil(count / self.workers)
        futures = []
        offset = 0
        while offset < count:
            size = min(chunk, count - offset)
            futures.append(self._pool.submit(
                _worker_eval, point_index, start + offset, size, active_idx
            ))
            offset += size
        return np.concatenate([f.result() for f in futures], axis=1)

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _counted_bits_per_frame(config: SimConfig) -> int:
    sel = config.counted_bits()
    return sel.stop - sel.start


def _run_point(config: SimConfig, point_index: int,
               evaluator: FrameEvaluator) -> list[BerPoint]:
    """Accumulate frames for one Eb/N0 point until each variant has either
    reached the frame-error target or the frame budget."""
    nv = len(config.variants)
    frames = [0] * nv
    bit_errors = [0] * nv
    frame_errors = [0] * nv
    iter_sum = [0] * nv
    active = [True] * nv
    done = 0
    while done < config.max_frames and any(active):
        count = min(ROUND_FRAMES, config.max_frames - done)
        active_idx = tuple(i for i in range(nv) if active[i])
        res = evaluator.evaluate(point_index, done, count, active_idx)
        for vi, v in enumerate(active_idx):
            frames[v] += count
            bit_errors[v] += int(res[vi, :, 0].sum())
            frame_errors[v] += int(np.count_nonzero(res[vi, :, 0]))
            iter_sum[v] += int(res[vi, :, 1].sum())
            if frame_errors[v] >= config.stop_frame_errors:
                active[v] = False
        done += count
    per_frame = _counted_bits_per_frame(config)
    return [
        BerPoint(
            variant=config.variants[v].label,
            ebn0_db=config.ebn0_db[point_index],
            frames=frames[v],
            bits_counted=frames[v] * per_frame,
            bit_errors=bit_errors[v],
            frame_errors=frame_errors[v],
            mean_iterations=iter_sum[v] / frames[v] if frames[v] else 0.0,
            low_confidence=frame_errors[v] < config.stop_frame_errors,
        )
        for v in range(nv)
    ]


def run_ber_sweep(config: SimConfig) -> list[BerPoint]:
    """Full sweep over the configured Eb/N0 list, all variants paired.

    The returned points are grouped by variant, then ordered by Eb/N0.
    """
    by_point = []
    with FrameEvaluator(config) as evaluator:
        for pi in range(len(config.ebn0_db)):
            by_point.append(_run_point(config, pi, evaluator))
    return [
        by_point[pi][v]
        for v in range(len(config.variants))
        for pi in range(len(config.ebn0_db))
    ]


# ---------------------------------------------------------------------------
# Parameter grid search
# ---------------------------------------------------------------------------

DEFAULT_ALPHA_GRID = tuple(i / 16 for i in range(8, 17))
DEFAULT_STEP_GRID = tuple(range(1, 21))


@dataclass
class OptimizationRow:
    value: float | int
    points: tuple[BerPoint, ...]
    bit_errors: int
    bits_counted: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_counted if self.bits_counted else 0.0


@dataclass
class OptimizationResult:
    kind: str                       # "alpha" or "step_s"
    grid: tuple
    rows: tuple[OptimizationRow, ...]
    best: float | int


def optimize_parameter(config: SimConfig, kind: str, grid=None
                       ) -> OptimizationResult:
    """Grid search for the scaling parameter with the lowest BER.

    Each grid value is simulated over the configured probe Eb/N0 list with
    the same master seed, so every candidate sees the same noise.  BER is
    aggregated over all probe points; ties break toward the larger value
    (closer to no scaling).
    """
    if kind == "alpha":
        grid = DEFAULT_ALPHA_GRID if grid is None else tuple(grid)
        make = DecoderVariant.scaled
    elif kind == "step_s":
        grid = DEFAULT_STEP_GRID if grid is None else tuple(int(g) for g in grid)
        make = DecoderVariant.svs
    else:
        raise ValueError(f"kind must be 'alpha' or 'step_s', got {kind!r}")
    if not grid:
        raise ValueError("grid must not be empty")
    rows = []
    for value in grid:
        cfg = replace(config, variants=(make(value),))
        points = run_ber_sweep(cfg)
        rows.append(OptimizationRow(
            value=value,
            points=tuple(points),
            bit_errors=sum(p.bit_errors for p in points),
            bits_counted=sum(p.bits_counted for p in points),
        ))
    best_row = min(rows, key=lambda r: (r.ber, -r.value))
    return OptimizationResult(
        kind=kind, grid=tuple(grid), rows=tuple(rows), best=best_row.value
    )


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_csv(points) -> str:
    """Render points in the fixed sweep schema (LF endings, 6 significant
    digits for floating values)."""
    lines = [CSV_HEADER]
    for p in points:
        lines.append(",".join([
            p.variant,
            _fmt(p.ebn0_db),
            str(p.frames),
            str(p.bits_counted),
            str(p.bit_errors),
            str(p.frame_errors),
            _fmt(p.ber),
            _fmt(p.fer),
            _fmt(p.mean_iterations),
            str(int(p.low_confidence)),
        ]))
    return "\n".join(lines) + "\n"


def load_csv(text) -> list[BerPoint]:
    """Parse emit_csv output back into points.

    Integer fields reproduce exactly; ber and fer are recomputed from the
    integer counters (the written columns are redundant).
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("bad CSV header")
    points = []
    for ln in lines[1:]:
        cols = ln.split(",")
        if len(cols) != 10:
            raise ValueError(f"bad CSV row: {ln!r}")
        p = BerPoint(
            variant=cols[0],
            ebn0_db=float(cols[1]),
            frames=int(cols[2]),
            bits_counted=int(cols[3]),
            bit_errors=int(cols[4]),
            frame_errors=int(cols[5]),
            mean_iterations=float(cols[8]),
            low_confidence=bool(int(cols[9])),
        )
        points.append(p)
    return points
