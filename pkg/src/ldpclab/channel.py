"""Modulation, AWGN, and soft demodulation.

Square QAM is treated as two independent Gray-coded PAM axes: the first
half of each symbol's bit label selects the in-phase level, the second
half the quadrature level (most significant bit first within each half).
The all-zero label sits at the most positive corner, so BPSK maps bit 0
to +1 and bit 1 to -1.  Constellations are normalised to unit average
symbol energy.

Demodulator output follows the convention "positive LLR favours bit 0":
value = log P(bit=0 | y) - log P(bit=1 | y), clipped to +-LLR_MAX.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoder import LLR_MAX

_ORDERS = (2, 4, 16, 64, 256)


def _gray_decode(v: np.ndarray) -> np.ndarray:
    """Invert binary-reflected Gray code (vectorised)."""
    out = v.copy()
    shift = 1
    while shift < 32:
        out ^= out >> shift
        shift *= 2
    return out


class Modulation:
    """Constellation tables for one of the supported QAM orders."""

    def __init__(self, order: int):
        if order not in _ORDERS:
            raise ValueError(
                f"unsupported order {order}; choose one of {_ORDERS}"
            )
        self.order = int(order)
        self.bits_per_symbol = int(np.log2(order))
        # bits per axis: BPSK uses a single real axis
        self.axis_bits = max(1, self.bits_per_symbol // 2)
        m_axis = 1 << self.axis_bits
        labels = np.arange(m_axis, dtype=np.int64)
        ranks = _gray_decode(labels)
        amplitudes = (m_axis - 1) - 2 * ranks
        if order == 2:
            energy = 1.0
        else:
            energy = 2.0 * (m_axis * m_axis - 1) / 3.0
        # level_by_label[v] = axis amplitude of the axis-label integer v
        self.level_by_label = amplitudes / np.sqrt(energy)
        self.level_by_label.setflags(write=False)
        # label bit j (MSB first) of each axis label, for demapping masks
        self._bit0_masks = [
            (labels >> (self.axis_bits - 1 - j)) & 1 == 0
            for j in range(self.axis_bits)
        ]

    def constellation(self) -> np.ndarray:
        """All `order` symbols indexed by the full bit label."""
        if self.order == 2:
            return self.level_by_label.astype(complex)
        h = self.axis_bits
        sym = np.arange(self.order)
        i_lbl = sym >> h
        q_lbl = sym & ((1 << h) - 1)
        return self.level_by_label[i_lbl] + 1j * self.level_by_label[q_lbl]


@dataclass(frozen=True)
class ChannelParams:
    """Noise description for one operating point (unit symbol energy)."""

    ebn0_db: float
    rate: float
    n0: float
    sigma: float  # per real dimension


def ebn0_to_params(ebn0_db: float, rate: float, scheme: Modulation
                   ) -> ChannelParams:
    """Noise level for an Eb/N0 given the code rate and bits per symbol.

    Energy per info bit Eb = Es / (rate * bits_per_symbol) with Es = 1, so
    N0 = 1 / (rate * bits_per_symbol * 10^(ebn0_db/10)).
    """
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    if not np.isfinite(ebn0_db):
        raise ValueError("ebn0_db must be finite")
    n0 = 1.0 / (rate * scheme.bits_per_symbol * 10.0 ** (ebn0_db / 10.0))
    return ChannelParams(
        ebn0_db=float(ebn0_db), rate=float(rate),
        n0=n0, sigma=float(np.sqrt(n0 / 2.0)),
    )


def modulate(bits, scheme: Modulation) -> np.ndarray:
    """Map a bit vector to complex symbols, bits_per_symbol bits at a time."""
    b = np.asarray(bits, dtype=np.int64)
    bps = scheme.bits_per_symbol
    if b.size % bps:
        raise ValueError(
            f"bit count {b.size} is not a multiple of {bps} bits/symbol"
        )
    groups = b.reshape(-1, bps)
    if scheme.order == 2:
        return scheme.level_by_label[groups[:, 0]].astype(complex)
    h = scheme.axis_bits
    weights = 1 << np.arange(h - 1, -1, -1)
    i_lbl = groups[:, :h] @ weights
    q_lbl = groups[:, h:] @ weights
    return scheme.level_by_label[i_lbl] + 1j * scheme.level_by_label[q_lbl]


def awgn(symbols, params: ChannelParams, rng: np.random.Generator
         ) -> np.ndarray:
    """Add white Gaussian noise, params.sigma per real dimension.

    sigma == 0 is the noiseless diagnostic limit and returns a copy.
    """
    s = np.asarray(symbols, dtype=complex)
    if params.sigma == 0.0:
        return s.copy()
    noise = rng.normal(0.0, params.sigma, size=(s.size, 2))
    return s + noise[:, 0] + 1j * noise[:, 1]


def _logsumexp(metric: np.ndarray) -> np.ndarray:
    """Stable log-sum-exp along the last axis."""
    peak = metric.max(axis=-1)
    return peak + np.log(np.exp(metric - peak[..., None]).sum(axis=-1))


def _axis_llrs(u: np.ndarray, scheme: Modulation, n0: float,
               max_log: bool) -> np.ndarray:
    """Per-bit LLRs of one PAM axis; shape (len(u), axis_bits)."""
    metric = -((u[:, None] - scheme.level_by_label[None, :]) ** 2) / n0
    out = np.empty((u.size, scheme.axis_bits))
    for j, mask in enumerate(scheme._bit0_masks):
        if max_log:
            out[:, j] = (metric[:, mask].max(axis=1)
                         - metric[:, ~mask].max(axis=1))
        else:
            out[:, j] = (_logsumexp(metric[:, mask])
                         - _logsumexp(metric[:, ~mask]))
    return out


def demap_llr(symbols, scheme: Modulation, params: ChannelParams,
              max_log: bool = False) -> np.ndarray:
    """Bit LLRs from noisy symbols, one value per transmitted bit.

    Exact per-bit marginalisation in the log domain by default; with
    ``max_log=True`` the sums over constellation subsets become maxima.
    Output is clipped to +-LLR_MAX so every value stays finite.
    """
    s = np.asarray(symbols, dtype=complex)
    if params.n0 == 0.0:
        # degenerate noiseless case: decide by nearest level per axis
        llr = demap_llr(s, scheme, ChannelParams(
            params.ebn0_db, params.rate, 1.0, np.sqrt(0.5)), max_log=True)
        return np.where(llr >= 0, LLR_MAX, -LLR_MAX)
    if scheme.order == 2:
        per_axis = _axis_llrs(s.real, scheme, params.n0, max_log)
        return np.clip(per_axis[:, 0], -LLR_MAX, LLR_MAX)
    i_llrs = _axis_llrs(s.real, scheme, params.n0, max_log)
    q_llrs = _axis_llrs(s.imag, scheme, params.n0, max_log)
    llr = np.concatenate([i_llrs, q_llrs], axis=1).reshape(-1)
    return np.clip(llr, -LLR_MAX, LLR_MAX)
