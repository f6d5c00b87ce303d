"""Iterative belief-propagation decoding over Tanner graphs.

Four check-node update rules share one flooding schedule:

* ``spa``     -- exact tanh-rule sum-product update.
* ``minsum``  -- magnitude minimum with sign product.
* ``scaled``  -- min-sum times a constant factor alpha < 1.
* ``svs``     -- min-sum with an iteration-dependent factor that climbs a
                 staircase 0.5, 0.75, 0.875, ... toward 1, holding each
                 value for ``step_s`` iterations.

Messages are float64 and saturated to +-LLR_MAX; the tanh product is clamped
away from +-1 so arctanh stays finite.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .codes import SparseParityCheck

LLR_MAX = 50.0

# keeps arctanh finite: product magnitude never reaches 1
_TANH_CLAMP = 1.0 - 1e-12

_KINDS = ("spa", "minsum", "scaled", "svs")


@dataclass(frozen=True)
class DecoderVariant:
    """Algorithm selector: kind plus its parameter, if any.

    ``alpha`` is only meaningful (and mandatory) for kind ``scaled``;
    ``step_s`` only for kind ``svs``.
    """

    kind: str
    alpha: float | None = None
    step_s: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown decoder kind {self.kind!r}")
        if self.kind == "scaled":
            if self.alpha is None:
                raise ValueError("scaled variant requires alpha")
            if not 0.0 < self.alpha <= 1.0:
                raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        elif self.alpha is not None:
            raise ValueError(f"alpha is only valid for scaled, not {self.kind}")
        if self.kind == "svs":
            if self.step_s is None:
                raise ValueError("svs variant requires step_s")
            if self.step_s < 1:
                raise ValueError(f"step_s must be >= 1, got {self.step_s}")
        elif self.step_s is not None:
            raise ValueError(f"step_s is only valid for svs, not {self.kind}")

    @classmethod
    def spa(cls) -> "DecoderVariant":
        return cls("spa")

    @classmethod
    def min_sum(cls) -> "DecoderVariant":
        return cls("minsum")

    @classmethod
    def scaled(cls, alpha: float) -> "DecoderVariant":
        return cls("scaled", alpha=alpha)

    @classmethod
    def svs(cls, step_s: int) -> "DecoderVariant":
        return cls("svs", step_s=int(step_s))

    @classmethod
    def parse(cls, text: str) -> "DecoderVariant":
        """Parse a variant spec: spa | minsum | scaled:alpha=X | svs:S=N."""
        text = text.strip()
        if text == "spa":
            return cls.spa()
        if text == "minsum":
            return cls.min_sum()
        head, sep, arg = text.partition(":")
        if head == "scaled":
            if not sep or not arg.startswith("alpha="):
                raise ValueError(
                    f"bad variant spec {text!r}: expected scaled:alpha=X"
                )
            return cls.scaled(float(arg[len("alpha="):]))
        if head == "svs":
            if not sep or not arg.startswith("S="):
                raise ValueError(f"bad variant spec {text!r}: expected svs:S=N")
            return cls.svs(int(arg[len("S="):]))
        raise ValueError(f"unknown variant {text!r}")

    @property
    def label(self) -> str:
        """Round-trippable text form, used in CSV output and the CLI."""
        if self.kind == "scaled":
            return f"scaled:alpha={self.alpha:g}"
        if self.kind == "svs":
            return f"svs:S={self.step_s}"
        return self.kind


@dataclass
class DecodeResult:
    bits: np.ndarray          # hard decisions, uint8
    converged: bool           # True iff the returned bits have zero syndrome
    iterations_used: int
    posterior: np.ndarray     # per-bit LLRs after the last iteration


# ---------------------------------------------------------------------------
# Reference (per-node) update rules.  These are the definitional forms; the
# vectorised engine below is checked against them edge by edge.
# ---------------------------------------------------------------------------

def check_update_spa(incoming) -> float:
    """Check-node reply given the messages from all *other* variables.

    r = (prod of signs) * 2 atanh(prod of tanh(|q|/2)), product clamped.
    """
    q = np.asarray(incoming, dtype=float)
    if q.size == 0:
        raise ValueError("check update needs at least one incoming message")
    sign = -1.0 if np.count_nonzero(q < 0) % 2 else 1.0
    prod = np.prod(np.tanh(np.abs(q) / 2.0))
    prod = min(max(prod, -_TANH_CLAMP), _TANH_CLAMP)
    return sign * 2.0 * np.arctanh(prod)


def check_update_minsum(incoming) -> float:
    """Min-sum check-node reply: sign product times minimum magnitude."""
    q = np.asarray(incoming, dtype=float)
    if q.size == 0:
        raise ValueError("check update needs at least one incoming message")
    sign = -1.0 if np.count_nonzero(q < 0) % 2 else 1.0
    return sign * float(np.min(np.abs(q)))


def svs_alpha(iteration_i: int, step_s: int) -> float:
    """Staircase scaling factor 1 - 2^(-ceil(i/S)) for 1-based iteration i.

    Saturates to exactly 1.0 once the exponent exceeds 31 (the shift count a
    fixed-point port would keep in a register).
    """
    if iteration_i < 1:
        raise ValueError("iteration index is 1-based")
    if step_s < 1:
        raise ValueError("step_s must be >= 1")
    shift = -(-iteration_i // step_s)  # ceil division
    if shift > 31:
        return 1.0
    return 1.0 - 2.0 ** (-shift)


def apply_scaling(r: float, alpha: float):
    """Scale a check-node output; alpha in (0, 1]."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    return alpha * r


def variable_update(y_n: float, incoming) -> float:
    """Variable-node reply: channel LLR plus the other checks' messages."""
    q = y_n + float(np.sum(incoming))
    return min(max(q, -LLR_MAX), LLR_MAX)


def posterior(y_n: float, incoming) -> float:
    """Total per-bit LLR: channel value plus all incoming check messages."""
    return min(max(y_n + float(np.sum(incoming)), -LLR_MAX), LLR_MAX)


def hard_decision(llr: float) -> int:
    """1 if the LLR is negative, 0 otherwise (0 maps to bit 0)."""
    return 1 if llr < 0 else 0


# ---------------------------------------------------------------------------
# Per-check batch kernels: all outgoing replies of one check node at once.
# ---------------------------------------------------------------------------

def check_update_minsum_batch(values) -> np.ndarray:
    """All min-sum replies of one check from all its incoming messages.

    Uses the two-minimum trick: each edge sees the overall minimum except
    the edge holding it, which sees the second minimum.  Ties go to the
    lowest index.
    """
    q = np.asarray(values, dtype=float)
    if q.size < 2:
        raise ValueError("batch update needs degree >= 2")
    mag = np.abs(q)
    neg = q < 0
    total_neg = int(np.count_nonzero(neg))
    i1 = int(np.argmin(mag))  # argmin takes the lowest index on ties
    min1 = mag[i1]
    rest = np.delete(mag, i1)
    min2 = float(np.min(rest))
    out = np.where(np.arange(q.size) == i1, min2, min1)
    signs = np.where((total_neg - neg) % 2, -1.0, 1.0)
    return signs * out


def check_update_spa_batch(values) -> np.ndarray:
    """All tanh-rule replies of one check node, one per incoming edge."""
    q = np.asarray(values, dtype=float)
    if q.size < 2:
        raise ValueError("batch update needs degree >= 2")
    t = np.tanh(np.abs(q) / 2.0)
    neg = q < 0
    total_neg = int(np.count_nonzero(neg))
    d = q.size
    cols = np.broadcast_to(t, (d, d))
    mask = ~np.eye(d, dtype=bool)
    prods = np.prod(cols[mask].reshape(d, d - 1), axis=1)
    prods = np.clip(prods, -_TANH_CLAMP, _TANH_CLAMP)
    signs = np.where((total_neg - neg) % 2, -1.0, 1.0)
    return signs * 2.0 * np.arctanh(prods)


# ---------------------------------------------------------------------------
# Whole-graph engine.
# ---------------------------------------------------------------------------

class _Runtime:
    """Edge-indexed views of a parity-check matrix used by the hot loop.

    Edges are numbered in check-major order (the canonical edge ids of the
    code).  ``var_order`` permutes them into variable-major order for the
    vertical step.
    """

    def __init__(self, code: SparseParityCheck):
        self.code = code
        self.m = code.n_checks
        self.n = code.n_vars
        self.check_ptr = code.check_ptr
        self.edge_var = code.check_vars            # variable of each edge
        self.edge_check = np.repeat(
            np.arange(self.m), np.diff(code.check_ptr)
        )
        # variable-major permutation of the edge ids
        self.var_order = np.lexsort((self.edge_check, self.edge_var))
        self.var_ptr = code.var_ptr
        # checks grouped by degree, as dense (count, degree) edge-id blocks
        degrees = np.diff(code.check_ptr)
        self.degree_groups = []
        for d in np.unique(degrees):
            rows = np.nonzero(degrees == d)[0]
            starts = code.check_ptr[rows]
            edge_ids = starts[:, None] + np.arange(d)[None, :]
            self.degree_groups.append((int(d), edge_ids))
        for arr in (self.edge_check, self.var_order):
            arr.setflags(write=False)


_RUNTIMES: "weakref.WeakKeyDictionary[SparseParityCheck, _Runtime]" = (
    weakref.WeakKeyDictionary()
)


def _runtime(code: SparseParityCheck) -> _Runtime:
    rt = _RUNTIMES.get(code)
    if rt is None:
        rt = _Runtime(code)
        _RUNTIMES[code] = rt
    return rt


def _check_step_spa(q: np.ndarray, rt: _Runtime) -> np.ndarray:
    """Tanh-rule horizontal step for every edge, grouped by check degree.

    The per-edge exclusion products come from prefix/suffix cumulative
    products along each check, so the step costs O(E) multiplies.
    """
    t = np.tanh(np.abs(q) / 2.0)
    neg = (q < 0).astype(np.int64)
    prods = np.empty_like(q)
    signs = np.empty_like(q)
    for d, edge_ids in rt.degree_groups:
        tv = t[edge_ids]                      # (count, d)
        nv = neg[edge_ids]
        excl_neg = nv.sum(axis=1, keepdims=True) - nv
        signs[edge_ids] = 1.0 - 2.0 * (excl_neg & 1)
        if d == 1:
            # no other participants: full certainty toward bit 0
            prods[edge_ids[:, 0]] = 1.0
            continue
        left = np.ones_like(tv)
        np.cumprod(tv[:, :-1], axis=1, out=left[:, 1:])
        right = np.ones_like(tv)
        np.cumprod(tv[:, :0:-1], axis=1, out=right[:, -2::-1])
        prods[edge_ids] = left * right
    np.clip(prods, -_TANH_CLAMP, _TANH_CLAMP, out=prods)
    return signs * 2.0 * np.arctanh(prods)


def _check_step_minsum(q: np.ndarray, rt: _Runtime) -> np.ndarray:
    """Two-minimum horizontal step for every edge at once."""
    ptr = rt.check_ptr[:-1]
    mag = np.abs(q)
    neg = (q < 0).astype(np.int64)
    min1 = np.minimum.reduceat(mag, ptr)
    # first edge attaining the minimum in each check (lowest id wins ties)
    edge_ids = np.arange(q.size)
    candidates = np.where(mag == min1[rt.edge_check], edge_ids, q.size)
    arg1 = np.minimum.reduceat(candidates, ptr)
    mag2 = mag.copy()
    mag2[arg1[arg1 < q.size]] = np.inf
    min2 = np.minimum.reduceat(mag2, ptr)
    total_neg = np.add.reduceat(neg, ptr)
    excl_neg = total_neg[rt.edge_check] - neg
    signs = np.where(excl_neg % 2, -1.0, 1.0)
    out = np.where(edge_ids == arg1[rt.edge_check],
                   min2[rt.edge_check], min1[rt.edge_check])
    return signs * np.minimum(out, LLR_MAX)


def _syndrome_is_zero(bits: np.ndarray, rt: _Runtime) -> bool:
    parity = np.bitwise_xor.reduceat(bits[rt.edge_var], rt.check_ptr[:-1])
    return not parity.any()


def decode(
    llr,
    code: SparseParityCheck,
    variant: DecoderVariant,
    max_iterations: int = 50,
    early_stop: bool = True,
) -> DecodeResult:
    """Run flooding message passing until zero syndrome or iteration limit.

    Each iteration: horizontal step (variant rule, plus scaling for the
    scaled/svs kinds), vertical step, posterior, hard decision, syndrome
    check.  With ``early_stop=False`` the loop always runs the full
    ``max_iterations`` (useful when the fully-converged posterior is the
    quantity of interest).
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    y = np.asarray(llr, dtype=float)
    if y.shape != (code.n_vars,):
        raise ValueError(
            f"LLR length {y.size} does not match code length {code.n_vars}"
        )
    rt = _runtime(code)
    q = y[rt.edge_var]
    bits = np.zeros(code.n_vars, dtype=np.uint8)
    post = y.copy()
    iterations = 0
    converged = False
    for it in range(1, max_iterations + 1):
        iterations = it
        if variant.kind == "spa":
            r = _check_step_spa(q, rt)
        else:
            r = _check_step_minsum(q, rt)
            if variant.kind == "scaled":
                r = variant.alpha * r
            elif variant.kind == "svs":
                r = svs_alpha(it, variant.step_s) * r
        sums = np.add.reduceat(r[rt.var_order], rt.var_ptr[:-1])
        post = y + sums
        q = np.clip(post[rt.edge_var] - r, -LLR_MAX, LLR_MAX)
        bits = (post < 0).astype(np.uint8)
        if _syndrome_is_zero(bits, rt):
            converged = True
            if early_stop:
                break
        else:
            converged = False
    return DecodeResult(
        bits=bits,
        converged=converged,
        iterations_used=iterations,
        posterior=np.clip(post, -LLR_MAX, LLR_MAX),
    )
