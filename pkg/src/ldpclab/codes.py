"""Sparse parity-check codes: Tanner-graph storage, alist I/O, and the
group-expanded accumulator construction used by the DVB-T2 family.

A code is held as dual adjacency lists (checks -> variables and
variables -> checks) plus CSR-style index arrays for vectorised access.
Edges are numbered in check-major order.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np


@dataclass(frozen=True)
class CodeDescriptor:
    """Identity card of a code: lengths, rate and construction stride."""

    family_tag: str
    n: int
    k: int
    q_factor: int | None = None  # (n - k) / group_size for constructed codes

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise ValueError(f"need 0 < k < n, got k={self.k}, n={self.n}")

    @property
    def rate(self) -> float:
        return self.k / self.n


class SparseParityCheck:
    """Immutable M x N sparse binary matrix stored as a Tanner graph.

    Adjacency lists are kept sorted ascending; rebuilding one side from the
    other must reproduce it exactly.  All arrays are read-only so instances
    can be shared freely across decoder instances.
    """

    def __init__(self, n_vars: int, check_adj):
        if n_vars < 1:
            raise ValueError("n_vars must be >= 1")
        self.n_vars = int(n_vars)
        self.n_checks = len(check_adj)
        if self.n_checks < 1:
            raise ValueError("need at least one check")
        rows = []
        for m, adj in enumerate(check_adj):
            row = np.sort(np.asarray(adj, dtype=np.int64))
            if row.size == 0:
                raise ValueError(f"check {m} has degree 0")
            if row[0] < 0 or row[-1] >= n_vars:
                raise ValueError(f"check {m}: variable index out of range")
            if np.any(np.diff(row) == 0):
                dup = int(row[np.nonzero(np.diff(row) == 0)[0][0]])
                raise ValueError(
                    f"check {m}: duplicate connection to variable {dup}"
                )
            rows.append(row)
        degrees = np.array([r.size for r in rows], dtype=np.int64)
        self.check_ptr = np.concatenate(([0], np.cumsum(degrees)))
        self.check_vars = np.concatenate(rows) if rows else np.empty(0, int)
        self.n_edges = int(self.check_ptr[-1])

        # invert to the variable side
        edge_check = np.repeat(np.arange(self.n_checks), degrees)
        order = np.lexsort((edge_check, self.check_vars))
        var_degrees = np.bincount(self.check_vars, minlength=self.n_vars)
        if np.any(var_degrees == 0):
            missing = int(np.nonzero(var_degrees == 0)[0][0])
            raise ValueError(f"variable {missing} has degree 0")
        self.var_ptr = np.concatenate(([0], np.cumsum(var_degrees)))
        self.var_checks = edge_check[order]
        for arr in (self.check_ptr, self.check_vars,
                    self.var_ptr, self.var_checks):
            arr.setflags(write=False)

    # -- accessors ---------------------------------------------------------

    def check_adj(self, m: int) -> np.ndarray:
        """Variables connected to check m, ascending."""
        return self.check_vars[self.check_ptr[m]:self.check_ptr[m + 1]]

    def var_adj(self, n: int) -> np.ndarray:
        """Checks connected to variable n, ascending."""
        return self.var_checks[self.var_ptr[n]:self.var_ptr[n + 1]]

    def check_degrees(self) -> np.ndarray:
        return np.diff(self.check_ptr)

    def var_degrees(self) -> np.ndarray:
        return np.diff(self.var_ptr)

    def edge_id(self, m: int, n: int) -> int:
        """Dense id of the (check m, variable n) edge; raises if absent."""
        seg = self.check_adj(m)
        j = int(np.searchsorted(seg, n))
        if j == seg.size or seg[j] != n:
            raise KeyError(f"no edge between check {m} and variable {n}")
        return int(self.check_ptr[m]) + j

    def equals(self, other: "SparseParityCheck") -> bool:
        return (
            self.n_vars == other.n_vars
            and self.n_checks == other.n_checks
            and np.array_equal(self.check_ptr, other.check_ptr)
            and np.array_equal(self.check_vars, other.check_vars)
        )


def syndrome(code: SparseParityCheck, bits) -> tuple[bool, np.ndarray]:
    """GF(2) parity of each check; zero everywhere iff bits is a codeword."""
    b = np.asarray(bits, dtype=np.uint8)
    if b.shape != (code.n_vars,):
        raise ValueError(
            f"bit vector length {b.size} does not match n={code.n_vars}"
        )
    s = np.bitwise_xor.reduceat(b[code.check_vars], code.check_ptr[:-1])
    return not s.any(), s


# ---------------------------------------------------------------------------
# alist interchange format
# ---------------------------------------------------------------------------

def _ints(line: str, lineno: int, expected: int | None = None) -> list[int]:
    parts = line.split(" ")
    if any(p == "" for p in parts):
        raise ValueError(f"alist line {lineno}: malformed spacing")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"alist line {lineno}: non-integer token") from None
    if expected is not None and len(vals) != expected:
        raise ValueError(
            f"alist line {lineno}: expected {expected} values, got {len(vals)}"
        )
    return vals


def load_alist(text) -> SparseParityCheck:
    """Parse an alist byte/text stream into a parity-check matrix.

    Layout: "N M" / "max_col_deg max_row_deg" / N column degrees / M row
    degrees / N column lines of 1-based check indices padded with 0 /
    M row lines of 1-based variable indices padded with 0.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 4:
        raise ValueError("alist line 1: truncated file")
    n, m = _ints(lines[0], 1, 2)
    if n < 1 or m < 1:
        raise ValueError("alist line 1: malformed header (need N, M >= 1)")
    max_col, max_row = _ints(lines[1], 2, 2)
    if len(lines) != 4 + n + m:
        raise ValueError(
            f"alist line {len(lines)}: expected {4 + n + m} lines, "
            f"got {len(lines)}"
        )
    col_deg = _ints(lines[2], 3, n)
    row_deg = _ints(lines[3], 4, m)
    if max(col_deg) != max_col or min(col_deg) < 1:
        raise ValueError(
            "alist line 3: column degrees inconsistent with declared maximum"
        )
    if max(row_deg) != max_row or min(row_deg) < 1:
        raise ValueError(
            "alist line 4: row degrees inconsistent with declared maximum"
        )
    if sum(col_deg) != sum(row_deg):
        raise ValueError("alist line 4: row/column degree totals differ")

    def read_block(start, count, degs, width, limit, what):
        adj = []
        for i in range(count):
            lineno = start + i + 1
            vals = _ints(lines[start + i], lineno, width)
            body = [v for v in vals if v != 0]
            if len(body) != degs[i]:
                raise ValueError(
                    f"alist line {lineno}: {what} {i} declares degree "
                    f"{degs[i]} but lists {len(body)} entries"
                )
            if vals[:len(body)] != body:
                raise ValueError(
                    f"alist line {lineno}: padding zeros before entries"
                )
            if any(not 1 <= v <= limit for v in body):
                raise ValueError(f"alist line {lineno}: index out of range")
            if len(set(body)) != len(body):
                raise ValueError(f"alist line {lineno}: duplicate entry")
            adj.append(sorted(v - 1 for v in body))
        return adj

    col_adj = read_block(4, n, col_deg, max_col, m, "column")
    row_adj = read_block(4 + n, m, row_deg, max_row, n, "row")

    # build from the rows, then confirm the column block says the same thing
    code = SparseParityCheck(n, row_adj)
    for j in range(n):
        if list(code.var_adj(j)) != col_adj[j]:
            raise ValueError(
                f"alist line {4 + j + 1}: row/column adjacency mismatch "
                f"for column {j}"
            )
    return code


def serialize_alist(code: SparseParityCheck) -> str:
    """Canonical alist text: sorted entries, zero padding, LF endings."""
    col_deg = code.var_degrees()
    row_deg = code.check_degrees()
    max_col = int(col_deg.max())
    max_row = int(row_deg.max())
    out = [
        f"{code.n_vars} {code.n_checks}",
        f"{max_col} {max_row}",
        " ".join(str(int(d)) for d in col_deg),
        " ".join(str(int(d)) for d in row_deg),
    ]
    for j in range(code.n_vars):
        entries = [str(int(c) + 1) for c in code.var_adj(j)]
        entries += ["0"] * (max_col - len(entries))
        out.append(" ".join(entries))
    for i in range(code.n_checks):
        entries = [str(int(v) + 1) for v in code.check_adj(i)]
        entries += ["0"] * (max_row - len(entries))
        out.append(" ".join(entries))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Group-expanded accumulator codes (the DVB-T2 eIRA shape)
# ---------------------------------------------------------------------------

class AddressTable:
    """Construction table: one line of base check addresses per group of
    ``group_size`` information bits.

    Information bit i reaches checks (x + (i mod g) * q) mod M for every
    base address x in its group's line, with q = M / g.  Parity bits form
    the dual-diagonal staircase.
    """

    def __init__(self, n: int, k: int, group_size: int, groups):
        m = n - k
        if not 0 < k < n:
            raise ValueError(f"need 0 < k < n, got k={k}, n={n}")
        if group_size < 1:
            raise ValueError("group_size must be >= 1")
        if k % group_size:
            raise ValueError(
                f"k={k} is not a multiple of group_size={group_size}"
            )
        if m % group_size:
            raise ValueError(
                f"n-k={m} is not a multiple of group_size={group_size}"
            )
        if len(groups) != k // group_size:
            raise ValueError(
                f"expected {k // group_size} group lines, got {len(groups)}"
            )
        for g, line in enumerate(groups):
            if not line:
                raise ValueError(f"group {g}: empty address line")
            for x in line:
                if not 0 <= x < m:
                    raise ValueError(
                        f"group {g}: address {x} outside [0, {m})"
                    )
        self.n = int(n)
        self.k = int(k)
        self.group_size = int(group_size)
        self.groups = [list(map(int, line)) for line in groups]
        self.q_factor = m // group_size
        self._info_edges: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def parse(cls, text: str) -> "AddressTable":
        """Read the table format: "n k group_size" then one line per group."""
        if isinstance(text, bytes):
            text = text.decode("ascii")
        lines = [ln for ln in text.split("\n")]
        if lines and lines[-1] == "":
            lines.pop()
        lines = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise ValueError("address table line 1: empty file")
        head = lines[0].split()
        if len(head) != 3:
            raise ValueError(
                "address table line 1: expected 'n k group_size'"
            )
        try:
            n, k, group_size = (int(h) for h in head)
        except ValueError:
            raise ValueError(
                "address table line 1: non-integer header"
            ) from None
        groups = []
        for i, ln in enumerate(lines[1:], start=2):
            try:
                groups.append([int(tok) for tok in ln.split()])
            except ValueError:
                raise ValueError(
                    f"address table line {i}: non-integer address"
                ) from None
        return cls(n, k, group_size, groups)

    def info_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Expanded (check, variable) arrays of the information part."""
        if self._info_edges is None:
            m = self.n - self.k
            g = self.group_size
            q = self.q_factor
            checks, vars_ = [], []
            offsets = np.arange(g) * q
            for gi, line in enumerate(self.groups):
                base = np.asarray(line, dtype=np.int64)
                hit = (base[None, :] + offsets[:, None]) % m  # (g, deg)
                checks.append(hit.ravel())
                vars_.append(
                    np.repeat(gi * g + np.arange(g), base.size)
                )
            self._info_edges = (
                np.concatenate(checks), np.concatenate(vars_)
            )
        return self._info_edges


def build_eira(table: AddressTable) -> SparseParityCheck:
    """Expand an address table into its parity-check matrix.

    Information columns follow the group expansion rule; parity columns are
    the staircase (parity bit j reaches check j, and check j+1 while one
    exists), so the last parity column has degree 1 and the rest degree 2.
    """
    m = table.n - table.k
    for gi, line in enumerate(table.groups):
        seen = set()
        for x in line:
            if x in seen:
                raise ValueError(
                    f"duplicate connection between check {x} and variable "
                    f"{gi * table.group_size} (group {gi} repeats address {x})"
                )
            seen.add(x)
    checks, vars_ = table.info_edges()
    rows = [[] for _ in range(m)]
    for c, v in zip(checks.tolist(), vars_.tolist()):
        rows[c].append(v)
    for j in range(m):
        rows[j].append(table.k + j)
        if j + 1 < m:
            rows[j + 1].append(table.k + j)
    return SparseParityCheck(table.n, rows)


def encode(table: AddressTable, info_bits) -> np.ndarray:
    """Systematic encoding: accumulate info bits into the parity registers
    addressed by the table, then run the staircase p_j ^= p_{j-1}."""
    info = np.asarray(info_bits, dtype=np.uint8)
    if info.shape != (table.k,):
        raise ValueError(
            f"info length {info.size} does not match k={table.k}"
        )
    m = table.n - table.k
    checks, vars_ = table.info_edges()
    acc = np.bincount(checks, weights=info[vars_], minlength=m)
    parity = (np.cumsum(acc.astype(np.int64)) & 1).astype(np.uint8)
    return np.concatenate([info, parity])


# ---------------------------------------------------------------------------
# Bundles and built-in codes
# ---------------------------------------------------------------------------

@dataclass
class Code:
    """A usable code: matrix plus (when constructed) its encoding table."""

    matrix: SparseParityCheck
    table: AddressTable | None
    descriptor: CodeDescriptor


def build_code(table: AddressTable, family_tag: str) -> Code:
    desc = CodeDescriptor(
        family_tag=family_tag, n=table.n, k=table.k, q_factor=table.q_factor
    )
    return Code(matrix=build_eira(table), table=table, descriptor=desc)


def code_from_alist(text, family_tag: str = "alist") -> Code:
    """Wrap a bare matrix; k is inferred as N - M (no encoder attached)."""
    matrix = load_alist(text)
    desc = CodeDescriptor(
        family_tag=family_tag,
        n=matrix.n_vars,
        k=matrix.n_vars - matrix.n_checks,
    )
    return Code(matrix=matrix, table=None, descriptor=desc)


# Stand-in tables with the frame parameters of the DVB-T2 code set (lengths,
# info sizes, expansion stride and degree profile); tools/generate_tables.py
# in the repository produced them and documents the sampling rule.
BUILTIN_CODES = {
    "dvbt2-short-r14": "dvbt2_short_r14.txt",
    "dvbt2-short-r12": "dvbt2_short_r12.txt",
    "dvbt2-short-r34": "dvbt2_short_r34.txt",
    "dvbt2-normal-r12": "dvbt2_normal_r12.txt",
    "dvbt2-normal-r34": "dvbt2_normal_r34.txt",
}


def builtin_ids() -> list[str]:
    return sorted(BUILTIN_CODES)


def load_builtin_table(code_id: str) -> AddressTable:
    try:
        fname = BUILTIN_CODES[code_id]
    except KeyError:
        raise ValueError(
            f"unknown built-in code {code_id!r}; available: "
            + ", ".join(builtin_ids())
        ) from None
    text = resources.files("ldpclab").joinpath("tables", fname).read_text()
    return AddressTable.parse(text)


def load_builtin(code_id: str) -> Code:
    return build_code(load_builtin_table(code_id), family_tag=code_id)
