#!/usr/bin/env python3
"""Generate the built-in address tables shipped in src/ldpclab/tables/.

The five codes carry the frame parameters of the DVB-T2 LDPC set (codeword
length, info length, 360-bit groups, expansion stride q = (n-k)/360) and a
matching irregular degree profile.  The base addresses themselves are drawn
deterministically here; they are structural stand-ins, not the broadcast
standard's published entries, so absolute waterfall positions can differ
slightly from hardware-standard matrices.  Replacing a file with a table
transcribed from the standard (same "n k group" header, one line of
addresses per group) is a drop-in swap.

Address sampling keeps every unordered pairwise difference of a line unique
across the whole table (folded mod M), which removes all length-4 cycles
among information columns.

Run from the repository root:  python tools/generate_tables.py
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ldpclab import codes  # noqa: E402

GROUP = 360

# name -> (n, k, [(group_count, degree), ...] high degree first)
PROFILES = {
    "dvbt2_short_r14": (16200, 3240, [(5, 12), (4, 3)]),
    "dvbt2_short_r12": (16200, 7200, [(8, 8), (12, 3)]),
    "dvbt2_short_r34": (16200, 11880, [(4, 12), (29, 3)]),
    "dvbt2_normal_r12": (64800, 32400, [(36, 8), (54, 3)]),
    "dvbt2_normal_r34": (64800, 48600, [(15, 12), (120, 3)]),
}


def sample_line(rng, m, degree, used_diffs, max_tries=10_000):
    for _ in range(max_tries):
        line = np.sort(rng.choice(m, size=degree, replace=False))
        diffs = set()
        ok = True
        for a in range(degree):
            for b in range(a + 1, degree):
                d = int(line[b] - line[a])
                d = min(d, m - d)
                if d == 0 or d in diffs or d in used_diffs:
                    ok = False
                    break
                diffs.add(d)
            if not ok:
                break
        if ok:
            used_diffs |= diffs
            return [int(x) for x in line]
    raise RuntimeError("could not place a line without a repeated difference")


def generate(name, n, k, profile, seed):
    m = n - k
    rng = np.random.default_rng(seed)
    used_diffs = set()
    groups = []
    for count, degree in profile:
        for _ in range(count):
            groups.append(sample_line(rng, m, degree, used_diffs))
    assert len(groups) == k // GROUP
    lines = [f"{n} {k} {GROUP}"]
    lines += [" ".join(str(x) for x in g) for g in groups]
    return "\n".join(lines) + "\n"


def validate(text, name):
    table = codes.AddressTable.parse(text)
    matrix = codes.build_eira(table)
    rng = np.random.default_rng(1)
    for _ in range(20):
        info = rng.integers(0, 2, size=table.k, dtype=np.uint8)
        ok, _ = codes.syndrome(matrix, codes.encode(table, info))
        assert ok, f"{name}: encoder/syndrome mismatch"
    deg = matrix.var_degrees()
    par = deg[table.k:]
    assert par[-1] == 1 and (par[:-1] == 2).all(), f"{name}: bad staircase"
    print(f"{name}: n={table.n} k={table.k} q={table.q_factor} "
          f"edges={matrix.n_edges} ok")


def main():
    out_dir = Path(__file__).resolve().parents[1] / "src/ldpclab/tables"
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, (name, (n, k, profile)) in enumerate(sorted(PROFILES.items())):
        text = generate(name, n, k, profile, seed=0xD0C0DE + i)
        validate(text, name)
        (out_dir / f"{name}.txt").write_text(text)
    print(f"wrote {len(PROFILES)} tables to {out_dir}")


if __name__ == "__main__":
    main()
