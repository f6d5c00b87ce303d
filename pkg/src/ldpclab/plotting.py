"""Rendering of sweep results: log-scale BER curves and a standalone
re-plot script that carries its data inline."""

from __future__ import annotations

from collections import OrderedDict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _by_variant(points) -> "OrderedDict[str, list]":
    groups: "OrderedDict[str, list]" = OrderedDict()
    for p in points:
        groups.setdefault(p.variant, []).append(p)
    return groups


def render_ber_curves(points, path, title: str | None = None) -> None:
    """Draw BER vs Eb/N0 (log y-axis), one curve per variant, to a file."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    drawn = False
    for variant, pts in _by_variant(points).items():
        pts = sorted(pts, key=lambda p: p.ebn0_db)
        xs = [p.ebn0_db for p in pts if p.ber > 0]
        ys = [p.ber for p in pts if p.ber > 0]
        if xs:
            ax.semilogy(xs, ys, marker="o", label=variant)
            drawn = True
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("BER")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.4)
    if drawn:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


_SCRIPT_TEMPLATE = '''"""BER curve re-plot; data embedded from the run that produced it."""
import matplotlib.pyplot as plt

# (variant, ebn0_db, ber) per point
DATA = {data!r}

series = {{}}
for variant, ebn0, ber in DATA:
    series.setdefault(variant, []).append((ebn0, ber))

fig, ax = plt.subplots(figsize=(7.0, 5.0))
for variant, pts in series.items():
    pts.sort()
    xs = [x for x, y in pts if y > 0]
    ys = [y for x, y in pts if y > 0]
    if xs:
        ax.semilogy(xs, ys, marker="o", label=variant)
ax.set_xlabel("Eb/N0 (dB)")
ax.set_ylabel("BER")
ax.grid(True, which="both", alpha=0.4)
ax.legend()
fig.tight_layout()
fig.savefig("ber_curves.png", dpi=150)
print("wrote ber_curves.png")
'''


def emit_plot_script(points) -> str:
    """Standalone python script drawing log-scale BER vs Eb/N0 per variant."""
    data = [(p.variant, p.ebn0_db, p.ber) for p in points]
    return _SCRIPT_TEMPLATE.format(data=data)
