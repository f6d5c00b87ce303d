"""Command-line front end.

Subcommands: gen-code, validate, decode, ber, optimize.  Sweep-style
commands read a flat key=value config file whose keys mirror SimConfig;
unknown keys are hard errors so a typo cannot silently change a run.
Artifact-producing commands write a manifest.json capturing everything
needed to reproduce the run bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, codes, plotting, sim
from .channel import Modulation
from .decoder import DecoderVariant, decode

_CONFIG_KEYS = (
    "code", "modulation", "variants", "ebn0_db", "max_iterations",
    "stop_frame_errors", "max_frames", "seed", "ber_over", "demapper",
    "all_zero", "workers", "sigma_override",
)


def _parse_config_text(text: str) -> dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment; unknown keys fail."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(
                f"config line {lineno}: unknown key {key!r} "
                f"(known: {', '.join(_CONFIG_KEYS)})"
            )
        if key in raw:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def _resolve_code(spec: str) -> codes.Code:
    """A code reference: built-in id, .alist path, or address-table path."""
    if spec in codes.BUILTIN_CODES:
        return codes.load_builtin(spec)
    path = Path(spec)
    if not path.exists():
        raise ValueError(
            f"code {spec!r} is neither a built-in id "
            f"({', '.join(codes.builtin_ids())}) nor an existing file"
        )
    text = path.read_text()
    if path.suffix == ".alist":
        return codes.code_from_alist(text, family_tag=path.stem)
    table = codes.AddressTable.parse(text)
    return codes.build_code(table, family_tag=path.stem)


def _parse_bool(value: str, key: str) -> bool:
    if value.lower() in ("true", "1", "yes"):
        return True
    if value.lower() in ("false", "0", "no"):
        return False
    raise ValueError(f"config key {key}: expected true/false, got {value!r}")


def _build_sim_config(raw: dict[str, str], seed_override: int | None,
                      workers_override: int | None) -> sim.SimConfig:
    for required in ("code", "modulation", "variants", "ebn0_db"):
        if required not in raw:
            raise ValueError(f"config is missing required key {required!r}")
    code = _resolve_code(raw["code"])
    modulation = Modulation(int(raw["modulation"]))
    variants = tuple(
        DecoderVariant.parse(v.strip())
        for v in raw["variants"].split(",") if v.strip()
    )
    ebn0 = tuple(
        float(v) for v in raw["ebn0_db"].replace(",", " ").split()
    )
    seed = seed_override
    if seed is None and "seed" in raw:
        seed = int(raw["seed"])
    if seed is None:
        seed = int.from_bytes(os.urandom(6), "big")
    kwargs = {}
    if "max_iterations" in raw:
        kwargs["max_iterations"] = int(raw["max_iterations"])
    if "stop_frame_errors" in raw:
        kwargs["stop_frame_errors"] = int(raw["stop_frame_errors"])
    if "max_frames" in raw:
        kwargs["max_frames"] = int(raw["max_frames"])
    if "ber_over" in raw:
        kwargs["ber_over"] = raw["ber_over"]
    if "demapper" in raw:
        kwargs["demapper"] = raw["demapper"]
    if "all_zero" in raw:
        kwargs["all_zero"] = _parse_bool(raw["all_zero"], "all_zero")
    if "sigma_override" in raw:
        kwargs["sigma_override"] = float(raw["sigma_override"])
    workers = workers_override
    if workers is None:
        workers = int(raw.get("workers", "1"))
    return sim.SimConfig(
        code=code, modulation=modulation, variants=variants, ebn0_db=ebn0,
        master_seed=seed, workers=workers, **kwargs,
    )


def _manifest(command: str, config: sim.SimConfig | None,
              code: codes.Code, extra: dict | None = None) -> dict:
    doc = {
        "command": command,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "code": {
            "family_tag": code.descriptor.family_tag,
            "n": code.descriptor.n,
            "k": code.descriptor.k,
            "rate": code.descriptor.rate,
            "q_factor": code.descriptor.q_factor,
        },
        "master_seed": config.master_seed if config else None,
    }
    if config is not None:
        doc["config"] = {
            "code": code.descriptor.family_tag,
            "modulation": config.modulation.order,
            "variants": [v.label for v in config.variants],
            "ebn0_db": list(config.ebn0_db),
            "max_iterations": config.max_iterations,
            "stop_frame_errors": config.stop_frame_errors,
            "max_frames": config.max_frames,
            "ber_over": config.ber_over,
            "demapper": config.demapper,
            "all_zero": config.all_zero,
            "workers": config.workers,
            "sigma_override": config.sigma_override,
        }
    if extra:
        doc.update(extra)
    return doc


def _write_manifest(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _degree_report(matrix: codes.SparseParityCheck) -> str:
    lines = []
    for name, degs in (("column", matrix.var_degrees()),
                       ("row", matrix.check_degrees())):
        hist = {}
        for d in degs:
            hist[int(d)] = hist.get(int(d), 0) + 1
        body = "  ".join(f"deg {d}: {c}" for d, c in sorted(hist.items()))
        lines.append(f"{name} degrees: {body}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_gen_code(args) -> int:
    if args.builtin:
        code = codes.load_builtin(args.builtin)
        default_name = f"{args.builtin}.alist"
    else:
        table = codes.AddressTable.parse(Path(args.table).read_text())
        code = codes.build_code(table, family_tag=Path(args.table).stem)
        default_name = f"{code.descriptor.family_tag}.alist"
    out = Path(args.out) if args.out else Path(default_name)
    out.parent.mkdir(parents=True, exist_ok=True)
    text = codes.serialize_alist(code.matrix)
    reloaded = codes.load_alist(text)
    if not reloaded.equals(code.matrix):
        raise ValueError("internal error: alist round-trip mismatch")
    out.write_text(text)
    d = code.descriptor
    print(f"family: {d.family_tag}")
    print(f"n: {d.n}  k: {d.k}  rate: {d.rate:.6g}  q_factor: {d.q_factor}")
    print(f"edges: {code.matrix.n_edges}")
    print(_degree_report(code.matrix))
    print(f"wrote {out}")
    _write_manifest(out.with_suffix(out.suffix + ".manifest.json"),
                    _manifest("gen-code", None, code))
    return 0


def _cmd_validate(args) -> int:
    if args.builtin:
        code = codes.load_builtin(args.builtin)
    elif args.table:
        table = codes.AddressTable.parse(Path(args.table).read_text())
        code = codes.build_code(table, family_tag=Path(args.table).stem)
    else:
        code = codes.code_from_alist(Path(args.alist).read_text(),
                                     family_tag=Path(args.alist).stem)
    matrix = code.matrix
    # the constructor has already enforced the graph invariants; exercise
    # the serializer round-trip and, when an encoder exists, its consistency
    if not codes.load_alist(codes.serialize_alist(matrix)).equals(matrix):
        raise ValueError("alist round-trip mismatch")
    checks = ["graph invariants ok", "alist round-trip ok"]
    if code.table is not None:
        rng = np.random.default_rng(0)
        for _ in range(20):
            info = rng.integers(0, 2, size=code.descriptor.k, dtype=np.uint8)
            ok, _ = codes.syndrome(matrix, codes.encode(code.table, info))
            if not ok:
                raise ValueError("encoder produced a nonzero syndrome")
        checks.append("encoder/syndrome ok (20 random frames)")
    d = code.descriptor
    print(f"family: {d.family_tag}  n: {d.n}  k: {d.k}  rate: {d.rate:.6g}")
    print(_degree_report(matrix))
    for c in checks:
        print(c)
    return 0


def _cmd_decode(args) -> int:
    matrix = codes.load_alist(Path(args.alist).read_text())
    variant = DecoderVariant.parse(args.variant)
    llr = []
    for lineno, line in enumerate(Path(args.llr).read_text().split("\n"),
                                  start=1):
        if not line.strip():
            continue
        try:
            llr.append(float(line))
        except ValueError:
            raise ValueError(
                f"LLR file line {lineno}: not a decimal value"
            ) from None
    if len(llr) != matrix.n_vars:
        raise ValueError(
            f"LLR file has {len(llr)} values but the code length is "
            f"{matrix.n_vars}"
        )
    result = decode(np.asarray(llr), matrix, variant,
                    max_iterations=args.max_iter)
    print("".join(str(int(b)) for b in result.bits))
    print(f"converged {'true' if result.converged else 'false'}")
    print(f"iterations {result.iterations_used}")
    return 0


def _cmd_ber(args) -> int:
    raw = _parse_config_text(Path(args.config).read_text())
    config = _build_sim_config(raw, args.seed, args.workers)
    out_dir = Path(args.out)
    points = sim.run_ber_sweep(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_text = sim.emit_csv(points)
    (out_dir / "points.csv").write_text(csv_text)
    (out_dir / "plot_ber.py").write_text(plotting.emit_plot_script(points))
    plotting.render_ber_curves(
        points, out_dir / "ber_curves.png",
        title=f"{config.code.descriptor.family_tag}, "
              f"{config.modulation.order}-QAM",
    )
    _write_manifest(out_dir / "manifest.json",
                    _manifest("ber", config, config.code))
    print(f"wrote {out_dir / 'points.csv'} ({len(points)} points)")
    return 0


def _cmd_optimize(args) -> int:
    raw = _parse_config_text(Path(args.config).read_text())
    config = _build_sim_config(raw, args.seed, args.workers)
    grid = None
    if args.grid:
        conv = float if args.kind == "alpha" else int
        grid = tuple(conv(v) for v in args.grid.split(","))
    result = sim.optimize_parameter(config, args.kind, grid)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"parameter: {result.kind}",
             f"grid: {', '.join(str(v) for v in result.grid)}",
             f"best: {result.best}", "",
             f"{'value':>10}  {'bit_errors':>12}  {'bits':>14}  {'ber':>12}"]
    for row in result.rows:
        lines.append(f"{row.value!s:>10}  {row.bit_errors:>12}  "
                     f"{row.bits_counted:>14}  {row.ber:>12.6g}")
    report = "\n".join(lines) + "\n"
    (out_dir / "optimize_report.txt").write_text(report)
    all_points = [p for row in result.rows for p in row.points]
    (out_dir / "grid_points.csv").write_text(sim.emit_csv(all_points))
    _write_manifest(
        out_dir / "manifest.json",
        _manifest("optimize", config, config.code,
                  extra={"kind": result.kind,
                         "grid": list(result.grid),
                         "best": result.best}),
    )
    print(report, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ldpclab",
        description="LDPC code construction, decoding and BER simulation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-code", help="build a code and write its alist")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", help="built-in code id")
    src.add_argument("--table", help="address-table file")
    p.add_argument("-o", "--out", help="output alist path")
    p.set_defaults(func=_cmd_gen_code)

    p = sub.add_parser("validate", help="check a code's invariants")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", help="built-in code id")
    src.add_argument("--table", help="address-table file")
    src.add_argument("--alist", help="alist file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("decode", help="decode one LLR vector")
    p.add_argument("--alist", required=True, help="alist file")
    p.add_argument("--llr", required=True,
                   help="LLR input, one decimal per line")
    p.add_argument("--variant", required=True,
                   help="spa | minsum | scaled:alpha=X | svs:S=N")
    p.add_argument("--max-iter", type=int, default=50)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("ber", help="run a BER sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--out", default="ber-out",
                   help="output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--workers", type=int, help="override config workers")
    p.set_defaults(func=_cmd_ber)

    p = sub.add_parser("optimize",
                       help="grid-search alpha or the staircase step")
    p.add_argument("--config", required=True)
    p.add_argument("--kind", required=True, choices=("alpha", "step_s"))
    p.add_argument("--grid", help="comma-separated grid values")
    p.add_argument("-o", "--out", default="optimize-out",
                   help="output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--workers", type=int, help="override config workers")
    p.set_defaults(func=_cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
