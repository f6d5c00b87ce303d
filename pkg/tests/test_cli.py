import json

import numpy as np
import pytest

from ldpclab import load_alist, load_csv
from ldpclab.cli import main
from tests.conftest import TOY16_TABLE, TOYSIM_TABLE

TOY_CONFIG = """
# desk-scale sweep
code = {code}
modulation = 256
variants = spa, minsum, scaled:alpha=0.875, svs:S=3
ebn0_db = 7.0
max_iterations = 50
stop_frame_errors = 20
max_frames = 96
seed = 4242
workers = 1
"""


@pytest.fixture()
def toysim_table_file(tmp_path):
    path = tmp_path / "toysim.txt"
    path.write_text(TOYSIM_TABLE)
    return path


def test_gen_code_toy_table(tmp_path, capsys):
    table = tmp_path / "toy16.txt"
    table.write_text(TOY16_TABLE)
    out = tmp_path / "toy16.alist"
    assert main(["gen-code", "--table", str(table), "-o", str(out)]) == 0
    report = capsys.readouterr().out
    assert "n: 16  k: 8" in report
    assert "column degrees" in report and "row degrees" in report
    matrix = load_alist(out.read_text())
    assert matrix.n_vars == 16 and matrix.n_checks == 8
    manifest = json.loads((tmp_path / "toy16.alist.manifest.json").read_text())
    assert manifest["command"] == "gen-code"
    assert manifest["code"]["n"] == 16


def test_gen_code_builtin(tmp_path, capsys):
    out = tmp_path / "short12.alist"
    assert main(["gen-code", "--builtin", "dvbt2-short-r12",
                 "-o", str(out)]) == 0
    report = capsys.readouterr().out
    assert "n: 16200  k: 7200" in report
    assert out.exists()


def test_gen_code_corrupt_table(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("16 8 4\n0 99\n1 4\n")  # address out of range
    assert main(["gen-code", "--table", str(bad)]) != 0
    assert "error:" in capsys.readouterr().err


def test_validate_commands(tmp_path, capsys, toysim_table_file):
    assert main(["validate", "--table", str(toysim_table_file)]) == 0
    out = capsys.readouterr().out
    assert "graph invariants ok" in out
    assert "encoder/syndrome ok" in out

    alist = tmp_path / "toy.alist"
    assert main(["gen-code", "--table", str(toysim_table_file),
                 "-o", str(alist)]) == 0
    capsys.readouterr()
    assert main(["validate", "--alist", str(alist)]) == 0
    assert "alist round-trip ok" in capsys.readouterr().out

    missing = tmp_path / "nope.alist"
    assert main(["validate", "--alist", str(missing)]) != 0


def test_decode_command(tmp_path, capsys):
    table = tmp_path / "toy16.txt"
    table.write_text(TOY16_TABLE)
    alist = tmp_path / "toy16.alist"
    main(["gen-code", "--table", str(table), "-o", str(alist)])
    capsys.readouterr()

    llr = tmp_path / "channel.llr"
    llr.write_text("\n".join(["12.5"] * 16) + "\n")
    for variant in ("spa", "minsum", "scaled:alpha=0.9375", "svs:S=10"):
        assert main(["decode", "--alist", str(alist), "--llr", str(llr),
                     "--variant", variant]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "0" * 16
        assert out[1] == "converged true"
        assert out[2] == "iterations 1"

    assert main(["decode", "--alist", str(alist), "--llr", str(llr),
                 "--variant", "bogus"]) != 0
    capsys.readouterr()

    short = tmp_path / "short.llr"
    short.write_text("1.0\n-2.0\n")
    assert main(["decode", "--alist", str(alist), "--llr", str(short),
                 "--variant", "spa"]) != 0
    assert "16 values" not in capsys.readouterr().out  # error goes to stderr


def test_ber_command_artifacts(tmp_path, capsys, toysim_table_file):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(TOY_CONFIG.format(code=toysim_table_file))
    out_dir = tmp_path / "run1"
    assert main(["ber", "--config", str(cfg), "-o", str(out_dir)]) == 0
    capsys.readouterr()

    csv_path = out_dir / "points.csv"
    points = load_csv(csv_path.read_text())
    assert len(points) == 4
    assert {p.variant for p in points} == {
        "spa", "minsum", "scaled:alpha=0.875", "svs:S=3"}

    script = (out_dir / "plot_ber.py").read_text()
    compile(script, "plot_ber.py", "exec")  # must be valid python
    assert "semilogy" in script

    png = (out_dir / "ber_curves.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"

    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["master_seed"] == 4242
    assert manifest["config"]["variants"] == [
        "spa", "minsum", "scaled:alpha=0.875", "svs:S=3"]

    # same seed, second directory: byte-identical CSV
    out2 = tmp_path / "run2"
    assert main(["ber", "--config", str(cfg), "-o", str(out2)]) == 0
    assert (out2 / "points.csv").read_bytes() == csv_path.read_bytes()


def test_ber_seed_autodrawn_and_recorded(tmp_path, capsys, toysim_table_file):
    cfg = tmp_path / "sweep.cfg"
    text = TOY_CONFIG.format(code=toysim_table_file)
    text = "\n".join(ln for ln in text.splitlines()
                     if not ln.startswith("seed"))
    cfg.write_text(text)
    out_dir = tmp_path / "auto"
    assert main(["ber", "--config", str(cfg), "-o", str(out_dir)]) == 0
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert isinstance(manifest["master_seed"], int)

    # reproducing with the recorded seed gives the same CSV
    out2 = tmp_path / "auto2"
    assert main(["ber", "--config", str(cfg), "-o", str(out2),
                 "--seed", str(manifest["master_seed"])]) == 0
    assert ((out2 / "points.csv").read_bytes()
            == (out_dir / "points.csv").read_bytes())


def test_config_unknown_key_is_fatal(tmp_path, capsys, toysim_table_file):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(TOY_CONFIG.format(code=toysim_table_file)
                   + "ebn0_bd = 1.0\n")
    out_dir = tmp_path / "never"
    assert main(["ber", "--config", str(cfg), "-o", str(out_dir)]) != 0
    assert "unknown key" in capsys.readouterr().err
    assert not out_dir.exists()  # no partial artifacts


def test_config_missing_required_key(tmp_path, capsys, toysim_table_file):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("code = %s\nmodulation = 256\n" % toysim_table_file)
    assert main(["ber", "--config", str(cfg)]) != 0
    assert "missing required key" in capsys.readouterr().err


def test_optimize_command(tmp_path, capsys, toysim_table_file):
    cfg = tmp_path / "opt.cfg"
    cfg.write_text(TOY_CONFIG.format(code=toysim_table_file))
    out_dir = tmp_path / "opt"
    assert main(["optimize", "--config", str(cfg), "--kind", "alpha",
                 "--grid", "0.75,0.875", "-o", str(out_dir)]) == 0
    report = (out_dir / "optimize_report.txt").read_text()
    assert "parameter: alpha" in report
    assert "best:" in report
    assert "0.75" in report and "0.875" in report
    grid_points = load_csv((out_dir / "grid_points.csv").read_text())
    assert {p.variant for p in grid_points} == {
        "scaled:alpha=0.75", "scaled:alpha=0.875"}
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["kind"] == "alpha"
    assert manifest["best"] in (0.75, 0.875)


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
