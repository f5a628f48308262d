import subprocess
import sys

import pytest

from kronrigid import sparse, vf
from kronrigid.cli import main
from kronrigid.fields import FieldCtx
from kronrigid.rigidity import hadamard_matrix
from kronrigid.vf import TruthTable

F5 = FieldCtx(5)


def test_synth_summary_line(capsys):
    rc = main(["synth", "--family", "hadamard", "--n", "8", "--depth", "2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "family=hadamard n=8 d=2 wires=7168 trivial=8192" in out


def test_synth_verify_roundtrip(tmp_path, capsys):
    path = str(tmp_path / "h8.circ")
    assert main(
        ["synth", "--family", "hadamard", "--n", "8", "--depth", "2", "--out", path]
    ) == 0
    capsys.readouterr()
    rc = main(["verify", "--circuit", path, "--family", "hadamard", "--n", "8"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "equal=True" in out


def test_verify_tampered_circuit(tmp_path, capsys):
    path = tmp_path / "h8.circ"
    assert main(
        [
            "synth", "--family", "hadamard", "--n", "8",
            "--depth", "2", "--out", str(path),
        ]
    ) == 0
    lines = path.read_text().splitlines()
    # flip the value on the last triplet line
    i, j, v = lines[-1].split()
    lines[-1] = f"{i} {j} {(int(v) % 5) % 4 + 1 if int(v) % 5 != 1 else 2}"
    path.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    rc = main(["verify", "--circuit", str(path), "--family", "hadamard", "--n", "8"])
    assert rc == 1
    assert "equal=False" in capsys.readouterr().out


def test_synth_disjointness(tmp_path, capsys):
    path = str(tmp_path / "r8.circ")
    assert main(
        [
            "synth", "--family", "disjointness", "--n", "8",
            "--depth", "2", "--out", path,
        ]
    ) == 0
    out = capsys.readouterr().out
    assert "wires=2378" in out
    assert main(["verify", "--circuit", path, "--family", "disjointness", "--n", "8"]) == 0


def test_rigidity_command(tmp_path, capsys):
    mat = tmp_path / "h2.mat"
    wit = tmp_path / "h2.rig"
    sparse.save_matrix(hadamard_matrix(2, F5), mat)
    rc = main(
        [
            "rigidity", "--matrix", str(mat), "--rank", "1",
            "--max-changes", "4", "--out", str(wit),
        ]
    )
    assert rc == 0
    assert capsys.readouterr().out.strip() == "4"
    assert wit.read_text().startswith("rigidity 4 1 4 5")


def test_rigidity_bound_too_small(tmp_path, capsys):
    mat = tmp_path / "h2.mat"
    sparse.save_matrix(hadamard_matrix(2, F5), mat)
    rc = main(["rigidity", "--matrix", str(mat), "--rank", "1", "--max-changes", "3"])
    assert rc == 1
    assert "no decomposition" in capsys.readouterr().out


def test_batch_command(tmp_path, capsys):
    f = TruthTable(2, 2, F5, (1, 0, 0, 0))
    ftab = tmp_path / "f.tt"
    pts = tmp_path / "pts.txt"
    vf.save_truthtable(f, ftab)
    pts.write_text("00\n01\n")
    rc = main(["batch", "--f", str(ftab), "--points", str(pts)])
    captured = capsys.readouterr()
    assert rc == 0
    assert captured.out.splitlines() == ["00 1", "01 0"]
    assert captured.err.startswith("adds=")


def test_disjoint_stats_csv(capsys):
    rc = main(["disjoint-stats", "--n", "14", "--k", "6"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,k,removed,residual_row_nnz,residual_col_nnz,bound"
    assert lines[1] == "14,6,3473,37,37,37"


def test_mmcost_csv(capsys):
    rc = main(["mmcost", "--n", "8", "--k", "2"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "q,n,k,backend,mults,adds,dense_mults"
    assert lines[1] == "2,8,2,naive,8192,7680,65536"


def test_mmcost_rect_exponent_note(capsys):
    rc = main(["mmcost", "--n", "9", "--k", "3"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "rectangular exponent" in captured.err


def test_bench_rows(capsys):
    rc = main(
        ["bench", "--family", "hadamard", "--n", "8:24:8", "--depth", "2,3"]
    )
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("family,n,N,d,base,")
    # h4 base covers 4 digits; rows appear when depth divides n/4
    rows = [ln.split(",") for ln in lines[1:]]
    assert [(r[1], r[3]) for r in rows] == [
        ("8", "2"), ("16", "2"), ("24", "2"), ("24", "3"),
    ]
    d2 = [r for r in rows if r[3] == "2"]
    assert d2[0][5] == "7168"  # matches the synthesized circuit
    # at fixed n, extra depth trades wires for rounds: d=3 beats d=2
    by_key = {(r[1], r[3]): float(r[8]) for r in rows}
    assert by_key[("24", "3")] < by_key[("24", "2")]


def test_usage_error(capsys):
    rc = main(["synth", "--family", "hadamard", "--n", "6", "--depth", "2"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_cap_exit_code(tmp_path, capsys):
    path = str(tmp_path / "h8.circ")
    assert main(
        ["synth", "--family", "hadamard", "--n", "8", "--depth", "2", "--out", path]
    ) == 0
    capsys.readouterr()
    rc = main(["verify", "--circuit", path, "--family", "disjointness", "--n", "27"])
    assert rc == 3
    assert "cap exceeded" in capsys.readouterr().err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kronrigid.cli", "disjoint-stats", "--n", "6", "--k", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("6,2,")
