import io
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from fconv import DVector, catalog_get, verify_decomposition
from fconv.cli import main
from fconv.formats import format_vector, parse_decomposition

DATA = Path(__file__).parent / "data"


def run(args, stdin="", monkeypatch=None):
    if monkeypatch is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    out = io.StringIO()
    code = main(args, out=out)
    return code, out.getvalue()


def write_vec(tmp_path, name, vec):
    p = tmp_path / name
    p.write_text(format_vector(vec))
    return str(p)


def test_convolve_units(monkeypatch):
    code, out = run(["convolve", "--base", "covering", "--k", "1", "--backend", "naive"],
                    "vec d 2 k 1\n0 1\n---\nvec d 2 k 1\n1 1\n", monkeypatch)
    assert code == 0 and out == "1 1\n"


def test_convolve_xor_all_ones(tmp_path):
    ones = write_vec(tmp_path, "ones.vec", DVector.ones(2, 3))
    code, out = run(["convolve", "--base", "xor", "--k", "3", "--backend", "yates",
                     "--u", ones, "--v", ones])
    assert code == 0
    assert out.splitlines() == [f"{i} 8" for i in range(8)]


@pytest.mark.parametrize("matmul", [["--matmul", "naive"], ["--matmul", "strassen7", "--cutoff", "1"]])
def test_convolve_strassen_matches_naive_bytes(tmp_path, matmul):
    rng = np.random.default_rng(1)
    u = write_vec(tmp_path, "u.vec", DVector(2, 3, rng.integers(-9, 10, 8), 4))
    v = write_vec(tmp_path, "v.vec", DVector(2, 3, rng.integers(-9, 10, 8)))
    base = ["convolve", "--base", "subset", "--k", "3", "--u", u, "--v", v]
    _, want = run(base + ["--backend", "naive"])
    code, got = run(base + ["--backend", "strassen"] + matmul)
    assert code == 0 and got == want and "/" in want


def test_convolve_file_base_and_header(tmp_path, monkeypatch):
    code, out = run(["convolve", "--base", f"file:{DATA / 'covering.fn'}", "--k", "2",
                     "--backend", "rank", "--header"],
                    "vec d 2 k 2\n0 1\n1 1\n2 1\n3 1\n---\nvec d 2 k 2\n0 1\n1 1\n2 1\n3 1\n", monkeypatch)
    assert code == 0 and out == "vec d 2 k 2\n0 1\n1 3\n2 3\n3 9\n"


def test_convolve_k0_is_a_scalar_product(monkeypatch):
    code, out = run(["convolve", "--base", "domset", "--k", "0"], "0 3\n---\n0 -2/3\n", monkeypatch)
    assert code == 0 and out == "0 -2\n"


def test_convolve_parse_error_exit_2(monkeypatch, capsys):
    code, out = run(["convolve", "--base", "covering", "--k", "1"],
                    "vec d 2 k 1\n0 x\n---\n1 1\n", monkeypatch)
    assert code == 2 and out == ""
    assert "<stdin>:2:3:" in capsys.readouterr().err


def test_convolve_dimension_mismatch_exit_3(monkeypatch):
    code, out = run(["convolve", "--base", "covering", "--k", "1"],
                    "vec d 3 k 1\n0 1\n---\n1 1\n", monkeypatch)
    assert code == 3 and out == ""


def test_convolve_usage_errors_exit_2(monkeypatch):
    assert run(["convolve", "--base", "nope", "--k", "1"], "", monkeypatch)[0] == 2
    assert run(["convolve", "--k", "1"], "", monkeypatch)[0] == 2
    assert run(["convolve", "--base", "covering", "--k", "1", "--u", "/no/such/file"], "", monkeypatch)[0] == 2


def test_convolve_rejects_unverified_dec(monkeypatch):
    code, _ = run(["convolve", "--base", "covering", "--k", "1", "--dec", str(DATA / "covering_bad.dec")],
                  "0 1\n---\n1 1\n", monkeypatch)
    assert code == 3


def test_verify_agrees():
    code, out = run(["verify", "--base", "covering", "--k", "4", "--trials", "20", "--seed", "1"])
    assert code == 0
    rows = out.splitlines()[1:5]
    assert [r.split()[0] for r in rows] == ["naive", "rank", "yates", "strassen"]
    assert len({r.split()[1] for r in rows}) == 1


def test_verify_reports_corrupted_decomposition():
    code, out = run(["verify", "--base", "covering", "--k", "3", "--trials", "2",
                     "--dec", str(DATA / "covering_bad.dec")])
    assert code == 1
    assert "MISMATCH" in out and "at index" in out


def test_verify_rejects_k0():
    assert run(["verify", "--base", "covering", "--k", "0", "--trials", "2"])[0] == 2


def test_verify_threads_give_identical_output(monkeypatch):
    args = ["verify", "--base", "domset", "--k", "3", "--trials", "4", "--no-timing"]
    one = run(["--threads", "1"] + args)
    monkeypatch.setenv("FCONV_THREADS", "3")
    assert run(args) == one
    assert run(["--threads", "0"] + args)[0] == 2


def test_bench_rows_and_ratios():
    code, out = run(["bench", "--base", "covering", "--k-range", "4..10", "--backend", "yates",
                     "--seed", "3", "--no-timing"])
    lines = out.splitlines()
    assert code == 0 and lines[0] == "k,backend,multiplications,additions,wall_ms"
    mults = [int(r.split(",")[2]) for r in lines[1:]]
    assert len(mults) == 7
    assert all(b / a <= 2.5 for a, b in zip(mults, mults[1:]))
    _, naive = run(["bench", "--base", "covering", "--k-range", "4..10", "--backend", "naive", "--no-timing"])
    nm = [int(r.split(",")[2]) for r in naive.splitlines()[1:]]
    assert all(b / a >= 2.9 for a, b in zip(nm, nm[1:]))


def test_bench_is_deterministic_and_empty_range():
    args = ["bench", "--base", "xor", "--k-range", "2..5", "--backend", "naive,rank", "--no-timing"]
    assert run(args) == run(args)
    assert run(["bench", "--base", "xor", "--k-range", "5..4"]) == (0, "k,backend,multiplications,additions,wall_ms\n")
    assert run(["bench", "--base", "xor", "--k-range", "5-4"])[0] == 2


def test_decompose():
    code, out = run(["decompose", "--fn", f"file:{DATA / 'covering.fn'}", "--max-rank", "2",
                     "--coeffs", "-1,0,1"])
    assert code == 0
    dec = parse_decomposition(out)
    assert dec.rank == 2 and verify_decomposition(catalog_get("covering").base, dec)
    assert run(["decompose", "--fn", "covering", "--max-rank", "1"]) == (0, "none\n")
    assert run(["decompose", "--fn", "domset", "--max-rank", "3", "--budget", "10"])[0] == 3


def test_dp_commands():
    p3 = ["--graph", str(DATA / "p3.gr"), "--td", str(DATA / "p3.td")]
    c4 = ["--graph", str(DATA / "c4.gr"), "--td", str(DATA / "c4.td")]
    assert run(["dp", "domset"] + p3) == (0, "0 0\n1 1\n2 3\n3 1\n")
    assert run(["dp", "pm"] + c4) == (0, "2\n")
    assert run(["dp", "3col"] + c4 + ["--backend", "naive"]) == (0, "18\n")
    assert run(["dp", "domset"] + c4 + ["--backend", "ranked"])[0] == 2


def test_dp_td_of_wrong_graph_exit_3():
    args = ["dp", "pm", "--graph", str(DATA / "c4.gr"), "--td", str(DATA / "p3.td")]
    assert run(args)[0] == 3


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "fconv", "dp", "pm", "--graph", str(DATA / "c4.gr"),
                           "--td", str(DATA / "c4.td")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "2\n"
