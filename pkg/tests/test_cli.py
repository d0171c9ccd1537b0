import json
import subprocess
import sys

import numpy as np
import pytest

from apamm.cli import main
from apamm.executor import format_matrix_csv
from apamm.model import builtin, serialize_algorithm
from apamm.laurent import poly

APA46 = "smirnov-4x4x4-46"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_exact_builtin(capsys):
    code, out, _ = run(capsys, "verify", "strassen-2x2x2", "--exact")
    assert code == 0 and "exact yes" in out and "S 0" in out


def test_verify_apa46(capsys, files):
    path = files("s.bilin", serialize_algorithm(builtin(APA46)))
    code, out, _ = run(capsys, "verify", path)
    assert "S 37x^2 + 53x^4 + 37x^6 + ..." in out
    assert code == 0


def test_verify_exact_flag_rejects_apa(capsys):
    alg = builtin("classical-1x1x1")
    alg = alg.replace_entry("gamma", 0, 0, 0, poly([(-1, 1)]))
    alg = alg.replace_entry("alpha", 0, 0, 0, poly([(1, 1), (2, 1)]))
    import tempfile, os
    with tempfile.TemporaryDirectory() as d:
        p = os.path.join(d, "a.bilin")
        open(p, "w").write(serialize_algorithm(alg))
        assert run(capsys, "verify", p)[0] == 0
        assert run(capsys, "verify", p, "--exact")[0] == 1


def test_verify_sign_flip_localized(capsys, files):
    alg = builtin("strassen-2x2x2").replace_entry("alpha", 0, 0, 0, poly([(0, -1)]))
    path = files("flip.bilin", serialize_algorithm(alg))
    code, out, _ = run(capsys, "verify", path)
    assert code == 1
    assert "worst indices" in out and "min residual order 0" in out


def test_verify_truncated_file(capsys, files):
    text = serialize_algorithm(builtin("strassen-2x2x2"))
    path = files("trunc.bilin", text[: len(text) // 2])
    code, _, err = run(capsys, "verify", path)
    assert code == 2 and "line" in err


def test_verify_json_schema(capsys):
    code, out, _ = run(capsys, "verify", "classical-2x2x2", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    for key in ("is_exact", "is_apa_valid", "min_residual_order", "worst_indices", "objective",
                "residual_count_nonzero", "census"):
        assert key in doc


def test_stats(capsys):
    code, out, _ = run(capsys, "stats", "classical-4x4x4")
    assert code == 0 and "nonzero 192 / 3072" in out and "order span 0" in out
    code, out, _ = run(capsys, "stats", "strassen-2x2x2")
    assert "T 7" in out
    code, out, _ = run(capsys, "stats", APA46)
    assert "nonzero 352 / 2208" in out and "multi-term 1" in out and "order span 3" in out


def test_stats_json(capsys):
    code, out, _ = run(capsys, "stats", "strassen-2x2x2", "--json")
    doc = json.loads(out)
    assert doc["schema_version"] == 1 and doc["T"] == 7 and doc["total_slots"] == 84


def _csv(files, name, M):
    return files(name, format_matrix_csv(M))


def test_multiply_classical(capsys, files):
    rng = np.random.default_rng(0)
    A, B = rng.uniform(-1, 1, (3, 3)), rng.uniform(-1, 1, (3, 3))
    a, b = _csv(files, "a.csv", A), _csv(files, "b.csv", B)
    code, out, err = run(capsys, "multiply", "classical-3x3x3", "--a", a, "--b", b, "--compare")
    assert code == 0
    C = np.array([[float(v) for v in line.split(",")] for line in out.splitlines()])
    assert np.allclose(C, A @ B, atol=1e-14)
    err_line = [l for l in err.splitlines() if l.startswith("relative_error")][0]
    assert float(err_line.split()[1]) <= 1e-13


def test_multiply_apa46_compare(capsys, files):
    rng = np.random.default_rng(0)
    A, B = rng.uniform(-1, 1, (4, 4)), rng.uniform(-1, 1, (4, 4))
    a, b = _csv(files, "a.csv", A), _csv(files, "b.csv", B)
    out_path = files("c.csv", "")
    code, out, _ = run(capsys, "multiply", APA46, "--a", a, "--b", b, "--x", "2e-5",
                       "--compare", "-o", out_path)
    assert code == 0
    digits = float([l for l in out.splitlines() if l.startswith("digits")][0].split()[1])
    assert digits >= 3


def test_multiply_counts_levels(capsys, files):
    a = _csv(files, "a.csv", np.ones((16, 16)))
    code, _, err = run(capsys, "multiply", APA46, "--a", a, "--b", a, "--x", "0.001",
                       "--levels", "2", "--counts")
    assert code == 0 and "multiplications 2116" in err


def test_multiply_exact_mode(capsys, files):
    a = files("a.csv", "1/2,1\n0,-3/4\n")
    b = files("b.csv", "2,1/3\n1,1\n")
    code, out, _ = run(capsys, "multiply", "strassen-2x2x2", "--a", a, "--b", b, "--exact")
    assert code == 0 and out == "2,7/6\n-3/4,-3/4\n"


def test_multiply_usage_errors(capsys, files):
    a = _csv(files, "a.csv", np.ones((4, 4)))
    b3 = _csv(files, "b3.csv", np.ones((3, 3)))
    assert run(capsys, "multiply", "classical-4x4x4", "--a", a)[0] == 3
    assert run(capsys, "multiply", "classical-4x4x4", "--a", a, "--b", b3)[0] == 3
    assert run(capsys, "multiply", APA46, "--a", a, "--b", a)[0] == 3  # no --x
    bad = files("bad.csv", "1,2\nfoo,3\n")
    assert run(capsys, "multiply", "classical-2x2x2", "--a", bad, "--b", bad)[0] == 2


def test_sweep_cli(capsys, files):
    code, out, _ = run(capsys, "sweep", "strassen-2x2x2", "--points", "4")
    assert code == 0 and "optimal_x" in out
    code, out, _ = run(capsys, "sweep", "classical-2x2x2", "--xmin", "0.001", "--xmax", "0.001",
                       "--points", "1")
    assert code == 0 and "optimal_x 0.001" in out
    assert run(capsys, "sweep", "classical-2x2x2", "--xmin", "1", "--xmax", "0.1")[0] == 3
    assert run(capsys, "sweep", "classical-2x2x2", "--xmin", "-1")[0] == 3
    assert run(capsys, "sweep", "classical-2x2x2", "--points", "0")[0] == 3
    code, out, _ = run(capsys, "sweep", "classical-2x2x2", "--points", "3", "--csv", "-")
    assert out.splitlines()[0].startswith("x,relative_error")


def test_sweep_apa46_default(capsys):
    code, out, _ = run(capsys, "sweep", APA46, "--json")
    doc = json.loads(out)
    assert code == 0 and 2e-6 <= doc["optimal_x"] <= 2e-4


def test_convert(capsys, files, tmp_path):
    poly_out = str(tmp_path / "s.poly")
    assert run(capsys, "convert", APA46, "--encoding", "poly", "-o", poly_out)[0] == 0
    text = open(poly_out).read()
    gamma46 = text.split("t 46\n")[1].split("alpha")[0].splitlines()[2]
    assert gamma46.split()[2] == "x+x^2"
    dec_out = str(tmp_path / "s.dec")
    assert run(capsys, "convert", poly_out, "--encoding", "decimal", "-o", dec_out)[0] == 0
    back = str(tmp_path / "s2.poly")
    run(capsys, "convert", dec_out, "--encoding", "poly", "-o", back)
    assert open(back, "rb").read() == open(poly_out, "rb").read()


def test_convert_unencodable(capsys, files):
    alg = builtin("classical-1x1x1").replace_entry("beta", 0, 0, 0, poly([(1, 1), (2, -1)]))
    path = files("mixed.bilin", serialize_algorithm(alg, "poly"))
    assert "x-x^2" in open(path).read()
    code, _, err = run(capsys, "convert", path, "--encoding", "decimal")
    assert code == 1 and "poly" in err


def test_convert_transpose(capsys, files):
    code, out, _ = run(capsys, "convert", "strassen-2x2x2", "--encoding", "poly", "--transpose-gamma")
    assert code == 0
    path = files("t.bilin", out)
    assert run(capsys, "verify", path, "--exact")[0] == 1


def test_counts_cmd(capsys):
    code, out, _ = run(capsys, "counts", "classical-4x4x4")
    assert code == 0 and "multiplications 64" in out and "naive_additions 48" in out


def test_usage_and_missing(capsys):
    assert run(capsys)[0] == 3
    assert run(capsys, "frobnicate")[0] == 3
    assert run(capsys, "verify", "/nonexistent/file.bilin")[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "apamm", "stats", "strassen-2x2x2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "T 7" in r.stdout
