import csv
import io
import json
import math
import subprocess
import sys

import pytest
from scipy import special

from symcone import spherical
from symcone.cli import main
from symcone.cone import ConeParams, dim_km
from symcone.jordan import frame_element
from symcone.spherical import phi_eval


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_phi(capsys):
    code, out, _ = run(capsys, "eval", "phi", "--cone", "realsym:2", "--m", "2,1", "--x", "diag:0.5,1.5")
    assert code == 0
    c = ConeParams.realsym(2)
    assert float(out) == pytest.approx(phi_eval(c, (2, 1), frame_element(c, [0.5, 1.5])), rel=1e-15)


def test_eval_phi_zero_partition(capsys):
    code, out, _ = run(capsys, "eval", "phi", "--cone", "complexherm:3", "--m", "0", "--x", "anything")
    assert code == 0 and float(out) == 1.0


def test_eval_laguerre_classical(capsys):
    code, out, _ = run(capsys, "eval", "laguerre", "--cone", "line", "--nu", "2", "--m", "3", "--x", "1.2", "--poly")
    assert code == 0
    assert float(out) == pytest.approx(6 * special.eval_genlaguerre(3, 1, 1.2), rel=1e-13)
    code, out, _ = run(capsys, "eval", "laguerre", "--cone", "line", "--nu", "2", "--m", "3", "--x", "1.2")
    assert float(out) == pytest.approx(math.exp(-1.2) * 6 * special.eval_genlaguerre(3, 1, 2.4), rel=1e-13)


def test_eval_other_functions(capsys):
    code, out, _ = run(capsys, "eval", "ibessel", "--cone", "line", "--nu", "2.5", "--x", "0.7")
    assert code == 0
    from symcone.bessel import ibessel_rank1_classical

    assert float(out) == pytest.approx(ibessel_rank1_classical(2.5, 0.7), rel=1e-12)
    code, out, _ = run(capsys, "eval", "psi", "--cone", "line", "--nu", "2", "--m", "1", "--z", "2j")
    assert complex(out) == pytest.approx((2 / 3) ** 2 / 3)
    code, out, _ = run(capsys, "eval", "whittaker", "--model", "disc", "--cone", "realsym:2", "--nu", "2",
                       "--t", "0.5", "--z", "te:0")
    assert float(out) == pytest.approx(math.exp(-1.0))
    code, out, _ = run(capsys, "eval", "whittaker", "--model", "tube", "--cone", "line", "--nu", "3", "--t", "0.5",
                       "--z", "1+2j", "--expansion", "--max-weight", "60", "--format", "json")
    data = json.loads(out)
    val = complex(data["value"]["re"], data["value"]["im"])
    assert abs(val - complex(math.e) ** (1j * (1 + 2j) * 0.5)) <= 1e-8


def test_exit_codes(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "eval", "phi", "--cone", "realsym:2", "--m", "1", "--x", "diag:1,2,3")[0] == 2
    assert run(capsys, "eval", "phi", "--cone", "nonsense:2", "--m", "1", "--x", "1")[0] == 2
    code, _, err = run(capsys, "eval", "whittaker", "--model", "disc", "--cone", "line", "--nu", "2", "--t", "0.5",
                       "--z", "1.5")
    assert code == 3 and "domain error" in err


def test_verify_recurrence(capsys):
    code, out, err = run(capsys, "verify", "recurrence", "--cone", "realsym:2", "--nu", "2.5", "--t", "0.7",
                         "--max-weight", "8")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["pass"] == "true" for r in rows)
    assert list(rows[0]) == ["suite", "identity", "cone", "nu", "point", "M", "residual", "tol", "stderr", "pass",
                             "seed"]
    assert "0 failed" in err


def test_verify_genfct_line(capsys):
    code, out, _ = run(capsys, "verify", "genfct", "--cone", "line", "--nu", "2.5", "--grid", "default")
    assert code == 0
    assert len(list(csv.DictReader(io.StringIO(out)))) == 25


def test_verify_failure_exit_code(capsys):
    # an impossible tolerance makes every check fail
    code, _, _ = run(capsys, "verify", "recurrence", "--cone", "line", "--tol", "-1")
    assert code == 1


def test_verify_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "verify", "fk-ex1", "--cone", "complexherm:2", "--haar-samples", "4000", "--seed", "7",
                   "--format", "json", "--output", str(path))[0] == 0
    assert a.read_text() == b.read_text()
    rows = json.loads(a.read_text())
    assert any(r["identity"].endswith("[montecarlo]") and r["stderr"] > 0 for r in rows)


def test_tables(capsys):
    code, out, _ = run(capsys, "table", "dims", "--cone", "complexherm:2", "--max-weight", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    c = ConeParams.complexherm(2)
    for r in rows:
        m = tuple(int(p) for p in r["m"].split(","))
        assert float(r["d_m"]) == dim_km(c, m)
    code, out, _ = run(capsys, "table", "laguerre", "--cone", "line", "--nu", "2", "--max-weight", "3")
    assert code == 0 and len(out.strip().splitlines()) == 5
    code, out, _ = run(capsys, "table", "coefficients", "--cone", "realsym:2", "--nu", "2", "--t", "0.5",
                       "--max-weight", "2", "--format", "json")
    data = json.loads(out)
    assert len({r["model"] for r in data}) == 4
    assert run(capsys, "table", "laguerre", "--cone", "line")[0] == 2


def test_numbers_have_17_digits(capsys):
    _, out, _ = run(capsys, "eval", "ibessel", "--cone", "line", "--nu", "2.5", "--x", "0.7")
    assert float(out) == float(repr(float(out)))
    mantissa = out.strip().lstrip("-").split("e")[0].replace(".", "").lstrip("0")
    assert len(mantissa) == 17


def test_cache_commands(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SYMCONE_CACHE_DIR", str(tmp_path))
    try:
        code, out, _ = run(capsys, "cache", "warm", "--cone", "realsym:2", "--max-weight", "5")
        assert code == 0 and "warmed" in out
        assert (tmp_path / "jackcache.tsv").exists()
        code, out, _ = run(capsys, "cache", "info")
        assert str(tmp_path) in out
        assert int(out.split("entries:")[1]) > 0
        assert run(capsys, "cache", "clear")[0] == 0
        _, out, _ = run(capsys, "cache", "info")
        assert int(out.split("entries:")[1]) == 0
    finally:
        spherical.configure_cache(None)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "symcone", "eval", "phi", "--m", "1", "--x", "0.25"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and float(proc.stdout) == pytest.approx(0.25)
