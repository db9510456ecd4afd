import csv
import io
from pathlib import Path

import numpy as np
import pytest

from vibronic_response.cli import EXIT_CONFIG, EXIT_OK, EXIT_VERIFY, TimeGrid, UsageError, main
from vibronic_response.model import VibronicModel, third_order_pathway
from vibronic_response.third_order import r_v3

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"
V = str(CONFIGS / "v_scheme.yaml")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_time_grid_parsing():
    g = TimeGrid.parse(["0:0.5:3", "1.5", None], 3)
    t1, t2, t3 = g.mesh()
    assert np.allclose(t1, [0, 0.5, 1.0]) and np.all(t2 == 1.5) and np.all(t3 == 0)
    assert g.describe() == "t1=0.0:0.5:3 t2=1.5 t3=0.0"
    for bad in ("0:0:3", "0:1:0", "a:b:c", "1:2"):
        with pytest.raises(UsageError):
            TimeGrid.parse([bad, None, None], 3)


def test_vibrational_response_matches_closed_form(capsys):
    code, out, _ = run(capsys, "response", V, "--kind", "2", "--levels", "e1,e2", "--vibrational",
                       "--t1", "0:0.7:3", "--t2", "0.4", "--t3", "0:0.9:2")
    assert code == EXIT_OK
    z = VibronicModel.v_scheme(0.4, -0.7).z
    for r in rows(out):
        t = (float(r["t1"]), float(r["t2"]), float(r["t3"]))
        assert complex(float(r["re"]), float(r["im"])) == pytest.approx(r_v3(2, (1, 2), z, t), abs=1e-14)
    assert len(rows(out)) == 6


def test_preset_sums_pathways(capsys):
    _, summed, _ = run(capsys, "response", V, "--preset", "gsb-r", "--vibrational", "--t1", "1", "--t2", "0",
                       "--t3", "2")
    z = VibronicModel.v_scheme(0.4, -0.7).z
    want = sum(r_v3(2, (j, k), z, (1, 0, 2)) for j in (1, 2) for k in (1, 2))
    (r,) = rows(summed)
    assert complex(float(r["re"]), float(r["im"])) == pytest.approx(want, abs=1e-13)
    assert "summed over pathways (4)" in summed


def test_header_carries_provenance(capsys):
    _, out, _ = run(capsys, "response", V, "--kind", "1", "--t1", "0", "--t2", "0", "--t3", "0")
    head = [line for line in out.splitlines() if line.startswith("#")]
    assert head[0].startswith("# vibresp ")
    assert any(line.startswith("# config sha256 ") for line in head)
    assert any("grid" in line for line in head)


def test_output_file_equals_stdout(capsys, tmp_path):
    argv = ["response", V, "--kind", "4", "--t1", "0:0.3:4", "--t2", "1", "--t3", "0:0.3:4"]
    _, out, _ = run(capsys, *argv)
    assert main(["-o", str(tmp_path / "r.csv"), *argv]) == EXIT_OK
    assert (tmp_path / "r.csv").read_text() == out
    assert main([*argv, "-o", str(tmp_path / "after.csv")]) == EXIT_OK
    assert (tmp_path / "after.csv").read_text() == out


def test_pathway_file(capsys, tmp_path):
    script = tmp_path / "p.txt"
    script.write_text("# GSB, rephasing\nbra g->e1\nbra e1->g\nket g->e2\n")
    _, a, _ = run(capsys, "response", V, "--pathway", str(script), "--vibrational", "--t1", "1", "--t2", "2",
                  "--t3", "3")
    (r,) = rows(a)
    z = VibronicModel.v_scheme(0.4, -0.7).z
    assert complex(float(r["re"]), float(r["im"])) == pytest.approx(r_v3(2, (1, 2), z, (1, 2, 3)), abs=1e-14)


def test_peaks_trivial_and_columns(capsys, tmp_path):
    flat = tmp_path / "flat.yaml"
    flat.write_text("levels: [{energy: 0}, {energy: 0}, {energy: 0}]\nmodes: [{displacements: [0, 0, 0]}]\n")
    code, out, _ = run(capsys, "peaks", str(flat), "--kind", "2", "--t2", "0:0.5:5")
    assert code == EXIT_OK
    assert all(float(r["re_k2"]) == 1 and float(r["im_k2"]) == 0 for r in rows(out))
    _, out, _ = run(capsys, "peaks", V, "--kind", "1,2,4,5", "--t2", "0:1:3")
    assert list(rows(out)[0]) == ["t2", "re_k1", "im_k1", "re_k2", "im_k2", "re_k4", "im_k4", "re_k5", "im_k5"]


def test_peaks_convergence_report(capsys):
    code, out, err = run(capsys, "peaks", V, "--kind", "7", "--levels", "1,1,2", "--p1", "-1", "--p3", "1",
                         "--t2", "0:1:3", "--convergence")
    assert code == EXIT_OK
    assert "max |A(q_max) - A(2 q_max)|" in out and "doubling q_max" in err


def test_spectrum_output(capsys):
    code, out, _ = run(capsys, "spectrum", V, "--kind", "2", "--t1", "0:0.5:8", "--t2", "0", "--t3", "0:0.5:8",
                       "--pad", "2")
    assert code == EXIT_OK
    data = rows(out)
    assert len(data) == 16 * 16
    assert list(data[0]) == ["w1", "w3", "re", "im"]
    assert "gamma 0.15" in out


def test_explain_lists_terms(capsys):
    code, out, _ = run(capsys, "explain", str(CONFIGS / "ladder.yaml"), "--kind", "8", "--levels", "e,e,f")
    assert code == EXIT_OK
    # two modes, six terms each
    assert "# 12 terms" in out and "# h = mode 0: " in out


@pytest.mark.parametrize("argv, fragment", [
    (["response", V, "--kind", "2", "--temperature", "1", "--kappa", "0.1"], "cannot be combined"),
    (["response", V, "--kind", "9"], "kind"),
    (["response", V, "--preset", "nope"], "nope"),
    (["response", V, "--kind", "2", "--levels", "e1,zz"], "zz"),
    (["response", V, "--kind", "2", "--t1", "0:-1:3"], "step"),
    (["response", str(CONFIGS / "missing.yaml"), "--kind", "2"], "cannot read"),
])
def test_usage_errors_exit_2(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_CONFIG
    assert out == ""
    assert err.startswith("vibresp: error: ") and fragment in err


def test_config_error_reports_line_and_column(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("levels:\n  - {energy: 0}\n  - {energy: x}\nmodes: [{displacements: [0, 1]}]\n")
    code, _, err = run(capsys, "response", str(bad), "--kind", "2")
    assert code == EXIT_CONFIG
    assert f"{bad}:3:14:" in err


def test_dsl_error_in_pathway_file(capsys, tmp_path):
    script = tmp_path / "p.txt"
    script.write_text("bra g->e1\nket e1->g\n")
    code, _, err = run(capsys, "response", V, "--pathway", str(script))
    assert code == EXIT_CONFIG
    assert "line 2" in err


def test_verify_exit_codes(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "--scale", "0.2")
    assert code == EXIT_OK
    assert out.count("PASS") == 7
    from vibronic_response import cli, verify

    def failing(seed=0, scale=1.0):
        return [verify.CheckResult("forced", 1, 1.0, 1e-10)]

    monkeypatch.setattr(cli, "run_suite", failing)
    code, out, _ = run(capsys, "verify")
    assert code == EXIT_VERIFY and "FAIL" in out


def test_repeated_runs_are_byte_identical(tmp_path):
    argv = ["response", V, "--preset", "se-nr", "--t1", "0:0.25:12", "--t2", "0.7", "--t3", "0:0.25:12",
            "--temperature", "0.8"]
    outs = []
    for i in range(3):
        path = tmp_path / f"{i}.csv"
        assert main(["-o", str(path), *argv]) == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_thermal_flag_matches_library(capsys):
    from vibronic_response.general import build_exponent
    from vibronic_response.thermal import thermal_response

    _, out, _ = run(capsys, "response", V, "--kind", "5", "--levels", "1,2", "--vibrational", "--temperature",
                    "0.7", "--t1", "0.3", "--t2", "1.1", "--t3", "2.0")
    (r,) = rows(out)
    model = VibronicModel.v_scheme(0.4, -0.7)
    want = thermal_response(build_exponent(model, third_order_pathway(5, (1, 2))), (0.3, 1.1, 2.0), 0.7)
    assert complex(float(r["re"]), float(r["im"])) == pytest.approx(complex(want), abs=1e-14)
