import csv
import io
import json
import re

import pytest

from periodbound.bounds import k_alpha
from periodbound.cli import main
from periodbound.config import ConfigError, default_config, parse_config
from periodbound.errors import ParameterError
from periodbound.io import atomic_write_text, dumps, rows_to_csv, to_jsonable
from periodbound.scenarios import emit_plotdata, run


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def strip_duration(text):
    return re.sub(r'"duration_s": [^,\n}]+', '"duration_s": 0', text)


class TestConfig:
    def test_delta_out_of_range(self):
        text = "[scenario]\nkind = proof-chain\n\n[params]\ndeltas = 0.7\n"
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert "delta must lie in (0, 1/2)" in str(info.value)
        assert info.value.line == 5
        assert info.value.key == "params.deltas"

    def test_bound_delta(self):
        with pytest.raises(ConfigError, match=r"delta must lie in \(0, 1/2\)"):
            parse_config("[scenario]\nkind = bound\n[params]\ndelta = 0.7\np = 2\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config("[scenario]\nkind = bound\n[params]\nalpah = 0.5\n")
        assert info.value.key == "params.alpah" and info.value.line == 4

    def test_unknown_section_and_kind(self):
        with pytest.raises(ConfigError):
            parse_config("[scenario]\nkind = bound\n[extra]\nx = 1\n")
        with pytest.raises(ConfigError):
            parse_config("[scenario]\nkind = nope\n")
        with pytest.raises(ConfigError):
            parse_config("[params]\nalpha = 0.5\n")

    def test_bad_value_and_seed(self):
        with pytest.raises(ConfigError):
            parse_config("[scenario]\nkind = bound\n[params]\nalpha = half\n")
        with pytest.raises(ConfigError):
            parse_config("[scenario]\nkind = bound\nseed = -3\n")

    def test_alpha_p_checked(self):
        with pytest.raises(ConfigError, match="alpha\\*p"):
            parse_config("[scenario]\nkind = proof-chain\n[params]\nalpha = 0.5\nps = 1.5, 2.5\n")

    def test_parses_lists_and_output(self):
        cfg = parse_config("[scenario]\nkind = bound\nseed = 4\n[params]\nalpha = 0, 0.5\n"
                           "[output]\nformat = csv\nplot = alpha, k_value\n")
        assert cfg.params["alpha"] == [0.0, 0.5]
        assert cfg.seed == 4 and cfg.format == "csv" and cfg.plot == ["alpha", "k_value"]

    def test_default_overrides(self):
        with pytest.raises(ConfigError):
            default_config("bound", bogus=1)


class TestRun:
    def test_bound_report(self):
        report = run(default_config("bound", alpha=[0.5]))
        assert report["cases"][0]["outputs"]["k_value"] == pytest.approx(0.098889, abs=1e-6)
        assert report["verdict"] == {"status": "pass", "passed": 1, "failed": 0}
        assert set(report) == {"scenario", "cases", "verdict", "version", "duration_s"}

    def test_case_error_recorded(self):
        cfg = default_config("bound", alpha=[0.5], delta=0.25, p=1.5)
        cfg.params["p"] = 2.5  # alpha*p >= 1, bypassing config checks
        report = run(cfg)
        case = report["cases"][0]
        assert case["pass"] is False and "ParameterError" in case["error"]
        assert report["verdict"]["status"] == "fail"

    def test_sweep_parallel_matches_serial(self):
        cfg = default_config("sweep", lams=[1.0, 2.0], omegas=[1.0], alphas=[0.0, 0.5], remeasure=2)
        a, b = run(cfg, jobs=1), run(cfg, jobs=2)
        assert strip_duration(dumps(a)) == strip_duration(dumps(b))
        assert a["verdict"]["status"] == "pass"


class TestPlotData:
    def test_k_vs_alpha(self):
        report = run(default_config("bound"))
        text = emit_plotdata(report, ["alpha", "k_value"])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 10
        for r in rows:
            assert float(r["k_value"]) == pytest.approx(k_alpha(float(r["alpha"])).k_value, rel=1e-14)

    def test_slack_vs_omega(self):
        report = run(default_config("sweep", lams=[2.0], alphas=[0.5]))
        rows = list(csv.DictReader(io.StringIO(emit_plotdata(report, ["omega", "certificate.slack"]))))
        assert len(rows) == 4
        slacks = [float(r["certificate.slack"]) for r in rows]
        assert all(s > 1 for s in slacks)

    def test_empty_report(self):
        assert emit_plotdata({"cases": []}, ["alpha", "k_value"]) == "alpha,k_value\n"

    def test_unknown_field(self):
        report = run(default_config("bound", alpha=[0.5]))
        with pytest.raises(ParameterError):
            emit_plotdata(report, ["alpha", "nope"])


class TestIo:
    def test_fifteen_digits(self):
        assert to_jsonable(1 / 3) == float("0.333333333333333")
        assert to_jsonable([float("inf"), float("nan")]) == ["inf", "nan"]

    def test_flatten_csv(self):
        text = rows_to_csv([{"a": {"b": 1.0}, "c": [1, 2]}])
        assert text.splitlines() == ["a.b,c", "1.0,1;2"]

    def test_atomic_write(self, tmp_path):
        p = tmp_path / "sub" / "x.txt"
        atomic_write_text(p, "one")
        atomic_write_text(p, "two")
        assert p.read_text() == "two"
        assert [f.name for f in p.parent.iterdir()] == ["x.txt"]


class TestMain:
    def test_bound_to_stdout(self, capsys):
        assert main(["bound"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["verdict"]["status"] == "pass"

    def test_config_error_exit(self, tmp_path, capsys):
        path = write(tmp_path, "[scenario]\nkind = proof-chain\n[params]\ndeltas = 0.7\n")
        assert main(["proof-chain", "--config", path]) == 2
        assert "delta must lie in (0, 1/2)" in capsys.readouterr().err

    def test_kind_mismatch(self, tmp_path):
        path = write(tmp_path, "[scenario]\nkind = bound\n")
        assert main(["rd", "--config", path]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["bound", "--config", str(tmp_path / "absent.ini")]) == 2

    def test_bad_jobs(self):
        assert main(["bound", "--jobs", "0"]) == 2

    def test_fail_exit(self, tmp_path):
        path = write(tmp_path, "[scenario]\nkind = nse-estimate\n[params]\nG = 2, 128\nN = 16\n"
                               "pairs = 10\nstability_factor = 1.0001\n")
        assert main(["nse-estimate", "--config", path, "--out", str(tmp_path / "o")]) == 1

    def test_outputs_and_determinism(self, tmp_path):
        path = write(tmp_path, "[scenario]\nkind = nse-estimate\nseed = 7\n[params]\nG = 2, 8\nN = 16\n"
                               "pairs = 10\n[output]\nplot = G, measured_c\n")
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["nse-estimate", "--config", path, "--out", str(out1)]) == 0
        assert main(["nse-estimate", "--config", path, "--out", str(out2)]) == 0
        t1 = (out1 / "nse-estimate.json").read_text()
        t2 = (out2 / "nse-estimate.json").read_text()
        assert strip_duration(t1) == strip_duration(t2)
        assert (out1 / "nse-estimate_plot.csv").read_text().startswith("G,measured_c\n")
        assert main(["nse-estimate", "--config", path, "--seed", "8", "--out", str(tmp_path / "c")]) == 0
        assert strip_duration((tmp_path / "c" / "nse-estimate.json").read_text()) != strip_duration(t1)

    def test_csv_format(self, tmp_path):
        assert main(["rd", "--format", "csv", "--out", str(tmp_path)]) == 0
        rows = list(csv.DictReader(io.StringIO((tmp_path / "rd.csv").read_text())))
        assert rows[0]["outputs.alpha"] == "0.75"

    def test_orbit_trajectory(self, tmp_path):
        path = write(tmp_path, "[scenario]\nkind = orbit\n[params]\nrefine = false\ntrajectory = true\n"
                               "inert = 2.0\n")
        assert main(["orbit", "--config", path, "--out", str(tmp_path)]) == 0
        header = (tmp_path / "orbit_trajectory.csv").read_text().splitlines()[0]
        assert header == "t,u_1,u_2,u_3"

    def test_verify_all_rejects_config(self, tmp_path):
        assert main(["verify-all", "--config", write(tmp_path, "[scenario]\nkind = bound\n")]) == 2
