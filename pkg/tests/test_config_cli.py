import csv
import io
import json
import math

import pytest

from xychain.cli import build_parser, cmd_verify, main
from xychain.config import ConfigError, RunConfig, load_config, parse_angle, parse_config
from xychain.nmrcompile import PulseSequence


class TestParseAngle:
    @pytest.mark.parametrize(
        "text,want",
        [
            ("0.5pi", math.pi / 2),
            ("pi", math.pi),
            ("-pi", -math.pi),
            ("-2*pi", -2 * math.pi),
            ("2 pi", 2 * math.pi),
            ("1e-1pi", 0.1 * math.pi),
            ("0.7", 0.7),
            ("-3", -3.0),
        ],
    )
    def test_values(self, text, want):
        assert parse_angle(text) == pytest.approx(want, rel=1e-15)

    @pytest.mark.parametrize("text", ["", "half", "pipi", "0.5pie"])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_angle(text)


class TestConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert (cfg.j12, cfg.j23, cfg.j13) == (200.9, 9.16, 103.1)
        assert cfg.sweep_count == 21 and cfg.sweep_stop == pytest.approx(2 * math.pi)
        assert cfg.spin_system.coupling(1, 3) == 103.1

    def test_parse(self):
        cfg = parse_config("# sample\nj.12 = 150  # inline\n\nsweep.stop = pi\nOUT.SWEEP = a.csv\n")
        assert cfg.j12 == 150.0 and cfg.sweep_stop == math.pi and cfg.out_sweep == "a.csv"
        assert cfg.spin_system.coupling(1, 2) == 150.0

    @pytest.mark.parametrize(
        "text,match",
        [
            ("j.99 = 1", "unknown key"),
            ("j.12 200", "expected"),
            ("j.12 =", "expected"),
            ("sweep.count = many", "bad value"),
            ("sweep.count = 0", "at least 1"),
            ("sweep.start = 2\nsweep.stop = 1", "sweep.stop"),
            ("tol.verify = 0", "positive"),
            ("j.23 = inf", "finite"),
        ],
    )
    def test_errors(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_config(text)

    def test_error_reports_line(self):
        with pytest.raises(ConfigError, match="line 3"):
            parse_config("j.12 = 1\n\nbogus = 2")

    def test_load(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("verify.count = 5\n")
        assert load_config(p).verify_count == 5
        assert load_config(None) == RunConfig()
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "missing.cfg")

    def test_overrides_skip_none(self):
        cfg = RunConfig().with_overrides(tol_verify=1e-3, tol_compile=None)
        assert cfg.tol_verify == 1e-3 and cfg.tol_compile == 1e-8


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


class TestVerify:
    def test_default_passes(self, capsys):
        code, out, _ = run(capsys, "verify")
        assert code == 0
        assert "phases checked: 200" in out and out.rstrip().endswith("PASS")
        dev = float(out.split("max deviation:")[1].split()[0])
        assert dev < 1e-9

    def test_impossible_tolerance_fails(self, capsys):
        code, out, _ = run(capsys, "verify", "--tol", "1e-20")
        assert code == 1
        assert "worst offender: phi=" in out and out.rstrip().endswith("FAIL")

    def test_single_zero_phase(self, capsys):
        code, out, _ = run(capsys, "verify", "--phi", "0")
        assert code == 0 and "phases checked: 1" in out
        assert float(out.split("max deviation:")[1].split()[0]) < 1e-14

    def test_report_to_stream(self):
        buf = io.StringIO()
        assert cmd_verify(RunConfig(verify_count=3), out=buf) == 0
        assert "phases checked: 3" in buf.getvalue()

    def test_negative_tol_is_usage_error(self, capsys):
        code, _, err = run(capsys, "verify", "--tol", "-1")
        assert code == 2 and "positive" in err


class TestCompile:
    def test_transfer_point(self, capsys, tmp_path):
        path = tmp_path / "seq.txt"
        code, out, _ = run(capsys, "compile", "--phi", "0.5pi", "--out", str(path))
        assert code == 0
        assert "fidelity: 1.000000000" in out
        assert "total delay:" in out
        seq = PulseSequence.from_text(path.read_text())
        assert len(seq) > 0

    def test_zero_phase_variable_delays(self, capsys, tmp_path):
        path = tmp_path / "seq.txt"
        assert run(capsys, "compile", "--phi", "0", "--out", str(path))[0] == 0
        taus = [line for line in path.read_text().splitlines() if line.startswith("DELAY")]
        assert sum(line.endswith("tau=0") for line in taus) == 2

    def test_expand_only_hardware_lines(self, capsys, tmp_path):
        path = tmp_path / "seq.txt"
        assert run(capsys, "compile", "--expand", "--out", str(path))[0] == 0
        heads = {line.split()[0] for line in path.read_text().splitlines()}
        assert heads == {"RF", "DELAY", "ZROT"}

    def test_unexpanded_has_three_body_lines(self, capsys, tmp_path):
        path = tmp_path / "seq.txt"
        run(capsys, "compile", "--out", str(path))
        assert any(line.startswith("ZZZ") for line in path.read_text().splitlines())

    def test_write_failure(self, capsys, tmp_path):
        bad = tmp_path / "no" / "such" / "dir" / "seq.txt"
        code, _, err = run(capsys, "compile", "--out", str(bad))
        assert code == 2 and str(bad) in err

    def test_bad_angle_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["compile", "--phi", "quarter"])
        assert exc.value.code == 2


def read_sweep(path):
    lines = path.read_text().splitlines()
    rows = list(csv.reader(line for line in lines if not line.startswith("#")))
    return rows[0], [tuple(map(float, r)) for r in rows[1:]], lines


class TestSweep:
    def test_branch_a_grid(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        assert run(capsys, "sweep", "--out", str(path))[0] == 0
        header, rows, _ = read_sweep(path)
        assert header == ["phi", "amp_c1", "amp_c3"]
        assert len(rows) == 21
        phi, c1, c3 = rows[5]
        assert phi == pytest.approx(math.pi / 2, rel=1e-11)
        assert (c1, c3) == pytest.approx((0.0, 1.0), abs=1e-11)
        assert [r[0] for r in rows] == sorted(r[0] for r in rows)

    def test_fit_line(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        code, out, _ = run(capsys, "sweep", "--fit", "--out", str(path))
        assert code == 0
        last = path.read_text().splitlines()[-1]
        assert last.startswith("# fit ")
        fit = dict(kv.split("=") for kv in last[len("# fit ") :].split())
        assert float(fit["a1"]) == pytest.approx(1.0, abs=1e-9)
        assert float(fit["a3"]) == pytest.approx(1.0, abs=1e-9)
        assert "fit: a1=" in out

    def test_branch_b_transfer(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        assert run(capsys, "sweep", "--branch", "B", "--out", str(path))[0] == 0
        _, rows, _ = read_sweep(path)
        assert rows[5][2] == pytest.approx(1.0, abs=1e-11)

    def test_twelve_digits(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        run(capsys, "sweep", "--out", str(path))
        assert path.read_text().splitlines()[2].split(",")[0] == format(math.pi / 10, ".12g")

    def test_config_grid(self, capsys, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("sweep.start = 0\nsweep.stop = 0.5pi\nsweep.count = 3\n")
        path = tmp_path / "s.csv"
        assert run(capsys, "sweep", "--config", str(cfg), "--out", str(path))[0] == 0
        _, rows, _ = read_sweep(path)
        assert [r[0] for r in rows] == pytest.approx([0, math.pi / 4, math.pi / 2])


class TestPst:
    def load(self, path):
        return json.loads(path.read_text())

    def test_up_state(self, capsys, tmp_path):
        path = tmp_path / "p.json"
        assert run(capsys, "pst", "--out", str(path))[0] == 0
        rec = self.load(path)
        assert rec["fidelity"] == pytest.approx(1.0, abs=1e-12)
        assert rec["corrected"] is False
        assert rec["final_state"][0] == pytest.approx([1.0, 0.0], abs=1e-12)

    def test_three_four_five_corrected(self, capsys, tmp_path):
        path = tmp_path / "p.json"
        argv = ["pst", "--alpha-re", "0.6", "--beta-re", "0.8", "--correct", "--out", str(path)]
        assert run(capsys, *argv)[0] == 0
        rec = self.load(path)
        assert rec["fidelity"] == pytest.approx(1.0, abs=1e-12)
        assert rec["corrected"] is True
        assert {"alpha_re", "alpha_im", "beta_re", "beta_im"} <= set(rec)

    def test_normalizes_input(self, capsys, tmp_path):
        path = tmp_path / "p.json"
        code, out, _ = run(capsys, "pst", "--alpha-re", "3", "--beta-re", "4", "--out", str(path))
        assert code == 0 and "normalized input" in out
        rec = self.load(path)
        assert (rec["alpha_re"], rec["beta_re"]) == pytest.approx((0.6, 0.8), abs=1e-15)

    def test_zero_vector(self, capsys, tmp_path):
        code, _, err = run(capsys, "pst", "--alpha-re", "0", "--out", str(tmp_path / "p.json"))
        assert code == 2 and err.startswith("xychain: error:")
        assert not (tmp_path / "p.json").exists()


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["compile", "--phi", "0.3", "--expand"],
            ["sweep", "--branch", "B", "--fit"],
            ["pst", "--alpha-re", "0.6", "--beta-im", "0.8", "--correct"],
        ],
    )
    def test_byte_identical(self, capsys, tmp_path, argv):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()


def test_bad_config_exit_code(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("j.12 = fast\n")
    code, _, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 2 and "line 1" in err


def test_missing_config_exit_code(capsys, tmp_path):
    assert run(capsys, "sweep", "--config", str(tmp_path / "nope"))[0] == 2


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
