"""Tests for configuration handling, the command implementations, and
the console entry point."""

import math
from pathlib import Path

import pytest

from liesegang.cli import (
    RunConfig,
    _fmt,
    cmd_report,
    cmd_run,
    cmd_sweep,
    main,
    parse_config,
)
from liesegang.errors import ParseError, ValidationError


def tiny_flags(**overrides):
    flags = {
        "ustar": 0.15,
        "n": 16,
        "m": 40,
        "smax": 4.0,
        "stride": 20,
        "figures": False,
    }
    flags.update(overrides)
    return flags


class TestFormatting:
    def test_fmt_forms(self):
        assert _fmt(True) == "true"
        assert _fmt(False) == "false"
        assert _fmt(7) == "7"
        assert _fmt(0.15) == "0.14999999999999999"
        assert _fmt(1.0) == "1"

    def test_seventeen_digits_round_trip(self):
        for x in (0.15, 1 / 3, 2.5e-17, 4.2426280039743786, 123456.789):
            assert float(_fmt(x)) == x


class TestParseConfig:
    def test_defaults(self):
        config = parse_config({})
        assert config.params.alpha == 1.0
        assert config.params.u_star == 0.49
        assert config.n == 200
        assert config.s_max == 40.0
        assert config.sample_stride == 10
        assert config.figures is True
        # the default time step equals the spatial step
        assert config.m == 8000

    def test_benchmark_flags_parse(self):
        config = parse_config(
            {"alpha": 1.0, "beta": 1.0, "ustar": 0.49, "n": 200, "m": 40000, "smax": 40.0}
        )
        assert config.m == 40000
        assert config.params.u_star == 0.49

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "# experiment\n"
            "alpha = 1.0\n"
            "ustar=0.15\n"
            "profiles-at = 1,2  # dashes fold to underscores\n"
            "n = 24\n",
            encoding="utf-8",
        )
        config = parse_config({}, str(cfg))
        assert config.params.u_star == 0.15
        assert config.n == 24
        assert config.emit_profiles_at == (1.0, 2.0)
        # a given flag wins over the file, None means not given
        config = parse_config({"n": 30, "ustar": None}, str(cfg))
        assert config.n == 30
        assert config.params.u_star == 0.15

    def test_config_file_errors(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("alpha = 1.0\nvolume = 3\n", encoding="utf-8")
        with pytest.raises(ParseError) as err:
            parse_config({}, str(bad))
        assert ":2:" in str(err.value)
        bad.write_text("just words\n", encoding="utf-8")
        with pytest.raises(ParseError):
            parse_config({}, str(bad))
        bad.write_text("n = lots\n", encoding="utf-8")
        with pytest.raises(ParseError):
            parse_config({}, str(bad))
        with pytest.raises(ParseError):
            parse_config({}, str(tmp_path / "missing.cfg"))

    def test_unknown_flag_key(self):
        with pytest.raises(ParseError):
            parse_config({"volume": 3})

    def test_validation_messages(self):
        with pytest.raises(ValidationError) as err:
            parse_config({"n": 1})
        assert "n must be >= 2, got 1" in str(err.value)
        with pytest.raises(ValidationError):
            parse_config({"alpha": -1.0})
        with pytest.raises(ValidationError):
            parse_config({"smax": 0.0})
        with pytest.raises(ValidationError):
            parse_config({"m": -5})
        with pytest.raises(ValidationError):
            parse_config({"stride": 0})
        with pytest.raises(ValidationError):
            parse_config({"profiles_at": "1,99"})

    def test_profiles_at_from_string(self):
        config = parse_config({"profiles_at": "0,2.5,40"})
        assert config.emit_profiles_at == (0.0, 2.5, 40.0)


class TestReport:
    def test_supercritical_text(self, capsys):
        config = parse_config(tiny_flags())
        text = cmd_report(config.params)
        capsys.readouterr()
        assert "regime = supercritical" in text
        assert "target = phi_gamma" in text
        assert "gamma = 4.2426280039743" in text
        assert "alpha_star = 2.13118270976908" in text
        assert "jump_residual = 0" in text

    def test_transitional_text(self, capsys):
        config = parse_config(tiny_flags(ustar=0.49))
        text = cmd_report(config.params)
        capsys.readouterr()
        assert "regime = transitional" in text
        assert "target = phi_0" in text
        assert "gamma" not in text.split("target")[1]

    def test_writes_files_on_request(self, tmp_path, capsys):
        config = parse_config(tiny_flags())
        cmd_report(config.params, out_dir=str(tmp_path / "rep"), figures=False)
        capsys.readouterr()
        assert (tmp_path / "rep" / "report.txt").is_file()
        assert not (tmp_path / "rep" / "profiles.png").exists()

    def test_writes_figure_when_enabled(self, tmp_path, capsys):
        config = parse_config(tiny_flags())
        cmd_report(config.params, out_dir=str(tmp_path / "rep"), figures=True)
        capsys.readouterr()
        assert (tmp_path / "rep" / "profiles.png").stat().st_size > 0


class TestRunCommand:
    def test_output_files(self, tmp_path):
        config = parse_config(tiny_flags(out=str(tmp_path / "run1"), profiles_at="2"))
        record = cmd_run(config)
        out = tmp_path / "run1"
        body = (out / "diagnostics.csv").read_text(encoding="utf-8")
        lines = body.strip().splitlines()
        assert lines[0] == "s,sup_err,v_alpha,h,gamma_tail,extent_x"
        # steps 0, 20, 40 are sampled
        assert len(lines) == 1 + 3
        assert len(record.samples) == 3
        profile = (out / "profile_s2.csv").read_text(encoding="utf-8")
        assert profile.splitlines()[0] == "eta,v,target"
        assert len(profile.strip().splitlines()) == 1 + 16 * 6
        meta = (out / "run.meta").read_text(encoding="utf-8")
        for key in ("alpha=", "m=40", "regime=supercritical", "target=phi_gamma",
                    "gamma=", "gamma_tail_truncation="):
            assert key in meta
        assert not (out / "diagnostics.png").exists()

    def test_snapshot_only_run_has_one_row(self, tmp_path):
        config = parse_config(tiny_flags(m=0, out=str(tmp_path / "snap")))
        cmd_run(config)
        lines = (tmp_path / "snap" / "diagnostics.csv").read_text().strip().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("0,")

    def test_byte_identical_reruns(self, tmp_path):
        flags = tiny_flags(profiles_at="1,3")
        config_a = parse_config(dict(flags, out=str(tmp_path / "a")))
        config_b = parse_config(dict(flags, out=str(tmp_path / "b")))
        cmd_run(config_a)
        cmd_run(config_b)
        for name in ("diagnostics.csv", "profile_s1.csv", "profile_s3.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_figures_written_when_enabled(self, tmp_path):
        config = parse_config(
            tiny_flags(figures=True, profiles_at="2", out=str(tmp_path / "fig"))
        )
        cmd_run(config)
        assert (tmp_path / "fig" / "diagnostics.png").stat().st_size > 0
        assert (tmp_path / "fig" / "profile_s2.png").stat().st_size > 0


class TestSweep:
    def test_summary_rows_and_isolation(self, tmp_path, caplog):
        base = parse_config(tiny_flags(out=str(tmp_path / "sw")))
        rows = cmd_sweep(base, (0.3, -1.0, 0.3))
        assert len(rows) == 3
        assert rows[0][1] == "transitional"
        assert rows[1][1] == "error" and math.isnan(rows[1][2])
        assert rows[2][1] == "transitional"
        out = tmp_path / "sw"
        assert (out / "ustar0.3" / "diagnostics.csv").is_file()
        # the duplicate threshold gets its own suffixed directory
        assert (out / "ustar0.3_2" / "diagnostics.csv").is_file()
        lines = (out / "sweep_summary.csv").read_text().strip().splitlines()
        assert lines[0] == "ustar,regime,gamma,final_sup_err,final_h"
        assert len(lines) == 4
        assert ",error,nan,nan,nan" in lines[2]

    def test_empty_sweep_writes_header_only(self, tmp_path):
        base = parse_config(tiny_flags(out=str(tmp_path / "empty")))
        rows = cmd_sweep(base, ())
        assert rows == []
        lines = (tmp_path / "empty" / "sweep_summary.csv").read_text().strip().splitlines()
        assert lines == ["ustar,regime,gamma,final_sup_err,final_h"]


class TestMain:
    def test_report_prints_without_writing(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        rc = main(["report", "--ustar", "0.15"])
        captured = capsys.readouterr()
        assert rc == 0
        assert "regime = supercritical" in captured.out
        assert list(tmp_path.iterdir()) == []

    def test_report_with_out_writes(self, tmp_path, capsys):
        rc = main(["report", "--ustar", "0.15", "--no-figures",
                   "--out", str(tmp_path / "rep")])
        capsys.readouterr()
        assert rc == 0
        assert (tmp_path / "rep" / "report.txt").is_file()

    def test_run_subcommand(self, tmp_path):
        rc = main(["run", "--ustar", "0.15", "--n", "16", "--m", "40",
                   "--smax", "4", "--stride", "20", "--no-figures",
                   "--out", str(tmp_path / "r")])
        assert rc == 0
        assert (tmp_path / "r" / "run.meta").is_file()

    def test_sweep_subcommand(self, tmp_path):
        rc = main(["sweep", "--ustar", "0.6,0.15", "--n", "16", "--m", "20",
                   "--smax", "2", "--stride", "10", "--no-figures",
                   "--out", str(tmp_path / "sw")])
        assert rc == 0
        lines = (tmp_path / "sw" / "sweep_summary.csv").read_text().strip().splitlines()
        assert len(lines) == 3

    def test_errors_exit_two(self, tmp_path, capsys):
        rc = main(["run", "--config", str(tmp_path / "nope.cfg")])
        captured = capsys.readouterr()
        assert rc == 2
        assert captured.err.startswith("error:")
        rc = main(["report", "--ustar", "-1"])
        captured = capsys.readouterr()
        assert rc == 2
        assert "error:" in captured.err
