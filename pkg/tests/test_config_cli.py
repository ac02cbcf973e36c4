"""Settings files, overrides, and the command-line front end."""

import math

import pytest

from wsncluster.cli import main
from wsncluster.config import (
    parse_config_file,
    parse_overrides,
    resolve_settings,
)
from wsncluster.model import ConfigError


class TestConfigFile:
    def test_empty_file_gives_defaults(self, tmp_path):
        f = tmp_path / "empty.cfg"
        f.write_text("")
        settings = resolve_settings(parse_config_file(f))
        cfg = settings.config
        assert cfg.node_count == 100
        assert cfg.initial_energy == 0.5
        assert cfg.p_opt == 0.1
        assert settings.radio.e_elec == 50e-9
        assert settings.radio.e_fs == 10e-12
        assert settings.options.control_bits == 200

    def test_comments_and_blanks_ignored(self, tmp_path):
        f = tmp_path / "c.cfg"
        f.write_text("# a comment\n\nnode_count = 42\n  # indented comment\n")
        assert parse_config_file(f) == {"node_count": "42"}

    def test_bad_line_rejected_with_location(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("node_count = 5\nnonsense line\n")
        with pytest.raises(ConfigError, match=":2"):
            parse_config_file(f)

    def test_duplicate_key_rejected(self, tmp_path):
        f = tmp_path / "dup.cfg"
        f.write_text("seed = 1\nseed = 2\n")
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_file(f)


class TestResolveSettings:
    def test_override_wins_over_file(self):
        settings = resolve_settings({"node_count": "50"}, {"node_count": "80"})
        assert settings.config.node_count == 80

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="nodez"):
            resolve_settings({"nodez": "5"})

    def test_unparsable_value_names_key_and_value(self):
        with pytest.raises(ConfigError, match="node_count.*'many'"):
            resolve_settings({"node_count": "many"})

    def test_out_of_bounds_p_rejected(self):
        with pytest.raises(ConfigError, match="p_opt"):
            resolve_settings({"p_opt": "1.5"})

    def test_e_amp_alias(self):
        settings = resolve_settings({"e_amp": "100e-12"})
        assert settings.radio.e_fs == 100e-12

    def test_e_amp_and_e_fs_conflict(self):
        with pytest.raises(ConfigError, match="alias"):
            resolve_settings({"e_amp": "1e-12", "e_fs": "2e-12"})

    def test_auto_values(self):
        settings = resolve_settings({"drop_d_ref": "auto", "p2": "auto"})
        assert settings.options.drop_d_ref is None
        assert settings.options.p2 is None

    def test_default_d_to_bs_is_center_distance(self):
        settings = resolve_settings()
        assert settings.d_to_bs == pytest.approx(100.0)
        moved = resolve_settings({"bs_x": "0", "bs_y": "50"})
        assert moved.d_to_bs == pytest.approx(50.0)

    def test_explicit_d_to_bs(self):
        settings = resolve_settings({"d_to_bs": "75"})
        assert settings.d_to_bs == 75.0

    def test_degenerate_p_only_in_analysis_mode(self):
        with pytest.raises(ConfigError, match="p_opt"):
            resolve_settings({"p_opt": "0"})
        settings = resolve_settings({"p_opt": "0"}, allow_degenerate_p=True)
        assert settings.config is None
        assert settings.p_opt == 0.0
        with pytest.raises(ConfigError):
            settings.require_config()

    def test_overrides_parser(self):
        assert parse_overrides(["a=1", "b = 2 "]) == {"a": "1", "b": "2"}
        with pytest.raises(ConfigError, match="key=value"):
            parse_overrides(["broken"])


class TestCliExitCodes:
    def test_no_command_prints_help(self, capsys):
        assert main([]) == 1
        assert "simulate" in capsys.readouterr().out

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "wsncluster" in capsys.readouterr().out

    def test_bad_flag_exits_one(self):
        assert main(["simulate", "--bogus"]) == 1

    def test_unknown_setting_exits_one(self, capsys):
        assert main(["analyze", "--set", "nodez=5"]) == 1
        assert "nodez" in capsys.readouterr().err

    def test_bad_bs_exits_one(self, capsys):
        assert main(["simulate", "--bs", "12"]) == 1
        assert "X,Y" in capsys.readouterr().err

    def test_bad_seed_range_exits_one(self, capsys):
        assert main(["compare", "--seeds", "5..1", "--rounds", "1"]) == 1
        assert "empty" in capsys.readouterr().err

    def test_unwritable_out_dir_exits_two(self, tmp_path, capsys):
        blocker = tmp_path / "file.txt"
        blocker.write_text("x")
        code = main(["simulate", "--rounds", "2",
                     "--out", str(blocker / "sub")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_success_is_zero(self, capsys):
        assert main(["simulate", "--rounds", "3", "--seed", "4"]) == 0
        out = capsys.readouterr().out
        assert "rounds_run = 3" in out
        assert "# p_opt = 0.1" in out  # resolved settings echoed


class TestCliSimulate:
    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "results"
        assert main(["simulate", "--protocol", "multihop", "--seed", "9",
                     "--rounds", "25", "--out", str(out)]) == 0
        target = out / "multihop_seed9.csv"
        assert target.exists()
        text = target.read_text()
        assert text.startswith("# wsncluster ")
        assert "round,alive,dead,ch_count" in text

    def test_rerun_byte_identical(self, tmp_path):
        args = ["simulate", "--seed", "3", "--rounds", "30"]
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert (a / "leach_seed3.csv").read_bytes() == \
            (b / "leach_seed3.csv").read_bytes()

    def test_config_file_and_override_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("node_count = 50\nseed = 6\n")
        assert main(["simulate", "--config", str(cfg), "--rounds", "2",
                     "--set", "node_count=80"]) == 0
        assert "# node_count = 80" in capsys.readouterr().out


class TestCliCompare:
    def test_compare_writes_report(self, tmp_path, capsys):
        out = tmp_path / "cmp"
        assert main(["compare", "--protocol", "leach,cidrsn",
                     "--seeds", "1..2", "--rounds", "40",
                     "--out", str(out)]) == 0
        assert (out / "comparison.csv").exists()
        assert (out / "comparison.txt").exists()
        stdout = capsys.readouterr().out
        assert "cidrsn/leach" in stdout

    def test_compare_rerun_byte_identical(self, tmp_path):
        args = ["compare", "--protocol", "leach,multilevel",
                "--seeds", "2..3", "--rounds", "30"]
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        for name in ("comparison.csv", "comparison.txt"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestCliAnalyze:
    def test_pinned_values(self, capsys):
        assert main(["analyze"]) == 0
        out = capsys.readouterr().out
        assert "k_opt = 4.277484658067168" in out
        assert "k_opt_nearest = 4" in out
        assert "ch_ave = 10.0" in out

    def test_moment_values(self, capsys):
        assert main(["analyze", "--set", "node_count=100",
                     "--set", "p_opt=0.1"]) == 0
        out = capsys.readouterr().out
        ave = float(out.split("ch_ave = ")[1].splitlines()[0])
        dev = float(out.split("ch_dev = ")[1].splitlines()[0])
        assert ave == pytest.approx(10.0, rel=1e-9)
        assert dev == pytest.approx(3.0, rel=1e-9)

    def test_p_zero_reports_undefined_cov(self, capsys):
        assert main(["analyze", "--set", "p_opt=0"]) == 0
        out = capsys.readouterr().out
        assert "ch_cov = undefined" in out
        assert "ch_ave = 0.0" in out

    def test_writes_text_file(self, tmp_path):
        out = tmp_path / "an"
        assert main(["analyze", "--out", str(out)]) == 0
        text = (out / "analysis.txt").read_text()
        assert text.startswith("# wsncluster ")
        assert "k_opt = 4.277484658067168" in text

    def test_custom_bs_changes_d_to_bs(self, capsys):
        assert main(["analyze", "--bs", "50,250"]) == 0
        out = capsys.readouterr().out
        assert "d_to_bs = 200.0" in out

    def test_invalid_domain_exits_one(self, capsys):
        # sink so close that the multi-path term cannot dominate
        assert main(["analyze", "--set", "d_to_bs=10"]) == 1
        assert "e_mp" in capsys.readouterr().err
