import csv
import io
import math
from pathlib import Path

import numpy as np
import pytest

from quadbounds.cli import main
from quadbounds.config import ConfigError, load_config, parse_config
from quadbounds.moments import GaussianSpec, QuadraticForm, y_moments, z_moments_multinomial
from quadbounds.tcd import llr_terms

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

BASE = """\
mu0 = 0.1
sigma0_sq = 4e-4
mu1 = 0.2
sigma1_sq = 1.6e-3
"""


@pytest.fixture
def write_cfg(tmp_path):
    def write(extra="", base=BASE):
        path = tmp_path / "scenario.cfg"
        path.write_text(base + extra)
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestConfig:
    def test_comments_and_lists(self):
        cfg = parse_config(BASE + "m = 3  # window\nm_list = 3, 10 25\n")
        assert cfg.m_list == (3, 10, 25)
        assert cfg.alpha_window(3) == 30

    @pytest.mark.parametrize("extra, field", [
        ("m = 3\nsigma0_sq = 0\n", "sigma0_sq"),
        ("m = 0\n", "m"),
        ("m = 3\nh_steps = 1\n", "h_steps"),
        ("m = 3\nh_min = 1\n", "h_min"),
        ("m = 3\nwhich = gamma\n", "which"),
    ])
    def test_errors_name_field(self, extra, field):
        text = BASE.replace("sigma0_sq = 4e-4\n", "") if "sigma0_sq" in extra else BASE
        with pytest.raises(ConfigError, match=field):
            parse_config(text + extra)

    def test_unknown_and_duplicate_keys(self):
        with pytest.raises(ConfigError, match="unknown key 'n_trails'"):
            parse_config(BASE + "m = 3\nn_trails = 10\n")
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(BASE + "m = 3\nm = 4\n")

    def test_missing_key(self):
        with pytest.raises(ConfigError, match="m"):
            parse_config(BASE)

    @pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.cfg")), ids=lambda p: p.name)
    def test_shipped_configs_parse(self, path):
        cfg = load_config(path)
        assert cfg.n_trials == 1_000_000


class TestMoments:
    def test_matches_multinomial(self, capsys, write_cfg):
        code, out, _ = run(capsys, "moments", "--config", write_cfg("m = 10\n"))
        assert code == 0
        values = {(r["hypothesis"], r["name"]): float(r["value"]) for r in rows(out)}
        q = QuadraticForm(*llr_terms(GaussianSpec(0.1, 4e-4), GaussianSpec(0.2, 1.6e-3)))
        for hyp, g in (("H0", GaussianSpec(0.1, 4e-4)), ("H1", GaussianSpec(0.2, 1.6e-3))):
            ref = z_moments_multinomial(y_moments(q, g), 10)
            for k, v in enumerate(ref.as_tuple(), 1):
                assert values[(hyp, f"xi_z{k}")] == pytest.approx(v, rel=1e-10)
            assert values[(hyp, "c6")] == pytest.approx(10 * values[(hyp, "c3")] ** 2, rel=1e-14)

    def test_single_sample_window(self, capsys, write_cfg):
        _, out, _ = run(capsys, "moments", "--config", write_cfg("m = 1\n"))
        values = {(r["hypothesis"], r["name"]): r["value"] for r in rows(out)}
        for hyp in ("H0", "H1"):
            for k in range(1, 5):
                assert float(values[(hyp, f"xi_z{k}")]) == pytest.approx(float(values[(hyp, f"xi_y{k}")]), rel=1e-14)

    def test_bad_variance(self, capsys, write_cfg):
        code, out, err = run(capsys, "moments", "--config", write_cfg("m = 3\n", BASE.replace("4e-4", "0")))
        assert code == 2 and out == ""
        assert "sigma0_sq" in err


class TestBounds:
    def test_two_steps(self, capsys, write_cfg):
        code, out, _ = run(capsys, "bounds", "--config", write_cfg("m = 3\nh_steps = 2\n"))
        assert code == 0
        assert len(rows(out)) == 2

    def test_analytic_only_without_mc(self, capsys, write_cfg):
        _, out, _ = run(capsys, "bounds", "--config", write_cfg("m = 3\nm_alpha = 30\n"))
        assert out.splitlines()[0] == "h,beta_edg,beta_clt,alpha_edg,alpha_evt"

    def test_mc_and_which(self, capsys, write_cfg):
        cfg = write_cfg("m = 3\nh_steps = 5\nn_trials = 2000\n")
        _, out, _ = run(capsys, "bounds", "--config", cfg, "--which", "beta", "--mc")
        assert out.splitlines()[0] == "h,beta_edg,beta_clt,beta_emp,beta_emp_se"

    def test_m_list_prefix(self, capsys, write_cfg):
        _, out, _ = run(capsys, "bounds", "--config", write_cfg("m = 3\nm_list = 3, 10\nh_steps = 3\n"))
        table = rows(out)
        assert [(r["m"], r["m_alpha"]) for r in table] == [("3", "30")] * 3 + [("10", "100")] * 3

    def test_median_crossing_consistent_with_moments(self, capsys, write_cfg):
        _, out, _ = run(capsys, "bounds", "--config", write_cfg("m = 3\nwhich = beta\nh_steps = 801\n"))
        table = rows(out)
        h = np.array([float(r["h"]) for r in table])
        beta = np.array([float(r["beta_edg"]) for r in table])
        _, mom, _ = run(capsys, "moments", "--config", write_cfg("m = 3\n"))
        v = {(r["hypothesis"], r["name"]): float(r["value"]) for r in rows(mom)}
        # at the mean, beta_edg = 1/2 + phi(0) c3 / 6
        expected = 0.5 + v[("H1", "c3")] / (6 * math.sqrt(2 * math.pi))
        assert np.interp(v[("H1", "xi_z1")], h, beta) == pytest.approx(expected, abs=1e-4)


class TestRocAndDistance:
    def test_roc_columns(self, capsys, write_cfg):
        cfg = write_cfg("m = 6\nm_alpha = 60\nh_steps = 4\nn_trials = 1000\n")
        _, out, _ = run(capsys, "roc", "--config", cfg)
        assert out.splitlines()[0] == (
            "h,alpha_evt,alpha_edg,beta_edg,beta_clt,pfa_mc,pfa_mc_se,pmd_mc,pmd_mc_se")

    def test_distance_self_columns_zero(self, capsys, write_cfg):
        cfg = write_cfg("m = 3\nm_list = 3, 5\nn_trials = 20000\n")
        code, out, _ = run(capsys, "distance", "--config", cfg)
        assert code == 0
        table = rows(out)
        assert [r["m_alpha"] for r in table] == ["30", "50"]
        for r in table:
            assert r["beta_exact"] == r["alpha_exact"] == r["beta_exact_norm"] == "0"
            assert float(r["beta_edg_norm"]) == pytest.approx(float(r["beta_edg"]) / 0.1)

    def test_empty_m_list(self, capsys, write_cfg):
        code, _, err = run(capsys, "distance", "--config", write_cfg("m = 3\nm_list =\n"))
        assert code == 2
        assert "m_list" in err


class TestInvocation:
    @pytest.mark.parametrize("command", ["moments", "bounds", "roc", "distance"])
    def test_byte_identical_reruns(self, capsys, write_cfg, command):
        cfg = write_cfg("m = 3\nm_alpha = 30\nh_steps = 20\nn_trials = 3000\nseed = 5\n")
        first = run(capsys, command, "--config", cfg)[1]
        second = run(capsys, command, "--config", cfg)[1]
        assert first == second and first

    def test_out_file(self, capsys, write_cfg, tmp_path):
        target = tmp_path / "moments.csv"
        code, out, _ = run(capsys, "moments", "--config", write_cfg("m = 3\n"), "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text().startswith("hypothesis,name,value\n")

    def test_seed_override(self, capsys, write_cfg):
        cfg = write_cfg("m = 3\nh_steps = 5\nn_trials = 2000\n")
        a = run(capsys, "bounds", "--config", cfg, "--mc", "--seed", "1")[1]
        b = run(capsys, "bounds", "--config", cfg, "--mc", "--seed", "2")[1]
        assert a != b

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "moments", "--config", str(tmp_path / "nope.cfg"))
        assert code == 2 and "error" in err

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["bounds"])
        assert exc.value.code == 2
