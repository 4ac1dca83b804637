import csv
import json
import math
import os

import numpy as np
import pytest

from szego.cli import main


U5 = '{"terms":[{"pole":[0,-1],"coeffs":[[2,0]]},{"pole":[0,-2],"coeffs":[[-4,0]]}]}'
SOLITON = '{"terms":[{"pole":[0,-1],"coeffs":[[1,0]]}]}'


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


class TestSpectrumCommand:
    def test_double_eigenvalue_symbol(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(["spectrum", "--symbol", U5, "--out", str(out)])
        assert code == 0
        doc = read_json(out / "spectrum.json")
        assert doc["genericity"] == "non_generic"
        assert all(abs(v**2 - 1.0 / 9.0) < 1e-12 for v in doc["lambda"])
        assert "non_generic" in capsys.readouterr().out

    def test_rank_one(self, tmp_path):
        out = tmp_path / "run"
        assert main(["spectrum", "--symbol", SOLITON, "--out", str(out)]) == 0
        doc = read_json(out / "spectrum.json")
        assert doc["genericity"] == "strongly_generic"
        assert len(doc["lambda"]) == 1

    def test_malformed_json_exits_2(self, capsys):
        assert main(["spectrum", "--symbol", "{broken"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_zero_symbol_exits_3(self):
        assert main(["spectrum", "--symbol", '{"terms": []}']) == 3

    def test_symbol_from_file(self, tmp_path):
        p = tmp_path / "u.json"
        p.write_text(U5)
        assert main(["spectrum", "--symbol", str(p), "--out",
                     str(tmp_path / "o")]) == 0


class TestEvolveCommand:
    def test_soliton_pole_column(self, tmp_path):
        out = tmp_path / "run"
        code = main(["evolve", "--symbol", SOLITON, "--times", "0,1,2",
                     "--out", str(out)])
        assert code == 0
        with open(out / "trajectory.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        want = [(0.0, -1.0), (0.5, -1.0), (1.0, -1.0)]
        for row, (re, im) in zip(rows, want):
            assert abs(float(row["pole_1_re"]) - re) < 1e-10
            assert abs(float(row["pole_1_im"]) - im) < 1e-10

    def test_conserved_columns_flat(self, tmp_path):
        out = tmp_path / "run"
        assert main(["evolve", "--symbol", U5, "--times", "lin:-3:3:7",
                     "--out", str(out)]) == 0
        with open(out / "trajectory.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        for col in ("J2", "J4", "J6", "J8", "H12"):
            vals = [float(r[col]) for r in rows]
            assert max(vals) - min(vals) < 1e-9 * max(vals)

    def test_json_format_and_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["evolve", "--symbol", U5, "--times", "log:0.5:50:9",
                         "--format", "json", "--out", str(out)]) == 0
        assert (a / "trajectory.json").read_bytes() == \
            (b / "trajectory.json").read_bytes()

    def test_config_file_defaults_and_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("times = 0,1,2\nformat = json\n")
        out1 = tmp_path / "a"
        assert main(["evolve", "--symbol", SOLITON, "--config", str(cfg),
                     "--out", str(out1)]) == 0
        doc = read_json(out1 / "trajectory.json")
        assert [r[0] for r in doc["rows"]] == [0.0, 1.0, 2.0]
        out2 = tmp_path / "b"
        assert main(["evolve", "--symbol", SOLITON, "--config", str(cfg),
                     "--times", "0,5", "--out", str(out2)]) == 0
        doc = read_json(out2 / "trajectory.json")
        assert [r[0] for r in doc["rows"]] == [0.0, 5.0]

    def test_unknown_config_key_exits_2(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus = 1\n")
        assert main(["evolve", "--symbol", SOLITON, "--times", "0",
                     "--config", str(cfg)]) == 2

    def test_manifest_lists_artifacts(self, tmp_path):
        out = tmp_path / "run"
        assert main(["evolve", "--symbol", SOLITON, "--times", "0,1",
                     "--out", str(out)]) == 0
        manifest = read_json(out / "manifest.json")
        files = sorted(os.listdir(out))
        files.remove("manifest.json")
        assert manifest["artifacts"] == files
        assert manifest["command"] == "evolve"
        assert "wall_time_s" in manifest


class TestSolitonsCommand:
    def test_report(self, tmp_path):
        rng = np.random.default_rng(31)
        from szego.sampling import random_strongly_generic
        from szego.rational import to_json_dict

        u = random_strongly_generic(2, rng)
        sym = json.dumps(to_json_dict(u))
        out = tmp_path / "run"
        code = main(["solitons", "--symbol", sym, "--times", "log:1e2:1e4:61",
                     "--s", "0,1", "--out", str(out)])
        assert code == 0
        doc = read_json(out / "solitons.json")
        assert len(doc["solitons"]) == 2
        assert all(-1.2 < e < -0.8 for e in doc["decay_exponents"])
        with open(out / "remainder.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 61


class TestGrowthCommand:
    def test_slope_near_one(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(["growth", "--symbol", U5, "--times", "log:1e2:1e4:13",
                     "--s", "1", "--out", str(out)])
        assert code == 0
        doc = read_json(out / "growth.json")
        assert abs(doc["fits"][0]["slope"] - 1.0) < 0.05
        assert doc["double_eigenvalue"]["lambda_sq"] == pytest.approx(1 / 9, abs=1e-12)


class TestActionAngleCommand:
    def test_forward(self, tmp_path):
        out = tmp_path / "run"
        assert main(["actionangle", "--symbol", SOLITON, "--out", str(out)]) == 0
        doc = read_json(out / "actionangle.json")
        assert doc["coords"]["actions_i"][0] == pytest.approx(2 * math.pi)

    def test_inverse_roundtrip_report(self, tmp_path):
        coords = json.dumps({
            "actions_i": [2 * math.pi],
            "actions_lambda": [math.pi],
            "angles": [math.pi / 2],
            "gammas": [0.0],
        })
        out = tmp_path / "run"
        assert main(["actionangle", "--coords", coords, "--out", str(out)]) == 0
        doc = read_json(out / "actionangle.json")
        assert doc["max_error"] < 1e-9
        pole = doc["symbol"]["terms"][0]["pole"]
        assert abs(pole[0]) < 1e-9 and abs(pole[1] + 1.0) < 1e-9


class TestRoundtripCommand:
    def test_random_m3(self, tmp_path):
        out = tmp_path / "run"
        code = main(["roundtrip", "--n", "3", "--count", "3", "--seed", "7",
                     "--out", str(out)])
        assert code == 0
        doc = read_json(out / "roundtrip.json")
        assert doc["max_coords_error"] < 1e-7
        assert doc["max_symbol_l2_error"] < 1e-7

    def test_tolerance_exceeded_exits_4(self, tmp_path):
        code = main(["roundtrip", "--n", "2", "--count", "1", "--seed", "7",
                     "--tol", "1e-30"])
        assert code == 4


class TestValidateCommand:
    def test_small_budget_passes(self, tmp_path):
        out = tmp_path / "run"
        code = main(["validate", "--symbol", SOLITON, "--t", "0.25",
                     "--L", "100", "--M", str(2**12), "--dt", "1e-3",
                     "--out", str(out)])
        assert code == 0
        doc = read_json(out / "validate.json")
        assert doc["l2_error"] < 2e-4
        assert doc["j2_drift_oracle"] < 1e-12

    def test_tight_tolerance_exits_4(self):
        code = main(["validate", "--symbol", SOLITON, "--t", "0.25",
                     "--L", "100", "--M", str(2**12), "--dt", "1e-3",
                     "--tol", "1e-12"])
        assert code == 4

    def test_convergence_flag_with_nondivisible_budget(self, tmp_path):
        # the convergence window picks its own step count, so a dt that does
        # not divide min(|t|, 1) must still work
        out = tmp_path / "run"
        code = main(["validate", "--symbol", SOLITON, "--t", "0.5",
                     "--L", "100", "--M", str(2**12), "--dt", "2e-3",
                     "--convergence", "--out", str(out)])
        assert code == 0
        doc = read_json(out / "validate.json")
        assert 3.5 < doc["self_convergence"]["order"] < 4.5
