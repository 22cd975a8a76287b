import numpy as np
import pytest

from stochtune import cli
from stochtune.cli import fmt, load_model_file, load_policy_file, save_model_file

from conftest import REFERENCE_MODEL_DOC, REFERENCE_POLICY_DOC, write_json

FLAT_SURFACE_DOC = {
    # single state with c = 2 and d = -1.5 makes the numerator equal the
    # denominator, so the whole test-function grid is 1
    "time_model": "continuous",
    "P00": [[0.5]],
    "P01": [[0.25, 0.25]],
    "tau": [1.0],
    "c": [2.0],
    "d0": [-1.5],
    "d1": [-1.5],
    "mu0": [0.5],
    "mu1": [0.5],
}

UNSTABLE_DOC = {
    "time_model": "continuous",
    "P00": [[0.5]],
    "P01": [[0.5, 0.0]],
    "tau": [1.0],
    "c": [3.0],
    "d0": [-1.0],
    "d1": [-2.0],
    "mu0": [0.5],
    "mu1": [0.5],
}


@pytest.fixture
def model_file(tmp_path):
    return write_json(tmp_path / "model.json", REFERENCE_MODEL_DOC)


@pytest.fixture
def policy_file(tmp_path):
    return write_json(tmp_path / "policy.json", REFERENCE_POLICY_DOC)


class TestFmt:
    def test_twelve_significant_digits(self):
        assert fmt(1.8) == "1.80000000000"
        assert fmt(4.5) == "4.50000000000"
        assert fmt(0.5) == "0.500000000000"
        assert fmt(-2.0) == "-2.00000000000"

    def test_zero_normalized(self):
        assert fmt(0.0) == "0.00000000000"
        assert fmt(-0.0) == "0.00000000000"


class TestValidateCommand:
    def test_stable_model_exits_zero(self, model_file, capsys):
        assert cli.main(["validate", model_file]) == 0
        out = capsys.readouterr().out
        assert "stable: true" in out
        assert "n_internal: 1" in out
        assert "state_labels: 2..2" in out
        assert "fundamental_matrix row 0: 2.00000000000" in out

    def test_row_sum_violation_exits_one_and_names_row(self, tmp_path, capsys):
        doc = dict(REFERENCE_MODEL_DOC, P00=[[0.55]])
        path = write_json(tmp_path / "bad.json", doc)
        assert cli.main(["validate", path]) == 1
        err = capsys.readouterr().err
        assert "P00" in err
        assert "row 0" in err

    def test_unstable_model_exits_two(self, tmp_path, capsys):
        path = write_json(tmp_path / "unstable.json", UNSTABLE_DOC)
        assert cli.main(["validate", path]) == 2
        out = capsys.readouterr().out
        assert "stable: false" in out
        assert "boundary 1" in out

    def test_missing_file_exits_one(self, tmp_path, capsys):
        assert cli.main(["validate", str(tmp_path / "nope.json")]) == 1
        assert "not found" in capsys.readouterr().err

    def test_invalid_json_exits_one(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        assert cli.main(["validate", str(path)]) == 1
        assert "invalid JSON" in capsys.readouterr().err

    def test_missing_key_named(self, tmp_path, capsys):
        doc = {k: v for k, v in REFERENCE_MODEL_DOC.items() if k != "tau"}
        path = write_json(tmp_path / "short.json", doc)
        assert cli.main(["validate", path]) == 1
        assert '"tau"' in capsys.readouterr().err

    def test_bad_vector_entry_named_with_index(self, tmp_path, capsys):
        doc = dict(REFERENCE_MODEL_DOC, c=[True])
        path = write_json(tmp_path / "badc.json", doc)
        assert cli.main(["validate", path]) == 1
        err = capsys.readouterr().err
        assert '"c"' in err
        assert "index 0" in err


class TestEvaluateCommand:
    def test_reference_value_printed(self, model_file, policy_file, capsys):
        assert cli.main(["evaluate", model_file, policy_file]) == 0
        out = capsys.readouterr().out
        assert "value: 1.80000000000" in out
        assert "numerator: 4.50000000000" in out
        assert "denominator: 2.50000000000" in out

    def test_malformed_policy_exits_one(self, model_file, tmp_path, capsys):
        path = write_json(tmp_path / "bad_policy.json", {"alpha0": [0.9], "alpha1": [1.0]})
        assert cli.main(["evaluate", model_file, path]) == 1
        assert "alpha0" in capsys.readouterr().err

    def test_unstable_exits_two_without_override(self, tmp_path, policy_file, capsys):
        path = write_json(tmp_path / "unstable.json", UNSTABLE_DOC)
        assert cli.main(["evaluate", path, policy_file]) == 2
        capsys.readouterr()
        assert cli.main(["evaluate", path, policy_file, "--allow-unstable"]) == 0

    def test_degenerate_policy_matches_surface_cell(self, tmp_path, capsys):
        rng = np.random.default_rng(71)
        n = 3
        raw00 = rng.uniform(size=(n, n))
        raw01 = rng.uniform(0.1, 1.0, size=(n, 2))
        p00 = raw00 / raw00.sum(1, keepdims=True) * 0.5
        p01 = raw01 / raw01.sum(1, keepdims=True) * 0.5
        doc = {
            "time_model": "continuous",
            "P00": p00.tolist(),
            "P01": p01.tolist(),
            "tau": rng.uniform(0.5, 2.0, n).tolist(),
            "c": rng.uniform(-1.0, 4.0, n).tolist(),
            "d0": (-rng.uniform(0, 2, n)).tolist(),
            "d1": (-rng.uniform(0, 2, n)).tolist(),
            "mu0": rng.uniform(0, 1, n).tolist(),
            "mu1": rng.uniform(0, 1, n).tolist(),
        }
        model_path = write_json(tmp_path / "m.json", doc)
        policy_path = write_json(
            tmp_path / "p.json",
            {"alpha0": [0.0, 1.0, 0.0], "alpha1": [0.0, 0.0, 1.0]},
        )
        out_path = tmp_path / "surface.csv"
        assert cli.main(["surface", model_path, "--out", str(out_path)]) == 0
        capsys.readouterr()
        assert cli.main(["evaluate", model_path, policy_path]) == 0
        value_line = capsys.readouterr().out.splitlines()[0]
        printed = value_line.split(": ")[1]
        rows = out_path.read_text().splitlines()[1:]
        cell = next(r for r in rows if r.startswith("3,4,"))
        assert cell.split(",")[4] == printed


class TestOptimizeCommand:
    def test_reference_report(self, model_file, capsys):
        assert cli.main(["optimize", model_file]) == 0
        out = capsys.readouterr().out
        assert "best_point_indices: (0, 0)" in out
        assert "best_point_labels: (2, 2)" in out
        assert "best_value: 1.80000000000" in out
        assert "tie_count: 1" in out

    def test_min_sense_on_flat_surface(self, tmp_path, capsys):
        path = write_json(tmp_path / "flat.json", FLAT_SURFACE_DOC)
        assert cli.main(["optimize", path, "--sense", "min"]) == 0
        out = capsys.readouterr().out
        assert "best_value: 1.00000000000" in out

    def test_bad_sense_rejected(self, model_file, capsys):
        assert cli.main(["optimize", model_file, "--sense", "upward"]) == 1


class TestSimulateCommand:
    def test_reference_run(self, model_file, policy_file, capsys):
        code = cli.main(
            ["simulate", model_file, policy_file, "--cycles", "20000", "--seed", "5"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "cycles: 20000" in out
        assert "analytic_value: 1.80000000000" in out
        z_line = next(l for l in out.splitlines() if l.startswith("z_score:"))
        assert float(z_line.split(": ")[1]) <= 5.0

    def test_identical_seeds_identical_output(self, model_file, policy_file, capsys):
        argv = ["simulate", model_file, policy_file, "--cycles", "5000", "--seed", "11"]
        assert cli.main(argv) == 0
        first = capsys.readouterr().out
        assert cli.main(argv) == 0
        second = capsys.readouterr().out
        assert first == second

    def test_single_cycle_flags_batches(self, model_file, policy_file, capsys):
        code = cli.main(
            ["simulate", model_file, policy_file, "--cycles", "1", "--seed", "2"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "standard_error: 0.00000000000" in out
        assert "z_score: n/a" in out
        assert "insufficient batches" in out

    def test_exponential_law_flag(self, model_file, policy_file, capsys):
        code = cli.main(
            [
                "simulate",
                model_file,
                policy_file,
                "--cycles",
                "20000",
                "--seed",
                "5",
                "--law",
                "exp",
            ]
        )
        assert code == 0
        assert "law: exp" in capsys.readouterr().out


class TestSurfaceCommand:
    def test_reference_grid(self, model_file, tmp_path, capsys):
        out_path = tmp_path / "surface.csv"
        assert cli.main(["surface", model_file, "--out", str(out_path)]) == 0
        lines = out_path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "l0,l1,A,B,C"
        assert lines[1] == "2,2,4.50000000000,2.50000000000,1.80000000000"
        assert len(lines) == 2

    def test_grid_size_and_optimum_consistency(self, tmp_path, capsys):
        doc = dict(FLAT_SURFACE_DOC)
        rng = np.random.default_rng(72)
        n = 3
        raw00 = rng.uniform(size=(n, n))
        raw01 = rng.uniform(0.1, 1.0, size=(n, 2))
        doc["P00"] = (raw00 / raw00.sum(1, keepdims=True) * 0.4).tolist()
        doc["P01"] = (raw01 / raw01.sum(1, keepdims=True) * 0.6).tolist()
        for key in ("tau", "c", "d0", "d1", "mu0", "mu1"):
            doc[key] = list(np.repeat(doc[key], n))
        path = write_json(tmp_path / "m3.json", doc)
        out_path = tmp_path / "surface3.csv"
        assert cli.main(["surface", path, "--out", str(out_path)]) == 0
        rows = out_path.read_text(encoding="utf-8").splitlines()[1:]
        assert len(rows) == 9
        capsys.readouterr()
        assert cli.main(["optimize", path]) == 0
        out = capsys.readouterr().out
        best = next(l for l in out.splitlines() if l.startswith("best_value:"))
        c_strings = [r.split(",")[4] for r in rows]
        max_c = c_strings[int(np.argmax([float(s) for s in c_strings]))]
        assert best.split(": ")[1] == max_c


class TestFileRoundTrip:
    def test_model_round_trip_preserves_derived_data(self, model_file, tmp_path):
        model = load_model_file(model_file)
        saved = tmp_path / "saved.json"
        save_model_file(model, str(saved))
        reloaded = load_model_file(str(saved))
        assert np.array_equal(model.chain.p00, reloaded.chain.p00)
        assert np.array_equal(model.chain.p01, reloaded.chain.p01)
        assert np.array_equal(model.fundamental.m, reloaded.fundamental.m)
        assert np.array_equal(model.absorption.b, reloaded.absorption.b)
        assert np.array_equal(model.time_to_absorption, reloaded.time_to_absorption)
        assert np.array_equal(model.reward_to_absorption, reloaded.reward_to_absorption)
        assert model.name == reloaded.name
        assert model.strict_cost_signs == reloaded.strict_cost_signs

    def test_round_trip_with_awkward_floats(self, tmp_path):
        rng = np.random.default_rng(73)
        n = 4
        raw00 = rng.uniform(size=(n, n))
        raw01 = rng.uniform(0.1, 1.0, size=(n, 2))
        doc = {
            "time_model": "discrete",
            "P00": (raw00 / raw00.sum(1, keepdims=True) / 3.0).tolist(),
            "P01": (raw01 / raw01.sum(1, keepdims=True) * (2.0 / 3.0)).tolist(),
            "c": rng.standard_normal(n).tolist(),
            "d0": (-rng.uniform(0, 1, n)).tolist(),
            "d1": (-rng.uniform(0, 1, n)).tolist(),
        }
        first = write_json(tmp_path / "m.json", doc)
        model = load_model_file(first)
        saved = tmp_path / "saved.json"
        save_model_file(model, str(saved))
        reloaded = load_model_file(str(saved))
        assert np.array_equal(model.fundamental.m, reloaded.fundamental.m)

    def test_policy_loader_rejects_missing_key(self, tmp_path):
        path = write_json(tmp_path / "p.json", {"alpha0": [1.0]})
        with pytest.raises(Exception, match="alpha1"):
            load_policy_file(path)


class TestArgumentHandling:
    def test_help_exits_zero(self, capsys):
        assert cli.main(["--help"]) == 0

    def test_no_command_exits_one(self, capsys):
        assert cli.main([]) == 1

    def test_unknown_command_exits_one(self, capsys):
        assert cli.main(["frobnicate"]) == 1
