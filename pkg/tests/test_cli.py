import json

import pytest

from mellinkit import CompoundPoisson, Exponential, LevySpec, LogNormal, Uniform, serialize
from mellinkit.cli import InputError, parse_grid, run


@pytest.fixture
def spec_file(tmp_path):
    def write(spec, name="spec.json"):
        p = tmp_path / name
        p.write_text(serialize.dumps(spec))
        return str(p)
    return write


def run_json(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


class TestGrid:
    def test_range_is_inclusive(self):
        assert parse_grid("1:3:0.5").tolist() == [1.0, 1.5, 2.0, 2.5, 3.0]

    def test_list(self):
        assert parse_grid("0.5, 2").tolist() == [0.5, 2.0]

    @pytest.mark.parametrize("text", ["0:-1:1", "1:2", "a:b:c", "1:2:0", ""])
    def test_bad(self, text):
        with pytest.raises(InputError):
            parse_grid(text)


class TestCommands:
    def test_mellin(self, spec_file, capsys):
        code, doc = run_json(["mellin", "--spec", spec_file(Exponential(1.0)),
                              "--lambda", "1:3:1"], capsys)
        assert code == 0
        assert [round(r[1], 12) for r in doc["table"]] == [1.0, 2.0, 6.0]
        assert len(doc["config_digest"]) == 16

    def test_empty_lambda_grid(self, spec_file, capsys):
        code = run(["mellin", "--spec", spec_file(Exponential(1.0)), "--lambda", "0:-1:1"])
        assert code == 2
        assert "empty" in capsys.readouterr().err

    def test_missing_spec(self, capsys):
        assert run(["mellin", "--spec", "/nonexistent.json"]) == 2

    def test_bad_subcommand(self, capsys):
        assert run(["frobnicate"]) == 2

    def test_invalid_spec_document(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text('{"variant": "gamma", "shape": -2}')
        assert run(["mellin", "--spec", str(p)]) == 2

    def test_bias(self, spec_file, capsys):
        code, doc = run_json(["bias", "--spec", spec_file(Uniform(0, 1)), "--t", "0.5,2",
                              "--lambda", "0.5:2:0.5"], capsys)
        assert code == 0 and doc["verdict"]["passed"]

    def test_excess(self, spec_file, capsys):
        code, doc = run_json(["excess", "--spec", spec_file(Exponential(1.0)),
                              "--t", "1,2"], capsys)
        assert code == 0
        assert all(f["distance_to_input"] < 1e-8 for f in doc["fixed_point_distance"])

    def test_tmono_failure_exit_code(self, spec_file, capsys):
        code, doc = run_json(["tmono", "--spec", spec_file(Uniform(0, 1)), "--t", "2"], capsys)
        assert code == 1 and not doc["verdict"]["passed"]

    def test_tmono_pass(self, spec_file, capsys):
        code, _ = run_json(["tmono", "--spec", spec_file(Exponential(1.0)), "--t", "3",
                            "--s", "1"], capsys)
        assert code == 0

    def test_limit_lognormal(self, spec_file, capsys):
        code, doc = run_json(["limit", "--spec", spec_file(LogNormal(0.0, 1.0)),
                              "--alpha", "1", "--t", "1:40:1", "--seed", "42"], capsys)
        assert code == 0
        assert doc["verdict"]["passed"]
        assert abs(doc["c_fit"]["c"] - 1.0) < 1e-10

    def test_levy(self, tmp_path, capsys):
        p = tmp_path / "levy.json"
        p.write_text(json.dumps(serialize.levy_to_dict(
            LevySpec(0.0, 0.4, CompoundPoisson(1.0, 1.0)))))
        code, doc = run_json(["levy", "--spec", str(p)], capsys)
        assert code == 0
        assert abs(doc["table"][-1][3] - 0.4) < 0.01

    def test_sample_csv(self, spec_file, capsys):
        code = run(["sample", "--spec", spec_file(Exponential(1.0)), "--n", "5",
                    "--seed", "3", "--format", "csv"])
        lines = capsys.readouterr().out.splitlines()
        assert code == 0
        assert lines[0] == "config_digest,index,value" and len(lines) == 6

    def test_out_directory(self, spec_file, tmp_path, capsys):
        out = tmp_path / "out"
        code = run(["mellin", "--spec", spec_file(Exponential(1.0)), "--out", str(out),
                    "--format", "csv"])
        assert code == 0
        assert (out / "mellin.csv").read_text().startswith("config_digest,lambda")

    def test_rejects_nonpositive_n(self, spec_file, capsys):
        assert run(["sample", "--spec", spec_file(Exponential(1.0)), "--n", "0"]) == 2


class TestDeterminism:
    def test_same_argv_same_bytes(self, spec_file, capsys):
        argv = ["sample", "--spec", spec_file(LogNormal(0.0, 1.0)), "--n", "50",
                "--seed", "11"]
        run(argv)
        first = capsys.readouterr().out
        run(argv)
        assert capsys.readouterr().out == first

    def test_digest_tracks_config(self, spec_file, capsys):
        path = spec_file(Exponential(1.0))
        _, a = run_json(["mellin", "--spec", path, "--lambda", "1"], capsys)
        _, b = run_json(["mellin", "--spec", path, "--lambda", "2"], capsys)
        assert a["config_digest"] != b["config_digest"]


def test_check_suite(capsys):
    code, doc = run_json(["check-suite", "--seed", "7"], capsys)
    assert code == 0 and doc["passed"]
