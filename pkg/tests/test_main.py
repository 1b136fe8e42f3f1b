import json

import pytest

import classify2
from algebra import ExactMatrix, FieldSpec
from errors import WitnessError
from main import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, CommandConfig, main, run
from mscore import ms_by_idempotent_criterion, trace_zero_space
from report import SCHEMA_VERSION, describe_verdict, dump_json, load_verdict, read_json


@pytest.fixture
def h_file(tmp_path):
    """Writes H over F_p to a JSON file and returns its path."""

    def write(p):
        path = tmp_path / f"h{p}.json"
        path.write_text(json.dumps(trace_zero_space(2, FieldSpec.prime(p)).to_literal()))
        return str(path)

    return write


class TestReport:
    """JSON reports and witness re-verification."""

    def test_schema_version(self, tmp_path):
        out = tmp_path / "r.json"
        dump_json({"kind": "x"}, out)
        assert read_json(out) == {"kind": "x", "schema_version": SCHEMA_VERSION}

    def test_verdict_round_trip(self, f2):
        h = trace_zero_space(2, f2)
        payload = ms_by_idempotent_criterion(h).to_dict()
        payload["subspace"] = h.to_literal()
        verdict = load_verdict(json.loads(dump_json(payload)))
        assert verdict.witness == ExactMatrix.identity(f2, 2)

    def test_tampered_witness(self, f2):
        h = trace_zero_space(2, f2)
        payload = ms_by_idempotent_criterion(h).to_dict()
        payload["subspace"] = h.to_literal()
        payload["witness"]["rows"] = [[1, 1], [0, 1]]
        with pytest.raises(WitnessError):
            load_verdict(payload)

    def test_describe(self, f5):
        line = describe_verdict(ms_by_idempotent_criterion(trace_zero_space(2, f5)), "H")
        assert line.startswith("✓ H is a proper MS")


class TestRun:
    """Exit codes of the command dispatcher."""

    def test_certify_ms(self, h_file, tmp_path):
        out = tmp_path / "out.json"
        code = run(CommandConfig("certify", subspace=h_file(5), output=str(out)))
        assert code == EXIT_OK
        assert read_json(out)["status"] == "MS_Proper"

    def test_certify_not_ms(self, h_file, tmp_path):
        out = tmp_path / "out.json"
        code = run(CommandConfig("certify", subspace=h_file(2), output=str(out)))
        assert code == EXIT_NEGATIVE
        report = read_json(out)
        assert report["witness"]["rows"] == [[1, 0], [0, 1]]
        load_verdict(out)

    def test_certify_by_definition(self, h_file, tmp_path):
        out = tmp_path / "out.json"
        code = run(CommandConfig("certify", subspace=h_file(3), method="definition", output=str(out)))
        assert code == EXIT_OK
        assert read_json(out)["method"] == "DefinitionBruteForce"

    def test_construct(self, tmp_path):
        out = tmp_path / "out.json"
        params = {"n": 2, "r": 1, "s1": 1, "s2": 2, "p": 5}
        code = run(CommandConfig("construct", family="cor26", params=params, output=str(out)))
        assert code == EXIT_OK
        report = read_json(out)
        assert report["codim"] == 2
        assert report["certificate"]["valid"]

    def test_maximal_exhaustive(self, tmp_path):
        out = tmp_path / "out.json"
        params = {"family": "cor26", "n": 2, "r": 1, "s1": 1, "s2": 2, "p": 5}
        code = run(CommandConfig("maximal", params=params, exhaustive=True, output=str(out)))
        assert code == EXIT_OK
        assert len(read_json(out)["evidence"]) == 6

    def test_maximal_direction(self, tmp_path):
        out = tmp_path / "out.json"
        params = {"family": "cor26", "n": 2, "r": 1, "s1": 1, "s2": 2, "p": 5}
        direction = json.dumps({"p": 5, "rows": [[0, 0], [1, 0]]})
        code = run(CommandConfig("maximal", params=params, direction=direction, output=str(out)))
        assert code == EXIT_OK
        assert read_json(out)["case"] == "Case1"

    def test_bad_budget(self):
        assert run(CommandConfig("census", p=2, budget=0)) == EXIT_ERROR

    def test_unknown_family(self):
        assert run(CommandConfig("construct", family="ex99")) == EXIT_ERROR

    def test_missing_file(self, tmp_path):
        assert run(CommandConfig("certify", subspace=str(tmp_path / "nope.json"))) == EXIT_ERROR

    def test_library_error(self, tmp_path):
        params = {"n": 2, "r": 1, "s1": 2, "s2": 2, "p": 5}
        out = tmp_path / "out.json"
        assert run(CommandConfig("construct", family="cor26", params=params, output=str(out))) == EXIT_ERROR


class TestMain:
    """Argument parsing end to end."""

    def test_construct(self, capsys):
        code = main(["construct", "--family", "cor26",
                     "--params", '{"n":2,"r":1,"s1":1,"s2":2,"p":5}'])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["family"] == "cor26"
        assert report["schema_version"] == SCHEMA_VERSION

    def test_census(self, tmp_path):
        out = tmp_path / "census.json"
        table = tmp_path / "census.csv"
        code = main(["--output", str(out), "census", "--n", "2", "--q", "2", "--csv", str(table)])
        assert code == EXIT_OK
        assert read_json(out)["hyperplanes"]["ms"] == 0
        assert table.read_text().startswith("dim,")

    def test_oracle(self, tmp_path):
        out = tmp_path / "oracle.json"
        assert main(["--output", str(out), "oracle-compare", "--n", "2", "--q", "2"]) == EXIT_OK
        assert read_json(out)["oracle_agreement"]

    def test_basechange(self, tmp_path):
        out = tmp_path / "demo.json"
        assert main(["--output", str(out), "demo-basechange", "--p", "5", "--s", "2"]) == EXIT_OK
        assert read_json(out)["verdict_flips"]

    def test_prime_power_needs_modulus(self):
        assert main(["census", "--n", "2", "--q", "4"]) == EXIT_ERROR

    def test_not_a_prime_power(self):
        assert main(["census", "--n", "2", "--q", "6"]) == EXIT_ERROR

    def test_modulus_must_be_integers(self):
        assert main(["census", "--n", "2", "--q", "4", "--modulus", "1,x,1"]) == EXIT_ERROR

    @pytest.mark.parametrize("params", [
        '{"n": "2", "r": 1, "s1": 1, "s2": 2, "p": 5}',
        '{"n": 2, "r": 1.5, "s1": 1, "s2": 2, "p": 5}',
        '{"n": 2, "r": 1, "s1": 2.5, "s2": 2, "p": 5}',
        '{"n": 2, "r": 1, "s1": 1, "s2": 2}',
        '[2, 1, 1, 2, 5]',
    ])
    def test_malformed_family_params(self, params):
        assert main(["construct", "--family", "cor26", "--params", params]) == EXIT_ERROR

    def test_float_matrix_entry(self, tmp_path):
        literal = {"field": {"p": 5, "k": 1}, "n": 2,
                   "basis": [{"p": 5, "k": 1, "rows": [[2.5, 0], [0, 1]]}]}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(literal))
        assert main(["certify", "--subspace", str(path)]) == EXIT_ERROR

    @pytest.mark.parametrize("argv", [
        ["debondt-sample", "--samples", "0"],
        ["oracle-compare", "--q", "2", "--sample", "0"],
    ])
    def test_empty_samples_rejected(self, argv):
        assert main(argv) == EXIT_ERROR

    def test_classify2_computes_families_once(self, monkeypatch, tmp_path):
        calls = []

        def counting(field, n=2):
            calls.append(field)
            return classify2.predicted_maximal_families(field, n)

        monkeypatch.setattr("main.predicted_maximal_families", counting)
        monkeypatch.setattr("census.predicted_maximal_families", counting)
        out = tmp_path / "cls.json"
        assert main(["--output", str(out), "classify2", "--field", "2"]) == EXIT_OK
        assert len(calls) == 1
        assert len(read_json(out)["predicted"]) == 4
