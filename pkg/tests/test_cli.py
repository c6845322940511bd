import csv
import io
import json
import subprocess
import sys

import pytest

import anchova.cli as cli_mod
from anchova.cli import CLASSIFY_HEADER, WITNESS_HEADER, gamma_sequence, main, parse_d_range
from anchova.io import REPORT_HEADER, components_from_dict, read_reports_csv


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture
def identity_json(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"dim": 1, "terms": [{"coeff": 1.0, "factors": {"1": [0, 1]}}]}))
    return str(path)


class TestParsing:
    def test_d_range(self):
        assert parse_d_range("3") == [3]
        assert parse_d_range("2..5") == [2, 3, 4, 5]
        with pytest.raises(ValueError):
            parse_d_range("5..2")

    def test_gamma_sequence(self):
        assert gamma_sequence("power:2", 3) == pytest.approx([1, 1 / 4, 1 / 9])
        assert gamma_sequence("geometric:0.5", 3) == pytest.approx([0.5, 0.25, 0.125])
        assert gamma_sequence("const:2", 2) == [2.0, 2.0]
        with pytest.raises(ValueError):
            gamma_sequence("bogus:1", 2)


class TestConstants:
    def test_example(self, capsys):
        code, out, _ = run(capsys, "constants", "--family", "product", "--gamma", "1,1", "--d", "2", "--p", "2")
        assert code == 0
        assert out.splitlines() == ["d,c1,cinf,cdp_2", "2,4,2.25,3"]

    def test_range_and_inf(self, capsys):
        code, out, _ = run(capsys, "constants", "--gamma", "1", "--d", "1..3", "--p", "1,inf")
        table = rows(out)
        assert table[0] == ["d", "c1", "cinf", "cdp_1", "cdp_inf"]
        assert [r[0] for r in table[1:]] == ["1", "2", "3"]
        for r in table[1:]:
            assert r[1] == r[3] and r[2] == r[4]

    def test_finite_order_needs_q(self, capsys):
        code, _, err = run(capsys, "constants", "--family", "finite-order", "--d", "3")
        assert code == 2
        assert "--q" in err

    def test_bad_p(self, capsys):
        assert run(capsys, "constants", "--p", "0.5")[0] == 2

    def test_bad_range_writes_nothing(self, capsys):
        code, out, _ = run(capsys, "constants", "--d", "4..1")
        assert code == 2 and out == ""


class TestFunctionCommands:
    def test_ratio_example(self, capsys, identity_json):
        code, out, _ = run(capsys, "ratio", "--function", identity_json, "--family", "product", "--gamma", "1", "--p", "2")
        assert code == 0
        (rep,) = read_reports_csv(io.StringIO(out))
        assert rep.ratio_a_over_anch == pytest.approx(1.118034, abs=1e-6)
        assert rep.bound_satisfied

    def test_norms(self, capsys, identity_json):
        code, out, _ = run(capsys, "norms", "--function", identity_json, "--gamma", "1", "--p", "1,inf")
        assert code == 0
        reps = read_reports_csv(io.StringIO(out))
        assert [r.anchored_norm for r in reps] == [1.0, 1.0]
        assert reps[0].anova_norm == pytest.approx(1.5)

    def test_decompose(self, capsys, identity_json, tmp_path):
        target = tmp_path / "out.json"
        code, _, _ = run(capsys, "decompose", "--function", identity_json, "-o", str(target))
        assert code == 0
        data = json.loads(target.read_text())
        anch = components_from_dict(data["anchored"])
        anova = components_from_dict(data["anova"])
        assert sorted(anch) == [1]
        assert sorted(anova) == [0, 1]
        assert anova[0].constant_value() == pytest.approx(0.5)

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "ratio", "--function", str(tmp_path / "nope.json"))[0] == 2

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"dim": 1, "terms": [{"factors": {"7": [1]}}]}))
        assert run(capsys, "norms", "--function", str(path))[0] == 2

    def test_capacity_exit_code(self, capsys, tmp_path):
        # the top component keeps two terms in all nine coordinates, beyond the quadrature cap
        first = {str(j): [0.1, 1.0, 1.0] for j in range(1, 10)}
        second = {str(j): [0.0, 0.5, -1.0] for j in range(1, 10)}
        data = {"dim": 9, "terms": [{"coeff": 1.0, "factors": first}, {"coeff": -0.3, "factors": second}]}
        path = tmp_path / "big.json"
        path.write_text(json.dumps(data))
        code, _, err = run(capsys, "ratio", "--function", str(path), "--gamma", "1", "--p", "1.5")
        assert code == 3
        assert "error" in err


class TestWitness:
    def test_pipeline_matches_closed_form(self, capsys):
        code, out, _ = run(capsys, "witness", "--gamma-seq", "power:2", "--d", "1..4", "--p", "1,2,inf")
        assert code == 0
        table = rows(out)
        assert table[0] == WITNESS_HEADER
        assert len(table) == 1 + 4 * 3
        for r in table[1:]:
            rec = dict(zip(WITNESS_HEADER, r))
            assert float(rec["anch_rel_delta"]) < 1e-9
            assert float(rec["anova_rel_delta"]) < 1e-9
            if rec["p"] == "inf":
                assert rec["lb_holds"] == ""
                assert float(rec["ratio"]) == pytest.approx(float(rec["c_dp"]), rel=1e-9)
            else:
                assert rec["lb_holds"] == "true"


class TestClassify:
    def test_product_geometric(self, capsys):
        code, out, _ = run(capsys, "classify", "--gamma-seq", "geometric:0.5", "--p", "2")
        table = rows(out)
        assert code == 0 and table[0] == CLASSIFY_HEADER
        assert dict(zip(CLASSIFY_HEADER, table[1]))["regime"] == "Uniform"

    def test_slow_tail_is_low_confidence(self, capsys):
        # the tail test cannot see that sum j**-2 converges within d_max = 1000
        code, out, _ = run(capsys, "classify", "--gamma-seq", "power:2", "--p", "2")
        rec = dict(zip(CLASSIFY_HEADER, rows(out)[1]))
        assert (rec["regime"], rec["confidence"]) == ("Polynomial", "low")

    def test_harmonic_is_high_confidence(self, capsys):
        code, out, _ = run(capsys, "classify", "--gamma-seq", "power:1", "--p", "2")
        rec = dict(zip(CLASSIFY_HEADER, rows(out)[1]))
        assert (rec["regime"], rec["confidence"]) == ("Polynomial", "high")
        assert float(rec["exponent_bound"]) == pytest.approx(1.0820, abs=1e-3)

    def test_finite_order(self, capsys):
        code, out, _ = run(capsys, "classify", "--family", "finite-order", "--q", "2", "--p", "1")
        rec = dict(zip(CLASSIFY_HEADER, rows(out)[1]))
        assert code == 0
        assert rec["regime"] == "Polynomial" and float(rec["exponent_bound"]) == 2

    def test_explicit_rejected(self, capsys):
        assert run(capsys, "classify", "--family", "explicit")[0] == 2


class TestVerify:
    def test_deterministic_and_passing(self, tmp_path, capsys):
        outs = []
        for name in ("a.csv", "b.csv"):
            target = tmp_path / name
            code, _, err = run(capsys, "verify", "--d", "4", "--samples", "50", "--seed", "7", "-o", str(target))
            assert code == 0
            assert "round-trip: 200/200 passed" in err
            outs.append(target.read_bytes())
        assert outs[0] == outs[1]
        text = outs[0].decode()
        assert text.splitlines()[0] == ",".join(REPORT_HEADER)
        assert len(read_reports_csv(io.StringIO(text))) == 250

    def test_failure_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr(cli_mod, "_round_trip_failures", lambda *a, **k: 1)
        assert run(capsys, "verify", "--d", "2", "--samples", "2", "--p", "2")[0] == 1

    def test_console_script(self, tmp_path):
        res = subprocess.run(
            [sys.executable, "-m", "anchova", "constants", "--gamma", "1,1", "--d", "2", "--p", "2"],
            capture_output=True, text=True, check=False,
        )
        assert res.returncode == 0
        assert res.stdout.splitlines()[-1] == "2,4,2.25,3"
