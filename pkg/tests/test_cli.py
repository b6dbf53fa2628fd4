import json

import pytest

from qlv.cli import main, parse_gamma_policy, parse_int_list, parse_points
from qlv.records import CSV_COLUMNS, from_csv, from_json

HEADER = "mode,n,alpha_analytic,beta_analytic,te_analytic,alpha_empirical,beta_empirical,te_empirical,se_alpha,se_beta,gamma,seed"
SMALL_CLONE = ["sweep-clone", "--trials", "2000", "--n-values", "1,5,20", "--seed", "42"]
SMALL_DELAY = ["sweep-delay", "--trials", "500", "--n-values", "3,6", "--seed", "42"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def pairs(text):
    return dict(line.split(" = ", 1) for line in text.splitlines())


class TestParsers:
    def test_int_list(self):
        assert parse_int_list("1,2, 5") == [1, 2, 5]
        assert parse_int_list("1-4,10") == [1, 2, 3, 4, 10]

    def test_points(self):
        assert parse_points("1,2; -3.5,4e3") == [(1.0, 2.0), (-3.5, 4000.0)]

    def test_gamma_policy(self):
        assert parse_gamma_policy("2N", 1.0).value == 2.0
        assert parse_gamma_policy("N", 1.0).value == 1.0
        assert parse_gamma_policy("fixed", 3.0).kind == "fixed_lambda"


class TestSweeps:
    def test_clone_header_and_rows(self, capsys):
        code, out, _ = run(capsys, *SMALL_CLONE)
        assert code == 0
        lines = out.split("\n")
        assert lines[0] == HEADER == ",".join(CSV_COLUMNS)
        assert out.endswith("\n") and "\r" not in out
        records = from_csv(out)
        assert [r.n for r in records] == [1, 5, 20]
        assert all(r.mode == "clone" and r.seed == 42 for r in records)
        assert records[0].alpha_analytic == pytest.approx(0.157299207, abs=1e-9)
        assert records[0].gamma == 2.0

    def test_same_seed_same_bytes(self, capsys):
        first = run(capsys, *SMALL_DELAY)[1]
        assert run(capsys, *SMALL_DELAY)[1] == first
        assert run(capsys, *SMALL_DELAY, "--workers", "4")[1] == first
        assert run(capsys, *SMALL_DELAY[:-1], "43")[1] != first

    def test_random_delay_has_no_analytic_columns(self, capsys):
        records = from_csv(run(capsys, *SMALL_DELAY)[1])
        assert all(r.alpha_analytic is None and r.gamma is None for r in records)
        assert all(r.te_empirical <= 0.5 + 3 * 0.5 * (r.se_alpha + r.se_beta) for r in records)

    def test_fixed_delay_points(self, capsys):
        code, out, _ = run(
            capsys, "sweep-delay", "--trials", "300", "--n-values", "3",
            "--rs-points", "3000,0;-1500,2600;-1500,-2600", "--d-v", "200",
        )
        assert code == 0
        (rec,) = from_csv(out)
        assert rec.te_analytic is not None and rec.gamma is not None

    def test_json_and_metadata(self, capsys, tmp_path):
        out = tmp_path / "clone.json"
        assert run(capsys, *SMALL_CLONE, "--format", "json", "--out", str(out))[0] == 0
        echo, records = from_json(out.read_text())
        assert echo["gamma_policy"] == "2N" and echo["seed"] == 42
        assert records == from_csv(run(capsys, *SMALL_CLONE)[1])

        csv_out = tmp_path / "delay.csv"
        assert run(capsys, *SMALL_DELAY, "--out", str(csv_out), "--gamma-policy", "fixed")[0] == 0
        meta = json.loads((tmp_path / "delay.csv.meta.json").read_text())
        assert meta["config"]["gamma_policy"] == "fixed"
        assert len(from_csv(csv_out.read_text())) == 2

    def test_config_file_and_override(self, capsys, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[clone]\nn_values = 2,3\ntrials = 100\nseed = 5\nmc = 3\n")
        code, out, _ = run(capsys, "sweep-clone", "--config", str(ini), "--seed", "6")
        assert code == 0
        records = from_csv(out)
        assert [r.n for r in records] == [2, 3] and records[0].seed == 6

    def test_unknown_config_key(self, capsys, tmp_path):
        ini = tmp_path / "bad.ini"
        ini.write_text("[clone]\ncolour = red\n")
        assert run(capsys, "sweep-clone", "--config", str(ini))[0] == 2

    @pytest.mark.parametrize(
        "argv",
        [
            ["sweep-clone", "--mc", "1", "--nc", "1"],
            ["sweep-clone", "--mc", "2", "--nc", "3"],
            ["sweep-clone", "--gamma-policy", "sometimes"],
            ["sweep-clone", "--n-values", "5,3"],
            ["sweep-delay", "--n-values", "2"],
            ["sweep-delay", "--sigma-t", "-1"],
            ["sweep-delay", "--rs-points", "1,2,3"],
        ],
    )
    def test_invalid_input_exits_2(self, capsys, argv):
        code, _, err = run(capsys, *argv, "--trials", "10")
        assert code == 2 and "invalid" in err

    def test_zero_distance_exits_3(self, capsys):
        code, _, err = run(capsys, "sweep-delay", "--d-v", "0", "--trials", "10")
        assert code == 3 and "degenerate" in err


class TestCrlb:
    def test_symmetric_case(self, capsys):
        code, out, _ = run(capsys, "crlb", "--rs-points", "1000,0;-500,866.0254037844386;-500,-866.0254037844386")
        assert code == 0
        assert float(pairs(out)["crlb_position_std_m"]) == pytest.approx(346.17, abs=0.01)

    def test_quantum_factor(self, capsys):
        out = run(capsys, "crlb", "--rs-points", "1,0;0,1;-1,0;0,-1", "--quantum", "n_p=25")[1]
        values = pairs(out)
        assert float(values["quantum_advantage"]) == pytest.approx(10.0)
        assert float(values["quantum_position_std_m"]) == pytest.approx(float(values["crlb_position_std_m"]) / 10)

    def test_collinear_exits_3(self, capsys):
        assert run(capsys, "crlb", "--rs-points", "1,0;2,0;-3,0")[0] == 3


class TestState:
    def test_spectrum(self, capsys):
        values = pairs(run(capsys, "state", "--r", "0.5")[1])
        assert values["pt_spectrum"] == "0.367879441, 2.71828183"
        assert values["spectrum"] == "1, 1"
        assert values["entangled"] == "true"

    def test_vacuum_not_entangled(self, capsys):
        assert pairs(run(capsys, "state", "--r", "0")[1])["entangled"] == "false"

    def test_fock(self, capsys):
        values = pairs(run(capsys, "state", "--r", "1", "--fock", "10")[1])
        coeffs = [float(c) for c in values["fock_coefficients"].split(", ")]
        assert len(coeffs) == 11
        assert coeffs[0] == pytest.approx(0.648054274, abs=1e-9)
        assert coeffs[1] < 0 < coeffs[2]
        assert 0.9 < float(values["fock_norm"]) < 1.0

    def test_json(self, capsys):
        data = json.loads(run(capsys, "state", "--r", "0.25", "--format", "json")[1])
        assert data["entangled"] == "true"

    def test_negative_fock_cutoff_invalid(self, capsys):
        assert run(capsys, "state", "--r", "0.5", "--fock", "-1")[0] == 2
