"""Command-line interface: exit codes, file outputs, determinism."""

import json
import re

import pytest

from curvekit.cli import main


def run(argv):
    return main(argv)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def generate_day(workdir, name="day.json", regime="falling", bonds=12, seed=3, extra=()):
    code = run(["generate", "--regime", regime, "--bonds", str(bonds),
                "--seed", str(seed), "-o", name, *extra])
    assert code == 0
    return workdir / name


class TestGenerate:
    def test_writes_requested_bond_count(self, workdir, capsys):
        path = generate_day(workdir, bonds=60, extra=("--maturity-range", "0.05,15"))
        data = json.loads(path.read_text())
        assert len(data["bonds"]) == 60
        assert "60 bonds" in capsys.readouterr().out

    def test_deterministic_output_bytes(self, workdir):
        a = generate_day(workdir, name="a.json", seed=7)
        b = generate_day(workdir, name="b.json", seed=7)
        assert a.read_bytes() == b.read_bytes()

    def test_single_bond_rejected(self, workdir, capsys):
        assert run(["generate", "--regime", "flat", "--bonds", "1", "-o", "x.json"]) == 2
        assert "n_bonds" in capsys.readouterr().err

    def test_unknown_regime_rejected(self, workdir):
        assert run(["generate", "--regime", "sideways", "-o", "x.json"]) == 2

    def test_unwritable_output(self, workdir):
        assert run(["generate", "--regime", "flat", "-o", "no-such-dir/x.json"]) == 3

    def test_csv_format(self, workdir):
        generate_day(workdir, name="day.csv", extra=("--format", "csv"))
        assert (workdir / "day.benchmark.csv").exists()


class TestFit:
    def test_nn_defaults_echoed_in_model_file(self, workdir):
        path = generate_day(workdir, bonds=8)
        assert run(["fit", str(path), "--estimator", "nn", "--nn-epochs", "50"]) == 0
        model = json.loads((workdir / "day.nn.model.json").read_text())
        echo = model["config_echo"]
        assert model["estimator"] == "nn"
        assert echo["learning_rate"] == 1e-8
        assert echo["gamma1"] == 1e3
        assert echo["gamma2"] == 1e4
        assert model["H"] == 3
        samples = (workdir / "day.nn.samples.csv").read_text().splitlines()
        assert samples[0] == "tenor,yield,benchmark_yield"
        assert len(samples) > 300  # 26 grid tenors + 0.1Y-spaced dense sampling

    def test_nss_on_five_bonds_exits_four(self, workdir, capsys):
        path = generate_day(workdir, bonds=5)
        assert run(["fit", str(path), "--estimator", "nss"]) == 4
        assert "6 bonds" in capsys.readouterr().err

    def test_bootstrap_on_zero_coupon_market_prints_tiny_rmse(self, workdir, capsys):
        path = generate_day(workdir, regime="flat", bonds=10,
                            extra=("--coupon-range", "0,0", "--spread", "0"))
        assert run(["fit", str(path), "--estimator", "bootstrap"]) == 0
        out = capsys.readouterr().out
        match = re.search(r"RMSE_ytm = ([0-9.e+-]+)", out)
        assert match, out
        assert float(match.group(1)) <= 1e-6

    def test_missing_snapshot_exits_three(self, workdir):
        assert run(["fit", "absent.json", "--estimator", "kr"]) == 3

    def test_bad_kr_lambda_exits_two(self, workdir):
        path = generate_day(workdir)
        assert run(["fit", str(path), "--estimator", "kr", "--kr-lambda", "-1"]) == 2

    def test_fit_outputs_are_deterministic(self, workdir):
        path = generate_day(workdir, bonds=8)
        assert run(["fit", str(path), "--estimator", "kr", "-o", "m1.json", "--samples", "s1.csv"]) == 0
        assert run(["fit", str(path), "--estimator", "kr", "-o", "m2.json", "--samples", "s2.csv"]) == 0
        assert (workdir / "m1.json").read_bytes() == (workdir / "m2.json").read_bytes()
        assert (workdir / "s1.csv").read_bytes() == (workdir / "s2.csv").read_bytes()


def strip_timestamp(path):
    data = json.loads(path.read_text())
    data["provenance"].pop("timestamp", None)
    return json.dumps(data, sort_keys=True)


class TestExperiments:
    def test_perturb_reports_per_estimator(self, workdir):
        path = generate_day(workdir, bonds=10)
        code = run(["experiment", "perturb", str(path), "--bumps", "0.03,0.05,0.10",
                    "--estimators", "bootstrap,kr", "-o", "rep"])
        assert code == 0
        for name in ("bootstrap", "kr"):
            report = json.loads((workdir / f"rep.perturb.{name}.json").read_text())
            bumps = [row["bump"] for row in report["details"]]
            assert bumps == [0.03, 0.05, 0.10]
            assert len(report["metrics"]) == 6  # rmse + mad per bump

    def test_perturb_defaults_to_longest_bond(self, workdir):
        path = generate_day(workdir, bonds=10)
        assert run(["experiment", "perturb", str(path), "--estimators", "bootstrap", "-o", "rep"]) == 0
        report = json.loads((workdir / "rep.perturb.bootstrap.json").read_text())
        data = json.loads(path.read_text())
        longest = max(data["bonds"], key=lambda b: b["maturity"])["id"]
        assert report["provenance"]["bond"] == longest

    def test_drop_shares_drop_sets_between_estimators(self, workdir):
        path = generate_day(workdir, bonds=10)
        code = run(["experiment", "drop", str(path), "--counts", "1,2", "--mc", "3",
                    "--seed", "5", "--estimators", "bootstrap,kr", "-o", "rep"])
        assert code == 0
        reports = [json.loads((workdir / f"rep.drop.{n}.json").read_text()) for n in ("bootstrap", "kr")]
        sets = [
            [rep["dropped_ids"] for block in r["details"] for rep in block["replications"]]
            for r in reports
        ]
        assert sets[0] == sets[1]

    def test_stability_over_three_days(self, workdir):
        paths = []
        for i in range(3):
            code = run(["generate", "--regime", "falling", "--bonds", "10", "--seed", "70",
                        "--base-rate", str(0.03 + 0.0005 * i), "--date", f"day-{i}",
                        "-o", f"d{i}.json"])
            assert code == 0
            paths.append(f"d{i}.json")
        code = run(["experiment", "stability", *paths, "--estimators", "bootstrap", "-o", "rep"])
        assert code == 0
        report = json.loads((workdir / "rep.stability.bootstrap.json").read_text())
        assert report["metrics"]["hit_rate"] is not None
        assert set(report["per_bucket"]) == {"Full", "<2Y", "2Y-10Y", ">10Y"}

    def test_loo_report_shape(self, workdir):
        path = generate_day(workdir, bonds=12)
        code = run(["experiment", "loo", str(path), "--mc", "5",
                    "--estimators", "kr", "-o", "rep", "--seed", "2"])
        assert code == 0
        report = json.loads((workdir / "rep.loo.kr.json").read_text())
        assert set(report["per_bucket"]) == {"Full", "<2Y", "2Y-10Y", ">10Y"}
        assert len(report["details"]) == 5

    def test_loo_csv_format(self, workdir):
        path = generate_day(workdir, bonds=12)
        code = run(["experiment", "loo", str(path), "--mc", "4", "--estimators", "kr",
                    "-o", "rep", "--format", "csv"])
        assert code == 0
        lines = (workdir / "rep.loo.kr.csv").read_text().splitlines()
        assert lines[0] == "experiment,estimator,bucket,metric,value,seed"

    def test_hyperscan_grid(self, workdir, capsys):
        path = generate_day(workdir, bonds=8)
        code = run(["experiment", "hyperscan", str(path), "--lr", "1e-7,1e-8",
                    "--epochs", "20,40", "-o", "rep"])
        assert code == 0
        out = capsys.readouterr().out
        assert "RMSE_ytm grid" in out
        report = json.loads((workdir / "rep.hyperscan.nn.json").read_text())
        assert len(report["details"]) == 4

    def test_rerun_overwrites_byte_identical_modulo_timestamp(self, workdir):
        path = generate_day(workdir, bonds=10)
        argv = ["experiment", "loo", str(path), "--mc", "4", "--estimators", "kr",
                "-o", "rep", "--seed", "9"]
        assert run(argv) == 0
        first = strip_timestamp(workdir / "rep.loo.kr.json")
        assert run(argv) == 0
        assert strip_timestamp(workdir / "rep.loo.kr.json") == first
