import json

import pytest
from click.testing import CliRunner

from doomsday.cli import cli


@pytest.fixture()
def runner():
    return CliRunner()


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    return header, rows


class TestUrnCommand:
    def test_default_fixtures_show_five_to_one_odds(self, runner):
        result = runner.invoke(cli, ["urn", "--trials", "0"])
        assert result.exit_code == 0
        header, rows = parse_csv(result.output)
        odds = {row[0]: float(row[header.index("odds")]) for row in rows}
        assert odds["urn_candidate_a"] == 0.0
        assert odds["urn_candidate_b"] == 5.0
        assert odds["urn_candidate_c"] == 1.0

    def test_exact_only_output_drops_mc_columns(self, runner):
        result = runner.invoke(cli, ["urn", "--trials", "0"])
        header, _ = parse_csv(result.output)
        assert "mc_posterior" not in header

    def test_monte_carlo_columns_present(self, runner):
        result = runner.invoke(cli, ["urn", "--trials", "20000", "--seed", "5"])
        assert result.exit_code == 0
        header, rows = parse_csv(result.output)
        mc = float(rows[1][header.index("mc_posterior")])
        assert abs(mc - 5 / 6) < 0.02

    def test_scan_cutoff_at_rank(self, runner):
        result = runner.invoke(cli, [
            "urn", "--scan", "--total", "1e6", "--rank", "20",
            "--mu-min", "10", "--mu-max", "1000", "--mu-points", "5",
        ])
        assert result.exit_code == 0
        header, rows = parse_csv(result.output)
        values = {float(r[0]): float(r[1]) for r in rows}
        assert values[10.0] == 0.0
        assert max(values.values()) == 1.0

    def test_impossible_rank_reports_json_error(self, runner):
        result = runner.invoke(cli, ["urn", "--rank", "99", "--trials", "0"])
        assert result.exit_code == 1
        record = json.loads(result.stderr.strip())
        assert record["error"] == "ImpossibleObservationError"

    def test_json_format(self, runner):
        result = runner.invoke(cli, ["urn", "--trials", "0", "--format", "json"])
        doc = json.loads(result.output)
        assert doc["candidates"][1]["posterior"] == pytest.approx(5 / 6)

    def test_custom_candidate_files_and_priors(self, runner, tmp_path):
        small = tmp_path / "small.txt"
        small.write_text("2\n2\n")
        big = tmp_path / "big.txt"
        big.write_text("4\n")
        result = runner.invoke(cli, [
            "urn", "--candidates", str(small), "--candidates", str(big),
            "--prior", "3", "--prior", "1", "--rank", "2", "--trials", "0",
        ])
        assert result.exit_code == 0
        header, rows = parse_csv(result.output)
        post = {row[0]: float(row[header.index("posterior")]) for row in rows}
        # Likelihoods are 2/4 and 1/4, so weighted odds are 3*2 : 1*1.
        assert post["small"] == pytest.approx(6 / 7)
        assert post["big"] == pytest.approx(1 / 7)

    def test_prior_count_mismatch_rejected(self, runner, tmp_path):
        one = tmp_path / "one.txt"
        one.write_text("3\n")
        result = runner.invoke(cli, [
            "urn", "--candidates", str(one), "--prior", "1", "--prior", "2",
        ])
        assert result.exit_code == 1
        assert json.loads(result.stderr.strip())["error"] == "ValueError"


class TestPosteriorCommand:
    def test_median_in_header_over_n(self, runner):
        result = runner.invoke(cli, ["posterior", "--rank", "1e11", "--over", "N"])
        assert result.exit_code == 0
        header_line = next(
            ln for ln in result.output.splitlines() if ln.startswith("# header")
        )
        header = json.loads(header_line.removeprefix("# header "))
        assert header["median"] == 2e11 - 1

    def test_future_count_median_is_rank(self, runner):
        result = runner.invoke(cli, [
            "posterior", "--rank", "100", "--over", "B", "--format", "json",
        ])
        doc = json.loads(result.output)
        assert doc["header"]["median"] == pytest.approx(100.0, rel=1e-6)

    def test_support_starts_at_half_for_rank_one(self, runner):
        result = runner.invoke(cli, [
            "posterior", "--rank", "1", "--over", "N", "--format", "json",
        ])
        doc = json.loads(result.output)
        grid = doc["grid"]
        density = doc["density"]
        first_positive = next(x for x, d in zip(grid, density) if d > 0)
        assert first_positive == 0.5

    def test_log_uniform_over_n_rejected(self, runner):
        result = runner.invoke(cli, [
            "posterior", "--rank", "10", "--over", "N", "--rank-prior", "log-uniform",
        ])
        assert result.exit_code == 1
        assert json.loads(result.stderr.strip())["error"] == "ValueError"


class TestForecastCommand:
    def test_default_milestones(self, runner):
        result = runner.invoke(cli, ["forecast", "--format", "json"])
        assert result.exit_code == 0
        marks = json.loads(result.output)["milestones"]
        assert 0.11 <= marks["p_at"] <= 0.15
        assert 6.0 <= marks["odds_against"] <= 8.5
        assert 0.0012 <= marks["fitted_hazard"] <= 0.0025

    def test_exact_rank_median_year(self, runner):
        result = runner.invoke(cli, [
            "forecast", "--rank-exact", "1e11", "--format", "json",
        ])
        marks = json.loads(result.output)["milestones"]
        assert marks["median_year"] == pytest.approx(2730.3, abs=1.0)

    def test_hazard_only_columns(self, runner):
        result = runner.invoke(cli, [
            "forecast", "--no-doomsday", "--hazard", "0.002",
        ])
        header, rows = parse_csv(result.output)
        assert header == ["year", "p_h0.002"]
        assert float(rows[1][1]) == pytest.approx(0.002, rel=1e-9)

    def test_prefix_outputs(self, runner, tmp_path):
        prefix = tmp_path / "fc"
        result = runner.invoke(cli, ["forecast", "--out-prefix", str(prefix)])
        assert result.exit_code == 0
        assert (tmp_path / "fc_time.csv").exists()
        assert (tmp_path / "fc_births.csv").exists()
        marks = json.loads((tmp_path / "fc_milestones.json").read_text())
        assert "milestones" in marks

    def test_time_csv_columns(self, runner):
        result = runner.invoke(cli, ["forecast"])
        header, rows = parse_csv(result.output)
        assert header == [
            "year", "p_doomsday", "p_h0.002", "p_h0.0002", "hazard_doomsday",
        ]
        assert float(rows[0][1]) == 0.0


class TestFermiCommand:
    def test_pareto_report_index(self, runner):
        result = runner.invoke(cli, [
            "fermi", "--model", "pareto", "--format", "json",
        ])
        doc = json.loads(result.output)
        assert doc["models"]["pareto"]["params"]["alpha"] == pytest.approx(
            1.048, abs=1e-3
        )

    def test_lognormal_exceedance(self, runner):
        result = runner.invoke(cli, [
            "fermi", "--model", "lognormal", "--sigma", "3.7",
            "--target-mi", "7e9", "--format", "json",
        ])
        doc = json.loads(result.output)
        frac = doc["models"]["lognormal"]["frac_exceeding"]
        assert 1e-4 / 3 <= frac <= 3e-4

    def test_all_models_median_groups(self, runner):
        result = runner.invoke(cli, ["fermi", "--format", "json"])
        doc = json.loads(result.output)
        assert len(doc["models"]) == 3
        for payload in doc["models"].values():
            assert payload["m_group"] < 1e6

    def test_bare_invocation_emits_summary_rows(self, runner):
        result = runner.invoke(cli, ["fermi"])
        assert result.exit_code == 0
        header, rows = parse_csv(result.output)
        assert header == ["family", "m_group", "m_individual", "frac_exceeding"]
        assert {row[0] for row in rows} == {"pareto", "lognormal", "bimodal"}

    def test_curve_csv_files(self, runner, tmp_path):
        prefix = tmp_path / "fm"
        result = runner.invoke(cli, [
            "fermi", "--grid-points", "128", "--out-prefix", str(prefix),
        ])
        assert result.exit_code == 0
        for name in ("pareto", "lognormal", "bimodal"):
            text = (tmp_path / f"fm_{name}.csv").read_text()
            header, rows = parse_csv(text)
            assert header == ["N", "pdf_true", "pdf_size_biased"]
            assert len(rows) > 100


class TestMediansCommand:
    def test_bundled_snapshot(self, runner):
        result = runner.invoke(cli, ["medians", "--format", "json"])
        doc = json.loads(result.output)
        assert doc["entries"] == 233
        assert doc["bins"]["central"] >= 0.4

    def test_explicit_between(self, runner):
        result = runner.invoke(cli, [
            "medians", "--between", "5.4e6", "1.92e8", "--format", "json",
        ])
        doc = json.loads(result.output)
        assert 0.43 <= doc["fraction_between"]["share"] <= 0.53

    def test_custom_tiny_table(self, runner, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("name,population\na,1\nb,1\nc,98\n")
        result = runner.invoke(cli, [
            "medians", "--table", str(path), "--format", "json",
        ])
        doc = json.loads(result.output)
        assert doc["m_group"] == 1
        assert doc["m_individual"] == 98
        assert doc["bins"]["central"] == pytest.approx(0.98)

    def test_malformed_table_reports_json_error(self, runner, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("name,population\na,xyz\n")
        result = runner.invoke(cli, ["medians", "--table", str(path)])
        assert result.exit_code == 1
        assert json.loads(result.stderr.strip())["error"] == "TableFormatError"

    def test_fixture_directory_override(self, runner, tmp_path, monkeypatch):
        override = tmp_path / "fixtures"
        override.mkdir()
        (override / "country_populations_2016.csv").write_text(
            "name,population\nonly,5\n"
        )
        monkeypatch.setenv("DOOMSDAY_FIXTURES", str(override))
        result = runner.invoke(cli, ["medians", "--format", "json"])
        doc = json.loads(result.output)
        assert doc["entries"] == 1


class TestDeterminismAndFigures:
    def test_repeated_runs_are_byte_identical(self, runner):
        args = ["forecast", "--horizon", "200"]
        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)
        assert first.output == second.output

    def test_urn_runs_identical_with_seed(self, runner):
        args = ["urn", "--trials", "5000", "--seed", "11"]
        assert runner.invoke(cli, args).output == runner.invoke(cli, args).output

    @pytest.mark.parametrize(
        "args",
        [
            ["urn", "--trials", "2000"],
            ["urn", "--scan", "--mu-points", "40"],
            ["posterior", "--rank", "10", "--grid-points", "256"],
            ["forecast", "--horizon", "120"],
            ["fermi", "--model", "lognormal", "--grid-points", "128",
             "--format", "json"],
            ["medians", "--format", "json"],
        ],
    )
    def test_figure_rendering(self, runner, tmp_path, args):
        figure = tmp_path / "figure.png"
        result = runner.invoke(cli, args + ["--figure", str(figure)])
        assert result.exit_code == 0
        assert figure.exists() and figure.stat().st_size > 1000

    def test_output_file_writing(self, runner, tmp_path):
        out = tmp_path / "scan.csv"
        result = runner.invoke(cli, [
            "urn", "--scan", "--mu-points", "10", "--output", str(out),
        ])
        assert result.exit_code == 0
        assert out.read_text().startswith("# config ")
