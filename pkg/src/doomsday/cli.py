"""Command-line front end: every headline number and figure dataset as CSV/JSON.

Subcommands: urn, posterior, forecast, fermi, medians. Output is
deterministic for fixed flags and seed; CSV files carry the full run
configuration in comment lines, and ``--figure`` additionally renders the
matching plot to an image file. Failures exit nonzero with a one-line
JSON error record on stderr.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

import click
import numpy as np

from . import fermi as fermi_mod
from . import population as population_mod
from .forecast import (
    BirthRateModel,
    births_axis_table,
    constant_hazard_curve,
    extinction_curve,
    hazard_fit_window,
    milestones,
)
from .posterior import (
    ExactRank,
    GridSpec,
    LogUniformRank,
    future_count_posterior,
    pareto_closed_form,
)
from .urn import (
    EnsembleCandidate,
    UrnEnsemble,
    candidate_posterior,
    monte_carlo_oracle,
    rank_likelihood,
    uniform_ensemble_scan,
)

FIXTURE_ENV = "DOOMSDAY_FIXTURES"
DEFAULT_CANDIDATE_FILES = (
    "urn_candidate_a.txt",
    "urn_candidate_b.txt",
    "urn_candidate_c.txt",
)
DEFAULT_HAZARDS = (0.002, 0.0002)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _write_csv(stream, columns, rows, config, extra_comments=()):
    stream.write("# config " + json.dumps(config, sort_keys=True) + "\n")
    for line in extra_comments:
        stream.write(f"# {line}\n")
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(stream, doc):
    stream.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


class _OutStream:
    def __init__(self, output):
        self.output = output

    def __enter__(self):
        if self.output in (None, "-"):
            self.stream = None
            return sys.stdout
        self.stream = open(self.output, "w", encoding="utf-8")
        return self.stream

    def __exit__(self, *exc):
        if self.stream is not None:
            self.stream.close()
        return False


def _fixture_text(filename) -> str:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        candidate = Path(override) / filename
        if candidate.exists():
            return candidate.read_text(encoding="utf-8")
    return resources.files("doomsday").joinpath("data", filename).read_text(
        encoding="utf-8"
    )


def _report_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, RuntimeError, OSError) as exc:
            record = {"error": type(exc).__name__, "message": str(exc)}
            click.echo(json.dumps(record, sort_keys=True), err=True)
            raise SystemExit(1)

    return wrapper


def _io_options(fn):
    fn = click.option(
        "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
        show_default=True, help="Delimited table or a single JSON document.",
    )(fn)
    fn = click.option(
        "--output", type=click.Path(dir_okay=False, writable=True), default=None,
        help="Output file; stdout when omitted.",
    )(fn)
    fn = click.option(
        "--figure", type=click.Path(dir_okay=False, writable=True), default=None,
        help="Also render the matching figure to this image file.",
    )(fn)
    return fn


@click.group()
def cli():
    """Observer-weighted group-size inference and extinction forecasts."""


@cli.command()
@click.option(
    "--candidates", "candidate_paths", multiple=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Candidate ensemble files (one urn count per line); "
    "defaults to the bundled three-candidate demonstration.",
)
@click.option("--prior", "priors", multiple=True, type=float,
              help="Prior weight per candidate, matching --candidates order.")
@click.option("--rank", default=3, show_default=True, type=int,
              help="Observed ball label.")
@click.option("--trials", default=100000, show_default=True, type=int,
              help="Monte Carlo comparison trials; 0 for exact-only output.")
@click.option("--seed", default=2016, show_default=True, type=int)
@click.option("--scan", is_flag=True,
              help="Scan uniform ensembles over mean urn size instead.")
@click.option("--total", default=1e6, show_default=True, type=float,
              help="Total ball count for --scan.")
@click.option("--mu-min", default=1.0, show_default=True, type=float)
@click.option("--mu-max", default=1e6, show_default=True, type=float)
@click.option("--mu-points", default=121, show_default=True, type=int)
@_io_options
@_report_errors
def urn(candidate_paths, priors, rank, trials, seed, scan, total,
        mu_min, mu_max, mu_points, fmt, output, figure):
    """Candidate posteriors for finite urn ensembles, plus the size scan."""
    if scan:
        mu = np.geomspace(mu_min, mu_max, mu_points)
        likelihood = uniform_ensemble_scan(total, rank, mu)
        config = {"command": "urn", "scan": True, "total": total, "rank": rank,
                  "mu_min": mu_min, "mu_max": mu_max, "mu_points": mu_points}
        rows = [(m, v) for m, v in zip(mu, likelihood)]
        with _OutStream(output) as out:
            if fmt == "csv":
                _write_csv(out, ["mean_size", "likelihood"], rows, config)
            else:
                _write_json(out, {
                    "config": config,
                    "mean_size": [float(m) for m in mu],
                    "likelihood": [float(v) for v in likelihood],
                })
        if figure:
            from .figures import save_scan_figure
            save_scan_figure(mu, [float(v) for v in likelihood], rank, figure)
        return

    if candidate_paths:
        labels = [Path(p).stem for p in candidate_paths]
        ensembles = [UrnEnsemble.from_file(p) for p in candidate_paths]
    else:
        labels = [Path(f).stem for f in DEFAULT_CANDIDATE_FILES]
        ensembles = [
            UrnEnsemble.from_text(_fixture_text(f)) for f in DEFAULT_CANDIDATE_FILES
        ]
    if priors and len(priors) != len(ensembles):
        raise ValueError("--prior count must match the number of candidates")
    weights = priors if priors else [1] * len(ensembles)
    candidates = [
        EnsembleCandidate(ensemble=e, prior_weight=w)
        for e, w in zip(ensembles, weights)
    ]

    exact = candidate_posterior(candidates, rank)
    likelihoods = [rank_likelihood(c.ensemble, rank) for c in candidates]
    smallest = min((p for p in exact if p > 0), default=None)
    odds = [p / smallest if smallest else 0 for p in exact]

    mc = monte_carlo_oracle(candidates, rank, seed, trials) if trials > 0 else None
    config = {"command": "urn", "rank": rank, "trials": trials, "seed": seed,
              "candidates": labels,
              "priors": [float(w) for w in weights]}

    columns = ["candidate", "prior", "likelihood", "posterior", "odds"]
    rows = []
    for i, label in enumerate(labels):
        row = [label, weights[i], likelihoods[i], exact[i], odds[i]]
        rows.append(row)
    if mc is not None:
        columns += ["mc_posterior", "mc_stderr"]
        err = mc.stderr()
        for i, row in enumerate(rows):
            row += [mc.posterior[i], err[i]]

    with _OutStream(output) as out:
        if fmt == "csv":
            _write_csv(out, columns, rows, config)
        else:
            doc = {"config": config, "candidates": [
                {c: (v if c == "candidate" else float(v))
                 for c, v in zip(columns, row)}
                for row in rows
            ]}
            _write_json(out, doc)
    if figure:
        from .figures import save_urn_figure
        save_urn_figure(
            labels, [float(p) for p in exact],
            None if mc is None else list(mc.posterior), figure,
        )


@cli.command()
@click.option("--rank", required=True, type=float, help="Observed rank r.")
@click.option("--over", type=click.Choice(["N", "B"]), default="N",
              show_default=True,
              help="Posterior over total group size N or future count B.")
@click.option("--rank-prior", "rank_prior", type=click.Choice(["exact", "log-uniform"]),
              default="exact", show_default=True)
@click.option("--spread", default=3.0, show_default=True,
              help="Log-uniform half-width factor around --rank.")
@click.option("--grid-points", default=4096, show_default=True, type=int)
@_io_options
@_report_errors
def posterior(rank, over, rank_prior, spread, grid_points, fmt, output, figure):
    """Tabulated posterior densities over N or B."""
    config = {"command": "posterior", "rank": rank, "over": over,
              "rank_prior": rank_prior, "spread": spread,
              "grid_points": grid_points}
    if over == "N":
        if rank_prior != "exact":
            raise ValueError("the posterior over N is defined for an exact rank")
        tp = pareto_closed_form(rank, GridSpec(n_points=grid_points))
    else:
        if rank_prior == "exact":
            prior = ExactRank(rank)
        else:
            prior = LogUniformRank.around(rank, spread)
        tp = future_count_posterior(
            prior, GridSpec(n_points=grid_points, lo_factor=1e-8, hi_factor=1e6)
        )

    with _OutStream(output) as out:
        if fmt == "csv":
            out.write("# config " + json.dumps(config, sort_keys=True) + "\n")
            tp.write_csv(out, variable=over)
        else:
            _write_json(out, {"config": config, **tp.to_payload(variable=over)})
    if figure:
        from .figures import save_posterior_figure
        save_posterior_figure(tp, over, figure)


@cli.command()
@click.option("--rank0", default=1e11, show_default=True, type=float,
              help="Fiducial rank for the log-uniform prior.")
@click.option("--spread", default=3.0, show_default=True, type=float)
@click.option("--rank-exact", "rank_exact", default=None, type=float,
              help="Use an exact rank instead of the log-uniform prior.")
@click.option("--no-doomsday", is_flag=True,
              help="Emit only the constant-hazard baselines.")
@click.option("--birth-rate", default=1.4e8, show_default=True, type=float)
@click.option("--epoch", default=2016.0, show_default=True, type=float)
@click.option("--hazard", "hazards", multiple=True, type=float,
              help="Constant annual hazards; defaults to 0.002 and 0.0002.")
@click.option("--horizon", default=1000.0, show_default=True, type=float,
              help="Years past the epoch covered by the curves.")
@click.option("--step", default=1.0, show_default=True, type=float)
@click.option("--milestone-year", default=2100.0, show_default=True, type=float)
@click.option("--axis", type=click.Choice(["time", "births", "both"]),
              default="time", show_default=True)
@click.option("--out-prefix", default=None, type=click.Path(),
              help="Write PREFIX_time.csv, PREFIX_births.csv and "
              "PREFIX_milestones.json instead of single-stream output.")
@_io_options
@_report_errors
def forecast(rank0, spread, rank_exact, no_doomsday, birth_rate, epoch, hazards,
             horizon, step, milestone_year, axis, out_prefix, fmt, output, figure):
    """Extinction-probability curves by year, with constant-hazard baselines."""
    model = BirthRateModel(rate=birth_rate, epoch=epoch)
    hazards = tuple(hazards) if hazards else DEFAULT_HAZARDS
    year_range = (epoch, epoch + horizon)
    config = {"command": "forecast", "rank0": rank0, "spread": spread,
              "rank_exact": rank_exact, "no_doomsday": no_doomsday,
              "birth_rate": birth_rate, "epoch": epoch,
              "hazards": list(hazards), "horizon": horizon, "step": step,
              "milestone_year": milestone_year}

    curves = {}
    tp = None
    if not no_doomsday:
        if rank_exact is not None:
            rank_prior = ExactRank(rank_exact)
        else:
            rank_prior = LogUniformRank.around(rank0, spread)
        tp = future_count_posterior(rank_prior)
        curves["p_doomsday"] = extinction_curve(tp, model, year_range, step)
    for h in hazards:
        curves[f"p_h{h:g}"] = constant_hazard_curve(h, model, year_range, step)

    years = next(iter(curves.values())).years
    columns = ["year"] + list(curves)
    if "p_doomsday" in curves:
        columns.append("hazard_doomsday")
    rows = []
    for i, year in enumerate(years):
        row = [year] + [c.p_extinct[i] for c in curves.values()]
        if "p_doomsday" in curves:
            row.append(curves["p_doomsday"].hazard[i])
        rows.append(row)

    reference = curves.get("p_doomsday", next(iter(curves.values())))
    marks = milestones(reference, at_year=milestone_year)
    p_at = marks["p_at"]
    marks_doc = {
        **marks,
        "odds_against": (1.0 - p_at) / p_at if p_at > 0 else None,
        "fitted_hazard": hazard_fit_window(reference, (epoch, milestone_year)),
        "fit_window": [epoch, milestone_year],
        "median_horizon_years": (
            None if marks["median_year"] is None else marks["median_year"] - epoch
        ),
    }

    births = None
    if tp is not None:
        births = births_axis_table(tp, hazards, model)

    def births_rows():
        cols = ["births", "density_doomsday"] + [f"density_h{h:g}" for h in hazards]
        data = [births["births"], births["density"]] + [
            births["hazard_densities"][h] for h in hazards
        ]
        return cols, list(zip(*data))

    if out_prefix:
        with open(f"{out_prefix}_time.csv", "w", encoding="utf-8") as out:
            _write_csv(out, columns, rows, config)
        if births is not None:
            bc, br = births_rows()
            with open(f"{out_prefix}_births.csv", "w", encoding="utf-8") as out:
                _write_csv(out, bc, br, config)
        with open(f"{out_prefix}_milestones.json", "w", encoding="utf-8") as out:
            _write_json(out, {"config": config, "milestones": marks_doc})
    else:
        with _OutStream(output) as out:
            if fmt == "json":
                doc = {"config": config, "milestones": marks_doc,
                       "years": [float(y) for y in years],
                       "curves": {k: [float(p) for p in c.p_extinct]
                                  for k, c in curves.items()}}
                if "p_doomsday" in curves:
                    doc["hazard_doomsday"] = [
                        float(h) for h in curves["p_doomsday"].hazard
                    ]
                _write_json(out, doc)
            elif axis == "births":
                if births is None:
                    raise ValueError("births axis needs the rank posterior")
                bc, br = births_rows()
                _write_csv(out, bc, br, config)
            elif axis == "both":
                raise ValueError("--axis both requires --out-prefix")
            else:
                _write_csv(out, columns, rows, config,
                           extra_comments=[
                               "milestones " + json.dumps(marks_doc, sort_keys=True)
                           ])

    if figure:
        from .figures import save_forecast_figure
        save_forecast_figure(
            births, {k: c.p_extinct for k, c in curves.items()}, years, figure
        )


@cli.command()
@click.option("--model", "model_name",
              type=click.Choice(["pareto", "lognormal", "bimodal", "all"]),
              default="all", show_default=True)
@click.option("--target-mi", default=7e9, show_default=True, type=float,
              help="Calibration target for the median individual's group size.")
@click.option("--n-min", default=4000.0, show_default=True, type=float)
@click.option("--sigma", default=3.7, show_default=True, type=float)
@click.option("--bimodal-weight", default=0.985, show_default=True, type=float)
@click.option("--bimodal-sigma1", default=1.5, show_default=True, type=float)
@click.option("--bimodal-sigma2", default=1.5, show_default=True, type=float)
@click.option("--bimodal-separation", default=1e4, show_default=True, type=float)
@click.option("--grid-points", default=1024, show_default=True, type=int)
@click.option("--out-prefix", default=None, type=click.Path(),
              help="Write per-model curve CSVs as PREFIX_<family>.csv.")
@_io_options
@_report_errors
def fermi(model_name, target_mi, n_min, sigma, bimodal_weight, bimodal_sigma1,
          bimodal_sigma2, bimodal_separation, grid_points, out_prefix,
          fmt, output, figure):
    """Calibrated civilization-size models and their observer-weighted curves."""
    config = {"command": "fermi", "model": model_name, "target_mi": target_mi,
              "n_min": n_min, "sigma": sigma,
              "bimodal_weight": bimodal_weight,
              "bimodal_sigma1": bimodal_sigma1,
              "bimodal_sigma2": bimodal_sigma2,
              "bimodal_separation": bimodal_separation,
              "grid_points": grid_points}

    builders = {
        "pareto": lambda: fermi_mod.calibrate_pareto(n_min=n_min, target_mi=target_mi),
        "lognormal": lambda: fermi_mod.calibrate_lognormal(
            sigma=sigma, target_mi=target_mi),
        "bimodal": lambda: fermi_mod.calibrate_bimodal(
            weight=bimodal_weight, sigma1=bimodal_sigma1, sigma2=bimodal_sigma2,
            separation=bimodal_separation, target_mi=target_mi),
    }
    names = list(builders) if model_name == "all" else [model_name]
    specs = {name: builders[name]() for name in names}
    reports = {name: fermi_mod.report(spec) for name, spec in specs.items()}

    def params_of(spec):
        if hasattr(spec, "alpha"):
            return {"alpha": spec.alpha, "n_min": spec.n_min}
        if hasattr(spec, "weight"):
            return {"weight": spec.weight,
                    "mu_log1": spec.comp1.mu_log, "sigma1": spec.comp1.sigma,
                    "mu_log2": spec.comp2.mu_log, "sigma2": spec.comp2.sigma}
        return {"mu_log": spec.mu_log, "sigma": spec.sigma}

    payload = {
        name: {"family": name, "params": params_of(rep.spec),
               "m_group": rep.m_group, "m_individual": rep.m_individual,
               "frac_exceeding": rep.frac_exceeding}
        for name, rep in reports.items()
    }

    model_curves = {
        name: fermi_mod.curves(spec, n_points=grid_points)
        for name, spec in specs.items()
    }

    if out_prefix:
        for name, cur in model_curves.items():
            with open(f"{out_prefix}_{name}.csv", "w", encoding="utf-8") as out:
                _write_csv(
                    out, ["N", "pdf_true", "pdf_size_biased"],
                    list(zip(cur.grid, cur.pdf_true, cur.pdf_size_biased)),
                    config,
                    extra_comments=["report " + json.dumps(payload[name],
                                                           sort_keys=True)],
                )

    with _OutStream(output) as out:
        if fmt == "json":
            _write_json(out, {"config": config, "models": payload})
        else:
            rows = [
                (name, p["m_group"], p["m_individual"], p["frac_exceeding"])
                for name, p in payload.items()
            ]
            _write_csv(
                out, ["family", "m_group", "m_individual", "frac_exceeding"],
                rows, config,
                extra_comments=[
                    f"{name} params " + json.dumps(p["params"], sort_keys=True)
                    for name, p in payload.items()
                ],
            )

    if figure:
        from .figures import save_fermi_figure
        save_fermi_figure(list(model_curves.items()), figure)


@cli.command()
@click.option("--table", "table_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="name,population CSV; defaults to the bundled 2016 snapshot.")
@click.option("--between", nargs=2, type=float, default=None,
              help="Also report the share of individuals between two sizes.")
@_io_options
@_report_errors
def medians(table_path, between, fmt, output, figure):
    """Median group versus median individual on an empirical table."""
    if table_path:
        table = population_mod.load_table(table_path)
        source = table_path
    else:
        override = os.environ.get(FIXTURE_ENV)
        bundled = population_mod.BUNDLED_COUNTRY_FILE
        if override and (Path(override) / bundled).exists():
            table = population_mod.load_table(Path(override) / bundled)
            source = str(Path(override) / bundled)
        else:
            table = population_mod.bundled_country_table()
            source = "bundled:" + bundled

    config = {"command": "medians", "table": source,
              "between": list(between) if between else None}
    rep = population_mod.neutrality_report(table)
    doc = {
        "config": config,
        "entries": len(table),
        "total_population": table.total,
        "m_group": rep["m_group"],
        "m_individual": rep["m_individual"],
        "bins": {
            "below": float(rep["below"]),
            "central": float(rep["central"]),
            "above": float(rep["above"]),
        },
    }
    if between:
        low, high = between
        doc["fraction_between"] = {
            "low": low, "high": high,
            "share": float(population_mod.fraction_between(table, low, high)),
        }

    with _OutStream(output) as out:
        if fmt == "json":
            _write_json(out, doc)
        else:
            rows = [
                ("entries", len(table)),
                ("total_population", table.total),
                ("m_group", rep["m_group"]),
                ("m_individual", rep["m_individual"]),
                ("share_below", rep["below"]),
                ("share_central", rep["central"]),
                ("share_above", rep["above"]),
            ]
            if between:
                rows.append(("fraction_between", doc["fraction_between"]["share"]))
            _write_csv(out, ["quantity", "value"], rows, config)
    if figure:
        from .figures import save_medians_figure
        save_medians_figure(rep, figure)


def main():
    try:
        cli(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(130)


if __name__ == "__main__":
    main()
