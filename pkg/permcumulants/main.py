"""Entrypoint for the permcumulants package."""
import json
from collections.abc import Iterator, Mapping, Sequence
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pydantic
import yaml
from jsonschema.exceptions import ValidationError
from jsonschema.validators import validate
from typer import Argument, BadParameter, Exit, Option, Typer

from permcumulants.base import PermCumulantsError, substream
from permcumulants.elementary import (
    ElementarySpec,
    collision_specs,
    distinct_value_bound,
    enumerated_moment,
    joint_cumulant,
    joint_moment,
    joint_moment_symbolic,
    random_specs,
    sweep_main_lemma,
    verify_main_lemma,
)
from permcumulants.montecarlo import (
    AdjacencyStatistic,
    DashedZStatistic,
    FStatistic,
    GammaStatistic,
    RunConfig,
    Statistic,
    StackedStatistic,
    correlation_diagnostic,
    estimate_V,
    f_covariance_diagnostic,
    f_mean_diagnostic,
    gaussian_diagnostic,
    gaussian_grid_diagnostic,
    poisson_diagnostic,
    sample_permutations,
    sample_statistic,
)
from permcumulants.permutation import (
    MAX_ENUMERATION_SIZE,
    Permutation,
    cycle_stats,
    enumerate_ewens,
    parse_real_theta,
    parse_theta,
)
from permcumulants.setpartition import parse_partition
from permcumulants.settings import get_settings
from permcumulants.ssep import (
    BinaryWord,
    Shape,
    ascent_word,
    empirical_law,
    exact_word_law,
    exceedance_word,
    psi,
    psi_inverse,
    right_to_left_minima,
    shape_to_word,
    ssep_mcmc,
    ssep_mcmc_law,
    ssep_steady_batch,
    tv_distance,
    word_to_shape,
)
from permcumulants.statistics import (
    ADJACENCY_LAMBDA,
    LocalStatistic,
    adjacency_count,
    count_bivincular,
    count_dashed,
    count_local,
    descent_count,
    exceedance_count,
    f_function,
    inversion_count,
    parse_pattern,
    poisson_cycles,
    theoretical_limits,
)
from permcumulants.utils import (
    CONFIG_SCHEMA_PATH,
    OutputFormat,
    conf_logger,
    logger,
    make_document,
    package_version,
    parse_int_list,
    read_config_file,
    write_document,
    write_raw_csv,
)

# pylint: disable=too-many-arguments,too-many-locals

MAX_LISTED_WORDS = 20

app = Typer(no_args_is_help=True)


@contextmanager
def _user_input() -> Iterator[None]:
    """Turn errors caused by bad input into usage errors (exit code 2)."""
    try:
        yield
    except (PermCumulantsError, pydantic.ValidationError, json.JSONDecodeError) as e:
        raise BadParameter(str(e)) from e


def _json_option(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise BadParameter(f"{what} is not valid JSON: {e}") from e


def _float_list(text: str) -> list[float]:
    try:
        return [float(Fraction(item.strip())) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise BadParameter(f"not a list of numbers: {text!r}") from e


def _run_config(config_file: Optional[Path], **options: Any) -> RunConfig:
    """Options given on the command line win over the run file, which wins over the settings."""
    overrides: dict[str, Any] = {}
    if config_file is not None:
        overrides.update(read_config_file(config_file).get("montecarlo", {}))
    overrides.update({key: value for key, value in options.items() if value is not None})
    return RunConfig.from_settings(get_settings(), **overrides)


def _verdict(passed: Optional[bool]) -> Optional[str]:
    if passed is None:
        return None
    return "pass" if passed else "fail"


def _finish(
    command: str,
    config: Mapping[str, Any],
    result: Any,
    fmt: OutputFormat,
    output: Optional[Path],
    table: Optional[Sequence[Mapping]] = None,
    **extra: Any,
) -> None:
    """Write the document, then exit 1 if it carries a failed verdict."""
    document = make_document(command, config, result, **extra)
    write_document(document, fmt, output, table)
    if document.get("verdict") == "fail":
        logger.error("%s: the checked property does not hold.", command)
        raise Exit(1)


def _monte_carlo_finish(
    command: str,
    cfg: RunConfig,
    config: Mapping[str, Any],
    result: Any,
    estimates: Sequence[Any],
    diagnostics: Mapping[str, Any],
    passed: Optional[bool],
    fmt: OutputFormat,
    output: Optional[Path],
) -> None:
    rows = [estimate.to_json() for estimate in estimates]
    _finish(
        command,
        {**cfg.dict(), **config},
        result,
        fmt,
        output,
        table=rows or None,
        estimates=rows,
        diagnostics=diagnostics,
        verdict=_verdict(passed),
    )


FORMAT_OPTION = Option(OutputFormat.JSON, "--format", help="Output format: json, csv or pretty.")
OUTPUT_OPTION = Option(None, "--output", help="Write the output here instead of standard output.")
SEED_OPTION = Option(None, "--seed", help="Seed for every random stream.")
SAMPLES_OPTION = Option(None, "--samples", help="Number of sampled permutations.")
WORKERS_OPTION = Option(None, "--workers", help="Number of worker processes; results do not depend on it.")
CONFIG_FILE_OPTION = Option(
    None, "--config-file", exists=True, dir_okay=False, help="YAML run file with a montecarlo section."
)
RAW_CSV_OPTION = Option(None, "--raw-csv", help="Also write one row per sample to this CSV file.")


@app.callback()
def main(verbose: bool = Option(
    False,
    "--verbose",
    "-v",
    help="Print more information."
)) -> None:
    conf_logger(verbose)


@app.command()
def sample(
    n: int = Option(..., "--N", "--n", help="Size of the permutations."),
    theta: str = Option("1", help="Ewens parameter."),
    count: int = Option(1, help="Number of permutations to draw."),
    seed: int = Option(0, help="Seed for the random stream."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Draw Ewens permutations with the sequential insertion sampler.

    Example:
        $ permcumulants sample --N 7 --theta 2 --count 3 --seed 1
    """
    with _user_input():
        real_theta = parse_real_theta(theta)
        cfg = RunConfig(n=n, theta=real_theta, samples=count, seed=seed)
        permutations = [Permutation.from_array(row) for row in sample_permutations(cfg)]
    rows = [
        {
            "sample": index,
            "sigma": sigma.to_json(),
            "cycles": sigma.cycle_notation(),
            "cycle_count": cycle_stats(sigma).total,
        }
        for index, sigma in enumerate(permutations)
    ]
    config = {"N": n, "theta": theta, "count": count, "seed": seed}
    _finish("sample", config, {"permutations": rows}, fmt, output, table=rows)


@app.command("enumerate")
def enumerate_command(
    n: int = Option(..., "--N", "--n", help="Size of the permutations, at most 9."),
    theta: str = Option("1", help="Exact Ewens parameter, e.g. 1/2."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """List every permutation of size N with its exact Ewens weight."""
    with _user_input():
        rows = [
            {"sigma": sigma.to_json(), "cycles": sigma.cycle_notation(), "weight": weight}
            for sigma, weight in enumerate_ewens(n, theta)
        ]
    total = sum((row["weight"] for row in rows), Fraction(0))
    result = {"permutations": rows, "count": len(rows), "total_weight": total}
    _finish("enumerate", {"N": n, "theta": theta}, result, fmt, output, table=rows)


@app.command()
def stats(
    sigma: Optional[str] = Option(None, help="Permutation in one-line notation, e.g. 3,7,5,2,1,6,4."),
    x: str = Option("1/4,1/2,3/4", help="Points at which to evaluate F."),
    pattern: Optional[str] = Option(None, help='Pattern as JSON, e.g. {"tau": [2, 1], "X": [1]}.'),
    local: Optional[str] = Option(None, help="Local statistic constraints as a JSON list of triples."),
    p: int = Option(1, help="Arity of the local statistic."),
    limit: Optional[str] = Option(None, help="Name of a closed-form limit to evaluate instead."),
    params: str = Option("{}", help="JSON arguments of the limit."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Statistics of one permutation, or a closed-form limit value.

    Example:
        $ permcumulants stats --sigma 2,1,4,3 --pattern '{"tau": [2, 1]}'
        $ permcumulants stats --limit K --params '{"x": "1", "y": "1"}'
    """
    if limit is not None:
        arguments = _json_option(params, "--params")
        if not isinstance(arguments, dict):
            raise BadParameter("--params must be a JSON object")
        try:
            exact = {
                key: Fraction(value) if isinstance(value, str) else value
                for key, value in arguments.items()
            }
        except ValueError as e:
            raise BadParameter(f"--params values must be numbers or fractions: {e}") from e
        with _user_input():
            value = theoretical_limits(limit, **exact)
        _finish("stats", {"limit": limit, "params": arguments}, {"limit": limit, "value": value}, fmt, output)
        return
    if sigma is None:
        raise BadParameter("give either --sigma or --limit")
    with _user_input():
        permutation = Permutation(tuple(parse_int_list(sigma)))
        points = [Fraction(item.strip()) for item in x.split(",") if item.strip()]
        stats_result: dict[str, Any] = {
            "sigma": permutation.to_json(),
            "cycles": permutation.cycle_notation(),
            "cycle_count": cycle_stats(permutation).total,
            "gamma": cycle_stats(permutation).by_length,
            "exceedances": exceedance_count(permutation),
            "F": {str(point): f_function(permutation, point) for point in points},
            "adjacencies": adjacency_count(permutation),
            "inversions": inversion_count(permutation),
            "descents": descent_count(permutation),
            "right_to_left_minima": right_to_left_minima(permutation),
        }
        if pattern is not None:
            parsed = parse_pattern(_json_option(pattern, "--pattern"))
            stats_result["pattern"] = {
                "pattern": parsed.to_json(),
                "dashed": count_dashed(permutation, parsed),
                "bivincular": count_bivincular(permutation, parsed),
            }
        if local is not None:
            statistic = LocalStatistic.from_json(p, _json_option(local, "--local"))
            stats_result["local"] = {"statistic": statistic.to_json(), "count": count_local(permutation, statistic)}
    config = {"sigma": sigma, "x": x, "pattern": pattern, "local": local, "p": p}
    _finish("stats", config, stats_result, fmt, output)


def _spec(i: str, s: str, tau: Optional[str]) -> ElementarySpec:
    sources = parse_int_list(i)
    targets = parse_int_list(s)
    if tau is None:
        return ElementarySpec.singletons(sources, targets)
    return ElementarySpec(tuple(sources), tuple(targets), parse_partition(_json_option(tau, "--tau"), len(sources)))


@app.command()
def moment(
    i: str = Option(..., "--i", help="Sources i_1,...,i_r."),
    s: str = Option(..., "--s", help="Targets s_1,...,s_r."),
    theta: str = Option("1", help="Exact Ewens parameter."),
    n: Optional[int] = Option(None, "--N", "--n", help="Size of the permutations."),
    symbolic: bool = Option(False, "--symbolic", help="Give the moment as a rational function of N."),
    check: bool = Option(False, "--check", help="Compare with exhaustive enumeration (N <= 9)."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Exact joint moment of the events sigma(i_j) = s_j."""
    config = {"i": i, "s": s, "theta": theta, "N": n, "symbolic": symbolic, "check": check}
    with _user_input():
        sources, targets = parse_int_list(i), parse_int_list(s)
        if symbolic:
            value = joint_moment_symbolic(sources, targets, theta)
            _finish("moment", config, {"moment": value}, fmt, output)
            return
        if n is None:
            raise BadParameter("give --N or --symbolic")
        exact = joint_moment(sources, targets, theta, n)
        result: dict[str, Any] = {"moment": exact}
        verdict = None
        if check:
            oracle = enumerated_moment(sources, targets, theta, n)
            result["enumerated"] = oracle
            verdict = _verdict(oracle == exact)
    if verdict is None:
        _finish("moment", config, result, fmt, output)
    else:
        _finish("moment", config, result, fmt, output, verdict=verdict)


@app.command()
def cumulant(
    i: str = Option(..., "--i", help="Sources i_1,...,i_r."),
    s: str = Option(..., "--s", help="Targets s_1,...,s_r."),
    tau: Optional[str] = Option(None, "--tau", help="Grouping of the events as JSON blocks; singletons by default."),
    theta: str = Option("1", help="Exact Ewens parameter."),
    n: Optional[int] = Option(None, "--N", "--n", help="Size of the permutations."),
    symbolic: bool = Option(False, "--symbolic", help="Give the cumulant as a rational function of N."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Exact joint cumulant of the tau-grouped products of events.

    Example:
        $ permcumulants cumulant --i 1,3 --s 2,4 --tau "[[1],[2]]" --theta 1 --symbolic
    """
    config = {"i": i, "s": s, "tau": tau, "theta": theta, "N": n, "symbolic": symbolic}
    with _user_input():
        spec = _spec(i, s, tau)
        if symbolic:
            report = verify_main_lemma(spec, theta)
            _finish("cumulant", config, report, fmt, output, verdict=_verdict(report.holds))
            return
        if n is None:
            raise BadParameter("give --N or --symbolic")
        value = joint_cumulant(spec, theta, n)
    _finish("cumulant", config, {"spec": spec, "cumulant": value}, fmt, output)


@app.command()
def verify_bound(
    i: str = Option(..., "--i", help="Sources i_1,...,i_r."),
    s: str = Option(..., "--s", help="Targets s_1,...,s_r."),
    tau: Optional[str] = Option(None, "--tau", help="Grouping of the events as JSON blocks; singletons by default."),
    theta: str = Option("1", help="Exact Ewens parameter."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Check the degree of the symbolic cumulant against the graph exponent."""
    with _user_input():
        spec = _spec(i, s, tau)
        report = verify_main_lemma(spec, theta)
    result = {**report.to_json(), "distinct_value_bound": distinct_value_bound(spec)}
    config = {"i": i, "s": s, "tau": tau, "theta": theta}
    _finish("verify-bound", config, result, fmt, output, verdict=_verdict(report.holds))


@app.command()
def sweep_bound(
    max_r: Optional[int] = Option(None, help="Largest number of events in the exhaustive sweep."),
    alphabet: Optional[int] = Option(None, help="Number of distinct symbols for i and s."),
    thetas: Optional[str] = Option(None, help="Comma-separated exact Ewens parameters."),
    random_r: Optional[int] = Option(None, help="Number of events in the random specs."),
    random_count: Optional[int] = Option(None, help="Number of random specs; 0 to skip them."),
    seed: Optional[int] = SEED_OPTION,
    config_file: Optional[Path] = Option(
        None, "--config-file", exists=True, dir_okay=False, help="YAML run file with a sweep section."
    ),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Run the degree check on every collision pattern and on random specs."""
    with _user_input():
        sweep: dict[str, Any] = {
            "max_r": 3,
            "alphabet": 6,
            "thetas": ["1/2", "1", "2"],
            "random_r": 4,
            "random_count": 200,
            "seed": get_settings().seed,
        }
        if config_file is not None:
            sweep.update(read_config_file(config_file).get("sweep", {}))
        given = {
            "max_r": max_r,
            "alphabet": alphabet,
            "thetas": thetas.split(",") if thetas else None,
            "random_r": random_r,
            "random_count": random_count,
            "seed": seed,
        }
        sweep.update({key: value for key, value in given.items() if value is not None})
        sweep["thetas"] = [str(theta).strip() for theta in sweep["thetas"]]
        specs = list(collision_specs(sweep["max_r"], sweep["alphabet"]))
        if sweep["random_count"]:
            specs += random_specs(
                sweep["random_r"], sweep["random_count"], sweep["alphabet"], substream(sweep["seed"], 0)
            )
        reports = sweep_main_lemma(specs, sweep["thetas"])
    failures = [report for report in reports if not report.holds]
    rows = [
        {
            "i": list(report.spec.i),
            "s": list(report.spec.s),
            "tau": str(report.spec.tau),
            "theta": report.theta,
            "degree": report.degree,
            "bound": report.bound,
            "holds": report.holds,
        }
        for report in reports
    ]
    result = {"checks": len(reports), "violations": len(failures), "failures": failures}
    _finish("sweep-bound", sweep, result, fmt, output, table=rows, verdict=_verdict(not failures))


@app.command()
def poisson(
    stat: str = Option("gamma", help="gamma (cycles of length p) or adjacency."),
    p: int = Option(1, help="Cycle length for the gamma statistic."),
    n: int = Option(1000, "--N", "--n", help="Size of the permutations."),
    theta: str = Option("1", help="Ewens parameter."),
    correlation: bool = Option(False, help="Also test the correlation of gamma_1 and gamma_2."),
    samples: Optional[int] = SAMPLES_OPTION,
    seed: Optional[int] = SEED_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    config_file: Optional[Path] = CONFIG_FILE_OPTION,
    raw_csv: Optional[Path] = RAW_CSV_OPTION,
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Compare a count statistic with its Poisson limit.

    Example:
        $ permcumulants poisson --stat gamma --p 1 --N 1000 --theta 1 --samples 100000 --seed 42
    """
    with _user_input():
        cfg = _run_config(
            config_file, n=n, theta=parse_real_theta(theta), samples=samples, seed=seed, workers=workers
        )
        parts: list[Statistic]
        if stat == "gamma":
            lam = float(poisson_cycles(cfg.theta, p))
            parts = [GammaStatistic(p)]
            if correlation:
                parts += [GammaStatistic(1), GammaStatistic(2)]
        elif stat == "adjacency":
            lam = float(ADJACENCY_LAMBDA)
            parts = [AdjacencyStatistic()]
        else:
            raise BadParameter(f"unknown statistic {stat!r}; choose gamma or adjacency")
        statistic = StackedStatistic(parts)
        values = sample_statistic(statistic, cfg)
        report = poisson_diagnostic(values[:, 0], lam, cfg)
    if raw_csv is not None:
        write_raw_csv(raw_csv, values, statistic.columns)
    diagnostics: dict[str, Any] = {"poisson": report}
    passed = None if report.verdict is None else report.verdict and report.cumulants_pass
    if correlation and stat == "gamma":
        correlation_report = correlation_diagnostic(values[:, 1], values[:, 2], cfg.se_multiple)
        diagnostics["correlation"] = correlation_report
        if passed is not None:
            passed = passed and correlation_report.verdict is not False
    result = {"statistic": parts[0].name, "lambda": lam, "tv": report.tv}
    config = {"stat": stat, "p": p, "correlation": correlation}
    _monte_carlo_finish("poisson", cfg, config, result, report.cumulants, diagnostics, passed, fmt, output)


@app.command()
def clt(
    kind: str = Option("f", help="f (running exceedances) or dashed (pattern counts)."),
    n: int = Option(1000, "--N", "--n", help="Size of the permutations for kind f."),
    theta: str = Option("1", help="Ewens parameter."),
    x: str = Option("1/4,1/2,3/4", help="Points for kind f."),
    pattern: str = Option('{"tau": [2, 1], "X": [1]}', help="Dashed pattern as JSON for kind dashed."),
    n_grid: str = Option("200,400,800", help="Sizes for kind dashed."),
    samples: Optional[int] = SAMPLES_OPTION,
    seed: Optional[int] = SEED_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    config_file: Optional[Path] = CONFIG_FILE_OPTION,
    raw_csv: Optional[Path] = RAW_CSV_OPTION,
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Gaussian diagnostics for the running exceedance count or a pattern count."""
    with _user_input():
        cfg = _run_config(
            config_file, n=n, theta=parse_real_theta(theta), samples=samples, seed=seed, workers=workers
        )
        if kind == "f":
            xs = _float_list(x)
            statistic = FStatistic(xs)
            values = sample_statistic(statistic, cfg)
            means = f_mean_diagnostic(values, xs, cfg)
            z = np.sqrt(cfg.n) * (values - np.array([check.expected for check in means]))
            covariance = f_covariance_diagnostic(z, xs, cfg)
            gaussian = [gaussian_diagnostic(z[:, k], cfg, stream=2 * len(xs) + k) for k in range(len(xs))]
            if raw_csv is not None:
                write_raw_csv(raw_csv, values, statistic.columns)
            passed = (
                all(check.passed for check in means)
                and covariance.verdict
                and all(report.verdict is not False for report in gaussian)
            )
            diagnostics = {
                "means": means,
                "covariance": covariance,
                "gaussian": {f"{point:g}": report for point, report in zip(xs, gaussian)},
            }
            config = {"kind": kind, "x": xs}
            _monte_carlo_finish("clt", cfg, config, {"points": xs}, means, diagnostics, passed, fmt, output)
            return
        if kind != "dashed":
            raise BadParameter(f"unknown kind {kind!r}; choose f or dashed")
        parsed = parse_pattern(_json_option(pattern, "--pattern"))
        sizes = parse_int_list(n_grid)
        grid = gaussian_grid_diagnostic(lambda size: DashedZStatistic(parsed, size), sizes, cfg)
    estimates = [estimate for report in grid.reports for estimate in report.cumulants]
    config = {"kind": kind, "pattern": parsed, "n_grid": sizes}
    _monte_carlo_finish(
        "clt", cfg, config, {"pattern": parsed}, estimates, {"gaussian_grid": grid}, grid.verdict, fmt, output
    )


@app.command()
def pattern_variance(
    pattern: str = Option(..., help='Dashed pattern as JSON, e.g. {"tau": [2, 1], "X": [1]}.'),
    n_grid: str = Option("200,400,800", help="Sizes to extrapolate from; at least three."),
    theta: str = Option("1", help="Ewens parameter."),
    exact_max_n: int = Option(7, help="Largest N for the exact variance table."),
    positivity_multiple: float = Option(5.0, help="SE multiple that V must clear to count as positive."),
    gaussian: bool = Option(False, help="Also run the Gaussian diagnostic on the grid."),
    samples: Optional[int] = SAMPLES_OPTION,
    seed: Optional[int] = SEED_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    config_file: Optional[Path] = CONFIG_FILE_OPTION,
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Estimate the limiting variance of a dashed pattern count."""
    with _user_input():
        parsed = parse_pattern(_json_option(pattern, "--pattern"))
        sizes = parse_int_list(n_grid)
        cfg = _run_config(
            config_file, n=max(sizes, default=1), theta=parse_real_theta(theta),
            samples=samples, seed=seed, workers=workers,
        )
        report = estimate_V(parsed, sizes, cfg, exact_max_n, positivity_multiple, gaussian)
    config = {"pattern": parsed, "n_grid": sizes, "exact_max_n": exact_max_n, "gaussian": gaussian}
    result = {"V": report.variance_fit.intercept, "V_se": report.variance_fit.intercept_se, "positive": report.positive}
    _monte_carlo_finish(
        "pattern-variance", cfg, config, result, report.grid, {"pattern_variance": report}, report.verdict, fmt, output
    )


@app.command()
def ssep_sample(
    n: int = Option(..., "--N", "--n", help="Number of sites."),
    theta: str = Option("1", help="Ewens parameter; the exit rate is 1/theta."),
    count: int = Option(1000, help="Number of steady-state configurations."),
    seed: int = Option(0, help="Seed for the random stream."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Sample the exclusion process steady state through Ewens permutations."""
    with _user_input():
        words = ssep_steady_batch(n, parse_real_theta(theta), count, substream(seed, 0))
        law = empirical_law(words)
        result: dict[str, Any] = {
            "words": ["".join(map(str, row)) for row in words[:MAX_LISTED_WORDS].tolist()],
            "law": law,
            "density": words.mean(axis=0),
        }
        if n < MAX_ENUMERATION_SIZE:
            exact = exact_word_law(n, parse_theta(theta))
            result["exact_law"] = exact
            result["tv"] = float(tv_distance(law, exact))
    config = {"N": n, "theta": theta, "count": count, "seed": seed}
    _finish("ssep-sample", config, result, fmt, output)


@app.command("ssep-mcmc")
def ssep_mcmc_run(
    n: int = Option(..., "--N", "--n", help="Number of sites."),
    beta: str = Option(..., help="Exit rate at the right boundary; theta = 1/beta."),
    steps: int = Option(10000, help="Transitions of the single chain."),
    law: bool = Option(False, "--law", help="Estimate the word law and compare it with the exact one."),
    burn_in: int = Option(500, help="Transitions before a chain's states are kept."),
    retained: int = Option(10000, help="Number of kept states."),
    thin: int = Option(20, help="Transitions between kept states."),
    chains: int = Option(500, help="Number of chains run side by side."),
    rate_scale: float = Option(1.0, help="Factor applied to every transition probability."),
    initial: Optional[str] = Option(None, help="Initial word; all sites empty by default."),
    tolerance: float = Option(0.02, help="Largest accepted total variation distance."),
    seed: int = Option(0, help="Seed for the random stream."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Run the exclusion process as a Markov chain."""
    config = {
        "N": n, "beta": beta, "steps": steps, "law": law, "burn_in": burn_in, "retained": retained,
        "thin": thin, "chains": chains, "rate_scale": rate_scale, "initial": initial,
        "tolerance": tolerance, "seed": seed,
    }
    with _user_input():
        exact_beta = parse_theta(beta)
        rng = substream(seed, 0)
        if not law:
            word = ssep_mcmc(n, float(exact_beta), steps, rng, initial, rate_scale)
            _finish("ssep-mcmc", config, {"word": word}, fmt, output)
            return
        empirical = ssep_mcmc_law(n, float(exact_beta), rng, burn_in, retained, thin, initial, rate_scale, chains)
        exact = exact_word_law(n, 1 / exact_beta)
    distance = float(tv_distance(empirical, exact))
    result = {"law": empirical, "exact_law": exact, "tv": distance}
    _finish("ssep-mcmc", config, result, fmt, output, verdict=_verdict(distance < tolerance))


@app.command()
def shape_word(
    shape: Optional[str] = Option(None, help="Row lengths, e.g. 3,3,2,0."),
    word: Optional[str] = Option(None, help="Binary word, e.g. 101001."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Convert between tableau shapes and binary words."""
    if (shape is None) == (word is None):
        raise BadParameter("give exactly one of --shape and --word")
    with _user_input():
        if shape is not None:
            parsed_shape = Shape(tuple(parse_int_list(shape)))
            parsed_word = shape_to_word(parsed_shape)
        else:
            parsed_word = BinaryWord.from_string(str(word))
            parsed_shape = word_to_shape(parsed_word)
    result = {"shape": parsed_shape, "word": parsed_word, "size": parsed_shape.size}
    _finish("shape-word", {"shape": shape, "word": word}, result, fmt, output)


@app.command("psi")
def psi_command(
    sigma: str = Option(..., help="Permutation in one-line notation."),
    inverse: bool = Option(False, "--inverse", help="Apply the inverse transform."),
    fmt: OutputFormat = FORMAT_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Write the cycles of a permutation as one word, or undo it.

    Example:
        $ permcumulants psi --sigma 3,7,5,2,1,6,4
    """
    with _user_input():
        given = Permutation(tuple(parse_int_list(sigma)))
        image = psi_inverse(given) if inverse else psi(given)
        source, target = (image, given) if inverse else (given, image)
        result = {
            "sigma": source,
            "psi": target,
            "text": str(image),
            "cycles": source.cycle_notation(),
            "right_to_left_minima": right_to_left_minima(target),
            "exceedance_word": exceedance_word(source),
            "ascent_word": ascent_word(target),
        }
    _finish("psi", {"sigma": sigma, "inverse": inverse}, result, fmt, output)


@app.command()
def validate_config(
    config_file: Path = Argument(help="The run file to validate"),
) -> None:
    """Validate the format of a run file."""
    logger.debug("Validating config file: %s.", config_file)

    config = yaml.load(config_file.read_text(encoding="UTF-8"), Loader=yaml.SafeLoader)
    schema_config = json.loads(CONFIG_SCHEMA_PATH.read_text(encoding="UTF-8"))
    try:
        validate(config if config is not None else {}, schema_config)
    except ValidationError as e:
        logger.error(e.message)
        raise Exit(1) from e
    logger.debug("Config file is valid.")


@app.command()
def version() -> None:
    """Display version information."""
    logger.info(
        "%s version %s",
        __package__,
        package_version(),
    )


if __name__ == "__main__":
    app()
