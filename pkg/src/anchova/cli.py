"""Command-line interface.

Usage::

    anchova constants --family product --gamma 1,1 --d 2 --p 2
    anchova decompose --function f.json
    anchova norms --function f.json --family product --gamma 1 --p 1,2,inf
    anchova ratio --function f.json --family product --gamma 1 --p 2
    anchova witness --gamma-seq power:2 --d 1..10 --p 1,2,3,inf
    anchova classify --gamma-seq power:1 --p 2
    anchova verify --d 4 --samples 50 --seed 7

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 a computation exceeded a size cap.
"""

from __future__ import annotations

import csv
import functools
import math
import sys
from contextlib import contextmanager

import click
import numpy as np

from . import io as aio
from .core import AnchovaError, CapacityError, format_number, format_p, parse_p
from .decomp import (
    anchored_components,
    anchored_reconstruct,
    anova_components,
    anova_reconstruct,
    weighted_norm,
)
from .equivalence import (
    measure_ratio,
    random_component_tuple,
    random_tensor_function,
    verify_bound_sweep,
    witness_function,
    witness_lower_bound_check,
    witness_norms_closed,
)
from .weights import (
    DimensionDependentWeights,
    FiniteOrderWeights,
    ProductWeights,
    classify_dimension_dependent,
    classify_equivalence,
    classify_finite_order,
    constant_c1,
    constant_cdp,
    constant_cinf,
)

__all__ = ["main", "parse_d_range", "gamma_sequence"]

DEFAULT_SEED = 0
FAMILIES = ("product", "finite-order", "dimension-dependent", "explicit")


def parse_d_range(text: str) -> list[int]:
    """``"4"`` or the inclusive range ``"1..5"``."""
    text = text.strip()
    if ".." in text:
        lo, hi = (int(x) for x in text.split("..", 1))
    else:
        lo = hi = int(text)
    if lo < 1 or hi < lo:
        raise ValueError(f"bad dimension range {text!r}")
    return list(range(lo, hi + 1))


def parse_p_list(values: tuple[str, ...]) -> list[float]:
    out = []
    for v in values:
        out.extend(parse_p(x) for x in v.split(",") if x.strip())
    return out


def gamma_sequence(spec: str, n: int) -> list[float]:
    """First ``n`` values of a named sequence.

    ``power:a`` gives ``j**-a``, ``geometric:r`` gives ``r**j`` and
    ``const:c`` gives ``c``, for ``j = 1, 2, ...``.
    """
    kind, _, arg = spec.partition(":")
    j = np.arange(1, n + 1, dtype=float)
    try:
        a = float(arg) if arg else None
    except ValueError as exc:
        raise ValueError(f"bad sequence parameter in {spec!r}") from exc
    if kind == "power":
        return list(j ** -(1.0 if a is None else a))
    if kind == "geometric":
        return list((0.5 if a is None else a) ** j)
    if kind == "const":
        return [1.0 if a is None else a] * n
    raise ValueError(f"unknown gamma sequence {spec!r}; use power:a, geometric:r or const:c")


class WeightOptions:
    def __init__(self, family, gamma, gamma_seq, c, omega, q, weights_path):
        self.family = family
        self.gamma = gamma
        self.gamma_seq = gamma_seq
        self.c = c
        self.omega = omega
        self.q = q
        self.weights_path = weights_path
        self._explicit = None

    def gammas(self, n: int) -> list[float]:
        if self.gamma_seq:
            return gamma_sequence(self.gamma_seq, n)
        if not self.gamma:
            return [1.0] * n
        vals = [float(x) for x in self.gamma.split(",") if x.strip()]
        if len(vals) == 1:
            return vals * n
        if len(vals) < n:
            raise click.UsageError(f"--gamma lists {len(vals)} values but dimension {n} needs {n}")
        return vals[:n]

    def schedule(self, d: int):
        if self.family == "product":
            return ProductWeights(tuple(self.gammas(d)))
        if self.family == "finite-order":
            if self.q is None:
                raise click.UsageError("--family finite-order needs --q")
            return FiniteOrderWeights(d, self.c, self.omega, self.q)
        if self.family == "dimension-dependent":
            return DimensionDependentWeights(d)
        if self.weights_path is None:
            raise click.UsageError("--family explicit needs --weights FILE")
        if self._explicit is None:
            self._explicit = aio.weights_from_dict(aio.load_json(self.weights_path))
        if self._explicit.dim != d:
            raise click.UsageError(f"weights file has dimension {self._explicit.dim}, need {d}")
        return self._explicit


def weight_options(fn):
    @click.option("--family", type=click.Choice(FAMILIES), default="product", show_default=True)
    @click.option("--gamma", help="Comma-separated gamma_j for product weights (one value is broadcast).")
    @click.option("--gamma-seq", help="Named sequence for product weights: power:a, geometric:r, const:c.")
    @click.option("--c", "c", type=float, default=1.0, show_default=True, help="Finite-order scale c.")
    @click.option("--omega", type=float, default=1.0, show_default=True, help="Finite-order base omega.")
    @click.option("--q", type=int, help="Finite-order order q.")
    @click.option("--weights", "weights_path", type=click.Path(exists=True, dir_okay=False), help="Explicit weight table (JSON).")
    @functools.wraps(fn)
    def wrapper(family, gamma, gamma_seq, c, omega, q, weights_path, **kwargs):
        return fn(WeightOptions(family, gamma, gamma_seq, c, omega, q, weights_path), **kwargs)

    return wrapper


p_option = click.option("--p", "p_values", multiple=True, default=("2",), show_default=True,
                        help="Exponent(s): decimals or 'inf', comma-separated or repeated.")
output_option = click.option("-o", "--output", type=click.Path(dir_okay=False, writable=True),
                             help="Output file (default: stdout).")


@contextmanager
def _open_output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _ps(p_values) -> list[float]:
    try:
        return parse_p_list(p_values)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _ds(text: str) -> list[int]:
    try:
        return parse_d_range(text)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _load_function(path):
    try:
        return aio.function_from_dict(aio.load_json(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise click.UsageError(f"cannot read function from {path}: {exc}") from exc


@click.group()
def cli():
    """Anchored and ANOVA decompositions, weighted norms and equivalence constants."""


@cli.command()
@weight_options
@click.option("--d", "d_text", default="2", show_default=True, help="Dimension or inclusive range a..b.")
@p_option
@output_option
def constants(weights, d_text, p_values, output):
    """Equivalence constants C1, Cinf and C_{d,p} over a range of dimensions."""
    ps = _ps(p_values)
    ds = _ds(d_text)
    with _open_output(output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["d", "c1", "cinf"] + [f"cdp_{format_p(p)}" for p in ps])
        for d in ds:
            w = weights.schedule(d)
            row = [d, format_number(constant_c1(w)), format_number(constant_cinf(w))]
            row += [format_number(constant_cdp(w, p)) for p in ps]
            writer.writerow(row)


@cli.command()
@click.option("--function", "function_path", required=True, type=click.Path(exists=True, dir_okay=False))
@output_option
def decompose(function_path, output):
    """Anchored and ANOVA components of a function (JSON)."""
    f = _load_function(function_path)
    data = {
        "anchored": aio.components_to_dict(anchored_components(f)),
        "anova": aio.components_to_dict(anova_components(f)),
    }
    with _open_output(output) as fh:
        aio.dump_json(data, fh)


def _reports_for_function(weights, function_path, p_values):
    f = _load_function(function_path)
    w = weights.schedule(f.dim)
    return [measure_ratio(f, w, p) for p in _ps(p_values)]


@cli.command()
@click.option("--function", "function_path", required=True, type=click.Path(exists=True, dir_okay=False))
@weight_options
@p_option
@output_option
def norms(weights, function_path, p_values, output):
    """Anchored and ANOVA norms of a function (report CSV)."""
    reports = _reports_for_function(weights, function_path, p_values)
    with _open_output(output) as fh:
        aio.write_reports_csv(reports, fh)


@cli.command()
@click.option("--function", "function_path", required=True, type=click.Path(exists=True, dir_okay=False))
@weight_options
@p_option
@output_option
def ratio(weights, function_path, p_values, output):
    """Norm ratios against the C_{d,p} bound; exit 1 if the bound is exceeded."""
    reports = _reports_for_function(weights, function_path, p_values)
    with _open_output(output) as fh:
        aio.write_reports_csv(reports, fh)
    if not all(r.bound_satisfied for r in reports):
        sys.exit(1)


WITNESS_HEADER = [
    "d", "p", "anch_closed", "anova_closed", "anch_pipeline", "anova_pipeline",
    "anch_rel_delta", "anova_rel_delta", "ratio", "c_dp", "lb_ratio_p", "lb_product", "lb_holds",
]


@cli.command()
@click.option("--gamma", help="Comma-separated gamma_j (one value is broadcast).")
@click.option("--gamma-seq", help="Named sequence: power:a, geometric:r, const:c.")
@click.option("--d", "d_text", default="1..6", show_default=True)
@p_option
@output_option
def witness(gamma, gamma_seq, d_text, p_values, output):
    """Witness prod(1 + gamma_j x_j) under product weights: closed forms vs pipeline."""
    opts = WeightOptions("product", gamma, gamma_seq, 1.0, 1.0, None, None)
    ps = _ps(p_values)
    ds = _ds(d_text)
    with _open_output(output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(WITNESS_HEADER)
        for d in ds:
            g = opts.gammas(d)
            w = ProductWeights(tuple(g))
            f = witness_function(g, expand=False)
            anch_c, anova_c = anchored_components(f), anova_components(f)
            for p in ps:
                closed = witness_norms_closed(g, p)
                pipe = (weighted_norm(anch_c, w, p), weighted_norm(anova_c, w, p))
                lb = witness_lower_bound_check(g, p) if math.isfinite(p) else None
                writer.writerow([
                    d, format_p(p),
                    format_number(closed[0]), format_number(closed[1]),
                    format_number(pipe[0]), format_number(pipe[1]),
                    format_number(abs(pipe[0] - closed[0]) / closed[0]),
                    format_number(abs(pipe[1] - closed[1]) / closed[1]),
                    format_number(pipe[1] / pipe[0]),
                    format_number(constant_cdp(w, p)),
                    format_number(lb.ratio_p) if lb else "",
                    format_number(lb.product_bound) if lb else "",
                    ("true" if lb.holds else "false") if lb else "",
                ])


CLASSIFY_HEADER = ["family", "p", "regime", "exponent_bound", "confidence", "tau0", "tau0_argmax", "d_max", "tail_ratio"]


def _opt(x):
    return "" if x is None else format_number(x)


@cli.command()
@weight_options
@p_option
@click.option("--dmax", type=int, default=1000, show_default=True, help="Largest dimension in the numeric diagnostics.")
@output_option
def classify(weights, p_values, dmax, output):
    """Uniform / polynomial / divergent regime of a weight family."""
    ps = _ps(p_values)
    with _open_output(output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CLASSIFY_HEADER)
        for p in ps:
            if weights.family == "product":
                rep = classify_equivalence(weights.gammas(dmax), p, dmax)
            elif weights.family == "finite-order":
                if weights.q is None:
                    raise click.UsageError("--family finite-order needs --q")
                rep = classify_finite_order(weights.q, p)
            elif weights.family == "dimension-dependent":
                rep = classify_dimension_dependent(p)
            else:
                raise click.UsageError("classification needs a weight family, not an explicit table")
            writer.writerow([
                weights.family, format_p(p), rep.regime, _opt(rep.exponent_bound), rep.confidence,
                _opt(rep.tau0), "" if rep.tau0_argmax is None else rep.tau0_argmax,
                "" if rep.d_max is None else rep.d_max, _opt(rep.tail_ratio),
            ])


def _round_trip_failures(d: int, samples: int, seed: int, atol: float = 1e-9) -> int:
    """Count failed S(R f) = f and R(S g) = g checks on random inputs."""
    rng = np.random.default_rng([seed, d, 1])
    failures = 0
    for _ in range(samples):
        f = random_tensor_function(rng, d, max_terms=3, max_axes=d, max_degree=4)
        x = rng.random((100, d))
        fx = f(x)
        for forward, back in ((anchored_components, anchored_reconstruct), (anova_components, anova_reconstruct)):
            if np.max(np.abs(back(forward(f))(x) - fx)) > atol:
                failures += 1
        g = random_component_tuple(rng, d)
        for forward, back in ((anchored_reconstruct, anchored_components), (anova_reconstruct, anova_components)):
            if back(forward(g)).max_abs_difference(g) > atol:
                failures += 1
    return failures


@cli.command()
@weight_options
@click.option("--d", "d", type=int, default=4, show_default=True)
@click.option("--samples", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--p", "p_values", multiple=True, default=("1,1.5,2,3,inf",), show_default=True)
@output_option
def verify(weights, d, samples, seed, p_values, output):
    """Round-trip identities and the C_{d,p} bound on random functions; exit 1 on any failure."""
    if d < 1 or samples < 0:
        raise click.UsageError("need --d >= 1 and --samples >= 0")
    ps = _ps(p_values)
    w = weights.schedule(d)
    rt_fail = _round_trip_failures(d, samples, seed)
    sweep = verify_bound_sweep(w, ps, samples, seed)
    with _open_output(output) as fh:
        aio.write_reports_csv(sweep.reports, fh)
    bound_fail = len(sweep.violations)
    click.echo(f"round-trip: {4 * samples - rt_fail}/{4 * samples} passed", err=True)
    click.echo(f"bound C_(d,p): {len(sweep.reports) - bound_fail}/{len(sweep.reports)} passed", err=True)
    for p, m in sweep.max_ratio.items():
        click.echo(f"  p={format_p(p)}: max ratio {m:.6g} <= C_(d,p) {constant_cdp(w, p):.6g}", err=True)
    if rt_fail or bound_fail:
        sys.exit(1)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="anchova", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 2
    except CapacityError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except (AnchovaError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
