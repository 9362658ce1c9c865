"""Command line interface: ``bergman-lab <subcommand>``.

Configuration comes from an optional JSON file (see :mod:`bergman_lab.config`
for every key and default) with command line flags overriding single fields.
Results go to CSV (default) or JSON.  Exit codes: 0 ok, 2 configuration or
parameter error, 3 inconclusive verdict under ``--strict``, 4 numerical
failure, 1 selftest failure.
"""

import csv
import functools
import io
import json
import math
import sys

import click
import numpy as np

from . import expr as _expr
from .errors import NumericalError, ParameterError

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_NUMERICAL = 0, 1, 2, 3, 4

EXPRESSION_HELP = """\b
Expressions: numbers (2, 0.5, 1e-3), imaginary literals (2i, i), the
variable z (u = |z|^2 in densities), + - * / ^, parentheses, exp(.) and
kernel(alpha; a) = (1 - conj(a) z)^-(alpha+2).  ^ binds tighter than
unary minus and is right associative."""


# --------------------------------------------------------------------------
# output

def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    return value


def render_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_json(doc):
    return json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"


def emit(cfg, header, rows, doc):
    """Write the table as CSV or the document as JSON, per ``cfg['output']``."""
    out = cfg["output"]
    text = render_csv(header, rows) if out["format"] == "csv" else render_json(doc)
    if out["path"]:
        with open(out["path"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


# --------------------------------------------------------------------------
# error handling and shared options

def _guard(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ParameterError, _expr.ParseError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except (NumericalError, _expr.EvalError, FloatingPointError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
        except BrokenPipeError:
            sys.stderr.close()
            sys.exit(EXIT_OK)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
    return wrapper


# (flag, config key, type, help)
_FIELDS = [
    ("--p", "p", float, "exponent p"),
    ("--q", "q", float, "exponent q"),
    ("--t", "t", float, "Berezin exponent t"),
    ("--R", "R", float, "averaging radius R"),
    ("--alpha", "weight.alpha", float, "standard weight exponent"),
    ("--weight-kind", "weight.kind", str, "standard or custom"),
    ("--weight-profile", "weight.profile", str, "custom weight profile in u"),
    ("--weight-delta", "weight.delta", float, "custom weight admissibility exponent"),
    ("--measure", "measure.variant", str, "measure variant"),
    ("--measure-alpha", "measure.alpha", float, "exponent of the standard measure"),
    ("--density", "measure.density", str, "radial density in u = |z|^2"),
    ("--support-radius", "measure.support_radius", float, "truncate the measure"),
    ("--atom-count", "measure.count", int, "number of boundary atoms"),
    ("--n", "measure.n", int, "iterate of a pullback measure"),
    ("--lattice-r", "lattice_r", float, "lattice separation"),
    ("--truncation-radius", "truncation_radius", float, "outermost probe radius"),
    ("--shells", "quadrature.shells", int, "global radial panels"),
    ("--angular", "quadrature.angular", int, "global angular nodes"),
    ("--cutoff", "quadrature.cutoff", float, "boundary tail cutoff"),
    ("--seed", "quadrature.seed", int, "seed"),
    ("--psi", "compop.psi", str, "multiplier psi(z)"),
    ("--phi", "compop.phi", str, "self-map phi(z)"),
    ("--n-max", "compop.n_max", int, "largest iterate for power diagnostics"),
    ("--output", "output.path", str, "output file (default stdout)"),
    ("--format", "output.format", click.Choice(["csv", "json"]), "output format"),
]


def _dest(flag):
    return "opt_" + flag.lstrip("-").replace("-", "_").lower()


def config_options(func):
    """Attach ``--config`` and one flag per configuration field."""
    for flag, key, typ, text in reversed(_FIELDS):
        func = click.option(flag, _dest(flag), type=typ, default=None, help=f"{text} [{key}]")(func)
    func = click.option("--config", "config_path", type=click.Path(dir_okay=False),
                        default=None, help="JSON configuration file")(func)
    return func


def _load(config_path, kwargs):
    from .config import load_config

    text = None
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            text = fh.read()
    overrides = {key: kwargs.get(_dest(flag)) for flag, key, _, _ in _FIELDS}
    return load_config(text, overrides)


def _context(cfg):
    from .config import build_measure, build_params, build_quadrature, build_weight

    weight = build_weight(cfg)
    params = build_params(cfg, weight)
    return weight, params, build_measure(cfg, weight), build_quadrature(cfg)


# --------------------------------------------------------------------------
# commands

@click.group()
def main():
    """Weighted Bergman space Carleson measure diagnostics."""


@main.command()
@click.option("--r", "r", type=float, default=0.5, show_default=True, help="lattice separation")
@click.option("--truncation", type=float, default=0.999, show_default=True,
              help="audit domain radius")
@click.option("--samples", type=int, default=100_000, show_default=True,
              help="covering audit samples")
@config_options
@_guard
def lattice(r, truncation, samples, config_path, **kwargs):
    """Build an r-lattice and report node covering counts and multiplicity."""
    from .geometry import covering_multiplicity, make_lattice, node_covering_counts

    cfg = _load(config_path, kwargs)
    if samples < 1:
        raise ParameterError("samples must be a positive integer")
    seed = int(cfg["quadrature"]["seed"])
    lat = make_lattice(r, truncation, audit_samples=samples, seed=seed)
    lo, hi = covering_multiplicity(lat, samples, seed=seed)
    counts = node_covering_counts(lat)
    nodes = lat.nodes
    header = ["k", "re", "im", "abs", "covering_count"]
    rows = [(k, z.real, z.imag, abs(z), int(c)) for k, (z, c) in enumerate(zip(nodes, counts))]
    report = {"r": r, "truncation_radius": truncation, "nodes": int(nodes.size),
              "samples": samples, "min_covering": int(lo), "max_covering": int(hi),
              "multiplicity_bound": int(lat.multiplicity_bound)}
    click.echo(" ".join(f"{k}={_fmt(v)}" for k, v in report.items()), err=True)
    emit(cfg, header, rows, {"report": report, "header": header, "rows": rows})


@main.command()
@click.option("--strict", is_flag=True, help="exit 3 when the verdict is inconclusive")
@config_options
@_guard
def carleson(strict, config_path, **kwargs):
    """Carleson statistics and verdict for the configured measure."""
    from .carleson import carleson_check

    cfg = _load(config_path, kwargs)
    _, params, m, q = _context(cfg)
    rep = carleson_check(m, params, q)
    taus = rep.truncations
    header = (["quantity", "value", "error"] + [f"at_tau_{t:.6g}" for t in taus]
              + ["regime", "verdict"])
    rows = [(name, rep.values()[name], rep.errors[name], *rep.by_truncation[name],
             rep.regime, rep.verdict) for name in ("berezin", "averaging", "lattice", "probe")]
    doc = {"regime": rep.regime, "p": rep.p, "q": rep.q, "t": rep.t, "R": rep.R,
           "verdict": rep.verdict, "reasons": list(rep.reasons),
           "Q": {k: {"value": v, "error": rep.errors[k]} for k, v in rep.values().items()},
           "truncations": list(taus),
           "by_truncation": {k: list(v) for k, v in rep.by_truncation.items()},
           "mutual_ratios": rep.mutual_ratios}
    emit(cfg, header, rows, doc)
    click.echo(f"verdict: {rep.verdict}", err=True)
    if strict and rep.verdict == "inconclusive":
        sys.exit(EXIT_INCONCLUSIVE)


@main.command()
@click.option("--n-shells", "n_shells", type=int, default=8, show_default=True,
              help="number of boundary shells")
@config_options
@_guard
def vanishing(n_shells, config_path, **kwargs):
    """Per-shell sups of the normalized averaging function."""
    from .carleson import vanishing_profile

    cfg = _load(config_path, kwargs)
    _, params, m, q = _context(cfg)
    prof = vanishing_profile(m, params, n_shells, q, truncation=cfg["truncation_radius"],
                             refine=True)
    e = prof.shell_edges
    header = ["shell", "r_inner", "r_outer", "sup", "error"]
    rows = [(j, e[j], e[j + 1], prof.shell_sups[j], prof.shell_errors[j])
            for j in range(prof.shell_sups.size)]
    doc = {"trend": prof.trend, "decaying": prof.decaying, "vanishing": prof.vanishing,
           "shells": [dict(zip(header, r)) for r in rows]}
    emit(cfg, header, rows, doc)
    click.echo(f"trend={_fmt(prof.trend)} decaying={prof.decaying} vanishing={prof.vanishing}",
               err=True)


@main.command()
@click.option("--strict", is_flag=True, help="exit 3 when the verdict is inconclusive")
@config_options
@_guard
def power(strict, config_path, **kwargs):
    """Power-boundedness and compactness diagnostics of C_{psi,phi}."""
    from .carleson import CarlesonParams
    from .compop import power_diagnostic
    from .config import build_compop, build_quadrature, build_weight

    cfg = _load(config_path, kwargs)
    weight = build_weight(cfg)
    spec = build_compop(cfg, weight)
    base = CarlesonParams(spec.p, spec.p, t=cfg["t"], R=cfg["R"], alpha=spec.alpha,
                          weight=weight, lattice_r=cfg["lattice_r"],
                          lattice_truncation=cfg["truncation_radius"])
    diag = power_diagnostic(spec, int(cfg["compop"]["n_max"]), base, build_quadrature(cfg))
    header = ["n", "Q2", "Q2_error", "Q3", "Q3_error", "Q4", "Q4_error", "tail_sup",
              "tail_error", "vanishing"]
    rows = []
    for n, q2, q3, q4, errs, prof in diag.rows():
        rows.append((n, q2, errs[0], q3, errs[1], q4, errs[2], prof.shell_sups[-1],
                     prof.shell_errors[-1], prof.vanishing))
    doc = {"verdict": diag.verdict, "compactness": diag.compactness,
           "reasons": list(diag.reasons), "rows": [dict(zip(header, r)) for r in rows]}
    emit(cfg, header, rows, doc)
    click.echo(f"verdict: {diag.verdict}, {diag.compactness}", err=True)
    if strict and diag.verdict == "inconclusive":
        sys.exit(EXIT_INCONCLUSIVE)


def _points(zs, cfg):
    from .carleson import probe_grid

    if zs:
        pts = []
        for s in zs:
            e = _expr.parse(s)
            if not e.is_constant:
                raise ParameterError(f"probe {s!r} must be a constant")
            pts.append(complex(_expr.evaluate(e, 0.0)))
        pts = np.array(pts)
    else:
        pts = probe_grid(8, 8, cfg["truncation_radius"])
    if not np.all(np.abs(pts) < 1.0):
        raise ParameterError("probe points must lie in the open unit disk")
    return pts


def _pointwise(cfg, pts, func):
    from .config import build_measure, build_quadrature, build_weight

    m = build_measure(cfg, build_weight(cfg))
    q = build_quadrature(cfg)
    vals = func(m, pts, q)
    errs = np.abs(func(m, pts, q.refined()) - vals)
    header = ["re", "im", "abs", "value", "error"]
    rows = [(z.real, z.imag, abs(z), v, e) for z, v, e in zip(pts, vals, errs)]
    emit(cfg, header, rows, {"points": [dict(zip(header, r)) for r in rows]})


@main.command(epilog=EXPRESSION_HELP)
@click.option("--z", "zs", multiple=True, help="probe point, e.g. 0.5+0.2i (repeatable)")
@config_options
@_guard
def berezin(zs, config_path, **kwargs):
    """t-Berezin transform of the configured measure at probe points."""
    from .transforms import berezin_t

    cfg = _load(config_path, kwargs)
    t = cfg["t"] if cfg["t"] is not None else 2.0
    alpha = cfg["weight"]["alpha"]
    _pointwise(cfg, _points(zs, cfg), lambda m, z, q: berezin_t(m, t, alpha, z, q))


@main.command(epilog=EXPRESSION_HELP)
@click.option("--z", "zs", multiple=True, help="probe point, e.g. 0.5+0.2i (repeatable)")
@config_options
@_guard
def averaging(zs, config_path, **kwargs):
    """Averaging function over pseudohyperbolic disks of radius R."""
    from .transforms import averaging as avg

    cfg = _load(config_path, kwargs)
    radius = cfg["R"]
    _pointwise(cfg, _points(zs, cfg), lambda m, z, q: avg(m, radius, z, q))


@main.command()
@click.argument("level", type=click.Choice(["fast", "full"]), default="fast")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="validate this configuration before running")
@_guard
def selftest(level, config_path):
    """Run the acceptance suite (fast subset or full)."""
    from .acceptance import run_all
    from .config import load_config

    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            load_config(fh.read())
    results = run_all(level, echo=click.echo)
    failed = [r for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    if failed:
        sys.exit(EXIT_FAILED)


if __name__ == "__main__":
    main()
