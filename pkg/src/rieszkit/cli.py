"""Batch command-line front door for the toolkit.

Every command computes a table, then emits it as CSV (header row plus
data rows) or as a JSON object mirroring the same columns plus a
``meta`` block carrying the reproducibility knobs (seed, tolerances,
node counts). All floats are printed with shortest round-trip
representation, so parsing the output recovers the exact binary values.

Exit codes: 0 on success, 1 when a numerical contract is violated or a
selftest check fails, 2 on usage errors.
"""

from __future__ import annotations

import csv as _csv
import io
import json
import math

import click
import numpy as np

from . import conditional as cond
from . import hilbert as hb
from . import stieltjes as st
from . import wiener as wn
from .errors import RieszkitError


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    return str(v)


def _emit(columns, rows, meta, fmt: str, out: str | None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = _csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        text = buf.getvalue()
    else:
        clean_rows = [
            [float(v) if isinstance(v, (np.floating,)) else v for v in row]
            for row in rows
        ]
        text = (
            json.dumps(
                {"columns": list(columns), "rows": clean_rows, "meta": meta},
                indent=2,
            )
            + "\n"
        )
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _parse_floats(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise click.UsageError(f"could not parse {flag}={text!r} as comma-separated reals")


def _parse_ints(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise click.UsageError(f"could not parse {flag}={text!r} as comma-separated integers")


_out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None,
                        help="Write output to this file instead of stdout.")
_fmt_opt = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                        default="csv", show_default=True, help="Output format.")
_seed_opt = click.option("--seed", type=int, default=0, show_default=True,
                         help="RNG seed for anything stochastic.")


class _Failure(click.ClickException):
    exit_code = 1


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except RieszkitError as exc:
        raise _Failure(f"{type(exc).__name__}: {exc}")
    except ValueError as exc:
        raise click.UsageError(str(exc))


@click.group()
@click.version_option(package_name="rieszkit")
def main():
    """Numerical toolkit for representer-based integration and recovery.

    Subcommands cover basis expansions of vector-valued expectations,
    distribution-function recovery from expectation oracles, conditional
    expectation on finite spaces, transition-kernel compatibility checks,
    path-functional integration, bridge sampling, and a selftest.
    """


@main.command()
@click.option("--basis", type=click.Choice(list(hb.BASIS_KINDS)),
              default="shifted_legendre", show_default=True)
@click.option("--size", type=int, default=32, show_default=True,
              help="Number of basis coefficients.")
@click.option("--grid-n", type=int, default=101, show_default=True,
              help="Number of reconstruction sample points in (0,1).")
@_fmt_opt
@_out_opt
def bochner(basis, size, grid_n, fmt, out):
    """Expectation of the segment-indicator law in an orthonormal basis.

    Emits columns (t, reconstructed, exact): the coefficient expansion of
    the expectation reconstructed at grid points against the closed form
    1 - t.
    """
    if size < 1 or grid_n < 1:
        raise click.UsageError("--size and --grid-n must be positive")
    b = hb.OrthonormalBasis(kind=basis, size=size)
    law = _guard(hb.prefix_indicator_law, b)
    mu = _guard(hb.bochner_expectation, law)
    ts = (np.arange(grid_n) + 0.5) / grid_n
    recon = mu.reconstruct(ts)
    rows = [(float(t), float(r), float(1.0 - t)) for t, r in zip(ts, recon)]
    meta = {"command": "bochner", "basis": basis, "size": size, "grid_n": grid_n}
    _emit(("t", "reconstructed", "exact"), rows, meta, fmt, out)


@main.command(name="recover-cdf")
@click.option("--law", type=click.Choice(["uniform", "triangular", "two-atom"]),
              default=None, help="Built-in law for the oracle.")
@click.option("--law-args", default=None,
              help="Comma-separated law parameters: uniform lo,hi;"
                   " triangular lo,mode,hi; two-atom x1,p1,x2.")
@click.option("--samples", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV/text file of sample values for an empirical-mean oracle.")
@click.option("--grid-lo", type=float, default=-0.5, show_default=True)
@click.option("--grid-hi", type=float, default=1.5, show_default=True)
@click.option("--grid-n", type=int, default=101, show_default=True)
@click.option("--j-max", type=int, default=64, show_default=True)
@click.option("--m-max", type=int, default=64, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@_fmt_opt
@_out_opt
def recover_cdf_cmd(law, law_args, samples, grid_lo, grid_hi, grid_n,
                    j_max, m_max, tol, fmt, out):
    """Recover the distribution function of an expectation oracle on a grid.

    The oracle is either a named built-in law or the empirical mean over
    a sample file. Emits columns (x, F).
    """
    if (law is None) == (samples is None):
        raise click.UsageError("provide exactly one of --law or --samples")
    if grid_n < 1 or not grid_lo < grid_hi:
        raise click.UsageError("need grid-lo < grid-hi and grid-n >= 1")
    if law is not None:
        args = _parse_floats(law_args, "--law-args") if law_args else None
        if law == "uniform":
            lo, hi = args if args else (0.0, 1.0)
            alpha = _guard(st.uniform_cdf, lo, hi)
            span = (lo - 0.5, hi + 0.5)
        elif law == "triangular":
            lo, mode, hi = args if args else (0.0, 0.5, 1.0)
            alpha = _guard(st.triangular_cdf, lo, mode, hi)
            span = (lo - 0.5, hi + 0.5)
        else:
            x1, p1, x2 = args if args else (0.3, 0.4, 0.7)
            alpha = _guard(st.two_atom_cdf, x1, p1, x2)
            span = (x1 - 0.5, x2 + 0.5)
        oracle = st.oracle_from_cdf(alpha, span)
        source = f"{law}({','.join(repr(a) for a in (args or ()))})"
    else:
        data = np.loadtxt(samples, delimiter=",").ravel()
        oracle = _guard(st.oracle_from_samples, data)
        source = f"samples:{samples}"
    xs = np.linspace(grid_lo, grid_hi, grid_n)
    rows = [
        (float(x), float(_guard(st.recover_cdf, oracle, float(x), j_max, m_max, tol)))
        for x in xs
    ]
    meta = {
        "command": "recover-cdf", "oracle": source, "j_max": j_max,
        "m_max": m_max, "tol": tol,
    }
    _emit(("x", "F"), rows, meta, fmt, out)


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="CSV of (label, probability, value) rows.")
@click.option("--partition", "partition_spec", required=True,
              help='Blocks of atom labels, e.g. "1,2|3,4".')
@click.option("--tol", type=float, default=1e-14, show_default=True,
              help="Duality residual tolerance.")
@_fmt_opt
@_out_opt
def condexp(input_path, partition_spec, tol, fmt, out):
    """Conditional expectation of a finite random variable given a partition.

    Emits one row per atom: (label, probability, x, xi, block, residual,
    zero_mass), where residual is the block's duality defect.
    """
    labels, probs, values = [], [], []
    with open(input_path, newline="") as fh:
        for k, row in enumerate(_csv.reader(fh)):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) < 3:
                raise click.UsageError(
                    f"{input_path}: row {k + 1} has {len(row)} fields, need 3"
                )
            try:
                p, v = float(row[1]), float(row[2])
            except ValueError:
                if k == 0:
                    continue  # header row
                raise click.UsageError(
                    f"{input_path}: row {k + 1} is not (label, probability, value)"
                )
            labels.append(row[0].strip())
            probs.append(p)
            values.append(v)
    space = _guard(cond.FiniteMeasureSpace, tuple(zip(labels, probs)))
    X = _guard(cond.RandomVariable, tuple(values))
    G = _guard(cond.Partition.from_spec, partition_spec, space.labels)
    xi = _guard(cond.cond_expectation, X, G, space)
    report = cond.verify_duality(X, xi, G, space, tol)
    block_of = {}
    for bi, block in enumerate(G.blocks):
        for i in block:
            block_of[i] = bi
    rows = []
    for i, lab in enumerate(labels):
        bi = block_of[i]
        rows.append(
            (lab, probs[i], values[i], xi.values[i], bi,
             report.residuals[bi], int(bi in xi.zero_mass_blocks))
        )
    meta = {
        "command": "condexp", "partition": partition_spec, "tol": tol,
        "duality_passed": report.passed,
    }
    _emit(
        ("label", "probability", "x", "xi", "block", "residual", "zero_mass"),
        rows, meta, fmt, out,
    )


@main.command(name="compat-check")
@click.option("--x", type=float, default=0.0, show_default=True)
@click.option("--z", type=float, default=0.0, show_default=True)
@click.option("--u", type=float, default=0.0, show_default=True)
@click.option("--s", type=float, default=0.5, show_default=True)
@click.option("--t", type=float, default=1.0, show_default=True)
@click.option("--D", "d_coef", type=float, default=0.5, show_default=True)
@click.option("--nodes", default="8,16,32,64", show_default=True,
              help="Comma-separated Hermite node counts.")
@click.option("--tol", type=float, default=1e-8, show_default=True,
              help="Residual considered passing at the largest node count.")
@_fmt_opt
@_out_opt
def compat_check(x, z, u, s, t, d_coef, nodes, tol, fmt, out):
    """Two-step transition-identity residuals over a node-count ladder.

    Emits columns (n_nodes, residual) for the configuration given by
    --x, --z, --u, --s, --t, --D.
    """
    counts = _parse_ints(nodes, "--nodes")
    rows = []
    for n in counts:
        rows.append((n, float(_guard(wn.check_compatibility, x, z, u, s, t, d_coef, n))))
    meta = {
        "command": "compat-check", "x": x, "z": z, "u": u, "s": s, "t": t,
        "D": d_coef, "nodes": list(counts), "tol": tol,
        "passed": bool(rows[-1][1] < tol),
    }
    _emit(("n_nodes", "residual"), rows, meta, fmt, out)


def _parse_functional(spec: str, times: tuple[float, ...]):
    """Built-in functional families: const, mono:<k1,k2,...>, box:<lo:hi,...>."""
    n = len(times)
    if spec == "const":
        fn = lambda X: np.ones(np.asarray(X).shape[:-1])
        return wn.CylindricalFunctional(times, fn, bound=1.0), None
    if spec.startswith("mono:"):
        powers = _parse_ints(spec[5:], "--F mono powers")
        if len(powers) != n:
            raise click.UsageError(
                f"mono needs one exponent per time ({n}), got {len(powers)}"
            )
        if any(k < 0 for k in powers):
            raise click.UsageError("mono exponents must be nonnegative")
        karr = np.array(powers, dtype=float)
        fn = lambda X: np.prod(np.asarray(X, dtype=float) ** karr, axis=-1)
        return wn.CylindricalFunctional(times, fn), None
    if spec.startswith("box:"):
        pairs = []
        for chunk in spec[4:].split(","):
            parts = chunk.split(":")
            if len(parts) != 2:
                raise click.UsageError(f"bad box {chunk!r}, want lo:hi")
            try:
                pairs.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise click.UsageError(f"bad box bounds in {chunk!r}")
        if len(pairs) != n:
            raise click.UsageError(f"box needs one interval per time ({n})")
        lows = np.array([a for a, _ in pairs])
        highs = np.array([b for _, b in pairs])
        fn = lambda X: np.all(
            (np.asarray(X) >= lows) & (np.asarray(X) <= highs), axis=-1
        ).astype(float)
        functional = wn.CylindricalFunctional(times, fn, bound=1.0)
        return functional, wn.CylinderSet(times, tuple(pairs))
    raise click.UsageError(f"unknown functional spec {spec!r}")


@main.command(name="wiener-integrate")
@click.option("--F", "f_spec", default="const", show_default=True,
              help="Functional: const | mono:k1,k2,... | box:lo:hi,...")
@click.option("--times", default="0.5", show_default=True,
              help="Comma-separated interior times.")
@click.option("--x", type=float, default=0.0, show_default=True)
@click.option("--y", type=float, default=0.0, show_default=True)
@click.option("--t", type=float, default=1.0, show_default=True)
@click.option("--D", "d_coef", type=float, default=0.5, show_default=True)
@click.option("--nodes", default="8,16,32,64", show_default=True,
              help="Node counts for the refinement table.")
@click.option("--paths", type=int, default=None,
              help="If given, append a Monte Carlo row with this many paths.")
@_seed_opt
@_fmt_opt
@_out_opt
def wiener_integrate(f_spec, times, x, y, t, d_coef, nodes, paths, seed, fmt, out):
    """Integrate a built-in cylindrical functional over pinned paths.

    Emits a node-refinement table (method, n_nodes, n_paths, value,
    stderr, delta) and, when --paths is given, a Monte Carlo row with
    its standard error.
    """
    ts = _parse_floats(times, "--times")
    counts = _parse_ints(nodes, "--nodes")
    params = _guard(wn.WienerParams, x, y, t, d_coef)
    functional, cyl = _guard(_parse_functional, f_spec, ts)
    rows = []
    prev = None
    for n in counts:
        if cyl is not None:
            val = float(_guard(wn.cylinder_probability, cyl, params, n))
        else:
            val = float(_guard(wn.wiener_integral_quadrature, functional, params, n))
        rows.append(
            ("quadrature", n, None, val, None,
             abs(val - prev) if prev is not None else None)
        )
        prev = val
    if paths is not None:
        est, se = _guard(wn.wiener_integral_mc, functional, params, paths, seed)
        rows.append(("mc", None, paths, float(est), float(se), None))
    meta = {
        "command": "wiener-integrate", "F": f_spec, "times": list(ts),
        "x": x, "y": y, "t": t, "D": d_coef, "nodes": list(counts),
        "paths": paths, "seed": seed,
    }
    _emit(
        ("method", "n_nodes", "n_paths", "value", "stderr", "delta"),
        rows, meta, fmt, out,
    )


@main.command(name="bridge-sample")
@click.option("--times", default="0.25,0.5,0.75", show_default=True,
              help="Comma-separated interior times.")
@click.option("--x", type=float, default=0.0, show_default=True)
@click.option("--y", type=float, default=0.0, show_default=True)
@click.option("--t", type=float, default=1.0, show_default=True)
@click.option("--D", "d_coef", type=float, default=0.5, show_default=True)
@click.option("--paths", type=int, default=1, show_default=True,
              help="Number of independent paths to draw.")
@_seed_opt
@_fmt_opt
@_out_opt
def bridge_sample(times, x, y, t, d_coef, paths, seed, fmt, out):
    """Draw pinned-path samples restricted to a time grid.

    Emits columns (path, t, position), one row per (path, time).
    """
    if paths < 1:
        raise click.UsageError("--paths must be >= 1")
    ts = _parse_floats(times, "--times")
    params = _guard(wn.WienerParams, x, y, t, d_coef)
    rng = np.random.Generator(np.random.Philox(key=seed))
    rows = []
    for k in range(paths):
        path = _guard(wn.sample_bridge, params, ts, rng)
        rows.extend((k, ti, pos) for ti, pos in zip(path.times, path.positions))
    meta = {
        "command": "bridge-sample", "times": list(ts), "x": x, "y": y,
        "t": t, "D": d_coef, "paths": paths, "seed": seed,
    }
    _emit(("path", "t", "position"), rows, meta, fmt, out)


@main.command()
@click.option("--tol", type=float, default=1e-6, show_default=True,
              help="Unused scale knob kept for interface uniformity.")
@_seed_opt
@_fmt_opt
@_out_opt
def selftest(tol, seed, fmt, out):
    """Run the built-in reference checks and report pass/fail per line.

    Covers the segment-indicator expected norm (2/3), its expectation
    curve (1 - t), the transition-identity residual, the path-measure
    total mass, distribution recovery at a known point, and conditional
    expectation duality. Exit code 1 if any check fails.
    """
    checks = []

    basis = hb.OrthonormalBasis(kind="shifted_legendre", size=2048)
    law = hb.prefix_indicator_law(basis)
    en = hb.expected_norm(law)
    checks.append(("expected_norm_segment_indicator", en, 2.0 / 3.0, 1e-4))

    basis32 = hb.OrthonormalBasis(kind="shifted_legendre", size=32)
    law32 = hb.prefix_indicator_law(basis32)
    mu = hb.bochner_expectation(law32)
    target = hb.project(lambda s: 1.0 - np.asarray(s, dtype=float), basis32)
    dist = float(
        np.sqrt(np.sum((np.array(mu.coeffs) - np.array(target.coeffs)) ** 2))
    )
    checks.append(("expectation_curve_distance", dist, 0.0, 1e-3))

    resid = wn.check_compatibility(1.0, -1.0, 0.0, 0.3, 1.0, 0.5, 64)
    checks.append(("transition_identity_residual", resid, 0.0, 1e-10))

    params = wn.WienerParams(0.0, 0.0, 1.0, 0.5)
    const = wn.CylindricalFunctional(
        (0.5,), lambda X: np.ones(np.asarray(X).shape[:-1]), bound=1.0
    )
    mass = wn.wiener_integral_quadrature(const, params, 32)
    checks.append(("path_measure_total_mass", mass, 1.0 / math.sqrt(2 * math.pi), 1e-8))

    oracle = st.oracle_from_cdf(st.uniform_cdf(), (-0.5, 1.5))
    fval = st.recover_cdf(oracle, 0.5)
    checks.append(("recovered_F_uniform_half", fval, 0.5, 1e-3))

    space = cond.FiniteMeasureSpace.uniform(4)
    X = cond.RandomVariable((1.0, 2.0, 3.0, 4.0))
    G = cond.Partition(((0, 1), (2, 3)))
    xi = cond.cond_expectation(X, G, space)
    report = cond.verify_duality(X, xi, G, space, 1e-14)
    checks.append(
        ("conditional_duality_residual", max(report.residuals), 0.0, 1e-14)
    )

    rows = []
    all_ok = True
    for name, value, reference, bound in checks:
        err = abs(value - reference)
        ok = err <= bound
        all_ok = all_ok and ok
        rows.append((name, float(value), float(reference), float(err),
                     float(bound), "pass" if ok else "FAIL"))
    meta = {"command": "selftest", "seed": seed, "tol": tol}
    _emit(
        ("check", "value", "reference", "abs_error", "bound", "status"),
        rows, meta, fmt, out,
    )
    if not all_ok:
        raise _Failure("selftest found failing checks")


if __name__ == "__main__":
    main()
