"""Command-line front end: ``nnnchain <command> [flags]``.

Exit status is 0 on success, 1 on a usage error and 2 when a verification
tolerance is exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import determinant, eigvec, roots, spectrum
from .chebyshev import closed_form_tn
from .dipole import DipoleConfig, chain_couplings, critical_separations
from .errors import ChainError, DegenerateModes
from .model import ChainParams, build_hamiltonian

COMMANDS = ("spectrum", "verify-cpoly", "curves", "series", "eigvec", "couplings")
VERIFY_TOL = 1e-8
EIGVEC_TOL = 1e-9

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: ChainParams | DipoleConfig | None = None
    tol: float = 1e-12
    output_format: str = "csv"
    output_path: str | None = None
    seed: int = 0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.output_format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")


@dataclass
class Table:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(f"{v:.12g}") if math.isfinite(v) else None
    return v


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        doc = {
            **{k: _json_value(v) for k, v in table.meta.items()},
            "columns": table.columns,
            "rows": [[_json_value(v) for v in row] for row in table.rows],
        }
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _gamma_grid(opts: dict) -> np.ndarray:
    lo, hi, steps = opts["gamma_min"], opts["gamma_max"], opts["gamma_steps"]
    if steps < 1 or lo < 0 or hi < lo:
        raise UsageError("gamma grid needs 0 <= gamma-min <= gamma-max and gamma-steps >= 1")
    return np.linspace(lo, hi, steps + 1) if steps > 1 or hi > lo else np.array([lo])


def _require_chain(config: RunConfig) -> ChainParams:
    if not isinstance(config.params, ChainParams):
        raise UsageError(f"{config.command} needs chain parameters (--n, --a, --b, --omega0)")
    return config.params


def _cmd_spectrum(config: RunConfig):
    p = _require_chain(config)
    method = config.options.get("method", "bisection")
    if method == "bisection":
        levels = spectrum.eigenvalues_bisection(p, config.tol)
    elif method == "dense_oracle":
        levels = spectrum.eigenvalues_dense_oracle(p)
    elif method == "limit_a0":
        levels = spectrum.spectrum_a_zero(p)
    else:
        levels = spectrum.spectrum_b_zero(p)
    rows = [[k, e, r] for k, (e, r) in enumerate(zip(levels.eigenvalues, levels.residuals), start=1)]
    return EXIT_OK, Table(["k", "E", "residual"], rows, {"method": levels.method})


def _cmd_verify(config: RunConfig):
    n_max, draws = config.options["n_max"], config.options["draws"]
    if n_max < 2 or draws < 1:
        raise UsageError("--n-max must be >= 2 and --draws >= 1")
    rng = np.random.default_rng(config.seed)
    rows, worst = [], 0.0
    for n in range(2, n_max + 1):
        skip_cf = skip_gs = 0
        err_n = 0.0
        for _ in range(draws):
            a, b, e = rng.uniform(-2.0, 2.0, 3)
            p = ChainParams(n, 0.0, a, b)
            ref = determinant.minor_sequence(p, e).tn
            values = [determinant.direct_determinant(build_hamiltonian(p), e)]
            try:
                values.append(closed_form_tn(p, e))
            except ChainError:
                skip_cf += 1
            try:
                values.append(determinant.general_solution_tn(p, e, n))
            except ChainError:
                skip_gs += 1
            for v in values:
                err_n = max(err_n, abs(v - ref) / abs(ref) if ref != 0 else abs(v))
        worst = max(worst, err_n)
        rows.append([n, draws, skip_cf, skip_gs, err_n])
    code = EXIT_OK if worst <= VERIFY_TOL else EXIT_VERIFY
    meta = {"max_rel_err": worst, "tolerance": VERIFY_TOL, "seed": config.seed}
    return code, Table(["n", "draws", "closed_form_skipped", "general_skipped", "max_rel_err"], rows, meta)


def _cmd_curves(config: RunConfig):
    n = config.options["n"]
    if n is None or n < 1:
        raise UsageError("curves needs --n >= 1")
    curves = roots.sweep_curves(n, _gamma_grid(config.options))
    rows = []
    for c in curves:
        for g, x, al, cls in zip(c.gamma_grid, c.x_values, c.alpha_values, c.alpha_class):
            rows.append([c.k, g, x, al.real, al.imag, cls])
    return EXIT_OK, Table(["branch", "gamma", "x", "alpha_re", "alpha_im", "alpha_class"], rows)


def _cmd_series(config: RunConfig):
    opts = config.options
    n, branch = opts["n"], opts["branch"]
    if n is None or n < 2 or n % 2:
        raise UsageError("series needs an even --n >= 2")
    ks = [opts["k"]] if opts["k"] is not None else list(range(1, n // 2 + 1))
    if any(not 1 <= k <= n // 2 for k in ks):
        raise UsageError(f"--k must lie in 1..{n // 2}")
    rows = []
    for k in ks:
        expansion = roots.series_coefficients(n, k, branch)
        for g in _gamma_grid(opts):
            xs = expansion(g)
            xn = roots.tangent_root_near(n, g, expansion.x0, branch)
            rows.append([k, g, xs, xn, abs(xs - xn)])
    return EXIT_OK, Table(["k", "gamma", "x_series", "x_numeric", "abs_diff"], rows, {"branch": branch})


def _cmd_eigvec(config: RunConfig):
    p = _require_chain(config)
    levels = spectrum.eigenvalues_bisection(p, config.tol)
    pairs = eigvec.eigenpairs(p, levels.eigenvalues)
    k_sel = config.options.get("k")
    if k_sel is not None and not 1 <= k_sel <= p.n:
        raise UsageError(f"--k must lie in 1..{p.n}")
    ev = levels.eigenvalues
    rows, ok = [], True
    for k, pair in enumerate(pairs, start=1):
        if k_sel is not None and k != k_sel:
            continue
        gap = min((abs(pair.E - f) for j, f in enumerate(ev) if j != k - 1), default=math.inf)
        fit_err, rank = math.nan, -1
        if p.b != 0.0:
            try:
                fit_err = eigvec.ansatz_fit(p, pair.E, pair).fit_error
                rank = eigvec.boundary_rank_check(p, pair.E)
            except DegenerateModes:
                pass
        ok &= pair.residual <= EIGVEC_TOL
        if rank >= 0 and gap > 1e-6 * p.scale:
            ok &= rank == 3
        rows.append([k, pair.E, pair.residual, fit_err, rank, *pair.c])
    cols = ["k", "E", "residual", "fit_error", "boundary_rank"] + [f"c_{j}" for j in range(1, p.n + 1)]
    return (EXIT_OK if ok else EXIT_VERIFY), Table(cols, rows)


def _cmd_couplings(config: RunConfig):
    cfg = config.params
    if not isinstance(cfg, DipoleConfig):
        raise UsageError("couplings needs --d-over-lambda (and optionally --cos-mu-r, --gamma-decay)")
    a, b = chain_couplings(cfg)
    rows = [["a", a], ["b", b]]
    x_range = (config.options["x_min"], config.options["x_max"])
    zeros = critical_separations(cfg.cos_mu_r, x_range)
    rows += [[f"zero_{i}", z] for i, z in enumerate(zeros, start=1)]
    return EXIT_OK, Table(["quantity", "value"], rows)


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "verify-cpoly": _cmd_verify,
    "curves": _cmd_curves,
    "series": _cmd_series,
    "eigvec": _cmd_eigvec,
    "couplings": _cmd_couplings,
}


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns the exit status and the rendered output."""
    try:
        code, table = _DISPATCH[config.command](config)
    except (UsageError, ValueError) as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    return code, render(table, config.output_format)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nnnchain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--seed", type=int, default=0)

    def chain(p, need_n=True):
        p.add_argument("--n", type=int, required=need_n)
        p.add_argument("--a", type=float, default=0.0)
        p.add_argument("--b", type=float, default=0.0)
        p.add_argument("--omega0", type=float, default=0.0)

    def grid(p, lo, hi, steps):
        p.add_argument("--gamma-min", type=float, default=lo)
        p.add_argument("--gamma-max", type=float, default=hi)
        p.add_argument("--gamma-steps", type=int, default=steps)

    p = sub.add_parser("spectrum", help="all eigenvalues")
    chain(p)
    p.add_argument("--method", choices=spectrum.METHODS, default="bisection")
    common(p)

    p = sub.add_parser("verify-cpoly", help="recurrence vs closed forms on random draws")
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--draws", type=int, default=200)
    common(p)

    p = sub.add_parser("curves", help="root curves x(gamma) with b = 1, a = 4 gamma^2")
    p.add_argument("--n", type=int, required=True)
    grid(p, 0.0, 2.0, 200)
    common(p)

    p = sub.add_parser("series", help="small-gamma series vs numeric tangent roots")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--branch", choices=roots.BRANCHES, default="minus")
    grid(p, 0.01, 0.05, 4)
    common(p)

    p = sub.add_parser("eigvec", help="eigenvectors, ansatz fit and boundary rank")
    chain(p)
    p.add_argument("--k", type=int)
    common(p)

    p = sub.add_parser("couplings", help="dipole couplings and their zeros")
    p.add_argument("--d-over-lambda", type=float, required=True)
    p.add_argument("--cos-mu-r", type=float, default=0.0)
    p.add_argument("--gamma-decay", type=float, default=1.0)
    p.add_argument("--x-min", type=float, default=1.0)
    p.add_argument("--x-max", type=float, default=10.0)
    common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cmd = args.command
    params = None
    options = {}
    if cmd in ("spectrum", "eigvec"):
        params = ChainParams(args.n, args.omega0, args.a, args.b)
        options["method"] = getattr(args, "method", "bisection")
        options["k"] = getattr(args, "k", None)
    elif cmd == "couplings":
        params = DipoleConfig(args.d_over_lambda, args.cos_mu_r, args.gamma_decay)
        options.update(x_min=args.x_min, x_max=args.x_max)
    elif cmd == "verify-cpoly":
        options.update(n_max=args.n_max, draws=args.draws)
    else:
        options.update(
            n=args.n,
            gamma_min=args.gamma_min,
            gamma_max=args.gamma_max,
            gamma_steps=args.gamma_steps,
        )
        if cmd == "series":
            options.update(k=args.k, branch=args.branch)
    return RunConfig(cmd, params, args.tol, args.format, args.out, args.seed, options)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (UsageError, ValueError) as exc:
        print(f"nnnchain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    code, text = run(config)
    if code == EXIT_USAGE:
        sys.stderr.write(text)
        return code
    if config.output_path:
        try:
            with open(config.output_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"nnnchain: error: cannot write {config.output_path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
