"""Command-line harness: solve, converge, condition, stability, symmetry.

Every experiment reads one JSON config (see README.md for the schema) and
emits deterministic CSV files: 17 significant digits, lowercase scientific
notation, fixed row order, no timestamps.  Exit codes: 0 success, 2 config
error, 3 boundary-data error, 4 solver failure.
"""

import argparse
import logging
import math
import os
import sys

import numpy as np

from .assembly import assemble_pencil, boundary_system, kappa_spectral, solve_boundary_values
from .boundary import SymmetryRep, max_commutator
from .config import load_config
from .eigensolve import h1_error, reconstruct, solve_pencil
from .errors import (
    ConfigError,
    ConvergenceFailure,
    DimensionMismatch,
    InvalidPairing,
    NotPositiveDefinite,
    NotUnitary,
    PerturbationTooLarge,
    RootBracketFailure,
    SingularBoundaryMatrix,
    UlapError,
)
from .hermitian import eigh_full, hermitize
from .manifold import subdivide
from .oracles import classical_spectrum, quasi_periodic_spectrum, robin_interval_spectrum

log = logging.getLogger("ulap")

KAPPA_TARGET = 1e4


def _fmt(x):
    return format(float(x), ".17g")


def write_csv(path, header, rows, comments=()):
    """Write a CSV with optional leading '#' comment lines."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")
    log.info("wrote %s", path)
    return path


def read_csv(path):
    """Read back a CSV written by :func:`write_csv` (comments skipped)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def _solve_chain(config, resolution, k=None):
    mesh = subdivide(config.manifold, resolution)
    system = boundary_system(config.boundary, mesh)
    bfs = solve_boundary_values(system)
    pencil = assemble_pencil(mesh, bfs)
    result = solve_pencil(pencil, k or config.eigenpairs, tol_eig=config.tol_eig)
    return mesh, system, bfs, result


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def run_solve(config):
    mesh, _, _, result = _solve_chain(config, config.resolutions[0])
    rows = [
        (i, _fmt(result.eigenvalues[i]), _fmt(result.residuals[i]))
        for i in range(result.count)
    ]
    paths = [write_csv(config.prefix + "eigenvalues.csv", ("index", "lambda", "residual"), rows)]
    for i in config.eigenfunctions:
        values = reconstruct(result, i)
        rows = []
        for vals, nodes in zip(values, mesh.nodes):
            for x, z in zip(nodes, vals):
                rows.append((_fmt(x), _fmt(z.real), _fmt(z.imag)))
        paths.append(
            write_csv(config.prefix + f"eigenfunction_{i}.csv", ("x", "re", "im"), rows)
        )
    return paths


def oracle_spectrum(oracle, count):
    family = oracle["family"]
    if family == "quasi_periodic":
        return quasi_periodic_spectrum(oracle["epsilon"], count)
    if family in ("dirichlet", "neumann", "periodic"):
        return classical_spectrum(family, count)
    if family == "robin_interval":
        return robin_interval_spectrum(oracle["c"], count)
    raise ConfigError(f"unknown oracle family {family!r}")


def _h1_against_oracle(values, oracle_spec, index, mesh):
    """H1 error against the oracle eigenfunction, projecting onto the oracle
    eigenspace when the reference eigenvalue is degenerate."""
    lam = oracle_spec.eigenvalues
    cluster = [
        j
        for j in range(len(lam))
        if abs(lam[j] - lam[index]) <= 1e-12 * max(1.0, abs(lam[index]))
    ]
    if len(cluster) == 1:
        return h1_error(values, oracle_spec.eigenfunctions[index], mesh)
    from .eigensolve import _GAUSS_W, _GAUSS_X, _segment_l2  # noqa: PLC0415

    norm = math.sqrt(_segment_l2(values, mesh))
    unit = [v / norm for v in values]
    coeffs = []
    for j in cluster:
        f, _ = oracle_spec.eigenfunctions[j]
        acc = 0.0 + 0.0j
        for vals, nodes, h in zip(unit, mesh.nodes, mesh.steps):
            lo, hi = vals[:-1], vals[1:]
            for t, wq in zip(_GAUSS_X, _GAUSS_W):
                xs = nodes[:-1] + t * h
                u = lo + (hi - lo) * t
                acc += wq * h * np.sum(f(xs).conj() * u)
        coeffs.append(acc)
    scale = math.sqrt(sum(abs(c) ** 2 for c in coeffs))
    if scale == 0.0:
        return h1_error(values, oracle_spec.eigenfunctions[index], mesh)
    coeffs = [c / scale for c in coeffs]
    funcs = [oracle_spec.eigenfunctions[j] for j in cluster]

    def ref(x):
        return sum(c * f(x) for c, (f, _) in zip(coeffs, funcs))

    def ref_prime(x):
        return sum(c * fp(x) for c, (_, fp) in zip(coeffs, funcs))

    return h1_error(values, (ref, ref_prime), mesh)


def _loglog_slope(ns, errs):
    xs = np.log(np.asarray(ns, dtype=float))
    ys = np.log(np.maximum(np.asarray(errs, dtype=float), 1e-300))
    coeffs = np.polyfit(xs, ys, 1)
    return float(coeffs[0])


def run_convergence(config):
    k = config.eigenpairs
    oracle_spec = oracle_spectrum(config.oracle, k)
    lam_errors = {i: [] for i in range(k)}
    h1_errors = {i: [] for i in range(k)}
    rows = []
    for n in config.resolutions:
        mesh, _, _, result = _solve_chain(config, n)
        row = [n]
        for i in range(k):
            err = abs(result.eigenvalues[i] - oracle_spec.eigenvalues[i])
            lam_errors[i].append(err)
            row.append(_fmt(err))
        for i in range(k):
            values = reconstruct(result, i)
            err = _h1_against_oracle(values, oracle_spec, i, mesh)
            h1_errors[i].append(err)
            row.append(_fmt(err))
        rows.append(tuple(row))
    header = (
        ["N"]
        + [f"lambda_err_{i}" for i in range(k)]
        + [f"h1_err_{i}" for i in range(k)]
    )
    paths = [write_csv(config.prefix + "convergence.csv", header, rows)]
    slope_rows = [
        (
            i,
            _fmt(_loglog_slope(config.resolutions, lam_errors[i])),
            _fmt(_loglog_slope(config.resolutions, h1_errors[i])),
        )
        for i in range(k)
    ]
    paths.append(
        write_csv(
            config.prefix + "slopes.csv", ("mode", "lambda_slope", "h1_slope"), slope_rows
        )
    )
    return paths


def run_condition(config):
    mesh = subdivide(config.manifold, config.resolutions[0])
    system = boundary_system(config.boundary, mesh)
    kappa = kappa_spectral(system.F)
    h = mesh.endpoint_steps
    ratio = float(h.max() / h.min())
    delta_h_rec = ratio / KAPPA_TARGET
    rows = [
        ("kappa_F", _fmt(kappa)),
        ("kappa_bound", _fmt(system.kappa_bound)),
        ("h_min", _fmt(h.min())),
        ("h_max", _fmt(h.max())),
        ("ill_conditioned", "1" if kappa > 1e8 else "0"),
        ("remedy", "increase_N" if kappa > 1e8 else "none"),
        ("delta_h_recommended", _fmt(delta_h_rec)),
        ("kappa_h_estimate", _fmt(ratio / delta_h_rec)),
    ]
    return [write_csv(config.prefix + "condition.csv", ("metric", "value"), rows)]


def _nearest_unitary(m):
    w, v = eigh_full(hermitize(m.conj().T @ m))
    inv_sqrt = v @ np.diag(1.0 / np.sqrt(np.clip(w, 1e-300, None))) @ v.conj().T
    return m @ inv_sqrt


def _spectral_norm(m):
    w, _ = eigh_full(hermitize(m.conj().T @ m))
    return float(np.sqrt(max(w[-1], 0.0)))


def run_stability(config):
    n = config.resolutions[0]
    direction = config.stability["direction"]
    epsilons = config.stability["epsilons"]
    _, _, _, base = _solve_chain(config, n)
    rows = []
    for eps in epsilons:
        if eps == 0.0:
            for i in range(base.count):
                rows.append((_fmt(eps), i, _fmt(0.0)))
            continue
        from .boundary import validate_unitary  # noqa: PLC0415

        u_eps = validate_unitary(
            _nearest_unitary(config.boundary.matrix + 1j * eps * direction)
        )
        du = _spectral_norm(u_eps.matrix - config.boundary.matrix)
        mesh = subdivide(config.manifold, n)
        system = boundary_system(u_eps, mesh)
        bfs = solve_boundary_values(system)
        pencil = assemble_pencil(mesh, bfs)
        perturbed = solve_pencil(pencil, config.eigenpairs, tol_eig=config.tol_eig)
        for i in range(base.count):
            k_eps = abs(perturbed.eigenvalues[i] - base.eigenvalues[i]) / du
            rows.append((_fmt(eps), i, _fmt(k_eps)))
    return [
        write_csv(
            config.prefix + "stability.csv",
            ("epsilon", "mode", "K"),
            rows,
            comments=("delta_u_norm: spectral (after polar re-unitarization)",),
        )
    ]


def run_symmetry(config, tol=1e-10):
    rep_all = SymmetryRep(tuple(config.symmetry))
    rows = []
    verdict = True
    worst = 0.0
    for idx, g in enumerate(rep_all.elements):
        norm = max_commutator(config.boundary, SymmetryRep((g,)))
        ok = norm <= tol
        verdict = verdict and ok
        worst = max(worst, norm)
        rows.append((idx, _fmt(norm), "1" if ok else "0"))
        if not ok:
            print(f"generator {idx} breaks invariance: commutator norm {norm:.6e}")
    print(f"symmetry verdict: {'invariant' if verdict else 'not invariant'} "
          f"(max commutator {worst:.6e})")
    return [
        write_csv(
            config.prefix + "symmetry.csv",
            ("generator", "commutator_norm", "commutes"),
            rows,
        )
    ]


_RUNNERS = {
    "solve": run_solve,
    "converge": run_convergence,
    "condition": run_condition,
    "stability": run_stability,
    "symmetry": run_symmetry,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ulap",
        description="Spectra of 1D Laplacians under unitary self-adjoint "
        "boundary conditions (non-local FEM).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=None, help="output path prefix (overrides config)")
        p.add_argument("--k", type=int, default=None, help="eigenpair count override")
        p.add_argument(
            "--n", default=None, help="resolution N or comma-separated ladder override"
        )
    return parser


def main(argv=None):
    logging.basicConfig(level=os.environ.get("ULAP_LOG", "WARNING").upper())
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if config.experiment != args.command:
            raise ConfigError(
                f"config experiment {config.experiment!r} does not match "
                f"subcommand {args.command!r}"
            )
        if args.out is not None:
            config.prefix = args.out
        if args.k is not None:
            if args.k < 1:
                raise ConfigError(f"--k must be positive, got {args.k}")
            config.eigenpairs = args.k
        if args.n is not None:
            try:
                config.resolutions = tuple(int(x) for x in str(args.n).split(","))
            except ValueError:
                raise ConfigError(f"--n must be an integer or comma list, got {args.n!r}")
        _RUNNERS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NotUnitary, InvalidPairing, DimensionMismatch) as exc:
        print(f"boundary data error: {exc}", file=sys.stderr)
        return 3
    except (
        SingularBoundaryMatrix,
        NotPositiveDefinite,
        ConvergenceFailure,
        RootBracketFailure,
        PerturbationTooLarge,
    ) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 4
    except UlapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
