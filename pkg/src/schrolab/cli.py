"""Command-line front end.

    schrolab <subcommand> --config run.cfg [--out DIR] [--seed N]
                          [--discretization fourier|fd2] [--quiet]

Each subcommand writes ``<out>/<subcommand>.csv`` and ``<out>/summary.json``
(sorted keys, no timings, so reruns are byte-identical) plus
``<out>/timings.json`` with the wall-clock seconds of each phase.
Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .eigensolve import eigh
from .errors import InvalidArgument, NumericalFailure, UndefinedCriticalCoupling
from .experiments.hill import HillBoundInput, hill_check
from .experiments.optimize import COLUMNS as OPT_COLUMNS, minimize_potential
from .experiments.spike import spike_limit
from .experiments.torus import torus_collapse
from .experiments.transition import transition_sweep
from .geometry import laplace_eigenbasis, make_circle, make_torus
from .io import ConfigError, load_config, load_table, write_csv, write_json
from .operator import assemble
from .perturbation import (auxiliary_spectrum, first_nonzero_eigenvalue, functional_I,
                           lemma_gamma, perturbation_report, verify_expansion)
from .potentials import (BUILTIN_COUPLINGS, ball_potential, constant_potential,
                         mode_perturbation, project_to_constraint, random_band_limited,
                         spike_potential_1d, tabulated)

SUBCOMMANDS = ("spectrum", "perturb", "sweep-alpha", "spike-limit", "torus-collapse",
               "hill-bound", "lemma-check", "optimize")


# -- building blocks from a config ------------------------------------------

def build_grid(cfg):
    if cfg.manifold == "circle":
        return make_circle(cfg.lengths[0], cfg.n[0])
    return make_torus(cfg.lengths[0], cfg.lengths[1], cfg.n[0], cfg.n[1])


def build_coupling(cfg):
    name = cfg.coupling
    if name.startswith("table:"):
        t = load_table(cfg.resolve(name[len("table:"):]))
        return tabulated(t.x, t.y, cfg.kappa0)
    if name not in BUILTIN_COUPLINGS:
        raise ConfigError(f"unknown coupling {name!r}")
    return BUILTIN_COUPLINGS[name](cfg.kappa0)


def build_q(cfg, grid, rng):
    kind = cfg.q
    if kind == "v1":
        return laplace_eigenbasis(grid, 2)[1].samples
    if kind.startswith("mode:"):
        j = kind[5:].strip()
        if not j.isdigit() or int(j) < 1:
            raise ConfigError("q = mode:j needs j >= 1")
        j = int(j)
        return laplace_eigenbasis(grid, j + 1)[j].samples
    if kind == "random":
        q = random_band_limited(grid, rng, cfg.kmax)
        return q / np.max(np.abs(q))
    raise ConfigError(f"unknown q {kind!r}")


def build_samples(cfg, grid, rng, kind=None):
    """Raw node samples for a potential description (mean not yet enforced)."""
    kind = cfg.potential if kind is None else kind
    k0 = cfg.kappa0
    if kind == "constant":
        return constant_potential(grid, k0).samples
    if kind == "mode":
        return k0 + cfg.amplitude * laplace_eigenbasis(grid, 2)[1].samples
    if kind == "random":
        return k0 + cfg.amplitude * random_band_limited(grid, rng, cfg.kmax)
    if kind == "spike":
        return spike_potential_1d(grid, k0, cfg.delta, cfg.smooth).samples
    if kind == "ball":
        return ball_potential(grid, k0, cfg.delta, smooth=cfg.smooth).samples
    if kind.startswith("table:"):
        if grid.dim != 1:
            raise ConfigError("tabulated potentials are supported on the circle only")
        f = load_table(cfg.resolve(kind[len("table:"):])).periodic(grid.lengths[0])
        return f(grid.axes[0])
    raise ConfigError(f"unknown potential {kind!r}")


def build_potential(cfg, grid, rng):
    return project_to_constraint(grid, build_samples(cfg, grid, rng), cfg.kappa0)


def _check(name, passed):
    return {"name": name, "passed": bool(passed)}


# -- subcommands -------------------------------------------------------------

def run_spectrum(cfg, grid, rng):
    F = build_coupling(cfg)
    kappa = build_potential(cfg, grid, rng)
    r = eigh(assemble(grid, kappa, F, cfg.alpha, cfg.discretization), min(cfg.count, grid.n_nodes))
    mult = {j: i for i, g in enumerate(r.multiplets()) for j in g}
    rows = [(j, r.values[j], r.residuals[j], mult[j]) for j in range(len(r))]
    checks = [_check("residuals", np.all(r.residuals <= 1e-9 * (1 + np.abs(r.values)))),
              _check("sorted", np.all(np.diff(r.values) >= 0))]
    return ("index", "eigenvalue", "residual", "multiplet"), rows, {
        "eigenvalues": r.values, "diagnostics": {k: v for k, v in r.diagnostics.items()
                                                 if k != "raw_values"}}, checks


def run_perturb(cfg, grid, rng):
    F = build_coupling(cfg)
    q = build_q(cfg, grid, rng)
    rep = perturbation_report(grid, q, F, cfg.alpha)
    rows, exp = [], None
    if cfg.eps:
        exp = verify_expansion(grid, q, F, cfg.alpha, cfg.eps, cfg.discretization)
        rows = [(e, l, p, r) for e, l, p, r in zip(exp.eps, exp.lambda0, exp.predicted,
                                                   exp.remainder)]
    results = {
        "alpha_star": rep.alpha_star, "ell0": rep.ell0, "ell1": rep.ell1, "ell2": rep.ell2,
        "ell2_gradient_form": rep.diagnostics["ell2_gradient_form"],
        "ell2_spectral_form": rep.diagnostics["ell2_spectral_form"],
        "mu1": rep.diagnostics["mu1"], "phi1_mean": rep.diagnostics["phi1_mean"],
        "expansion_order": exp.order if exp else None,
    }
    forms = [rep.diagnostics["ell2_spectral_form"]]
    if np.isfinite(rep.diagnostics["ell2_gradient_form"]):
        forms.append(rep.diagnostics["ell2_gradient_form"])
    checks = [_check("ell1_vanishes", abs(rep.ell1) <= 1e-10),
              _check("phi1_zero_mean", abs(rep.diagnostics["phi1_mean"]) <= 1e-10),
              _check("ell2_forms_agree",
                     all(abs(f - rep.ell2) <= 1e-9 * max(1, abs(rep.ell2)) for f in forms))]
    if exp is not None:
        checks.append(_check("expansion_order_ge_2.7", exp.order >= 2.7))
    return ("epsilon", "lambda0", "predicted", "remainder"), rows, results, checks


def run_sweep_alpha(cfg, grid, rng):
    F = build_coupling(cfg)
    alphas = cfg.alphas or tuple(np.linspace(0.05, 0.5, 10))
    q = build_q(cfg, grid, rng)
    res = transition_sweep(grid, F, alphas, cfg.eps, q, cfg.estimate_eps, cfg.discretization)
    est, a_star = res.derived["alpha_c_estimate"], res.reference["alpha_star"]
    results = {"alpha_c_estimate": est, "alpha_star": a_star,
               "relative_error": res.derived["relative_error"],
               "estimate_eps": res.derived["estimate_eps"]}
    checks = [_check("alpha_c_within_2pct", est is not None and a_star is not None
                     and abs(est - a_star) <= 0.02 * abs(a_star))]
    return res.columns, res.rows, results, checks


def run_spike_limit(cfg, grid, rng):
    F = build_coupling(cfg)
    res = spike_limit(grid, F, cfg.alpha, cfg.deltas, cfg.smooth, cfg.discretization)
    d = res.derived
    results = {"extrapolated_lambda0": d["extrapolated_lambda0"], "fitted_order": d["fitted_order"],
               "relative_error": d["relative_error"], "mu1_quarter": res.reference["mu1_quarter"],
               "alpha_c": res.reference["alpha_c"], "lambda0": d["lambda0"]}
    checks = [_check("above_quarter_mu1_every_delta", d["all_above_quarter_mu1"]),
              _check("extrapolation_within_2pct", d["relative_error"] <= 0.02)]
    return res.columns, res.rows, results, checks


def run_torus_collapse(cfg, grid, rng):
    F = build_coupling(cfg)
    count = max(cfg.count, 2)
    res = torus_collapse(grid, F, cfg.alpha, cfg.deltas, count, cfg.smooth,
                         discretization=cfg.discretization)
    d = res.derived
    mu1 = first_nonzero_eigenvalue(grid)
    finest = int(np.argmin(res.values))
    lam1 = res.eigenvalues[finest, 1]
    results = {"lambda0": d["lambda0"], "finest_lambda0_over_mu1": d["finest_lambda0_over_mu1"],
               "finest_lambda1": lam1, "mu1": mu1, "limits": res.reference["limits"],
               "extrapolated": d.get("extrapolated"), "fitted_order": d.get("fitted_order")}
    checks = [_check("lambda0_monotone_decreasing", d["lambda0_monotone_decreasing"]),
              _check("finest_lambda0_le_0.15_mu1", d["finest_lambda0_over_mu1"] <= 0.15),
              _check("finest_lambda1_within_10pct", abs(lam1 - mu1) <= 0.1 * mu1),
              _check("excision_bounds_hold",
                     np.all(res.eigenvalues <= d["excision_bounds"] * (1 + 1e-12)))]
    return res.columns, res.rows, results, checks


def run_hill_bound(cfg, grid, rng):
    if grid.dim != 1:
        raise ConfigError("hill-bound runs on a circle")
    (L,) = grid.lengths
    inputs = []
    if cfg.potential == "random":
        for _ in range(max(cfg.trials, 1)):
            # log-uniform amplitudes so both bound branches are exercised
            scale = (abs(cfg.amplitude) or 1.0) * 10.0 ** rng.uniform(-3.0, 0.0)
            inputs.append(rng.normal() + random_band_limited(grid, rng, cfg.kmax, scale=scale))
    else:
        inputs.append(build_samples(cfg, grid, rng))
    rows, ok = [], True
    for i, V in enumerate(inputs):
        h = hill_check(HillBoundInput(L, V), cfg.discretization)
        tol = 1e-9 * (1 + abs(h["lambda0"]))
        ok &= h["bound"] <= h["lambda0"] + tol
        rows.append((i, h["v_min"], h["integral"], h["bound"], h["branch"], h["lambda0"],
                     h["slack"]))
    results = {"trials": len(rows), "min_slack": min(r[6] for r in rows),
               "branches": sorted({r[4] for r in rows})}
    if len(rows) == 1:
        results.update(bound=rows[0][3], branch=rows[0][4], lambda0=rows[0][5])
    checks = [_check("bound_below_lambda0", ok)]
    return ("trial", "v_min", "integral", "bound", "branch", "lambda0", "slack"), rows, \
        results, checks


def run_lemma_check(cfg, grid, rng):
    mu1 = first_nonzero_eigenvalue(grid)
    alphas = cfg.alphas or (0.5 / mu1, 1.0 / mu1, 2.0 / mu1)
    mus = np.sort(grid.mode_eigenvalues.ravel())
    v1 = laplace_eigenbasis(grid, 2)[1].samples
    rows, per_alpha, ok_match, ok_sign = [], [], True, True
    count = min(cfg.count, mus.size)
    for a in alphas:
        formula = np.sort(lemma_gamma(a, mus))
        aux = auxiliary_spectrum(grid, a)
        scale = max(1.0, float(np.max(np.abs(formula))))
        match = float(np.max(np.abs(aux - formula))) / scale
        ok_match &= match <= 1e-9
        values = [functional_I(grid, random_band_limited(grid, rng, cfg.kmax), a)
                  for _ in range(max(cfg.trials, 1))]
        witness = functional_I(grid, v1, a)
        if a * mu1 >= 1 - 1e-12:
            ok_sign &= min(values) >= -1e-9
        else:
            ok_sign &= witness < 0
        per_alpha.append({"alpha": a, "alpha_times_mu1": a * mu1, "min_I": min(values),
                          "witness_I_v1": witness, "gamma_relative_mismatch": match})
        for j in range(count):
            rows.append((a, j, mus[j], lemma_gamma(a, [mus[j]])[0], aux[j]))
    checks = [_check("gamma_formula_matches_operator", ok_match),
              _check("I_sign_law", ok_sign)]
    return ("alpha", "j", "mu", "gamma_formula", "gamma_operator"), rows, \
        {"mu1": mu1, "per_alpha": per_alpha}, checks


def run_optimize(cfg, grid, rng):
    F = build_coupling(cfg)
    start = build_potential(cfg, grid, rng)
    traj = minimize_potential(grid, F, cfg.alpha, start, cfg.j, cfg.steps, cfg.step_size,
                              cfg.step_rule, check_gradient=cfg.check_gradient,
                              discretization=cfg.discretization)
    lam = traj.lambdas
    fd = traj.fd_errors[np.isfinite(traj.fd_errors)]
    means = [abs(grid.mean(x) - cfg.kappa0) for x in traj.iterates]
    results = {"status": traj.status, "initial_lambda": lam[0], "final_lambda": lam[-1],
               "constant_lambda": traj.metadata["constant_lambda"], "iterations": lam.size - 1,
               "max_fd_relative_error": float(fd.max()) if fd.size else None}
    checks = [_check("monotone", np.all(np.diff(lam) <= 1e-12)),
              _check("constraint", max(means) <= 1e-12 * max(1, abs(cfg.kappa0))),
              _check("gradient_fd_agreement", fd.size == 0 or fd.max() <= 1e-5)]
    return OPT_COLUMNS, traj.rows, results, checks


RUNNERS = {
    "spectrum": run_spectrum, "perturb": run_perturb, "sweep-alpha": run_sweep_alpha,
    "spike-limit": run_spike_limit, "torus-collapse": run_torus_collapse,
    "hill-bound": run_hill_bound, "lemma-check": run_lemma_check, "optimize": run_optimize,
}


def run(subcommand, cfg, out_dir, quiet=True):
    """Run one subcommand and write its files; returns the summary dict."""
    timings = {}
    t0 = time.perf_counter()
    cfg.validate()
    grid = build_grid(cfg)
    rng = np.random.default_rng(cfg.seed)
    timings["setup"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    columns, rows, results, checks = RUNNERS[subcommand](cfg, grid, rng)
    timings["compute"] = time.perf_counter() - t0

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    write_csv(out / f"{subcommand}.csv", columns, rows)
    summary = {"subcommand": subcommand, "version": __version__, "config": cfg.echo(),
               "seed": cfg.seed, "results": results, "invariants": checks,
               "all_passed": all(c["passed"] for c in checks),
               "timings_file": "timings.json"}
    write_json(out / "summary.json", summary)
    timings["write"] = time.perf_counter() - t0
    write_json(out / "timings.json", {"subcommand": subcommand, "seconds": timings})
    if not quiet:
        for c in checks:
            print(f"{'PASS' if c['passed'] else 'FAIL'}  {subcommand}: {c['name']}")
    return summary


def build_parser():
    p = argparse.ArgumentParser(prog="schrolab", description=__doc__.split("\n\n")[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="key = value run configuration")
    p.add_argument("--out", default="./out", help="output directory (default ./out)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--discretization", choices=("fourier", "fd2"))
    p.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.discretization:
            cfg.discretization = args.discretization
        run(args.subcommand, cfg, args.out, quiet=args.quiet)
    except (InvalidArgument, UndefinedCriticalCoupling) as exc:
        print(f"schrolab: error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"schrolab: numerical failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
