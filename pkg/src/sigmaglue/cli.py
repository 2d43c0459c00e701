"""Command-line experiment runner.

    python -m sigmaglue <subcommand> [config.json] [--out DIR] [--seed S] [--quiet]

Each subcommand writes <out>/<subcommand>.csv and
<out>/<subcommand>.report.json. Exit codes: 0 all criteria pass, 1 some
criterion fails, 2 invalid config, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .errors import (ConeExit, DomainError, MaxIterError, PositivityLoss,
                     SigmaGlueError, SingularSystemError)
from .symfun import Dimensions

SUBCOMMANDS = ("sigma-table", "schwarzschild-verify", "neck-build", "cone-check",
               "error-scaling", "dtn-converge", "match-demo", "solve", "models-verify", "all")
EXIT_OK, EXIT_CRITERIA, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS = {
    "dims": {"n": 8, "k": 3},
    "eps": 1e-2,
    "eps_sweep": None,
    "delta": 0.0,
    "grid": {"nt": 2001, "nphi": 33, "order": 4},
    "modes": {"jmax": 8, "limit_modes": [0, 1]},
    "solver": {"tol": 1e-10, "max_iter": 30, "scheme": "full-newton",
               "precision": "mixed", "cone_policy": "report"},
    "background": {"kind": "sphere", "amplitude": 1.0},
    "samples": 5,
}

# per-subcommand sweeps used when eps_sweep is not given
SWEEPS = {
    "cone-check": [1e-1, 10 ** -1.5, 1e-2, 10 ** -2.5, 1e-3],
    "error-scaling": [1e-1, 10 ** -1.5, 1e-2, 10 ** -2.5, 1e-3],
    "dtn-converge": [1e-1, 1e-2, 1e-3, 1e-4],
}


class ConfigError(SigmaGlueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


# ------------------------------------------------------------------ config

def _merge(base: dict, user: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in user.items():
        name = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(name, "unknown field")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(name, "expected an object")
            out[key] = _merge(base[key], val, name + ".")
        else:
            out[key] = val
    return out


def _number(cfg, field, kind=float, lo=None, hi=None, lo_open=False):
    parts = field.split(".")
    val = cfg
    for p in parts:
        val = val[p]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(field, f"expected a number, got {val!r}")
    if kind is int and int(val) != val:
        raise ConfigError(field, f"expected an integer, got {val!r}")
    if lo is not None and (val <= lo if lo_open else val < lo):
        raise ConfigError(field, f"must be {'>' if lo_open else '>='} {lo}")
    if hi is not None and val > hi:
        raise ConfigError(field, f"must be <= {hi}")
    return kind(val)


def _eps(val, field):
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not 0 < val < 1:
        raise ConfigError(field, f"eps values must lie in (0, 1), got {val!r}")
    return float(val)


def resolve_config(user: dict | None) -> dict:
    """Merge with defaults and validate; raises ConfigError naming the field."""
    if user is None:
        user = {}
    if not isinstance(user, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    cfg = _merge(DEFAULTS, user)
    n = _number(cfg, "dims.n", int, 3, 12)
    k = _number(cfg, "dims.k", int, 1)
    try:
        dims = Dimensions(n, k)
    except DomainError as exc:
        raise ConfigError("dims.k", str(exc)) from exc
    cfg["dims"] = {"n": n, "k": k}
    eps = cfg["eps"]
    cfg["eps"] = [_eps(e, "eps") for e in eps] if isinstance(eps, list) else _eps(eps, "eps")
    if isinstance(cfg["eps"], list) and not cfg["eps"]:
        raise ConfigError("eps", "list must not be empty")
    if cfg["eps_sweep"] is not None:
        if not isinstance(cfg["eps_sweep"], list) or len(cfg["eps_sweep"]) < 2:
            raise ConfigError("eps_sweep", "expected a list of at least two values")
        cfg["eps_sweep"] = [_eps(e, "eps_sweep") for e in cfg["eps_sweep"]]
    cfg["delta"] = _number(cfg, "delta")
    if abs(cfg["delta"]) >= float(dims.a):
        raise ConfigError("delta", f"|delta| must be below {float(dims.a):.6g}")
    nt = _number(cfg, "grid.nt", int, 21)
    if nt % 2 == 0:
        raise ConfigError("grid.nt", "must be odd so that t = 0 is a node")
    cfg["grid"]["nt"] = nt
    cfg["grid"]["nphi"] = _number(cfg, "grid.nphi", int, 9)
    order = _number(cfg, "grid.order", int)
    if order not in (2, 4, 6):
        raise ConfigError("grid.order", "must be 2, 4 or 6")
    cfg["grid"]["order"] = order
    cfg["modes"]["jmax"] = _number(cfg, "modes.jmax", int, 0, 32)
    lm = cfg["modes"]["limit_modes"]
    if not isinstance(lm, list) or any(not isinstance(j, int) or j < 0 for j in lm):
        raise ConfigError("modes.limit_modes", "expected a list of non-negative integers")
    cfg["solver"]["tol"] = _number(cfg, "solver.tol", float, 0, lo_open=True)
    cfg["solver"]["max_iter"] = _number(cfg, "solver.max_iter", int, 1)
    for name, allowed in (("scheme", ("paper-frozen", "full-newton")),
                          ("precision", ("float", "mixed")),
                          ("cone_policy", ("abort", "report"))):
        if cfg["solver"][name] not in allowed:
            raise ConfigError(f"solver.{name}", f"must be one of {allowed}")
    if cfg["background"]["kind"] not in ("sphere", "cosh", "flat"):
        raise ConfigError("background.kind", "must be sphere, cosh or flat")
    cfg["background"]["amplitude"] = _number(cfg, "background.amplitude")
    cfg["samples"] = _number(cfg, "samples", int, 1)
    return cfg


def _dims(cfg) -> Dimensions:
    return Dimensions(cfg["dims"]["n"], cfg["dims"]["k"])


def _sweep(cfg, sub) -> list:
    return list(cfg["eps_sweep"]) if cfg["eps_sweep"] else list(SWEEPS[sub])


def _neck(cfg, eps, **kw):
    from .neck import NeckConfig
    opts = dict(delta=cfg["delta"], background=cfg["background"]["kind"],
                amplitude=cfg["background"]["amplitude"], nt=cfg["grid"]["nt"],
                order=cfg["grid"]["order"])
    opts.update(kw)
    return NeckConfig(_dims(cfg), eps, **opts)


# ------------------------------------------------------------- experiments
# Each returns (header, rows, criteria, extra). A criterion is a dict with
# name, passed, measured and tolerance.

def _crit(name, passed, measured, tolerance):
    return {"name": name, "passed": bool(passed), "measured": measured, "tolerance": tolerance}


def run_sigma_table(cfg, rng):
    from .models import cylinder_sigma_table
    n = cfg["dims"]["n"]
    rows = [(j, float(s), float(c)) for j, s, c in cylinder_sigma_table(n)]
    err = max(abs(s - c) for _, s, c in rows)
    return (["j", "sigma_j", "closed_form"], rows,
            [_crit("cylinder sigma_j closed form", err <= 1e-12, err, 1e-12)], {})


def run_schwarzschild_verify(cfg, rng):
    from .schwarzschild import SchwarzschildParams, verify_flat
    dims = _dims(cfg)
    t = np.linspace(-5.0, 5.0, cfg["grid"]["nt"])
    rows = []
    for _ in range(cfg["samples"]):
        h0, c = float(rng.uniform(0.25, 4.0)), float(rng.uniform(-1.0, 1.0))
        r = verify_flat(SchwarzschildParams(dims, h0, c), t, cfg["grid"]["order"])
        rows.append((h0, c, r["direct"], r["factorized"], r["h_drift_grid"], r["sigma_km1_min"]))
    res = max(r[2] for r in rows)
    drift = max(r[4] for r in rows)
    crits = [_crit("sigma_k residual", res <= 1e-6, res, 1e-6),
             _crit("h conserved", drift <= 1e-8, drift, 1e-8)]
    return (["h0", "c", "residual_direct", "residual_factorized", "h_drift", "sigma_km1_min"],
            rows, crits, {})


def run_neck_build(cfg, rng):
    from .neck import background_values, build_u_eps, plateau_value, weighted_norm
    eps_list = cfg["eps"] if isinstance(cfg["eps"], list) else [cfg["eps"]]
    rows, crits = [], []
    for eps in eps_list:
        nc = _neck(cfg, eps)
        t = nc.grid()
        u = build_u_eps(nc, t)
        b = background_values(nc, t)
        rows.extend((eps, ti, ui, bi) for ti, ui, bi in zip(t, u.values, b))
        plateau = (np.abs(t) <= nc.length - 1.0)
        pdev = float(np.max(np.abs(u.values[plateau] - plateau_value(nc, t[plateau]))))
        ends = max(abs(u.values[0] - 1.0), abs(u.values[-1] - 1.0))
        crits.append(_crit(f"eps={eps:g}: u_eps positive", np.min(u.values) > 0,
                           float(np.min(u.values)), 0.0))
        crits.append(_crit(f"eps={eps:g}: end values 1", ends <= 1e-12, float(ends), 1e-12))
        crits.append(_crit(f"eps={eps:g}: plateau 2 eps^a cosh(a t)", pdev <= 1e-14, pdev, 1e-14))
        wn = weighted_norm(u, 0, nc)
        crits.append(_crit(f"eps={eps:g}: weighted C^0 norm finite", np.isfinite(wn.value),
                           wn.value, None))
    return ["eps", "t", "u_eps", "b"], rows, crits, {}


def run_cone_check(cfg, rng):
    from .neck import cone_check_neck
    sweep = sorted(_sweep(cfg, "cone-check"), reverse=True)
    rows = []
    for eps in sweep:
        rep = cone_check_neck(_neck(cfg, eps))
        rows.append((eps, rep.margin, rep.sigma_k_mid) + tuple(rep.per_order.values()))
    margins = [r[1] for r in rows]
    crits = [_crit(f"eps={r[0]:g}: positive margin", r[1] > 0, r[1], 0.0) for r in rows]
    mono = all(b >= a for a, b in zip(margins, margins[1:]))
    crits.append(_crit("margin non-decreasing as eps decreases", mono, margins, None))
    k = cfg["dims"]["k"]
    header = ["eps", "margin", "sigma_k_mid"] + [f"min_sigma_{j}" for j in range(1, k)]
    return header, rows, crits, {}


def run_error_scaling(cfg, rng):
    from .solver import proper_error
    rep = proper_error(_dims(cfg), cfg["delta"], _sweep(cfg, "error-scaling"),
                       cfg["background"]["kind"], cfg["grid"]["nt"], cfg["grid"]["order"])
    rows = [(e, v, tm) for e, v, tm in zip(rep.eps, rep.norms, rep.argmax_t)]
    rel = abs(rep.ratio - 1.0)
    crits = [_crit("fitted exponent within 15% of nu", rel <= 0.15,
                   {"slope": rep.slope, "nu": rep.predicted, "relative": rel}, 0.15)]
    extra = {"fit_residual": rep.fit_residual, "region_norms": rep.region_norms}
    return ["eps", "weighted_proper_error", "argmax_t"], rows, crits, extra


def run_dtn_converge(cfg, rng):
    from .dtn import dtn_spectrum
    sweep = sorted(_sweep(cfg, "dtn-converge"), reverse=True)
    jmax = cfg["modes"]["jmax"]
    spectra = [dtn_spectrum(_neck(cfg, eps), jmax) for eps in sweep]
    rows = []
    for sp_ in spectra:
        for j in range(jmax + 1):
            rows.append((sp_.eps, j, sp_.T[j], sp_.S[j], sp_.mu[j], abs(sp_.T[j] - sp_.mu[j])))
    crits = []
    for j in range(jmax + 1):
        errs = [abs(s.T[j] - s.mu[j]) for s in spectra]
        crits.append(_crit(f"j={j}: |T-mu| decreasing", all(b < a for a, b in zip(errs, errs[1:])),
                           errs, None))
    last = spectra[-1]
    for j in cfg["modes"]["limit_modes"]:
        if j <= jmax:
            err = float(abs(last.T[j] - last.mu[j]))
            crits.append(_crit(f"j={j}: |T-mu| at eps={last.eps:g}", err <= 1e-3, err, 1e-3))
    return ["eps", "j", "T_eps_j", "S_eps_j", "mu_j", "abs_error"], rows, crits, {}


def random_source(t, rng) -> np.ndarray:
    """Smooth random source: a few Gaussians scaled to unit size."""
    f = np.zeros_like(t)
    for _ in range(3):
        c = rng.uniform(t[0] * 0.8, t[-1] * 0.8)
        w = rng.uniform(0.3, 2.0)
        f += rng.normal() * np.exp(-((t - c) / w) ** 2)
    return f


def run_match_demo(cfg, rng):
    from .dtn import match_cauchy, mode_coefficients, monolithic_solve
    from .linop import sphere_eigenvalue
    eps = cfg["eps"][0] if isinstance(cfg["eps"], list) else cfg["eps"]
    coeffs = mode_coefficients(_neck(cfg, eps))
    rows = []
    for i in range(cfg["samples"]):
        j = int(rng.integers(0, min(cfg["modes"]["jmax"], 4) + 1))
        lam = sphere_eigenvalue(j, cfg["dims"]["n"])
        f = random_source(coeffs.t, rng)
        m = match_cauchy(coeffs, lam, f, j)
        w = monolithic_solve(coeffs, lam, f)
        rows.append((i, j, m.psi, m.jump, float(np.max(np.abs(m.w - w)))))
    worst = max(r[4] for r in rows)
    return (["sample", "j", "psi", "derivative_jump", "sup_diff"], rows,
            [_crit("matched equals monolithic", worst <= 1e-8, worst, 1e-8)], {})


def run_solve(cfg, rng):
    from .neck import background
    from .solver import SolveConfig, newton_solve, solution_certificate
    s = cfg["solver"]
    eps_list = cfg["eps"] if isinstance(cfg["eps"], list) else [cfg["eps"]]
    rows, crits, extra = [], [], {}
    rel = []
    for eps in eps_list:
        nc = _neck(cfg, eps)
        sc = SolveConfig(nc, s["scheme"], s["tol"], s["max_iter"], s["precision"],
                         cone_policy=s["cone_policy"])
        u, rep = newton_solve(sc)
        cert = solution_certificate(u, background(nc, nc.grid()))
        rows.append((eps, rep.iterations, rep.polish_steps, rep.final_residual,
                     rep.final_scaled_residual, cert.deviation, rep.final_cone_margin,
                     rep.relative_correction, rep.bound_chain_max))
        rel.append(rep.relative_correction)
        tag = f"eps={eps:g}"
        crits += [
            _crit(f"{tag}: final residual", rep.final_residual <= s["tol"], rep.final_residual, s["tol"]),
            _crit(f"{tag}: iterations", rep.iterations + rep.polish_steps <= s["max_iter"],
                  rep.iterations + rep.polish_steps, s["max_iter"]),
            _crit(f"{tag}: certificate deviation", cert.deviation <= 1e-8, cert.deviation, 1e-8),
            _crit(f"{tag}: cone margin positive", cert.in_cone, cert.margins, 0.0),
        ]
        extra[tag] = {"report": _jsonable(rep.as_dict()), "certificate": _jsonable(vars(cert))}
    if len(rel) > 1:
        order = np.argsort(eps_list)[::-1]
        seq = [rel[i] for i in order]
        crits.append(_crit("|w/u_eps| smaller at smaller eps",
                           all(b < a for a, b in zip(seq, seq[1:])), seq, None))
    header = ["eps", "iterations", "polish_steps", "final_residual", "final_scaled_residual",
              "certificate_deviation", "cone_margin", "relative_correction", "bound_chain_max"]
    return header, rows, crits, extra


def run_models_verify(cfg, rng):
    from .models import (ALTERNATE_UNIT_CONSTANT, S6T2, ProductModel, curvature_sigmas,
                         homogeneous_linearization, nondegeneracy_scan,
                         sphere_linearization_closed_form)
    rows, crits = [], []
    sig = curvature_sigmas(S6T2, 3)
    expect = {1: 18 * Fraction(5, 42), 2: 105 * Fraction(5, 42) ** 2, 3: 56 * Fraction(5, 42) ** 3}
    for j in (1, 2, 3):
        rows.append((f"S6xT2 sigma_{j}", float(sig[j]), float(expect[j])))
    err = max(abs(float(sig[j] - expect[j])) for j in expect)
    crits.append(_crit("S6xT2 sigma_1..3", err <= 1e-12, err, 1e-12))
    lin = homogeneous_linearization(S6T2, 3)
    ratio = float(lin.laplacian[0] / lin.laplacian[1])
    rows.append(("S6xT2 Laplacian ratio", ratio, 7 / 24))
    crits.append(_crit("Laplacian ratio 7/24", abs(ratio - 7 / 24) <= 1e-12, ratio, 1e-12))
    unit = float(-lin.zero / lin.laplacian[1])
    rows.append(("S6xT2 unit kernel constant", unit, float(Fraction(5, 21))))
    rows.append(("S6xT2 unit kernel constant (alternate)", float(ALTERNATE_UNIT_CONSTANT),
                 float(ALTERNATE_UNIT_CONSTANT)))
    scan = nondegeneracy_scan(lin)
    lattice = nondegeneracy_scan(lin, torus_set="lattice")
    alt = nondegeneracy_scan(lin, zero=-ALTERNATE_UNIT_CONSTANT * lin.laplacian[1])
    crits.append(_crit("S6xT2 non-degenerate", not (scan.degenerate or lattice.degenerate),
                       {"integer_set": scan.closest, "lattice": lattice.closest,
                        "alternate_constant_degenerate": alt.degenerate}, 1e-9))
    worst = 0.0
    for n in range(3, 13):
        for k in range(1, (n - 1) // 2 + 1):
            lin_s = homogeneous_linearization(ProductModel.sphere(n), k)
            coef, zero = sphere_linearization_closed_form(n, k)
            worst = max(worst, abs(float(lin_s.laplacian[0] / coef) - 1),
                        abs(float(lin_s.zero / zero) - 1))
    crits.append(_crit("round sphere closed form, n <= 12", worst <= 1e-12, worst, 1e-12))
    s8 = homogeneous_linearization(ProductModel.sphere(8), 3)
    rows.append(("S8 k=3 Laplacian coefficient", float(s8.laplacian[0]), 7 / 12))
    deg = nondegeneracy_scan(s8, cutoff=200.0)
    even = nondegeneracy_scan(s8, cutoff=200.0, parity="even")
    crits.append(_crit("round sphere degenerate", deg.degenerate, deg.kernel[:1], 1e-9))
    crits.append(_crit("RP^n model non-degenerate", not even.degenerate, even.closest, 1e-9))
    return ["quantity", "value", "expected"], rows, crits, {}


RUNNERS = {
    "sigma-table": run_sigma_table,
    "schwarzschild-verify": run_schwarzschild_verify,
    "neck-build": run_neck_build,
    "cone-check": run_cone_check,
    "error-scaling": run_error_scaling,
    "dtn-converge": run_dtn_converge,
    "match-demo": run_match_demo,
    "solve": run_solve,
    "models-verify": run_models_verify,
}


# ------------------------------------------------------------------ output

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, Fraction)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating, Fraction)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(x) for x in row])


def run_one(sub: str, cfg: dict, out: str, seed: int, quiet: bool = True) -> int:
    """Run a single subcommand; write its CSV and report; return the exit code."""
    rng = np.random.default_rng(seed)
    resolved = copy.deepcopy(cfg)
    if sub in SWEEPS:
        resolved["eps_sweep"] = _sweep(cfg, sub)
    report = {"subcommand": sub, "config": resolved, "seed": seed}
    code = EXIT_OK
    try:
        header, rows, crits, extra = RUNNERS[sub](cfg, rng)
        write_csv(os.path.join(out, f"{sub}.csv"), header, rows)
        report.update(criteria=crits, details=extra)
        report["passed"] = all(c["passed"] for c in crits)
        code = EXIT_OK if report["passed"] else EXIT_CRITERIA
    except (ConeExit, MaxIterError, SingularSystemError, PositivityLoss) as exc:
        code = EXIT_NUMERIC
        payload = exc.report.as_dict() if hasattr(exc.report, "as_dict") else exc.report
        report.update(passed=False, error={"type": type(exc).__name__, "message": str(exc),
                                           "diagnostics": payload})
    except DomainError as exc:
        code = EXIT_CONFIG
        report.update(passed=False, error={"type": type(exc).__name__, "message": str(exc)})
    report["exit_code"] = code
    with open(os.path.join(out, f"{sub}.report.json"), "w", encoding="utf-8") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
    if not quiet:
        for c in report.get("criteria", []):
            print(f"[{'PASS' if c['passed'] else 'FAIL'}] {sub}: {c['name']}")
        if "error" in report:
            print(f"[ERROR] {sub}: {report['error']['type']}: {report['error']['message']}")
    return code


def _run_star(args):
    return run_one(*args)


def _combine(codes: list) -> int:
    if EXIT_NUMERIC in codes:
        return EXIT_NUMERIC
    if EXIT_CONFIG in codes:
        return EXIT_CONFIG
    return EXIT_CRITERIA if EXIT_CRITERIA in codes else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sigmaglue", description=__doc__.split("\n")[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("config", nargs="?", help="JSON config file (defaults are used if omitted)")
    p.add_argument("--out", default="out", help="output directory (default ./out)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized draws")
    p.add_argument("--quiet", action="store_true", help="suppress per-criterion lines")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not 0 <= args.seed < 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        user = None
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                user = json.load(fh)
        cfg = resolve_config(user)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: config unreadable: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    os.makedirs(args.out, exist_ok=True)
    if args.subcommand != "all":
        return run_one(args.subcommand, cfg, args.out, args.seed, args.quiet)
    subs = [s for s in SUBCOMMANDS if s != "all"]
    jobs = [(s, cfg, args.out, args.seed, args.quiet) for s in subs]
    try:
        with ProcessPoolExecutor(max_workers=min(len(jobs), os.cpu_count() or 1)) as pool:
            codes = list(pool.map(_run_star, jobs))
    except (OSError, PermissionError):
        codes = [_run_star(j) for j in jobs]
    summary = {"subcommands": dict(zip(subs, codes)), "config": cfg, "seed": args.seed}
    code = _combine(codes)
    summary["exit_code"] = code
    with open(os.path.join(args.out, "all.report.json"), "w", encoding="utf-8") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
    return code


if __name__ == "__main__":
    sys.exit(main())
