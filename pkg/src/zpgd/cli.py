"""Batch front-end: scenario configs in, CSV artifacts and a run report out.

Subcommands: run, list-scenarios, eigen, verify.  A scenario is a small
INI-style file (sections in brackets, dotted nesting, key = value) with
profiles given as breakpoint tables.  Exit codes: 0 all checks pass,
1 check failure, 2 parse error, 3 validation error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import bounded_green as bg
from . import freespace as fs
from . import inviscid as iv
from . import oracles as orc
from . import shockfront as sfm
from .profiles import ScalarProfile
from .radial_core import FLOAT_FMT, RadialField, write_radial_csv
from .specfun import DomainCase, EigenProblem, find_eigenvalues

MODES = ("freespace", "ball", "annulus", "inviscid", "verify-rh",
         "oracle-compare", "eigen")

_CONVENTION_NOTES = {
    "eigen": [
        "annulus (n=2) characteristic determinant uses the symmetric form "
        "with both inner-wall arguments at lambda*R1",
        "ball (n=3) equation includes the radius factor: mu cot mu + (q_B/eps) R - 1",
    ],
    "ball": [
        "weight exp(-(1/eps) int q0) is used in numerator and denominator alike",
        "with zero boundary velocity the constant mode is included in the series",
        "mass-flux identity is checked on the radial mass integral of p",
    ],
    "annulus": [
        "weight exp(-(1/eps) int q0) is used in numerator and denominator alike",
        "with zero boundary velocities the constant mode is included in the series",
        "two-wall flux identity is checked on the radial mass integral of p",
    ],
    "inviscid": [
        "straight-path cost is (r-r0)^2/(2t)",
        "boundary-branch velocity uses the last boundary-contact time: q = r/(t - t2)",
        "boundary-branch primitive is -p_B(t2)/omega_{n-1}",
    ],
    "verify-rh": [
        "jump brackets are inner-minus-outer: [f] = f(s-) - f(s+)",
        "multi-d residual reported in p-units (scaled by s^(n-1))",
    ],
    "freespace": [],
    "oracle-compare": [],
}


class ConfigError(ValueError):
    pass


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config parsing


def parse_config(text: str) -> dict:
    """INI-style sections with dotted nesting; values become floats, float
    lists or strings."""
    root: dict = {}
    section = root
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = root
            for part in line[1:-1].strip().split("."):
                section = section.setdefault(part.strip(), {})
                if not isinstance(section, dict):
                    raise ConfigError(f"line {lineno}: section clashes with a key")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        section[key] = _parse_value(val)
    return root


def _parse_value(val: str):
    parts = [p for p in val.replace(",", " ").split() if p]
    if not parts:
        return ""
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        return val
    return nums[0] if len(nums) == 1 else nums


def profile_from_config(cfg: dict, name: str) -> ScalarProfile:
    kind = str(cfg.get("type", "constant"))
    try:
        if kind == "constant":
            return ScalarProfile.constant(float(cfg["value"]))
        if kind == "linear":
            return ScalarProfile.piecewise_linear(
                np.atleast_1d(cfg["breakpoints"]), np.atleast_1d(cfg["values"]))
        if kind == "pieces":
            bps = np.atleast_1d(cfg["breakpoints"])
            rows = []
            for i in range(len(bps) - 1):
                rows.append(np.atleast_1d(cfg[f"coeffs{i}"]))
            return ScalarProfile.from_pieces(bps, rows)
    except KeyError as exc:
        raise ValidationError(f"profile {name}: missing {exc}") from exc
    raise ValidationError(f"profile {name}: unknown type {kind!r}")


def _grid(cfg, key, default):
    spec = cfg.get(key, default)
    lo, hi, count = spec
    return np.linspace(float(lo), float(hi), int(count))


# ---------------------------------------------------------------------------
# checks and report plumbing


class RunContext:
    def __init__(self, out_dir: Path, prefix: str, tolerance_scale: float,
                 threads: int):
        self.out = out_dir
        self.prefix = prefix
        self.tolerance_scale = tolerance_scale
        self.threads = threads
        self.checks: list[tuple] = []
        self.artifacts: list[str] = []
        self.params: list[str] = []

    def path(self, suffix: str) -> Path:
        p = self.out / f"{self.prefix}{suffix}"
        self.artifacts.append(str(p))
        return p

    def check(self, name: str, value: float, tol: float):
        tol = tol * self.tolerance_scale
        self.checks.append((name, value, tol, abs(value) <= tol))

    def check_flag(self, name: str, ok: bool):
        self.checks.append((name, 0.0 if ok else 1.0, 0.5, ok))

    def parallel_rows(self, fn, items):
        if self.threads <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))

    def write_report(self, mode: str):
        lines = [f"run report: mode={mode}", ""]
        lines += ["parameters:"] + [f"  {p}" for p in self.params] + [""]
        notes = _CONVENTION_NOTES.get(mode, [])
        if notes:
            lines += ["convention notes:"] + [f"  - {n}" for n in notes] + [""]
        lines.append("checks:")
        for name, value, tol, ok in self.checks:
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name}: "
                         f"|{FLOAT_FMT % value}| <= {FLOAT_FMT % tol}")
        ok_all = all(c[3] for c in self.checks) if self.checks else True
        lines += ["", f"result: {'PASS' if ok_all else 'FAIL'}", "artifacts:"]
        lines += [f"  {a}" for a in self.artifacts]
        path = self.out / f"{self.prefix}report.txt"
        path.write_text("\n".join(lines) + "\n")
        return ok_all


# ---------------------------------------------------------------------------
# mode handlers


def _eigen_problem_from(cfg: dict) -> EigenProblem:
    case = DomainCase(str(cfg.get("case", "ball2d")).lower())
    kw = dict(epsilon=float(cfg.get("epsilon", 1.0)))
    if case.is_annulus:
        kw.update(r_inner=float(cfg["r_inner"]), r_outer=float(cfg["r_outer"]),
                  q_inner=float(cfg.get("q_inner", 0.0)),
                  q_outer=float(cfg.get("q_outer", 0.0)))
    else:
        kw.update(radius=float(cfg["radius"]),
                  q_boundary=float(cfg.get("q_boundary", 0.0)))
    return EigenProblem(case, **kw)


def run_eigen(cfg: dict, ctx: RunContext) -> None:
    pcfg = cfg.get("problem", {})
    prob = _eigen_problem_from(pcfg)
    count = int(cfg.get("count", 5))
    eigs = find_eigenvalues(prob, count)
    ctx.params.append(f"case={prob.case.value} count={count}")
    bg.write_eigenvalue_csv(eigs, ctx.path("eigenvalues.csv"))
    scaled = np.abs(eigs.residuals) / np.maximum(1.0, eigs.values)
    ctx.check("eigen residual (scaled)", float(scaled.max()),
              float(cfg.get("checks", {}).get("residual", 1e-10)))
    half = find_eigenvalues(prob, count, scan_step=eigs.scan_step / 2.0)
    ctx.check("scan halving drift", float(np.abs(half.values - eigs.values).max()),
              1e-10)


def _bounded_problem_from(cfg: dict) -> bg.BoundedProblem:
    pcfg = cfg.get("problem", {})
    case = DomainCase(str(pcfg.get("case")).lower())
    q0 = profile_from_config(pcfg.get("q0", {}), "q0")
    rho0 = profile_from_config(pcfg.get("rho0", {}), "rho0")
    kw = dict(epsilon=float(pcfg.get("epsilon", 1.0)))
    if case.is_annulus:
        kw.update(r_inner=float(pcfg["r_inner"]), r_outer=float(pcfg["r_outer"]),
                  q_inner=float(pcfg.get("q_inner", 0.0)),
                  q_outer=float(pcfg.get("q_outer", 0.0)))
        if "rho_inner" in pcfg:
            kw["rho_inner"] = profile_from_config(pcfg["rho_inner"], "rho_inner")
        if "rho_outer" in pcfg:
            kw["rho_outer"] = profile_from_config(pcfg["rho_outer"], "rho_outer")
    else:
        kw.update(radius=float(pcfg["radius"]),
                  q_boundary=float(pcfg.get("q_boundary", 0.0)))
        if "rho_boundary" in pcfg:
            kw["rho_boundary"] = profile_from_config(pcfg["rho_boundary"], "rho_boundary")
    return bg.BoundedProblem(case, q0=q0, rho0=rho0, **kw)


def run_bounded(cfg: dict, ctx: RunContext) -> None:
    problem = _bounded_problem_from(cfg)
    state = bg.hopf_cole_boundary_state(
        problem, n_terms=int(cfg["n_terms"]) if "n_terms" in cfg else None)
    a, b = problem.domain
    grid_r = _grid(cfg.get("grid", {}), "r", [a + 0.05 * (b - a), b - 0.05 * (b - a), 25])
    grid_t = _grid(cfg.get("grid", {}), "t", [max(0.1, state.time_floor), 2.0, 11])
    ctx.params.append(f"case={problem.case.value} eps={problem.epsilon} "
                      f"domain={problem.domain} terms={len(state.ev.eigs.values)}")
    ctx.params.append(f"consistency gap={problem.consistency_gap():.3g}")

    def row(t):
        q = state.velocity(grid_r, float(t))
        p = bg.density_batch(state, grid_r, float(t)) * grid_r ** (problem.n - 1)
        return q, p

    rows = ctx.parallel_rows(row, grid_t)
    q = np.array([r[0] for r in rows])
    p = np.array([r[1] for r in rows])
    field = RadialField(problem.n, problem.epsilon, grid_r, grid_t, q, p)
    write_radial_csv(field, str(ctx.path("field.csv")))
    bg.write_eigenvalue_csv(state.ev.eigs, ctx.path("eigenvalues.csv"))
    ccfg = cfg.get("checks", {})
    t_probe = float(ccfg.get("robin_time", max(0.5, grid_t[0])))
    ctx.check("robin residual", state.robin_residual(t_probe),
              float(ccfg.get("robin", 1e-6)))
    wall = b - 1e-7 * (b - a)
    q_wall = state.velocity(wall, float(grid_t[-1]))
    target = problem.q_outer if problem.is_annulus else problem.q_boundary
    ctx.check("boundary attainment", q_wall - target, float(ccfg.get("attainment", 1e-5)))
    if bool(ccfg.get("flux", True)):
        t_mid = float(0.5 * (grid_t[0] + grid_t[-1]))
        rows = bg.mass_flux_report(state, [t_mid], dt=float(ccfg.get("flux_dt", 0.02)))
        ctx.check("mass-flux identity", rows[0][3], float(ccfg.get("flux_tol", 1e-4)))


def run_freespace(cfg: dict, ctx: RunContext) -> None:
    pcfg = cfg.get("problem", {})
    n = int(pcfg.get("n", 1))
    eps = float(pcfg.get("epsilon", 0.5))
    q0 = profile_from_config(pcfg.get("q0", {}), "q0")
    rho0 = profile_from_config(pcfg.get("rho0", {}), "rho0")
    support = float(pcfg.get("rho0_support", rho0.breakpoints[-1]))
    problem = fs.FreespaceProblem(n=n, epsilon=eps, q0=q0, rho0=rho0,
                                  rho0_support=support)
    grid_r = _grid(cfg.get("grid", {}), "r", [0.05, 3.0, 25])
    grid_t = _grid(cfg.get("grid", {}), "t", [0.1, 2.0, 9])
    ctx.params.append(f"n={n} eps={eps} sup|q0|={q0.sup_abs():.6g}")

    def row(t):
        q = np.array([fs.radial_velocity(problem, float(r), float(t)) for r in grid_r])
        return q

    qrows = np.array(ctx.parallel_rows(row, grid_t))
    p = np.zeros_like(qrows)
    for i, t in enumerate(grid_t):
        p[i] = fs._density_radial_batch(problem, grid_r, float(t)) \
            * grid_r ** (n - 1)
    field = RadialField(n, eps, grid_r, grid_t, qrows, p)
    write_radial_csv(field, str(ctx.path("field.csv")))
    ccfg = cfg.get("checks", {})
    if "closed_form" in ccfg:   # q0(r) = r: u = x/(1+t) exactly
        worst = 0.0
        for t in grid_t:
            exact = grid_r / (1.0 + t)
            i = np.searchsorted(grid_t, t)
            worst = max(worst, float(np.max(np.abs(qrows[i] - exact)
                                            / np.maximum(np.abs(exact), 1e-12))))
        ctx.check("closed-form relative gap", worst, float(ccfg["closed_form"]))
    ctx.check("velocity bound excess",
              max(0.0, float(np.abs(qrows).max()) - q0.sup_abs()),
              float(ccfg.get("bound", 1e-8)))
    if bool(ccfg.get("mass", False)):
        m0, _ = fs.total_mass(problem, 0.0)
        drift = 0.0
        for t in (0.5, 1.0, 2.0, 5.0):
            m, _ = fs.total_mass(problem, t)
            drift = max(drift, abs(m - m0) / abs(m0))
        ctx.check("mass drift", drift, float(ccfg.get("mass_tol", 1e-5)))
    if bool(ccfg.get("decay", False)):
        K = grid_r[grid_r <= float(ccfg.get("decay_radius", 2.0))]
        sup1 = max(abs(fs.radial_velocity(problem, float(r), 1.0)) for r in K)
        sup1000 = max(abs(fs.radial_velocity(problem, float(r), 1000.0)) for r in K)
        ctx.check("large-time decay ratio", sup1000 / max(sup1, 1e-300),
                  float(ccfg.get("decay_ratio", 0.01)))


def _inviscid_problem_from(cfg: dict) -> iv.InviscidProblem:
    pcfg = cfg.get("problem", {})
    return iv.InviscidProblem(
        n=int(pcfg.get("n", 3)),
        q0=profile_from_config(pcfg.get("q0", {}), "q0"),
        p0=profile_from_config(pcfg.get("p0", {}), "p0"),
        q_bound=profile_from_config(pcfg.get("q_bound", {}), "q_bound"),
        p_bound=profile_from_config(pcfg.get("p_bound", {}), "p_bound"),
    )


def run_inviscid(cfg: dict, ctx: RunContext) -> iv.SolutionPanel:
    problem = _inviscid_problem_from(cfg)
    grid_r = _grid(cfg.get("grid", {}), "r", [0.05, 2.5, 49])
    grid_t = _grid(cfg.get("grid", {}), "t", [0.1, 1.5, 15])
    ctx.params.append(f"n={problem.n} omega={problem.omega:.6g}")
    panel = iv.solve_panel(problem, grid_r, grid_t)
    iv.write_panel_csv(panel, str(ctx.path("panel.csv")))
    ccfg = cfg.get("checks", {})
    rows = iv.weak_boundary_check(problem, grid_t, minimizer=panel.minimizer,
                                  mass_rtol=float(ccfg.get("mass_rtol", 1e-3)))
    viol = [r for r in rows if not r.ok]
    with open(ctx.path("boundary_report.csv"), "w") as fh:
        fh.write("t,q_origin,q_bound,mode,mass,mass_target,ok,note\n")
        for r in rows:
            fh.write(f"{FLOAT_FMT % r.t},{FLOAT_FMT % r.q_origin},"
                     f"{FLOAT_FMT % r.q_bound},{r.mode},{FLOAT_FMT % r.mass},"
                     f"{FLOAT_FMT % r.mass_target},{int(r.ok)},{r.note}\n")
    ctx.check_flag("weak boundary conditions", not viol)
    # primitive should be nondecreasing in r (nonnegative density)
    dP = np.diff(panel.P, axis=1)
    ctx.check("P monotonicity defect", max(0.0, float(-dP.min())), 1e-8)
    # boundary-branch set should be an interval [0, r_c(t))
    ok_interval = True
    for i in range(len(grid_t)):
        bcols = panel.branch[i] == "B"
        if bcols.any():
            last = np.nonzero(bcols)[0].max()
            ok_interval &= bool(np.all(bcols[: last + 1]))
    ctx.check_flag("boundary branch is an interval", ok_interval)
    return panel


def run_verify_rh(cfg: dict, ctx: RunContext) -> None:
    panel = run_inviscid(cfg, ctx)
    fronts = sfm.detect_fronts(panel)
    ccfg = cfg.get("checks", {})
    tol = float(ccfg.get("rh", 1e-3))
    if not fronts:
        ctx.check_flag("fronts detected", bool(ccfg.get("allow_smooth", False)))
        return
    worst_speed = worst_mass = worst_multi = 0.0
    for k, f in enumerate(fronts):
        if f.times.size < 3:
            continue
        rs, rm = sfm.rh_residual_1d(f)
        rmd = sfm.rh_residual_multid(f)
        worst_speed = max(worst_speed, float(np.abs(rs).max()))
        worst_mass = max(worst_mass, float(np.abs(rm).max()))
        worst_multi = max(worst_multi, float((np.abs(rmd) - np.abs(rm)).max()))
        sfm.write_front_csv(f, ctx.path(f"front{k}.csv"))
    ctx.check("front speed residual", worst_speed, tol)
    ctx.check("delta amplitude residual", worst_mass, tol)
    ctx.check("multi-d equivalence excess", worst_multi, 1e-10)


def run_oracle_compare(cfg: dict, ctx: RunContext) -> None:
    target = str(cfg.get("compare", "fd"))
    ccfg = cfg.get("checks", {})
    if target == "fd":
        problem = _bounded_problem_from(cfg)
        state = bg.hopf_cole_boundary_state(problem)
        grid_t = _grid(cfg.get("grid", {}), "t", [0.1, 2.0, 20])
        a, b = problem.domain
        config = orc.FDSolverConfig(
            n_r=int(cfg.get("fd_points", 1200)),
            boundary="annulus" if problem.is_annulus else "ball",
            t_samples=grid_t)
        field = orc.fd_viscous_solve(orc.ViscousIVP.from_bounded(problem), config)
        win = (field.grid_r >= a + 0.1 * (b - a)) & (field.grid_r <= b - 0.1 * (b - a))
        worst = 0.0
        for i, t in enumerate(grid_t):
            qs = state.velocity(field.grid_r[win], float(t))
            worst = max(worst, float(np.abs(qs - field.q[i][win]).max()))
        write_radial_csv(field, str(ctx.path("fd_field.csv")))
        ctx.params.append(f"fd grid={config.n_r} case={problem.case.value}")
        ctx.check("series vs fd velocity gap", worst, float(ccfg.get("linf", 1e-3)))
        return
    if target == "inviscid-limit":
        problem = _inviscid_problem_from(cfg)
        eps_list = [float(e) for e in np.atleast_1d(cfg.get("epsilons", [0.1, 0.05, 0.025]))]
        pts = np.atleast_1d(cfg.get("points", [0.5, 1.5]))
        t_eval = float(cfg.get("time", 1.0))
        mz = iv.PathMinimizer(problem, t_max=2.0 * t_eval)
        rho0 = problem.p0  # 1-D: p0 = rho0
        errs = np.zeros((len(eps_list), len(pts)))
        for j, eps in enumerate(eps_list):
            fp = fs.FreespaceProblem(n=problem.n, epsilon=eps, q0=problem.q0,
                                     rho0=rho0, rho0_support=rho0.breakpoints[-1])
            for k, r in enumerate(pts):
                q_eps = fs.radial_velocity(fp, float(r), t_eval)
                m = mz.minimize(float(r), t_eval)
                q_inv = (r - m.r0) / t_eval if m.branch == "interior" \
                    else r / (t_eval - m.t2)
                errs[j, k] = abs(q_eps - q_inv)
        with open(ctx.path("eps_sweep.csv"), "w") as fh:
            fh.write("epsilon," + ",".join(f"err_r{FLOAT_FMT % p}" for p in pts) + "\n")
            for j, eps in enumerate(eps_list):
                fh.write(",".join([FLOAT_FMT % eps] + [FLOAT_FMT % e for e in errs[j]]) + "\n")
        mono = bool(np.all(np.diff(errs, axis=0) < 1e-12))
        orders = np.log(errs[:-1] / errs[1:]) / math.log(2.0)
        ctx.params.append(f"epsilons={eps_list}")
        ctx.check_flag("viscosity errors decrease monotonically", mono)
        ctx.check("min empirical order shortfall",
                  max(0.0, 0.8 - float(orders.min())), 1e-12)
        return
    raise ValidationError(f"unknown compare target {target!r}")


_HANDLERS = {
    "eigen": run_eigen,
    "ball": run_bounded,
    "annulus": run_bounded,
    "freespace": run_freespace,
    "inviscid": run_inviscid,
    "verify-rh": run_verify_rh,
    "oracle-compare": run_oracle_compare,
}


# ---------------------------------------------------------------------------
# scenario resolution and entry points


def bundled_scenarios():
    out = []
    for entry in sorted(resources.files("zpgd.scenarios").iterdir()):
        if entry.name.endswith(".cfg"):
            first = entry.read_text().splitlines()[0].lstrip("# ").strip()
            out.append((entry.name[:-4], first))
    return out


def resolve_config(path_or_name: str) -> str:
    p = Path(path_or_name)
    if p.exists():
        return p.read_text()
    candidate = resources.files("zpgd.scenarios") / f"{path_or_name}.cfg"
    if candidate.is_file():
        return candidate.read_text()
    raise FileNotFoundError(f"no config file or bundled scenario {path_or_name!r}")


def run_scenario(config_text: str, out_dir: str, tolerance_scale: float = 1.0,
                 threads: int = 1) -> int:
    try:
        cfg = parse_config(config_text)
    except ConfigError as exc:
        print(f"config parse error: {exc}", file=sys.stderr)
        return 2
    mode = str(cfg.get("mode", "")).strip()
    if mode not in MODES:
        print(f"validation error: unknown mode {mode!r}", file=sys.stderr)
        return 3
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prefix = str(cfg.get("output", {}).get("prefix", mode.replace("-", "_"))) + "_"
    ctx = RunContext(out, prefix, tolerance_scale, threads)
    try:
        _HANDLERS[mode](cfg, ctx)
    except (ValidationError, KeyError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    ok = ctx.write_report(mode)
    print((out / f"{prefix}report.txt").read_text())
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="zpgd",
                                     description="zero-pressure gas dynamics solvers")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("ZPGD_THREADS", "1")))
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default="zpgd_out")
    p_run.add_argument("--tolerance-scale", type=float, default=1.0)

    sub.add_parser("list-scenarios", help="print the bundled scenario gallery")

    p_eig = sub.add_parser("eigen", help="eigenvalue table for one domain case")
    p_eig.add_argument("--case", required=True,
                       choices=[c.value for c in DomainCase])
    p_eig.add_argument("--count", type=int, default=5)
    p_eig.add_argument("--epsilon", type=float, default=1.0)
    p_eig.add_argument("--radius", type=float)
    p_eig.add_argument("--r-inner", type=float)
    p_eig.add_argument("--r-outer", type=float)
    p_eig.add_argument("--q-boundary", type=float, default=0.0)
    p_eig.add_argument("--q-inner", type=float, default=0.0)
    p_eig.add_argument("--q-outer", type=float, default=0.0)
    p_eig.add_argument("--out", default="zpgd_out")

    p_ver = sub.add_parser("verify", help="run only the checks of a scenario")
    p_ver.add_argument("--config", required=True)
    p_ver.add_argument("--out", default="zpgd_out")
    p_ver.add_argument("--tolerance-scale", type=float, default=1.0)

    args = parser.parse_args(argv)
    if args.command == "list-scenarios":
        for name, desc in bundled_scenarios():
            print(f"{name:28s} {desc}")
        return 0
    if args.command == "eigen":
        case = DomainCase(args.case)
        kw = dict(epsilon=args.epsilon)
        if case.is_annulus:
            if args.r_inner is None or args.r_outer is None:
                print("validation error: annulus cases need --r-inner/--r-outer",
                      file=sys.stderr)
                return 3
            kw.update(r_inner=args.r_inner, r_outer=args.r_outer,
                      q_inner=args.q_inner, q_outer=args.q_outer)
        else:
            if args.radius is None:
                print("validation error: ball cases need --radius", file=sys.stderr)
                return 3
            kw.update(radius=args.radius, q_boundary=args.q_boundary)
        try:
            prob = EigenProblem(case, **kw)
            eigs = find_eigenvalues(prob, args.count)
        except ValueError as exc:
            print(f"validation error: {exc}", file=sys.stderr)
            return 3
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"eigen_{case.value}.csv"
        bg.write_eigenvalue_csv(eigs, path)
        for i, (v, res) in enumerate(zip(eigs.values, eigs.residuals), start=1):
            print(f"{i:3d}  {FLOAT_FMT % v}  residual {FLOAT_FMT % res}")
        print(f"wrote {path}")
        return 0
    try:
        text = resolve_config(args.config)
    except FileNotFoundError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    return run_scenario(text, args.out, args.tolerance_scale, args.threads)


if __name__ == "__main__":
    sys.exit(main())
