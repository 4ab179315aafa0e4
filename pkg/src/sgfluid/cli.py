"""Command line entry point: ``sgfluid <command> [options]``.

Exit status: 0 on success, 1 when a check or the lifespan trend fails,
2 on bad input.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import gravity, plotting, verification
from .config import SimConfig, checkpoint_loads, write_report
from .curves import ClosedCurve, curve_from_json, fourier_profile, solve_k
from .dynamics import initial_state
from .errors import ConfigError, SgfluidError
from .runner import lifespan, simulate

log = logging.getLogger("sgfluid")

SUITES = {
    "equilibrium": verification.equilibrium_checks,
    "taylor-sign": verification.taylor_sign_checks,
    "operators": verification.operator_checks,
    "gravity": verification.gravity_checks,
    "cubic": verification.cubic_checks,
    "k": verification.k_checks,
    "trajectory": verification.trajectory_checks,
    "conservation": verification.conservation_checks,
    "extended": verification.extended_checks,
}
QUICK = ("equilibrium", "taylor-sign", "operators", "gravity", "cubic", "k", "extended")


def _load_config(args):
    cfg = SimConfig.load(args.config) if args.config else SimConfig()
    if args.resolution is not None:
        cfg.resolution = args.resolution
    if args.threads is not None:
        cfg.threads = args.threads
    cfg.validate()
    return cfg


def _out(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _json_safe(x):
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def _records(checks):
    return [{k: _json_safe(v) for k, v in c.as_dict().items()} for c in checks]


def _print_checks(checks, gate=None):
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        tag = "" if gate is None or c.check_name in gate else "  (informational)"
        print(f"{status}  {c.check_name:32s} residual={c.residual:.3e} "
              f"tol={c.tolerance:.1e}{tag}")


def cmd_verify(args):
    cfg = _load_config(args)
    names = args.suite or list(QUICK)
    checks = []
    for name in names:
        fn = SUITES[name]
        kw = {}
        if args.resolution is not None and name not in ("trajectory", "conservation", "gravity"):
            kw["n"] = cfg.resolution
        checks += fn(**kw)
    out = _out(args)
    records = _records(checks)
    write_report(os.path.join(out, "report.json"), records)
    plotting.plot_checks(records, os.path.join(out, "report.png"))
    gate = _gating(names)
    _print_checks(checks, gate)
    return 0 if all(c.passed for c in checks if c.check_name in gate) else 1


def _gating(names):
    """Checks that decide the exit status (the extended suite is informational)."""
    gate = set()
    for name in names:
        if name == "extended":
            continue
        gate |= {c for c in _SUITE_CHECKS.get(name, ())}
    return gate


_SUITE_CHECKS = {
    "equilibrium": ("equilibrium_momentum_line", "equilibrium_constraint_line"),
    "taylor-sign": ("A1_equilibrium", "A1_positive_random"),
    "operators": ("H_one", "H_powers", "H_squared", "operators_vs_oracles"),
    "gravity": ("disc_interior_field", "gravity_reduction"),
    "cubic": ("cubic_slope", "delta_control_slope"),
    "k": ("k_solve_residual", "AV_epsilon_random", "k_t_identity"),
    "trajectory": ("delta_equation_trajectory",),
    "conservation": ("area_drift", "constraint_defect"),
}


def cmd_simulate(args):
    cfg = _load_config(args)
    out = _out(args)
    state = None
    if args.restart:
        with open(args.restart) as fh:
            state = checkpoint_loads(fh.read())
        if state.n != cfg.resolution:
            raise ConfigError(f"checkpoint N={state.n} does not match resolution {cfg.resolution}")
    try:
        final, records = simulate(cfg, out_dir=out, state=state)
    except SgfluidError as exc:
        log.error("run stopped: %s", exc)
        return 1
    plotting.plot_diagnostics(records, os.path.join(out, "diagnostics.png"))
    plotting.plot_curve(final.Z, os.path.join(out, "interface.png"), f"t = {final.t:.3f}")
    r = records[-1]
    print(f"t={r.t:.6g} area={r.area:.15g} min_A1={r.min_A1:.6g} "
          f"eps_sup={r.eps_sup:.6g} defect={r.constraint_defect:.3e}")
    return 0


def cmd_lifespan(args):
    cfg = _load_config(args)
    eps = [float(e) for e in args.eps.split(",")] if args.eps else None
    if args.t_max is not None:
        cfg.lifespan_t_max = args.t_max
    try:
        summary = lifespan(cfg, eps, rule=args.rule)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out(args)
    with open(os.path.join(out, "lifespan.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    with open(os.path.join(out, "lifespan.csv"), "w") as fh:
        fh.write("epsilon,T_star,reached\n")
        for e in summary["entries"]:
            fh.write(f"{e['epsilon']!r},{e['T_star']!r},{int(e['reached'])}\n")
    plotting.plot_lifespan(summary, os.path.join(out, "lifespan.png"))
    for e in summary["entries"]:
        print(f"eps={e['epsilon']:<8g} T*={e['T_star']!s:<12} {e['reason'] or e['error']}")
    fit = summary.get("fit")
    if fit:
        lo, hi = fit["ci"]
        print(f"p = {fit['p']:.3f}  ({100 * fit['confidence']:.0f}% CI [{lo:.3f}, {hi:.3f}])")
    print("monotone" if summary["monotone"] else "NOT monotone")
    return 0 if summary["monotone"] else 1


def _curve_from_args(args, cfg):
    if args.curve:
        with open(args.curve) as fh:
            return curve_from_json(fh.read())
    s = initial_state(cfg.resolution, cfg.epsilon, cfg.omega0, f=cfg.f, g=cfg.g)
    return ClosedCurve(s.Z)


def cmd_gravity_check(args):
    cfg = _load_config(args)
    c = _curve_from_args(args, cfg)
    res = gravity.reduction_check(c)
    from .identities import Check
    checks = [Check("gravity_reduction", c.n, cfg.epsilon, float("nan"), res, 1e-5)]
    if not args.curve:
        checks += verification.gravity_checks(n=cfg.resolution)[:1]
    out = _out(args)
    write_report(os.path.join(out, "gravity_report.json"), _records(checks))
    plotting.plot_curve(c.z, os.path.join(out, "gravity_curve.png"), f"reduction gap {res:.2e}")
    _print_checks(checks)
    return 0 if all(ch.passed for ch in checks) else 1


def cmd_k_solve(args):
    cfg = _load_config(args)
    c = _curve_from_args(args, cfg)
    k, info = solve_k(c, return_info=True)
    out = _out(args)
    with open(os.path.join(out, "k.json"), "w") as fh:
        json.dump({"N": c.n, "offset": [float(x) for x in k.offset],
                   "residuals": info["residuals"], "iterations": info["iterations"]}, fh)
    plotting.plot_curve(c.z, os.path.join(out, "k_curve.png"),
                        f"k residual {info['residuals'][-1]:.2e}")
    print(f"iterations={info['iterations']} residual={info['residuals'][-1]:.3e} "
          f"min k'={k.min_slope:.6f}")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="DIR", default="sgfluid_out", help="output directory")
    common.add_argument("--threads", type=int, metavar="INT", help="worker processes")
    common.add_argument("--resolution", type=int, metavar="INT", help="override grid size N")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="sgfluid", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run check suites")
    v.add_argument("--suite", action="append", choices=sorted(SUITES),
                   help="suite to run (repeatable); default: the fast suites")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", parents=[common], help="evolve a perturbed disc")
    s.add_argument("--restart", metavar="CHECKPOINT", help="continue from a checkpoint")
    s.set_defaults(func=cmd_simulate)

    ls = sub.add_parser("lifespan", parents=[common], help="stopping-time scaling study")
    ls.add_argument("--eps", help="comma-separated amplitudes, e.g. 0.2,0.1,0.05")
    ls.add_argument("--rule", choices=("deviation", "doubling"), default="deviation")
    ls.add_argument("--t-max", type=float, dest="t_max")
    ls.set_defaults(func=cmd_lifespan)

    g = sub.add_parser("gravity-check", parents=[common], help="boundary gravity vs direct field")
    g.add_argument("--curve", metavar="JSON", help="curve file ([re, im] pairs)")
    g.set_defaults(func=cmd_gravity_check)

    k = sub.add_parser("k-solve", parents=[common], help="solve for the k coordinate")
    k.add_argument("--curve", metavar="JSON", help="curve file ([re, im] pairs)")
    k.set_defaults(func=cmd_k_solve)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
