"""Simulation driver, diagnostics and the lifespan experiment."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from . import spectral as sp
from .config import (DiagnosticsRecord, SimConfig, checkpoint_dumps,
                     write_csv_header)
from .curves import signed_area
from .dynamics import (FluidState, compute_A1, constraint_defect,
                       initial_state, step_with_info)
from .errors import InvariantViolation, SgfluidError

log = logging.getLogger(__name__)


def diagnostics(s, projection_magnitude=0.0):
    return DiagnosticsRecord(
        t=float(s.t),
        area=float(signed_area(s.Z)),
        min_A1=float(np.min(compute_A1(s, check=False))),
        eps_sup=float(np.max(np.abs(np.abs(s.Z) ** 2 - 1.0))),
        constraint_defect=constraint_defect(s),
        projection_magnitude=float(projection_magnitude),
    )


def initial_from_config(cfg):
    s = initial_state(cfg.resolution, cfg.epsilon, cfg.omega0, f=cfg.f, g=cfg.g, v0=cfg.v0)
    return replace(s, labels=None)


def _every(interval, dt):
    return max(1, int(round(interval / dt))) if interval > 0 else 0


def simulate(cfg, out_dir=None, state=None):
    """Run from ``state`` (or the configured initial data) to ``cfg.t_end``.

    Writes ``diagnostics.csv`` and checkpoints into ``out_dir`` when given.
    Returns (final_state, records). Invariant violations stop the run and
    are re-raised after the partial diagnostics are flushed.
    """
    s = state if state is not None else initial_from_config(cfg)
    n_steps = int(round((cfg.t_end - s.t) / cfg.dt))
    out_stride = _every(cfg.output_every, cfg.dt)
    ck_stride = _every(cfg.checkpoint_every, cfg.dt)
    records = [diagnostics(s)]
    fh = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        fh = open(os.path.join(out_dir, "diagnostics.csv"), "w")
        write_csv_header(fh)
        fh.write(records[0].row() + "\n")
    try:
        for i in range(1, n_steps + 1):
            s, mag = step_with_info(s, cfg.dt)
            if i % out_stride == 0 or i == n_steps:
                rec = diagnostics(s, mag)
                records.append(rec)
                if fh:
                    fh.write(rec.row() + "\n")
            if out_dir is not None and ck_stride and i % ck_stride == 0:
                write_checkpoint(os.path.join(out_dir, f"checkpoint_{i:08d}.json"), s)
    finally:
        if fh:
            fh.close()
    if out_dir is not None:
        write_checkpoint(os.path.join(out_dir, "checkpoint_final.json"), s)
    return s, records


def write_checkpoint(path, s):
    with open(path, "w") as fh:
        fh.write(checkpoint_dumps(s))


# -- lifespan ---------------------------------------------------------------

@dataclass
class LifespanEntry:
    epsilon: float
    t_star: float = None
    reached: bool = False
    rule: str = ""
    reason: str = ""
    error: str = ""

    def as_dict(self):
        return {"epsilon": self.epsilon, "T_star": self.t_star, "reached": self.reached,
                "rule": self.rule, "reason": self.reason, "error": self.error}


def _linear_proxy(s, eps, ref):
    base = np.exp(1j * sp.grid(s.n))
    return FluidState(base + (ref / eps) * (s.Z - base), (ref / eps) * s.Zt, s.omega0, 0.0)


def lifespan_run(eps, n, omega0, dt, t_max, rule="deviation", threshold=0.5,
                 f=None, g=None, ref=1e-5):
    """Stopping time for one amplitude.

    ``rule="doubling"``: first t with sup|eps(t)| > 2 sup|eps(0)| or an
    invariant violation. ``rule="deviation"``: first t at which the run
    departs from its linearization (a copy of the same perturbation scaled
    down to amplitude ``ref`` and rescaled back) by more than ``threshold``
    times the initial displacement, in sup norm on the Riemann grid.
    """
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    if rule not in ("deviation", "doubling"):
        raise ValueError(f"unknown rule {rule!r}")
    entry = LifespanEntry(epsilon=eps, rule=rule)
    try:
        s = replace(initial_state(n, eps, omega0, f=f, g=g), labels=None)
    except SgfluidError as exc:
        entry.error = f"initial data: {type(exc).__name__}: {exc}"
        return entry
    base = np.exp(1j * sp.grid(n))
    x0 = float(np.max(np.abs(s.Z - base)))
    e0 = float(np.max(np.abs(np.abs(s.Z) ** 2 - 1.0)))
    lin = _linear_proxy(s, eps, ref) if rule == "deviation" else None
    try:
        for _ in range(int(round(t_max / dt))):
            s, _ = step_with_info(s, dt)
            if rule == "doubling":
                hit = np.max(np.abs(np.abs(s.Z) ** 2 - 1.0)) > 2 * e0
            else:
                lin, _ = step_with_info(lin, dt, check=False)
                dev = np.max(np.abs((s.Z - base) - (eps / ref) * (lin.Z - base)))
                hit = dev > threshold * x0
            if hit:
                entry.t_star, entry.reached = float(s.t), True
                entry.reason = rule
                return entry
    except InvariantViolation as exc:
        entry.t_star, entry.reached = float(exc.diagnostics["t"]), True
        entry.reason = str(exc)
        return entry
    except SgfluidError as exc:
        entry.error = f"{type(exc).__name__}: {exc}"
        return entry
    entry.t_star = float(s.t)  # lower bound only
    entry.reason = "t_max"
    return entry


def _run_entry(args):
    eps, kw = args
    return lifespan_run(eps, **kw)


def lifespan(cfg, eps_list=None, rule="deviation", threads=None):
    """Run the stopping-rule experiment for each amplitude and fit T* ~ eps^-p."""
    eps_list = list(eps_list if eps_list is not None else cfg.lifespan_eps)
    if any(not e > 0 for e in eps_list):
        raise ValueError("epsilon = 0 has no finite stopping time")
    kw = dict(n=cfg.lifespan_resolution, omega0=cfg.omega0, dt=cfg.lifespan_dt,
              t_max=cfg.lifespan_t_max, rule=rule, threshold=cfg.lifespan_threshold,
              f=cfg.f, g=cfg.g)
    jobs = [(e, kw) for e in eps_list]
    threads = threads or cfg.threads
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(_run_entry, jobs))
    else:
        entries = [_run_entry(j) for j in jobs]
    return summarize_lifespan(entries)


def fit_exponent(eps, tstar, confidence=0.95):
    """Least-squares p in T* = c eps^-p with a t-interval on p."""
    x, y = np.log(np.asarray(eps)), np.log(np.asarray(tstar))
    fit = stats.linregress(x, y)
    p = -fit.slope
    dof = len(x) - 2
    if dof > 0 and np.isfinite(fit.stderr):
        half = float(stats.t.ppf(0.5 + confidence / 2, dof) * fit.stderr)
    else:
        half = float("inf")
    return {"p": float(p), "ci": [float(p - half), float(p + half)],
            "confidence": confidence, "c": float(np.exp(fit.intercept))}


def summarize_lifespan(entries):
    entries = sorted(entries, key=lambda e: -e.epsilon)
    ok = [e for e in entries if e.reached and not e.error]
    monotone = (len(ok) == len(entries)
                and all(b.t_star > a.t_star for a, b in zip(entries, entries[1:])))
    out = {"entries": [e.as_dict() for e in entries], "monotone": bool(monotone)}
    if len(ok) >= 2:
        out["fit"] = fit_exponent([e.epsilon for e in ok], [e.t_star for e in ok])
    return out
