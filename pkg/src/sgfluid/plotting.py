"""Figures written next to the CSV and JSON outputs (non-interactive backend)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def plot_diagnostics(records, path):
    t = np.array([r.t for r in records])
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    axes[0, 0].plot(t, [r.area - np.pi for r in records])
    axes[0, 0].set_ylabel("area - pi")
    axes[0, 1].plot(t, [r.min_A1 for r in records])
    axes[0, 1].set_ylabel("min A1")
    axes[1, 0].plot(t, [r.eps_sup for r in records])
    axes[1, 0].set_ylabel("sup |eps|")
    axes[1, 1].semilogy(t, np.maximum([r.constraint_defect for r in records], 1e-300),
                        label="constraint defect")
    axes[1, 1].semilogy(t, np.maximum([r.projection_magnitude for r in records], 1e-300),
                        label="projection")
    axes[1, 1].legend(fontsize=8)
    for ax in axes[1]:
        ax.set_xlabel("t")
    return _save(fig, path)


def plot_curve(z, path, title=""):
    z = np.asarray(z)
    zc = np.append(z, z[0])
    th = np.linspace(0, 2 * np.pi, 400)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(np.cos(th), np.sin(th), ":", color="gray", lw=0.8)
    ax.plot(zc.real, zc.imag)
    ax.set_aspect("equal")
    ax.set_title(title)
    return _save(fig, path)


def plot_lifespan(summary, path):
    entries = [e for e in summary["entries"] if e["T_star"] is not None]
    eps = np.array([e["epsilon"] for e in entries])
    ts = np.array([e["T_star"] for e in entries])
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(eps, ts, "o-", label="T*")
    fit = summary.get("fit")
    if fit:
        grid = np.geomspace(eps.min(), eps.max(), 50)
        ax.loglog(grid, fit["c"] * grid ** (-fit["p"]), "--",
                  label=f"fit p = {fit['p']:.2f}")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("T*")
    ax.legend()
    return _save(fig, path)


def plot_checks(records, path):
    names = [r["check_name"] for r in records]
    res = np.array([max(float(r["residual"]), 1e-300) for r in records])
    tol = np.array([float(r["tolerance"]) for r in records])
    colors = ["tab:green" if r["pass"] else "tab:red" for r in records]
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(names) + 1.5))
    y = np.arange(len(names))
    ax.barh(y, np.log10(res), color=colors)
    ax.plot(np.log10(tol), y, "k|", markersize=14)
    ax.set_yticks(y, names, fontsize=8)
    ax.set_xlabel("log10 residual (bar), tolerance (tick)")
    return _save(fig, path)
