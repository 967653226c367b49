"""Static figure rendering for the experiment outputs.

Figures are written as SVG next to the plot-data CSVs.  The CSVs are
the machine contract; figures exist for human inspection.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "shadowbench"
plt.rcParams["figure.dpi"] = 110

_ENSEMBLE_STYLE = {"pauli": dict(color="tab:blue", marker="o"),
                   "clifford": dict(color="tab:red", marker="s")}


def render(table, kind: str, out_dir) -> list:
    out_dir = Path(out_dir)
    if kind == "ghz-reconstruct":
        return [_ghz_figure(table, out_dir)]
    if kind == "entropy-discrepancy":
        return [_entropy_figure(table, out_dir)]
    if kind == "error-vs-shots":
        return [_error_figure(table, out_dir)]
    if kind == "crossover":
        return _crossover_figures(table, out_dir)
    raise ValueError(f"unknown plot kind {kind!r}")


def _bar3d(ax, mat, title):
    d = mat.shape[0]
    xs, ys = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    ax.bar3d(xs.ravel(), ys.ravel(), np.zeros(d * d), 0.8, 0.8, mat.ravel(),
             shade=True, color="#4878cf")
    ax.set_zlim(min(0.0, float(mat.min())), max(0.55, float(mat.max())))
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])


def _ghz_figure(table, out_dir: Path) -> Path:
    fig = plt.figure(figsize=(9, 4))
    ax1 = fig.add_subplot(1, 2, 1, projection="3d")
    ax2 = fig.add_subplot(1, 2, 2, projection="3d")
    _bar3d(ax1, table["ideal_real"], "ideal Re(rho)")
    _bar3d(ax2, table["reconstructed_real"],
           f"shadow estimate, {table['shots']} shots")
    path = out_dir / "ghz_reconstruct.svg"
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def _entropy_figure(table, out_dir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    curve = table["curve"]
    s_a = [r["s_a"] for r in curve]
    for ensemble in ("pauli", "clifford"):
        key = f"delta_{ensemble}"
        if curve[0].get(key) is None:
            continue
        ax.plot(s_a, [r[key] for r in curve], label=ensemble, **_ENSEMBLE_STYLE[ensemble])
    ax.plot(s_a, [r["bound_pauli"] for r in curve], ls="--", color="tab:blue",
            alpha=0.5, label="pauli bound / sqrt(S)")
    ax.plot(s_a, [r["bound_clifford"] for r in curve], ls="--", color="tab:red",
            alpha=0.5, label="clifford bound / sqrt(S)")
    ax.set_yscale("log")
    ax.set_xlabel("entanglement entropy of the target state [bits]")
    ax.set_ylabel(f"discrepancy at {table['shots']} shots")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "entropy_discrepancy.svg"
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def _error_figure(table, out_dir: Path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(9.5, 4.2), sharey=True)
    curves = table["curves"]
    blocks = sorted({r["block"] for r in curves})
    cmap = plt.get_cmap("viridis")
    for ax, ensemble in zip(axes, ("pauli", "clifford")):
        for b in blocks:
            pts = [r for r in curves if r["ensemble"] == ensemble and r["block"] == b]
            if not pts:
                continue
            ax.loglog([r["shots"] for r in pts], [max(r["error_mean"], 1e-12) for r in pts],
                      marker="o", ms=3, color=cmap((b - blocks[0]) / max(len(blocks) - 1, 1)),
                      label=f"n={b}")
        ax.set_title(ensemble)
        ax.set_xlabel("snapshots")
    axes[0].set_ylabel("|estimate - true value|")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "error_vs_shots.svg"
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def _crossover_figures(table, out_dir: Path) -> list:
    paths = []
    for n, rows in sorted(table["per_qubits"].items()):
        fig, ax = plt.subplots(figsize=(6.5, 4.2))
        for ensemble in ("pauli", "clifford"):
            pts = sorted((r for r in rows if r["ensemble"] == ensemble),
                         key=lambda r: r["block"])
            if not pts:
                continue
            style = _ENSEMBLE_STYLE[ensemble]
            ax.semilogy([r["block"] for r in pts], [r["s_req"] for r in pts],
                        label=f"{ensemble} empirical", **style)
            ax.semilogy([r["block"] for r in pts], [r["bound_s_req"] for r in pts],
                        ls="--", alpha=0.5, color=style["color"],
                        label=f"{ensemble} bound")
        ax.set_xlabel("entangled block size n")
        ax.set_ylabel("required snapshots at target error")
        ax.set_title(f"{n}-qubit register")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_dir / f"crossover_N{n}.svg"
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths
