"""Rendering of recorded runs to figure files (Agg backend, headless)."""

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# Activations/phases below this are not drawn, keeping the panels readable.
DRAW_THRESHOLD = 0.01

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def _masked(values, mask):
    out = np.array(values, dtype=float)
    out[~mask] = np.nan
    return out


def render_run(ticks, state_names, path, events=(), title=None):
    """Three stacked panels: state vector, activations, phases."""
    n = len(state_names)
    ts = np.array([t.t for t in ticks])
    xs = np.stack([t.x for t in ticks])
    lam = np.stack([t.Lambda for t in ticks])
    phi = np.stack([t.Phi for t in ticks])

    fig, axes = plt.subplots(3, 1, figsize=(9, 7), sharex=True)
    ax_x, ax_lam, ax_phi = axes

    for i in range(n):
        ax_x.plot(ts, xs[:, i], color=_COLORS[i % len(_COLORS)], label=state_names[i])
    ax_x.set_ylabel("state x")
    ax_x.legend(loc="upper right", fontsize=8, ncol=min(n, 4))

    for i in range(n):
        ax_lam.plot(ts, _masked(lam[:, i, i], lam[:, i, i] > DRAW_THRESHOLD),
                    color=_COLORS[i % len(_COLORS)])
    for j in range(n):
        for i in range(n):
            if j == i or not np.any(lam[:, j, i] > DRAW_THRESHOLD):
                continue
            ax_lam.plot(ts, _masked(lam[:, j, i], lam[:, j, i] > DRAW_THRESHOLD),
                        linestyle="--", color=_COLORS[j % len(_COLORS)],
                        label=f"{state_names[i]}→{state_names[j]}")
    ax_lam.set_ylabel("activation Λ")
    ax_lam.set_ylim(-0.05, 1.05)
    handles, labels = ax_lam.get_legend_handles_labels()
    if handles:
        ax_lam.legend(handles, labels, loc="upper right", fontsize=7, ncol=2)

    for j in range(n):
        for i in range(n):
            if j == i or not np.any(lam[:, j, i] > DRAW_THRESHOLD):
                continue
            ax_phi.plot(ts, _masked(phi[:, j, i], lam[:, j, i] > DRAW_THRESHOLD),
                        linestyle="-", color=_COLORS[j % len(_COLORS)])
    ax_phi.set_ylabel("phase Φ")
    ax_phi.set_ylim(-0.05, 1.05)
    ax_phi.set_xlabel("time (s)")

    for t_event, label in events or ():
        for ax in axes:
            ax.axvline(t_event, color="k", linestyle=":", linewidth=1)
        ax_x.annotate(label, (t_event, ax_x.get_ylim()[1]), fontsize=7,
                      rotation=90, va="top", ha="right")

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_trajectory3d(ticks, state_names, path, title=None):
    """3-d view of the attractor for three-state systems."""
    xs = np.stack([t.x for t in ticks])
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    ax.plot(xs[:, 0], xs[:, 1], xs[:, 2], linewidth=0.8)
    for i, name in enumerate(state_names[:3]):
        e = np.zeros(3)
        e[i] = 1.0
        ax.scatter(*e, s=40)
        ax.text(*(e * 1.08), name)
    ax.set_xlabel(state_names[0])
    ax.set_ylabel(state_names[1])
    ax.set_zlabel(state_names[2])
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
