"""Figure rendering for experiment outputs.

Every experiment writes a CSV; these helpers draw the companion PNG
from the same row dicts.  Rendering is optional and never feeds back
into the numbers.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({
    "figure.figsize": (7.5, 5),
    "figure.dpi": 120,
    "savefig.bbox": "tight",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
})

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def _groups(rows, keys):
    out = {}
    for r in rows:
        out.setdefault(tuple(r[k] for k in keys), []).append(r)
    return dict(sorted(out.items(), key=lambda kv: repr(kv[0])))


def plot_blockage_validation(rows, path):
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), sharey=True)
    rws = sorted({r["rw_m"] for r in rows})
    for ax, rw in zip(axes, rws):
        sub = [r for r in rows if r["rw_m"] == rw
               and r["path_class"] in ("direct", "wall", "ceiling")]
        for i, (key, series) in enumerate(_groups(sub, ("path_class",)).items()):
            series.sort(key=lambda r: r["k"])
            ks = [r["k"] for r in series]
            ax.plot(ks, [r["p_exact"] for r in series], "-",
                    color=_COLORS[i % len(_COLORS)], label=f"{key[0]} (exact)")
            ax.plot(ks, [r["p_stoch"] for r in series], "o", mfc="none",
                    color=_COLORS[i % len(_COLORS)], label=f"{key[0]} (model)")
        ax.set_xlabel("other people K")
        ax.set_title(f"standoff = {100 * rw:.0f} cm")
    axes[0].set_ylabel("average blockage probability")
    axes[0].legend(fontsize=8)
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def plot_sinr_cdf(rows, path):
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), sharey=True)
    betas = sorted({r["beta0"] for r in rows})
    for ax, b in zip(axes, betas):
        sub = [r for r in rows if r["beta0"] == b]
        for i, (key, series) in enumerate(
                _groups(sub, ("reflectivity", "mode")).items()):
            mat, mode = key
            style = "-" if mode == "exact" else "--"
            series.sort(key=lambda r: r["sinr_db"])
            step = max(1, len(series) // 2000)
            ax.plot([r["sinr_db"] for r in series[::step]],
                    [r["cdf"] for r in series[::step]], style,
                    color=_COLORS[i % len(_COLORS)], label=f"{mat}/{mode}")
        ax.set_xlabel("SINR (dB)")
        ax.set_title(f"on-body coefficient = {b:g}")
        ax.set_xlim(-60, 40)
    axes[0].set_ylabel("CDF")
    axes[0].legend(fontsize=8)
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def plot_mean_se(rows, path):
    sweep = rows[0]["sweep"]
    xkey = "bandwidth_hz" if sweep == "bandwidth" else "k"
    fig, ax = plt.subplots()
    group_keys = ("location", "rw_m", "beta0", "k") if sweep == "bandwidth" \
        else ("location", "rw_m", "beta0", "bandwidth_hz")
    group_keys = tuple(k for k in group_keys if k != xkey)
    for i, (key, series) in enumerate(
            _groups(rows, ("mode",) + group_keys).items()):
        series.sort(key=lambda r: r[xkey])
        label = ",".join(str(v) for v in key)
        ax.errorbar([r[xkey] for r in series],
                    [r["mean_se"] for r in series],
                    yerr=[r["ci95"] for r in series],
                    color=_COLORS[i % len(_COLORS)], label=label, capsize=2)
    if sweep == "bandwidth":
        ax.set_xscale("log")
        ax.set_xlabel("bandwidth (Hz)")
    else:
        ax.set_xlabel("other people K")
    ax.set_ylabel("mean spectral efficiency (bit/s/Hz)")
    ax.legend(fontsize=7)
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def plot_antenna_cdf(rows, path):
    mats = sorted({r["reflectivity"] for r in rows})
    fig, axes = plt.subplots(1, len(mats), figsize=(11, 4.5), sharey=True,
                             squeeze=False)
    for ax, mat in zip(axes[0], mats):
        sub = [r for r in rows if r["reflectivity"] == mat]
        for i, (key, series) in enumerate(
                _groups(sub, ("n_elements", "gain_model")).items()):
            n_el, gm = key
            style = "-" if gm == "exact" else ":"
            series.sort(key=lambda r: r["se"])
            step = max(1, len(series) // 2000)
            ax.plot([r["se"] for r in series[::step]],
                    [r["cdf"] for r in series[::step]], style,
                    color=_COLORS[(i // 2) % len(_COLORS)],
                    label=f"N={n_el} ({gm})")
        ax.set_xlabel("spectral efficiency (bit/s/Hz)")
        ax.set_title(f"{mat} reflectivity")
        ax.set_xlim(0, 14)
    axes[0][0].set_ylabel("CDF")
    axes[0][0].legend(fontsize=8)
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def plot_shadow_crossover(rows, path):
    fig, ax = plt.subplots()
    for i, (key, series) in enumerate(
            _groups(rows, ("reflectivity", "n_elements", "k")).items()):
        mat, n_el, k = key
        series.sort(key=lambda r: r["shadow_db"])
        ax.plot([r["shadow_db"] for r in series],
                [r["diff"] for r in series],
                color=_COLORS[i % len(_COLORS)],
                label=f"{mat}, N={n_el}, K={k}")
    ax.axhline(0.0, color="k", linewidth=0.8)
    ax.set_xlabel("on-body shadow loss (dB)")
    ax.set_ylabel("mean SE difference, ceiling - on-body (bit/s/Hz)")
    ax.legend(fontsize=7)
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


RENDERERS = {
    "fig5": plot_blockage_validation,
    "fig6": plot_sinr_cdf,
    "fig8a": plot_mean_se,
    "fig8b": plot_mean_se,
    "fig9": plot_antenna_cdf,
    "fig10": plot_shadow_crossover,
    "custom": plot_sinr_cdf,
}
