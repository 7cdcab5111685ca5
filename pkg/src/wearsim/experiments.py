"""Experiment drivers: blockage validation, SINR CDFs, sweeps, crossover.

Each driver returns ``(rows, columns, report)`` where ``rows`` is a list
of dicts ready for CSV serialization and ``report`` carries soft-check
results (PASS/FLAG), diagnostics and derived summaries.  CSV files are
the contract; figures rendered from them are a convenience.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from . import channel, engine
from .config import ExperimentSpec, ScenarioConfig, scenario_variant
from .engine import EngineOptions

SINR_DB_FLOOR = -60.0


# ----------------------------------------------------------------------
# small statistics helpers

def empirical_cdf(samples):
    """Sorted samples with step-function CDF levels i/n."""
    s = np.sort(np.asarray(samples, dtype=float))
    return s, np.arange(1, s.size + 1) / s.size


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


def cdf_ordering_violation(lower, upper) -> float:
    """How far the CDF of ``upper`` rises above the CDF of ``lower``.

    Zero (up to noise) when ``upper`` stochastically dominates.
    """
    lower = np.sort(np.asarray(lower, dtype=float))
    upper = np.sort(np.asarray(upper, dtype=float))
    grid = np.concatenate([lower, upper])
    f_lo = np.searchsorted(lower, grid, side="right") / lower.size
    f_up = np.searchsorted(upper, grid, side="right") / upper.size
    return float(np.maximum(f_up - f_lo, 0.0).max())


def zero_crossing(x, y):
    """Abscissa of the first upward zero crossing, linearly interpolated."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    idx = np.where((y[:-1] < 0.0) & (y[1:] >= 0.0))[0]
    if idx.size == 0:
        return float("nan")
    i = int(idx[0])
    if y[i + 1] == y[i]:
        return float(x[i + 1])
    return float(x[i] - y[i] * (x[i + 1] - x[i]) / (y[i + 1] - y[i]))


def _modes(spec: ExperimentSpec):
    return ("exact", "stochastic") if spec.mode == "both" else (spec.mode,)


def _check(name, ok, detail):
    return {"name": name, "status": "PASS" if ok else "FLAG", "detail": detail}


# ----------------------------------------------------------------------
# blockage validation (average blockage probability per path class)

BLOCKAGE_COLUMNS = ["k", "rw_m", "path_class", "p_exact", "p_stoch",
                    "se_exact", "reps"]


def run_blockage_validation(cfg: ScenarioConfig, spec: ExperimentSpec):
    rows = []
    diag = engine.Diagnostics()
    point = 0
    for k in spec.k_values:
        for rw in spec.rw_values:
            pcfg = scenario_variant(cfg, k_people=int(k),
                                    wearable_standoff_m=float(rw))
            res = engine.run(pcfg, EngineOptions(collect="blockage"),
                             spec.replications, spec.seed, point_key=point,
                             workers=spec.workers)
            diag.merge(res["diagnostics"])
            links = res["links"]
            for path in ("direct", "wall", "ceiling", "floor"):
                p_exact = res["exact_blocked"][path] / links
                p_stoch = res["stoch_prob"][path] / links
                rows.append({
                    "k": int(k), "rw_m": float(rw), "path_class": path,
                    "p_exact": p_exact, "p_stoch": p_stoch,
                    "se_exact": float(np.sqrt(max(p_exact * (1 - p_exact), 0.0)
                                              / links)),
                    "reps": res["n"],
                })
            p_exact = res["exact_blocked"]["signal_wall"] / res["n"]
            p_stoch = res["stoch_prob"]["signal_wall"] / res["n"]
            rows.append({
                "k": int(k), "rw_m": float(rw), "path_class": "signal_wall",
                "p_exact": p_exact, "p_stoch": p_stoch,
                "se_exact": float(np.sqrt(max(p_exact * (1 - p_exact), 0.0)
                                          / res["n"])),
                "reps": res["n"],
            })
            point += 1

    gaps = {}
    for row in rows:
        gaps.setdefault(row["path_class"], []).append(
            abs(row["p_exact"] - row["p_stoch"]))
    checks = [
        _check(f"stochastic-vs-exact gap [{path}] <= 0.02",
               max(vals) <= 0.02, f"max |gap| = {max(vals):.4f}")
        for path, vals in gaps.items()
    ]
    for path in ("direct", "wall", "ceiling"):
        for rw in spec.rw_values:
            series = [(r["k"], r["p_exact"]) for r in rows
                      if r["path_class"] == path and r["rw_m"] == float(rw)]
            series.sort()
            vals = [p for _, p in series]
            checks.append(_check(
                f"blockage increasing in K [{path}, rw={rw}]",
                all(b >= a - 0.01 for a, b in zip(vals, vals[1:])),
                f"values {['%.3f' % v for v in vals]}"))
    report = {"checks": checks, "diagnostics": diag.as_dict()}
    return rows, BLOCKAGE_COLUMNS, report


# ----------------------------------------------------------------------
# SINR CDFs (exact vs stochastic blockage overlay)

SINR_COLUMNS = ["mode", "beta0", "reflectivity", "sinr_db", "cdf",
                "sinr_linear"]


def run_sinr_cdf(cfg: ScenarioConfig, spec: ExperimentSpec):
    rows = []
    samples = {}
    diag = engine.Diagnostics()
    noise = channel.noise_power(cfg.noise_figure_db, cfg.noise_psd_dbm_hz,
                                cfg.bandwidth_hz)
    for mode in _modes(spec):
        res = engine.run(cfg, EngineOptions(blockage_mode=mode,
                                            materials=spec.reflectivity_values,
                                            collect="sinr"),
                         spec.replications, spec.seed, point_key=0,
                         workers=spec.workers)
        diag.merge(res["diagnostics"])
        for mat in spec.reflectivity_values:
            point = res[(cfg.steering, mat)]
            for beta0 in spec.beta0_values:
                s = engine.sinr_samples(point, float(beta0), noise,
                                        cfg.tx_power_w, cfg.wavelength_m)
                samples[(mode, float(beta0), mat)] = s
                sorted_s, cdf = empirical_cdf(s)
                db = channel.to_db(sorted_s, floor_db=SINR_DB_FLOOR)
                for lin, d, c in zip(sorted_s, db, cdf):
                    rows.append({"mode": mode, "beta0": float(beta0),
                                 "reflectivity": mat, "sinr_db": d,
                                 "cdf": c, "sinr_linear": lin})

    checks = []
    summaries = {"ks": {}, "median_shift_db": {}}
    if len(_modes(spec)) == 2:
        for (mode, b, mat) in list(samples):
            if mode != "exact" or ("stochastic", b, mat) not in samples:
                continue
            ks = ks_distance(samples[("exact", b, mat)],
                             samples[("stochastic", b, mat)])
            summaries["ks"][f"beta0={b},refl={mat}"] = ks
            checks.append(_check(
                f"exact-vs-stochastic KS [beta0={b}, {mat}] <= 0.05",
                ks <= 0.05, f"KS = {ks:.4f}"))
    for mode in _modes(spec):
        for b in spec.beta0_values:
            key_hi = (mode, float(b), "high")
            key_lo = (mode, float(b), "low")
            if key_hi not in samples or key_lo not in samples:
                continue
            med_hi = 10 * np.log10(np.median(samples[key_hi]))
            med_lo = 10 * np.log10(np.median(samples[key_lo]))
            shift = med_hi - med_lo
            summaries["median_shift_db"][f"mode={mode},beta0={b}"] = shift
            if b == 0.0:
                checks.append(_check(
                    f"high right of low at beta0=0 [{mode}]", shift > 0,
                    f"median shift = {shift:+.2f} dB"))
            if b == 1.0:
                checks.append(_check(
                    f"ordering reverses at beta0=1 [{mode}]", shift < 0,
                    f"median shift = {shift:+.2f} dB"))
    report = {"checks": checks, "summaries": summaries,
              "diagnostics": diag.as_dict()}
    return rows, SINR_COLUMNS, report


# ----------------------------------------------------------------------
# mean spectral efficiency sweeps

MEAN_SE_COLUMNS = ["sweep", "mode", "location", "rw_m", "k", "beta0",
                   "reflectivity", "bandwidth_hz", "mean_se", "ci95", "reps"]


def run_mean_se(cfg: ScenarioConfig, spec: ExperimentSpec, sweep: str):
    """``sweep`` is 'bandwidth' (vs B) or 'people' (vs K)."""
    if sweep not in ("bandwidth", "people"):
        raise ValueError("sweep must be 'bandwidth' or 'people'")
    rows = []
    diag = engine.Diagnostics()
    locations = spec.location_values if sweep == "people" else (
        cfg.receiver if isinstance(cfg.receiver, str) else "explicit",)
    rws = spec.rw_values if sweep == "people" else (cfg.wearable_standoff_m,)
    point = 0
    for mode in _modes(spec):
        for loc in locations:
            for rw in rws:
                for k in spec.k_values:
                    pcfg = scenario_variant(
                        cfg, k_people=int(k), wearable_standoff_m=float(rw),
                        receiver=loc if isinstance(loc, str) else tuple(loc))
                    res = engine.run(
                        pcfg, EngineOptions(blockage_mode=mode,
                                            materials=spec.reflectivity_values),
                        spec.replications, spec.seed, point_key=point,
                        workers=spec.workers)
                    diag.merge(res["diagnostics"])
                    for mat in spec.reflectivity_values:
                        data = res[(cfg.steering, mat)]
                        for beta0 in spec.beta0_values:
                            for b_hz in spec.bandwidth_values:
                                noise = channel.noise_power(
                                    cfg.noise_figure_db, cfg.noise_psd_dbm_hz,
                                    float(b_hz))
                                s = engine.sinr_samples(
                                    data, float(beta0), noise,
                                    cfg.tx_power_w, cfg.wavelength_m)
                                se = channel.spectral_efficiency(s)
                                mean, ci = channel.mean_spectral_efficiency(se)
                                rows.append({
                                    "sweep": sweep, "mode": mode,
                                    "location": loc if isinstance(loc, str)
                                    else "explicit",
                                    "rw_m": float(rw), "k": int(k),
                                    "beta0": float(beta0),
                                    "reflectivity": mat,
                                    "bandwidth_hz": float(b_hz),
                                    "mean_se": mean, "ci95": ci,
                                    "reps": res["n"],
                                })
                    point += 1

    checks = []
    summaries = {}
    if sweep == "bandwidth":
        for key, series in _group(rows, ("mode", "location", "rw_m", "k",
                                         "beta0", "reflectivity")):
            series.sort(key=lambda r: r["bandwidth_hz"])
            vals = [r["mean_se"] for r in series]
            checks.append(_check(
                f"mean SE decreasing in B {key}",
                all(b <= a + 1e-9 for a, b in zip(vals, vals[1:])),
                f"values {['%.3f' % v for v in vals]}"))
    else:
        for key, series in _group(rows, ("mode", "location", "rw_m", "beta0",
                                         "reflectivity", "bandwidth_hz")):
            series.sort(key=lambda r: r["k"])
            by_k = {r["k"]: r for r in series}
            if 0 in by_k and 5 in by_k and by_k[0]["mean_se"] > 0:
                drop = 1.0 - by_k[5]["mean_se"] / by_k[0]["mean_se"]
                summaries[f"drop_k0_to_k5 {key}"] = drop
                checks.append(_check(
                    f"steep decline K=0 -> K=5 {key}", drop >= 0.5,
                    f"drop = {drop:.1%}"))
            ok = all(b["mean_se"] <= a["mean_se"] + a["ci95"] + b["ci95"]
                     for a, b in zip(series, series[1:]))
            checks.append(_check(
                f"mean SE nonincreasing in K {key}", ok,
                f"values {['%.3f' % r['mean_se'] for r in series]}"))
    report = {"checks": checks, "summaries": summaries,
              "diagnostics": diag.as_dict()}
    return rows, MEAN_SE_COLUMNS, report


def _group(rows, keys):
    grouped = {}
    for r in rows:
        grouped.setdefault(tuple(r[k] for k in keys), []).append(dict(r))
    for key, series in sorted(grouped.items(), key=lambda kv: repr(kv[0])):
        label = ",".join(f"{k}={v}" for k, v in zip(keys, key))
        yield f"[{label}]", series


# ----------------------------------------------------------------------
# spectral-efficiency CDFs per array size (exact vs stochastic tx gains)

ANTENNA_COLUMNS = ["gain_model", "reflectivity", "n_elements", "se", "cdf"]


def run_antenna_cdf(cfg: ScenarioConfig, spec: ExperimentSpec):
    rows = []
    samples = {}
    diag = engine.Diagnostics()
    noise = channel.noise_power(cfg.noise_figure_db, cfg.noise_psd_dbm_hz,
                                cfg.bandwidth_hz)
    for n_el in spec.n_values:
        gain_models = spec.gain_models if n_el > 1 else ("exact",)
        for gm in gain_models:
            pcfg = scenario_variant(cfg, n_elements=int(n_el))
            res = engine.run(
                pcfg, EngineOptions(blockage_mode=spec.blockage_for_gains,
                                    gain_mode=gm,
                                    materials=spec.reflectivity_values),
                spec.replications, spec.seed, point_key=0,
                workers=spec.workers)
            diag.merge(res["diagnostics"])
            for mat in spec.reflectivity_values:
                s = engine.sinr_samples(res[(cfg.steering, mat)],
                                        cfg.beta0, noise, cfg.tx_power_w,
                                        cfg.wavelength_m)
                se = channel.spectral_efficiency(s)
                samples[(gm, mat, int(n_el))] = se
                sorted_se, cdf = empirical_cdf(se)
                for v, c in zip(sorted_se, cdf):
                    rows.append({"gain_model": gm, "reflectivity": mat,
                                 "n_elements": int(n_el), "se": v, "cdf": c})

    checks = []
    summaries = {"ks": {}, "ordering_violation": {}, "median_se": {}}
    for mat in spec.reflectivity_values:
        ns = sorted({n for (_, m, n) in samples if m == mat})
        for small, big in zip(ns, ns[1:]):
            viol = cdf_ordering_violation(samples[("exact", mat, small)],
                                          samples[("exact", mat, big)])
            summaries["ordering_violation"][f"{mat}:N{small}->N{big}"] = viol
            checks.append(_check(
                f"SE CDF ordered in N [{mat}: {small} -> {big}]",
                viol <= 0.01, f"max violation = {viol:.4f}"))
        for n_el in ns:
            if ("stochastic", mat, n_el) in samples:
                ks = ks_distance(samples[("exact", mat, n_el)],
                                 samples[("stochastic", mat, n_el)])
                summaries["ks"][f"{mat}:N{n_el}"] = ks
                checks.append(_check(
                    f"gain-model KS [{mat}, N={n_el}] <= 0.05",
                    ks <= 0.05, f"KS = {ks:.4f}"))
            med = float(np.median(samples[("exact", mat, n_el)]))
            summaries["median_se"][f"{mat}:N{n_el}"] = med
    report = {"checks": checks, "summaries": summaries,
              "diagnostics": diag.as_dict()}
    return rows, ANTENNA_COLUMNS, report


# ----------------------------------------------------------------------
# shadow-loss crossover between steering policies

SHADOW_COLUMNS = ["reflectivity", "n_elements", "k", "shadow_db",
                  "mean_se_ceiling", "mean_se_onbody", "diff", "ci95_diff",
                  "reps"]


def run_shadow_crossover(cfg: ScenarioConfig, spec: ExperimentSpec):
    rows = []
    crossings = {}
    diag = engine.Diagnostics()
    noise = channel.noise_power(cfg.noise_figure_db, cfg.noise_psd_dbm_hz,
                                cfg.bandwidth_hz)
    mode = spec.mode if spec.mode != "both" else "stochastic"
    for ki, k in enumerate(spec.k_values):
        for n_el in spec.n_values:
            pcfg = scenario_variant(cfg, k_people=int(k),
                                    n_elements=int(n_el))
            res = engine.run(
                pcfg, EngineOptions(blockage_mode=mode,
                                    policies=("ceiling", "onbody"),
                                    materials=spec.reflectivity_values),
                spec.replications, spec.seed, point_key=ki,
                workers=spec.workers)
            diag.merge(res["diagnostics"])
            for mat in spec.reflectivity_values:
                diffs = []
                for shadow_db in spec.shadow_db_values:
                    beta0 = 10.0 ** (-float(shadow_db) / 20.0)
                    se = {}
                    for policy in ("ceiling", "onbody"):
                        s = engine.sinr_samples(res[(policy, mat)], beta0,
                                                noise, cfg.tx_power_w,
                                                cfg.wavelength_m)
                        se[policy] = channel.spectral_efficiency(s)
                    paired = se["ceiling"] - se["onbody"]
                    mean_diff, ci = channel.mean_spectral_efficiency(paired)
                    diffs.append(mean_diff)
                    rows.append({
                        "reflectivity": mat, "n_elements": int(n_el),
                        "k": int(k), "shadow_db": float(shadow_db),
                        "mean_se_ceiling": float(np.mean(se["ceiling"])),
                        "mean_se_onbody": float(np.mean(se["onbody"])),
                        "diff": mean_diff, "ci95_diff": ci, "reps": res["n"],
                    })
                crossings[(mat, int(n_el), int(k))] = zero_crossing(
                    list(spec.shadow_db_values), diffs)

    checks = []
    for (mat, n_el, k), x in sorted(crossings.items()):
        checks.append(_check(
            f"crossover in [20, 30] dB [{mat}, N={n_el}, K={k}]",
            20.0 <= x <= 30.0, f"crossing = {x:.2f} dB"))
    for mat in spec.reflectivity_values:
        xs = [x for (m, _, _), x in crossings.items() if m == mat]
        if len(xs) > 1 and np.all(np.isfinite(xs)):
            spread = max(xs) - min(xs)
            checks.append(_check(
                f"crossover spread < 3 dB [{mat}]", spread < 3.0,
                f"spread = {spread:.2f} dB over {len(xs)} combos"))
    report = {
        "checks": checks,
        "summaries": {"crossings_db": {f"{m},N={n},K={k}": x
                                       for (m, n, k), x in crossings.items()}},
        "diagnostics": diag.as_dict(),
    }
    return rows, SHADOW_COLUMNS, report


# ----------------------------------------------------------------------
# CSV serialization

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(path, rows, columns, header_comments=()):
    path = Path(path)
    with open(path, "w", newline="") as fh:
        for line in header_comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    return path
