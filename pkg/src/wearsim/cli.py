"""Command-line entry point.

Subcommands map to the canned experiments; each run writes one CSV, a
JSON manifest (fully resolved config + seed + checks) and, unless
``--no-plot`` is given, a PNG rendered from the CSV rows.  Re-running
any subcommand from a manifest file reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import (ExperimentSpec, ScenarioConfig, config_hash,
                     emit_manifest, load_config, scenario_variant)
from . import experiments, plotting

EXPERIMENT_DEFAULTS = {
    "fig5": dict(
        scenario=dict(receiver="center"),
        spec=dict(experiment="fig5", k_values=tuple(range(5, 51, 5)),
                  rw_values=(0.02, 0.10), beta0_values=(0.0,),
                  reflectivity_values=("high",), mode="both"),
    ),
    "fig6": dict(
        scenario=dict(receiver="center", wearable_standoff_m=0.10,
                      n_elements=1, k_people=40),
        spec=dict(experiment="fig6", beta0_values=(0.0, 1.0),
                  reflectivity_values=("low", "high"), mode="both"),
    ),
    "fig8a": dict(
        scenario=dict(receiver="center", wearable_standoff_m=0.10,
                      n_elements=1),
        spec=dict(experiment="fig8a", k_values=(0, 5, 50),
                  beta0_values=(0.0, 1.0), reflectivity_values=("high",),
                  bandwidth_values=(1e8, 2e8, 5e8, 1e9, 2e9, 5e9, 1e10),
                  mode="stochastic"),
    ),
    "fig8b": dict(
        scenario=dict(n_elements=1),
        spec=dict(experiment="fig8b", k_values=(0, 5, 10, 20, 30, 40, 50),
                  rw_values=(0.02, 0.10), beta0_values=(0.0,),
                  reflectivity_values=("high",),
                  location_values=("center", "corner"), mode="stochastic"),
    ),
    "fig9": dict(
        scenario=dict(receiver="center", k_people=40,
                      wearable_standoff_m=0.10, beta0=0.0,
                      steering="ceiling"),
        spec=dict(experiment="fig9", n_values=(1, 4, 9, 16),
                  reflectivity_values=("low", "high"),
                  gain_models=("exact", "stochastic"), mode="stochastic"),
    ),
    "fig10": dict(
        scenario=dict(receiver="center", wearable_standoff_m=0.10),
        spec=dict(experiment="fig10", n_values=(4, 9, 16),
                  k_values=(10, 40), reflectivity_values=("low", "high"),
                  mode="stochastic"),
    ),
    "custom": dict(scenario=dict(), spec=dict(experiment="custom")),
}

COMMAND_TO_EXPERIMENT = {
    "validate-blockage": "fig5",
    "sinr-cdf": "fig6",
    "mean-se": None,  # fig8a or fig8b depending on --sweep
    "antenna-cdf": "fig9",
    "shadow-sweep": "fig10",
    "custom": "custom",
}

CSV_HEADER_DOCS = {
    "fig5": ("average blockage probability per path class",
             "p_exact: Monte Carlo frequency from the geometric test",
             "p_stoch: mean closed-form probability over the same scenes"),
    "fig6": ("empirical SINR distribution",
             "sinr_db is floored at -60 dB for plotting; sinr_linear is raw",
             "cdf: empirical level i/n at the sorted sample"),
    "fig8a": ("mean spectral efficiency sweep",
              "ci95: normal-approximation 95% half-width"),
    "fig8b": ("mean spectral efficiency sweep",
              "ci95: normal-approximation 95% half-width"),
    "fig9": ("spectral-efficiency CDFs per array size",
             "gain_model: interferer transmit gains exact or stochastic"),
    "fig10": ("steering comparison vs on-body shadow loss",
              "diff: mean (ceiling - on-body) spectral efficiency",
              "shadow_db: 20*log10(1/beta0)"),
    "custom": ("empirical SINR distribution",),
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="wearsim",
        description="Monte Carlo simulator for mmWave wearable networks "
                    "in reflective cuboid enclosures")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("validate-blockage", "average blockage probabilities, exact vs model"),
        ("sinr-cdf", "SINR CDFs, exact vs stochastic blockage"),
        ("mean-se", "mean spectral efficiency vs bandwidth or density"),
        ("antenna-cdf", "SE CDFs per array size, exact vs stochastic gains"),
        ("shadow-sweep", "steering crossover vs on-body shadow loss"),
        ("custom", "run from a config or manifest file"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None,
                       help="JSON config or manifest file")
        p.add_argument("--seed", type=int, default=None, help="RNG seed")
        p.add_argument("--reps", type=int, default=None,
                       help="replications per grid point")
        p.add_argument("--mode", choices=("exact", "stochastic", "both"),
                       default=None, help="blockage model")
        p.add_argument("--out", type=Path, default=Path("."),
                       help="output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads (default SIM_WORKERS or 1)")
        p.add_argument("--no-plot", action="store_true",
                       help="skip figure rendering")
        p.add_argument("--receiver", default=None,
                       help="receiver preset (center|corner)")
        p.add_argument("--k", type=int, default=None,
                       help="override the number of other people")
        p.add_argument("--rw", type=float, default=None,
                       help="override the wearable standoff (m)")
        p.add_argument("--n-elements", type=int, default=None,
                       help="override the array size N")
        p.add_argument("--beta0", type=float, default=None,
                       help="override the on-body coefficient")
        p.add_argument("--reflectivity", default=None,
                       help="material preset (low|high)")
        if name == "mean-se":
            p.add_argument("--sweep", choices=("bandwidth", "people"),
                           default="people")
        if name == "antenna-cdf":
            p.add_argument("--blockage", choices=("exact", "stochastic"),
                           default=None, help="blockage model behind the "
                           "gain comparison")
    return parser


def resolve(args) -> tuple[ScenarioConfig, ExperimentSpec, str]:
    """Merge defaults, config file and CLI overrides into a run setup."""
    experiment = COMMAND_TO_EXPERIMENT[args.command]
    if args.command == "mean-se":
        experiment = "fig8a" if args.sweep == "bandwidth" else "fig8b"
    defaults = EXPERIMENT_DEFAULTS[experiment]
    scenario = ScenarioConfig(**defaults["scenario"])
    spec = ExperimentSpec(**defaults["spec"])
    if args.config is not None:
        file_scenario, file_spec = load_config(args.config)
        scenario = file_scenario
        if file_spec.experiment != "custom" or args.command == "custom":
            spec = file_spec
        else:
            spec = replace(spec, replications=file_spec.replications,
                           seed=file_spec.seed)
    overrides = {}
    if args.receiver is not None:
        overrides["receiver"] = args.receiver
    if args.k is not None:
        overrides["k_people"] = args.k
    if args.rw is not None:
        overrides["wearable_standoff_m"] = args.rw
    if args.n_elements is not None:
        overrides["n_elements"] = args.n_elements
    if args.beta0 is not None:
        overrides["beta0"] = args.beta0
    if args.reflectivity is not None:
        overrides["reflectivity"] = args.reflectivity
    if overrides:
        scenario = scenario_variant(scenario, **overrides)
    spec_overrides = {"experiment": experiment}
    if args.seed is not None:
        spec_overrides["seed"] = args.seed
    if args.reps is not None:
        spec_overrides["replications"] = args.reps
    if args.mode is not None:
        spec_overrides["mode"] = args.mode
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("SIM_WORKERS", "1"))
    spec_overrides["workers"] = max(1, workers)
    if getattr(args, "blockage", None):
        spec_overrides["blockage_for_gains"] = args.blockage
    spec = replace(spec, **spec_overrides)
    return scenario, spec, experiment


def run_experiment(scenario: ScenarioConfig, spec: ExperimentSpec):
    """Dispatch to the driver for ``spec.experiment``."""
    exp = spec.experiment
    if exp == "fig5":
        return experiments.run_blockage_validation(scenario, spec)
    if exp in ("fig6", "custom"):
        return experiments.run_sinr_cdf(scenario, spec)
    if exp == "fig8a":
        return experiments.run_mean_se(scenario, spec, "bandwidth")
    if exp == "fig8b":
        return experiments.run_mean_se(scenario, spec, "people")
    if exp == "fig9":
        return experiments.run_antenna_cdf(scenario, spec)
    if exp == "fig10":
        return experiments.run_shadow_crossover(scenario, spec)
    raise ValueError(f"unknown experiment {exp!r}")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    scenario, spec, experiment = resolve(args)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)

    rows, columns, report = run_experiment(scenario, spec)

    stem = experiment
    csv_path = out_dir / f"{stem}.csv"
    comments = (f"wearsim {experiment}; config {config_hash(scenario, spec)}; "
                f"seed {spec.seed}",) + CSV_HEADER_DOCS[experiment]
    experiments.write_csv(csv_path, rows, columns, comments)
    outputs = {"csv": csv_path.name, "csv_sha256": _sha256(csv_path)}

    if not args.no_plot:
        fig_path = out_dir / f"{stem}.png"
        plotting.RENDERERS[experiment](rows, fig_path)
        outputs["figure"] = fig_path.name

    emit_manifest(out_dir / f"{stem}_manifest.json", scenario, spec,
                  outputs=outputs,
                  extra={"checks": report.get("checks", []),
                         "summaries": report.get("summaries", {}),
                         "diagnostics": report.get("diagnostics", {})})

    for check in report.get("checks", []):
        print(f"[{check['status']}] {check['name']}: {check['detail']}")
    print(f"wrote {csv_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
