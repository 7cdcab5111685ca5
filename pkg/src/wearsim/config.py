"""Configuration: scenario settings, experiment specs, manifests.

Config files are JSON objects whose keys mirror the dataclass fields
below.  Every length carries an ``_m`` suffix, powers are ``_dbm``,
and angles never appear in configs.  Unknown keys are rejected, and
every validation error names the violated constraint.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, asdict, replace
from pathlib import Path

from . import __version__
from .em import MATERIAL_PRESETS, SlabMaterial
from .geometry import Enclosure

RECEIVER_PRESETS = {
    "center": (0.0, 0.0, 0.0),
    "corner": (8.5, 1.5, 0.25),
}

STEERING_POLICIES = ("onbody", "ceiling")


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario settings; defaults reproduce the reference deployment."""

    length_m: float = 20.0
    width_m: float = 4.0
    height_m: float = 2.5
    k_people: int = 40
    body_diameter_m: float = 0.5
    body_height_m: float = 1.75
    wearable_standoff_m: float = 0.10
    onbody_distance_m: float = 0.25
    wearable_height_low_m: float = -0.75
    wearable_height_high_m: float = 0.25
    receiver: str | tuple = "center"
    beta0: float = 1.0
    reflectivity: str = "high"
    slab_thickness_m: float | None = None
    refractive_index_re: float | None = None
    refractive_index_im: float | None = None
    n_elements: int = 1
    steering: str = "onbody"
    tx_power_dbm: float = 0.0
    wavelength_m: float = 5e-3
    noise_figure_db: float = 9.0
    noise_psd_dbm_hz: float = -174.0
    bandwidth_hz: float = 1e9

    def __post_init__(self):
        self.validate()

    # -- derived views -------------------------------------------------
    @property
    def enclosure(self) -> Enclosure:
        return Enclosure(self.length_m, self.width_m, self.height_m)

    @property
    def receiver_xyz(self) -> tuple:
        if isinstance(self.receiver, str):
            return RECEIVER_PRESETS[self.receiver]
        return tuple(float(v) for v in self.receiver)

    @property
    def material(self) -> SlabMaterial:
        if self.reflectivity == "custom":
            return SlabMaterial(
                thickness=self.slab_thickness_m,
                refractive_index=complex(self.refractive_index_re,
                                         self.refractive_index_im),
                wavelength=self.wavelength_m)
        preset = MATERIAL_PRESETS[self.reflectivity]
        return SlabMaterial(preset.thickness, preset.refractive_index,
                            self.wavelength_m)

    @property
    def tx_power_w(self) -> float:
        return 10.0 ** ((self.tx_power_dbm - 30.0) / 10.0)

    # -- validation ----------------------------------------------------
    def validate(self):
        def need(cond, constraint):
            if not cond:
                raise ValueError(f"config violates: {constraint}")

        need(self.length_m > 0 and self.width_m > 0 and self.height_m > 0,
             "enclosure dimensions L, W, H > 0")
        need(self.k_people >= 0, "number of other people K >= 0")
        need(self.body_diameter_m > 0, "body diameter > 0")
        need(0 < self.body_height_m < self.height_m,
             "body height h_u < H (people fit under the ceiling)")
        need(self.wearable_standoff_m >= 0, "wearable standoff r_w >= 0")
        need(self.onbody_distance_m > 0, "on-body link distance r_0 > 0")
        need(self.wearable_height_low_m < self.wearable_height_high_m,
             "wearable height band low < high")
        need(self.wearable_height_high_m < self.body_height_m - self.height_m / 2,
             "wearable height band top < h_u - H/2 (below heads)")
        need(self.wearable_height_low_m > -self.height_m / 2,
             "wearable height band bottom > -H/2 (above the floor)")
        need(0.0 <= self.beta0 <= 1.0, "on-body coefficient beta0 in [0, 1]")
        if isinstance(self.receiver, str):
            need(self.receiver in RECEIVER_PRESETS,
                 f"receiver preset one of {sorted(RECEIVER_PRESETS)}")
        else:
            need(len(tuple(self.receiver)) == 3, "explicit receiver has 3 coords")
        rx = self.receiver_xyz
        half = (self.length_m / 2, self.width_m / 2, self.height_m / 2)
        need(all(abs(c) < h for c, h in zip(rx, half)),
             "receiver strictly inside the enclosure")
        need(rx[2] < self.body_height_m - self.height_m / 2,
             "receiver below head height (z_r < h_u - H/2)")
        excl = self.body_diameter_m + self.wearable_standoff_m
        need(self.length_m * self.width_m > 3.1416 * excl ** 2,
             "exclusion disk smaller than the footprint")
        need(self.reflectivity in (*MATERIAL_PRESETS, "custom"),
             f"reflectivity one of {sorted(MATERIAL_PRESETS)} or custom")
        if self.reflectivity == "custom":
            need(self.slab_thickness_m and self.slab_thickness_m > 0,
                 "custom material needs slab_thickness_m > 0")
            need(self.refractive_index_re is not None
                 and self.refractive_index_im is not None,
                 "custom material needs refractive_index_re/_im")
        need(self.n_elements >= 1, "antenna element count N >= 1")
        need(self.steering in STEERING_POLICIES,
             f"steering one of {STEERING_POLICIES}")
        need(self.wavelength_m > 0, "wavelength > 0")
        need(self.bandwidth_hz > 0, "bandwidth > 0")


EXPERIMENT_IDS = ("fig5", "fig6", "fig8a", "fig8b", "fig9", "fig10", "custom")


@dataclass(frozen=True)
class ExperimentSpec:
    """Sweep grids and run controls for one experiment."""

    experiment: str = "custom"
    replications: int = 100_000
    seed: int = 0
    mode: str = "both"  # exact | stochastic | both (blockage model)
    workers: int = 1
    k_values: tuple = (40,)
    rw_values: tuple = (0.10,)
    n_values: tuple = (1,)
    bandwidth_values: tuple = (1e9,)
    beta0_values: tuple = (0.0, 1.0)
    reflectivity_values: tuple = ("low", "high")
    location_values: tuple = ("center",)
    shadow_db_values: tuple = tuple(float(x) for x in range(0, 41, 1))
    gain_models: tuple = ("exact", "stochastic")
    blockage_for_gains: str = "stochastic"

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment id {self.experiment!r}")
        if self.replications < 1:
            raise ValueError("replication count must be >= 1")
        if self.mode not in ("exact", "stochastic", "both"):
            raise ValueError("mode must be exact, stochastic or both")
        for name in ("k_values", "rw_values", "n_values", "bandwidth_values",
                     "beta0_values", "reflectivity_values", "location_values",
                     "shadow_db_values"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must be nonempty")


_LIST_FIELDS = {"k_values", "rw_values", "n_values", "bandwidth_values",
                "beta0_values", "reflectivity_values", "location_values",
                "shadow_db_values", "gain_models"}


def _coerce(spec_cls, data: dict):
    fields = {f.name for f in spec_cls.__dataclass_fields__.values()}
    unknown = set(data) - fields
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    coerced = {}
    for key, val in data.items():
        if key in _LIST_FIELDS:
            val = tuple(val)
        elif key == "receiver" and isinstance(val, (list, tuple)):
            val = tuple(val)
        coerced[key] = val
    return spec_cls(**coerced)


def load_config(path_or_dict) -> tuple[ScenarioConfig, ExperimentSpec]:
    """Load scenario + experiment settings from JSON (or a manifest).

    A plain config may carry ``scenario`` and ``experiment`` sections;
    top-level keys not in either section are treated as scenario keys.
    Manifests written by ``emit_manifest`` round-trip through here.
    """
    if isinstance(path_or_dict, (str, Path)):
        with open(path_or_dict) as fh:
            data = json.load(fh)
    else:
        data = dict(path_or_dict)
    if "config" in data and "scenario" in data.get("config", {}):
        data = data["config"]  # manifest layout
    scenario_keys = data.get("scenario", {})
    experiment_keys = data.get("experiment", {})
    loose = {k: v for k, v in data.items()
             if k not in ("scenario", "experiment")}
    scenario = _coerce(ScenarioConfig, {**loose, **scenario_keys})
    spec = _coerce(ExperimentSpec, experiment_keys)
    return scenario, spec


def config_dict(scenario: ScenarioConfig, spec: ExperimentSpec) -> dict:
    return {"scenario": asdict(scenario), "experiment": asdict(spec)}


def config_hash(scenario: ScenarioConfig, spec: ExperimentSpec) -> str:
    blob = json.dumps(config_dict(scenario, spec), sort_keys=True,
                      default=list).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def emit_manifest(path, scenario: ScenarioConfig, spec: ExperimentSpec,
                  outputs: dict | None = None, extra: dict | None = None):
    """Write the fully resolved run description next to the outputs."""
    manifest = {
        "tool": "wearsim",
        "version": __version__,
        "config_hash": config_hash(scenario, spec),
        "seed": spec.seed,
        "mode": spec.mode,
        "config": config_dict(scenario, spec),
        "outputs": outputs or {},
    }
    if extra:
        manifest.update(extra)
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True,
                               default=list) + "\n")
    return manifest


def scenario_variant(base: ScenarioConfig, **overrides) -> ScenarioConfig:
    """Frozen-dataclass update with re-validation."""
    return replace(base, **overrides)
