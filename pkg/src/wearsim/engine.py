"""Vectorized Monte Carlo engine.

Replications are evaluated in fixed-size chunks; each chunk owns three
independent substreams derived from ``(seed, point_key, chunk_index)``:
stream 0 samples the scene geometry, stream 1 the stochastic blockage
draws, stream 2 the stochastic transmit-gain draws.  Exact and
stochastic modes therefore see identical scenes, and results are
byte-identical for any worker count because chunking depends only on
the configuration and results merge in chunk order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import antenna, blockage_exact, blockage_stochastic, em, geometry
from .blockage_stochastic import BlockageParams, ClampStats
from .config import ScenarioConfig, scenario_variant
from .scenario import SceneBatch, sample_scenes, steer_reference


@dataclass(frozen=True)
class EngineOptions:
    """What one engine run computes."""

    blockage_mode: str = "stochastic"   # exact | stochastic
    gain_mode: str = "exact"            # interferer transmit gains
    policies: tuple = ()                # steering policies; () -> config's
    materials: tuple = ()               # reflectivity names; () -> config's
    collect: str = "sinr"               # sinr | blockage


@dataclass
class Diagnostics:
    tx0_resamples: int = 0
    degenerate_polarization: int = 0
    clamps: ClampStats = field(default_factory=ClampStats)

    def merge(self, other: "Diagnostics"):
        self.tx0_resamples += other.tx0_resamples
        self.degenerate_polarization += other.degenerate_polarization
        self.clamps.merge(other.clamps)

    def as_dict(self) -> dict:
        return {"tx0_resamples": self.tx0_resamples,
                "degenerate_polarization": self.degenerate_polarization,
                "clamps": self.clamps.as_dict()}


def chunk_rows(k_people: int) -> int:
    """Replications per chunk, sized against the K^2 pairwise tests."""
    return int(min(8192, max(128, 2_500_000 // ((k_people + 1) ** 2))))


def _streams(seed: int, point_key: int, chunk_index: int):
    seqs = [np.random.SeedSequence(entropy=seed,
                                   spawn_key=(point_key, chunk_index, s))
            for s in range(3)]
    return [np.random.default_rng(s) for s in seqs]


# ----------------------------------------------------------------------
# geometry bundles

@dataclass
class LinkGeometry:
    """Direct plus six image links from one set of transmitters."""

    r: np.ndarray          # (..., ) direct 3-D length
    r_xy: np.ndarray       # (..., ) direct planar length
    r_img: np.ndarray      # (..., 6)
    r_img_xy: np.ndarray   # (..., 6) planar length to the image
    theta: np.ndarray      # (..., 6) incidence angles
    ray_el: np.ndarray     # (..., ) orientation of tx seen from rx
    ray_az: np.ndarray
    ray_el_img: np.ndarray  # (..., 6)
    ray_az_img: np.ndarray


def link_geometry(positions, rx, enc) -> LinkGeometry:
    images = geometry.image_points(positions, enc, check=False)
    r, r_img = geometry.link_lengths(positions, rx, images=images)
    r_xy = geometry.planar_distance(positions, rx)
    r_img_xy = geometry.planar_distance(images, rx)
    offset = np.abs(images[..., np.arange(6), geometry.MIRROR_AXIS]
                    - np.asarray(rx)[..., geometry.MIRROR_AXIS])
    theta = np.arccos(np.clip(offset / r_img, -1.0, 1.0))
    ray_el, ray_az = geometry.ray_orientation(positions, rx)
    ray_el_img, ray_az_img = geometry.ray_orientation(images, rx)
    return LinkGeometry(r, r_xy, r_img, r_img_xy, theta,
                        ray_el, ray_az, ray_el_img, ray_az_img)


# ----------------------------------------------------------------------
# blockage

def _ceiling_capsule_lengths(cfg: ScenarioConfig, geom: LinkGeometry, z_tx, z_rx):
    head = cfg.body_height_m - cfg.height_m / 2.0
    tan5 = np.tan(geom.theta[..., geometry.CEILING])
    return (head - z_rx) * tan5, (head - z_tx) * tan5


def exact_blockage(cfg: ScenarioConfig, scene: SceneBatch, geom: LinkGeometry):
    """Indicators (1/0) for the K interference links, shape (n, K, 7).

    Path axis order: direct, then surfaces 0..5.
    """
    enc = cfg.enclosure
    d = cfg.body_diameter_m
    rx_xy = scene.rx[:2]
    tx_xy = scene.positions[..., :2] - rx_xy
    circles_abs = scene.all_circles_xy()
    circles = circles_abs - rx_xy

    pair = blockage_exact.occlusion_matrix(tx_xy, circles, d)
    beta_dir = (~pair.any(axis=-1)).astype(float)

    a_len, b_len = _ceiling_capsule_lengths(cfg, geom,
                                            scene.positions[..., 2],
                                            scene.rx[2])
    beta_ceil = blockage_exact.ceiling_blocked(
        tx_xy, circles, pair, a_len, b_len, d).astype(float)

    beta = np.empty(tx_xy.shape[:-1] + (7,))
    beta[..., 0] = beta_dir
    zero_rx = np.zeros(2)
    for wall in range(4):
        crossing = _wall_crossing(scene.positions[..., :2], scene.rx, enc,
                                  wall)
        beta[..., 1 + wall] = blockage_exact.wall_path_blocked(
            zero_rx, tx_xy, crossing, circles, d).astype(float)
    beta[..., 1 + geometry.CEILING] = beta_ceil
    beta[..., 1 + geometry.FLOOR] = beta_dir
    return beta


def _wall_crossing(tx_xy_abs, rx, enc, wall):
    """Bounce point of the wall path, in receiver-relative planar coords."""
    axis = int(geometry.MIRROR_AXIS[wall])
    plane = geometry.MIRROR_SIGN[wall] * enc.dims[axis] / 2.0
    img_rel = geometry.mirror_xy(tx_xy_abs, enc, wall) - rx[:2]
    t = (plane - rx[axis]) / img_rel[..., axis]
    return t[..., None] * img_rel


def exact_signal_wall_blockage(cfg: ScenarioConfig, scene: SceneBatch):
    """Indicators for the four wall bounces of the intended signal, (n, 4)."""
    enc = cfg.enclosure
    d = cfg.body_diameter_m
    rx_xy = scene.rx[:2]
    circles = scene.all_circles_xy() - rx_xy
    out = np.empty((scene.n, 4))
    tx0_xy = scene.tx0[:, None, :2]
    tx0_rel = tx0_xy - rx_xy
    zero_rx = np.zeros(2)
    for wall in range(4):
        crossing = _wall_crossing(tx0_xy, scene.rx, enc, wall)
        out[:, wall] = blockage_exact.wall_path_blocked(
            zero_rx, tx0_rel, crossing, circles, d)[:, 0]
    return out


def stochastic_blockage(cfg: ScenarioConfig, scene: SceneBatch,
                        geom: LinkGeometry, rng, stats: ClampStats):
    """Bernoulli draws for the K interference links, shape (n, K, 7).

    Draw order: the coupled (direct, ceiling) pair first, then the four
    wall bounces in surface order.
    """
    params = BlockageParams(cfg.body_diameter_m, cfg.wearable_standoff_m,
                            cfg.length_m * cfg.width_m)
    k = cfg.k_people
    a_len, b_len = _ceiling_capsule_lengths(cfg, geom,
                                            scene.positions[..., 2],
                                            scene.rx[2])
    beta_dir, beta_ceil = blockage_stochastic.sample_direct_and_ceiling(
        a_len, b_len, geom.r_xy, params, k, rng, stats)
    p_wall = blockage_stochastic.p_direct_blocked(
        geom.r_img_xy[..., :4], params, k, stats)
    beta_wall = (rng.uniform(size=p_wall.shape) >= p_wall).astype(float)
    beta = np.empty(beta_dir.shape + (7,))
    beta[..., 0] = beta_dir
    beta[..., 1:5] = beta_wall
    beta[..., 1 + geometry.CEILING] = beta_ceil
    beta[..., 1 + geometry.FLOOR] = beta_dir
    return beta


def stochastic_signal_wall_blockage(cfg: ScenarioConfig, geom0: LinkGeometry,
                                    rng, stats: ClampStats):
    p = blockage_stochastic.p_signal_wall_blocked(
        geom0.r_img_xy[..., :4], geom0.r_xy[..., None],
        BlockageParams(cfg.body_diameter_m, cfg.wearable_standoff_m,
                       cfg.length_m * cfg.width_m),
        cfg.k_people, stats)
    return (rng.uniform(size=p.shape) >= p).astype(float)


# ----------------------------------------------------------------------
# gains and polarization

def _pad(arr, target_ndim):
    """Append singleton axes so ``arr`` broadcasts over trailing dims."""
    arr = np.asarray(arr)
    return arr.reshape(arr.shape + (1,) * (target_ndim - arr.ndim))


def _receive_gains(pattern, rx_az, rx_el, geom: LinkGeometry):
    direct = antenna.gain(pattern, antenna.receive_off_axis(
        _pad(rx_az, geom.ray_az.ndim), _pad(rx_el, geom.ray_el.ndim),
        geom.ray_az, geom.ray_el))
    img = antenna.gain(pattern, antenna.receive_off_axis(
        _pad(rx_az, geom.ray_az_img.ndim), _pad(rx_el, geom.ray_el_img.ndim),
        geom.ray_az_img, geom.ray_el_img))
    return direct, img


def _transmit_gains_exact(pattern, beam_az, beam_el, geom: LinkGeometry):
    direct = antenna.gain(pattern, antenna.transmit_off_axis(
        _pad(beam_az, geom.ray_az.ndim), _pad(beam_el, geom.ray_el.ndim),
        geom.ray_az, geom.ray_el))
    surf = np.arange(6)
    ph_az, ph_el = antenna.phantom_beam(_pad(beam_az, geom.ray_az_img.ndim),
                                        _pad(beam_el, geom.ray_el_img.ndim),
                                        surf)
    img = antenna.gain(pattern, antenna.transmit_off_axis(
        ph_az, ph_el, geom.ray_az_img, geom.ray_el_img))
    return direct, img


def _transmit_gains_stochastic(pattern, p_hit, shape, rng):
    draws = rng.uniform(size=shape + (7,))
    g = np.where(draws < p_hit, pattern.main_gain, pattern.side_gain)
    return g[..., 0], g[..., 1:]


def _polarization(pol_az, pol_el, geom: LinkGeometry):
    alpha = em.polarization_angle(pol_az, pol_el, geom.ray_az, geom.ray_el)
    alpha_img = em.polarization_angle(pol_az[..., None], pol_el[..., None],
                                      geom.ray_az_img, geom.ray_el_img)
    degen = (em.polarization_degenerate(pol_az, pol_el,
                                        geom.ray_az, geom.ray_el).sum()
             + em.polarization_degenerate(pol_az[..., None], pol_el[..., None],
                                          geom.ray_az_img,
                                          geom.ray_el_img).sum())
    return alpha, alpha_img, int(degen)


# ----------------------------------------------------------------------
# coherent terms

def _path_vectors(geom: LinkGeometry, beta, g_rx, g_rx_img, g_tx, g_tx_img,
                  alpha, alpha_img, material, wavelength):
    """Direct term (..., 2) and summed reflected term (..., 2), complex."""
    surf = np.arange(6)
    gamma1, gamma2 = em.reflection_diag(surf, geom.theta, material)
    amp_dir = beta[..., 0] * np.sqrt(g_rx * g_tx) / geom.r
    direct = amp_dir[..., None] * em.polarization_vector(alpha)
    amp_img = beta[..., 1:] * np.sqrt(g_rx_img * g_tx_img) / geom.r_img
    phase = np.exp(-2j * np.pi * (geom.r_img - geom.r[..., None])
                   / wavelength)
    coeff = amp_img * phase
    refl = np.stack([coeff * gamma1 * np.cos(alpha_img),
                     coeff * gamma2 * np.sin(alpha_img)], axis=-1)
    return direct.astype(complex), refl.sum(axis=-2)


def _power(tx_power, wavelength, vec2):
    return (tx_power * (wavelength / (4.0 * np.pi)) ** 2
            * np.sum(np.abs(vec2) ** 2, axis=-1))


def _resolve_material(cfg: ScenarioConfig, name: str) -> em.SlabMaterial:
    if name in em.MATERIAL_PRESETS:
        preset = em.MATERIAL_PRESETS[name]
        return em.SlabMaterial(preset.thickness, preset.refractive_index,
                               cfg.wavelength_m)
    return cfg.material


# ----------------------------------------------------------------------
# chunk evaluation

def simulate_chunk(cfg: ScenarioConfig, opts: EngineOptions, n: int,
                   seed: int, point_key: int, chunk_index: int) -> dict:
    rng_scene, rng_block, rng_gain = _streams(seed, point_key, chunk_index)
    scene = sample_scenes(cfg, rng_scene, n)
    enc = cfg.enclosure
    diag = Diagnostics(tx0_resamples=scene.tx0_resamples)
    geom = link_geometry(scene.positions, scene.rx, enc)

    if opts.collect == "blockage":
        return _collect_blockage(cfg, scene, geom, diag)

    geom0 = link_geometry(scene.tx0, scene.rx, enc)

    # blockage indicators
    if opts.blockage_mode == "exact":
        beta = exact_blockage(cfg, scene, geom)
        beta0_wall = exact_signal_wall_blockage(cfg, scene)
    else:
        beta = stochastic_blockage(cfg, scene, geom, rng_block, diag.clamps)
        beta0_wall = stochastic_signal_wall_blockage(cfg, geom0, rng_block,
                                                     diag.clamps)
    beta_sig = np.empty((scene.n, 7))
    beta_sig[:, 0] = 1.0  # on-body coefficient applied downstream
    beta_sig[:, 1:5] = beta0_wall
    beta_sig[:, 1 + geometry.CEILING] = 1.0
    beta_sig[:, 1 + geometry.FLOOR] = 1.0

    pattern = antenna.upa_pattern(cfg.n_elements)
    if opts.gain_mode == "stochastic" and not pattern.is_isotropic:
        p_hit = antenna.mainlobe_hit_probability(cfg.n_elements)
        g_tx, g_tx_img = _transmit_gains_stochastic(
            pattern, p_hit, scene.positions.shape[:-1], rng_gain)
    else:
        g_tx, g_tx_img = _transmit_gains_exact(pattern, scene.beam_az,
                                               scene.beam_el, geom)

    alpha, alpha_img, degen = _polarization(scene.pol_az, scene.pol_el, geom)
    alpha0, alpha0_img, degen0 = _polarization(scene.pol0_az, scene.pol0_el,
                                               geom0)
    diag.degenerate_polarization += degen + degen0

    policies = opts.policies or (cfg.steering,)
    materials = opts.materials or (cfg.reflectivity,)
    out = {"diagnostics": diag, "n": n}

    for policy in policies:
        pcfg = scenario_variant(cfg, steering=policy)
        rx_az, rx_el, tx0_az, tx0_el = steer_reference(pcfg, scene)
        g_rx, g_rx_img = _receive_gains(pattern, rx_az, rx_el, geom)
        g_rx0, g_rx0_img = _receive_gains(pattern, rx_az, rx_el, geom0)
        g_tx0, g_tx0_img = _transmit_gains_exact(pattern, tx0_az, tx0_el,
                                                 geom0)

        for mat_name in materials:
            material = _resolve_material(cfg, mat_name)
            i_dir, i_refl = _path_vectors(geom, beta, g_rx, g_rx_img,
                                          g_tx, g_tx_img, alpha, alpha_img,
                                          material, cfg.wavelength_m)
            p_k = _power(cfg.tx_power_w, cfg.wavelength_m, i_dir + i_refl)
            interference = p_k.sum(axis=-1)
            s_dir, s_refl = _path_vectors(geom0, beta_sig, g_rx0, g_rx0_img,
                                          g_tx0, g_tx0_img, alpha0, alpha0_img,
                                          material, cfg.wavelength_m)
            out[(policy, mat_name)] = {
                "signal_direct": s_dir,
                "signal_reflected": s_refl,
                "interference": interference,
            }
    return out


def _collect_blockage(cfg, scene, geom, diag):
    """Exact indicator sums and stochastic probability sums per path class."""
    beta = exact_blockage(cfg, scene, geom)
    geom0 = link_geometry(scene.tx0, scene.rx, cfg.enclosure)
    beta_sig = exact_signal_wall_blockage(cfg, scene)

    params = BlockageParams(cfg.body_diameter_m, cfg.wearable_standoff_m,
                            cfg.length_m * cfg.width_m)
    k = cfg.k_people
    a_len, b_len = _ceiling_capsule_lengths(cfg, geom,
                                            scene.positions[..., 2],
                                            scene.rx[2])
    p_dir = blockage_stochastic.p_direct_blocked(geom.r_xy, params, k,
                                                 diag.clamps)
    p_wall = blockage_stochastic.p_direct_blocked(geom.r_img_xy[..., :4],
                                                  params, k, diag.clamps)
    p_ceil = blockage_stochastic.p_ceiling_blocked(a_len, b_len, params, k,
                                                   diag.clamps)
    p_sig = blockage_stochastic.p_signal_wall_blocked(
        geom0.r_img_xy[..., :4], geom0.r_xy[..., None], params, k,
        diag.clamps)

    return {
        "diagnostics": diag,
        "n": scene.n,
        "links": beta.shape[0] * beta.shape[1],
        "signal_links": beta_sig.size,
        "exact_blocked": {
            "direct": float((1.0 - beta[..., 0]).sum()),
            "wall": float((1.0 - beta[..., 1:5]).mean(axis=-1).sum()),
            "ceiling": float((1.0 - beta[..., 1 + geometry.CEILING]).sum()),
            "floor": float((1.0 - beta[..., 1 + geometry.FLOOR]).sum()),
            "signal_wall": float((1.0 - beta_sig).mean(axis=-1).sum()),
        },
        "stoch_prob": {
            "direct": float(p_dir.sum()),
            "wall": float(p_wall.mean(axis=-1).sum()),
            "ceiling": float(p_ceil.sum()),
            "floor": float(p_dir.sum()),
            "signal_wall": float(p_sig.mean(axis=-1).sum()),
        },
    }


# ----------------------------------------------------------------------
# chunked execution

def run(cfg: ScenarioConfig, opts: EngineOptions, replications: int,
        seed: int, point_key: int = 0, workers: int = 1) -> dict:
    """Evaluate ``replications`` scenes, merged deterministically.

    For ``collect='sinr'`` the result maps (policy, material) to
    concatenated signal terms and interference totals; for
    ``collect='blockage'`` it carries blocked-link counts and
    probability sums per path class.
    """
    rows = chunk_rows(cfg.k_people)
    tasks = []
    start = 0
    index = 0
    while start < replications:
        size = min(rows, replications - start)
        tasks.append((index, size))
        start += size
        index += 1

    def work(task):
        idx, size = task
        return simulate_chunk(cfg, opts, size, seed, point_key, idx)

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    return _merge(results, opts)


def _merge(results, opts: EngineOptions) -> dict:
    merged = {"n": sum(r["n"] for r in results)}
    diag = Diagnostics()
    for r in results:
        diag.merge(r["diagnostics"])
    merged["diagnostics"] = diag
    if opts.collect == "blockage":
        merged["links"] = sum(r["links"] for r in results)
        merged["signal_links"] = sum(r["signal_links"] for r in results)
        for key in ("exact_blocked", "stoch_prob"):
            merged[key] = {
                path: sum(r[key][path] for r in results)
                for path in results[0][key]
            }
        return merged
    for key in results[0]:
        if not isinstance(key, tuple):
            continue
        merged[key] = {
            name: np.concatenate([r[key][name] for r in results])
            for name in results[0][key]
        }
    return merged


def sinr_samples(point: dict, beta0: float, noise_w: float,
                 tx_power: float, wavelength: float) -> np.ndarray:
    """Linear SINR per scene from merged signal terms and interference."""
    vec = beta0 * point["signal_direct"] + point["signal_reflected"]
    p0 = _power(tx_power, wavelength, vec)
    return p0 / (noise_w + point["interference"])
