"""Monte Carlo orchestration: grid sweeps, statistics, CSV artifacts.

Every realization gets its own RNG substream derived from the config
seed, so results are identical for any worker count and any execution
order; per-point aggregation always runs in realization index order.
"""

from __future__ import annotations

import concurrent.futures
import math
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from . import channel, config, fusion, training
from .channel import ChannelSynthesizer, ChannelTensor
from .config import SystemConfig, derived_params
from .fusion import EstimationMethod, WeightTable, build_weight_table, dual_band_estimates, fuse
from .linkeval import channel_gain, spectral_efficiency, svd_precoding
from .seeding import realization_seed

SWEEP_CSV_HEADER = "method,k_mm_db,snr_mm_db,mean_se,ci95_halfwidth,n_samples,excluded"

# Comparators always present in sweep artifacts.
BASELINE_METHODS = (EstimationMethod.CONVENTIONAL, EstimationMethod.PERFECT_CSI)


@dataclass
class SweepResult:
    """Spectral-efficiency statistics of one method at one grid point."""

    method: EstimationMethod
    k_mm_db: float
    snr_mm_db: float
    se_samples: np.ndarray
    mean_se: float
    ci95_halfwidth: float
    excluded_count: int

    @property
    def n_samples(self) -> int:
        return self.se_samples.size


def confidence_halfwidth(samples: np.ndarray) -> float:
    """Normal-approximation 95% halfwidth; zero for fewer than two samples."""
    n = samples.size
    if n < 2:
        return 0.0
    return float(1.96 * samples.std(ddof=1) / math.sqrt(n))


def _point_worker(args) -> np.ndarray:
    """SE per (realization, method); NaN marks an SVD failure."""
    cfg, method_values, k_mm_db, snr_mm_db, weight, seeds = args
    methods = [EstimationMethod(v) for v in method_values]
    synth = ChannelSynthesizer(cfg)
    out = np.full((len(seeds), len(methods)), np.nan)
    for row, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        real, h_tilde_m, h_hat_s = dual_band_estimates(
            cfg, k_mm_db, snr_mm_db, rng, synth)
        for col, method in enumerate(methods):
            w = weight if method is EstimationMethod.WEIGHTING else None
            h_bar = fuse(method, h_hat_s, h_tilde_m, real.h_mm, w)
            try:
                precoding = svd_precoding(h_bar, cfg.transmit_power)
            except np.linalg.LinAlgError:
                continue
            gains = channel_gain(precoding, real.h_mm)
            out[row, col] = spectral_efficiency(gains, real.noise_var_mm, precoding)
    return out


def _chunks(items: list, n: int) -> list:
    size = math.ceil(len(items) / n)
    return [items[i:i + size] for i in range(0, len(items), size)]


def evaluate_point(cfg: SystemConfig, methods, k_mm_db: float, snr_mm_db: float,
                   weight_table: WeightTable | None = None,
                   parallelism: int = 1) -> dict:
    """Evaluate several methods on identical realizations at one grid point.

    Sharing realizations across methods makes every cross-method
    comparison paired.  Returns {method: SweepResult}.
    """
    methods = [EstimationMethod(m) for m in methods]
    if not methods:
        raise ValueError("no estimation methods given")
    weight = None
    if EstimationMethod.WEIGHTING in methods:
        if weight_table is None:
            raise ValueError("the weighting method needs a weight table")
        weight = weight_table.lookup(k_mm_db, snr_mm_db)
    seeds = [realization_seed("sweep", cfg.seed, l, k_mm_db)
             for l in range(cfg.realizations)]
    method_values = [m.value for m in methods]
    if parallelism > 1 and cfg.realizations > 1:
        tasks = [(cfg, method_values, k_mm_db, snr_mm_db, weight, chunk)
                 for chunk in _chunks(seeds, parallelism)]
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as pool:
            blocks = list(pool.map(_point_worker, tasks))
        table = np.vstack(blocks)
    else:
        table = _point_worker((cfg, method_values, k_mm_db, snr_mm_db, weight, seeds))

    results = {}
    for col, method in enumerate(methods):
        column = table[:, col]
        samples = column[~np.isnan(column)]
        results[method] = SweepResult(
            method=method,
            k_mm_db=float(k_mm_db),
            snr_mm_db=float(snr_mm_db),
            se_samples=samples,
            mean_se=float(samples.mean()) if samples.size else float("nan"),
            ci95_halfwidth=confidence_halfwidth(samples),
            excluded_count=int(np.isnan(column).sum()),
        )
    return results


def run_point(cfg: SystemConfig, method, k_mm_db: float, snr_mm_db: float,
              weight_table: WeightTable | None = None,
              parallelism: int = 1) -> SweepResult:
    """Monte Carlo SE statistics for a single method at one grid point."""
    method = EstimationMethod(method)
    return evaluate_point(cfg, [method], k_mm_db, snr_mm_db,
                          weight_table, parallelism)[method]


def _format_row(r: SweepResult) -> str:
    return (f"{r.method.value},{r.k_mm_db:.2f},{r.snr_mm_db:.2f},"
            f"{r.mean_se:.4f},{r.ci95_halfwidth:.4f},{r.n_samples},{r.excluded_count}")


def run_sweep(cfg: SystemConfig, methods, output_path,
              weight_table: WeightTable | None = None,
              parallelism: int = 1, w_step: float = 0.01) -> list:
    """Sweep every configured (K, SNR) point and write one CSV row per method.

    The conventional and perfect-CSI baselines are always included.  If
    the weighting method is requested without a table, the needed table
    cells are built first from the config's own grids.
    """
    methods = [EstimationMethod(m) for m in methods]
    if not methods:
        raise ValueError("no estimation methods given")
    for baseline in BASELINE_METHODS:
        if baseline not in methods:
            methods.append(baseline)
    if EstimationMethod.WEIGHTING in methods and weight_table is None:
        weight_table = build_weight_table(cfg, w_step=w_step, parallelism=parallelism)

    by_key = {}
    for k in cfg.k_factor_mm_db_grid:
        for snr in cfg.snr_mm_db_grid:
            point = evaluate_point(cfg, methods, k, snr, weight_table, parallelism)
            for method, result in point.items():
                by_key[(method, k, snr)] = result

    rows = [SWEEP_CSV_HEADER]
    results = []
    for method in methods:
        for k in cfg.k_factor_mm_db_grid:
            for snr in cfg.snr_mm_db_grid:
                result = by_key[(method, k, snr)]
                results.append(result)
                rows.append(_format_row(result))
    with open(output_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")
    return results


def regenerate_weight_table(cfg: SystemConfig, output_path,
                            w_step: float = 0.01,
                            parallelism: int = 1) -> WeightTable:
    """Build the full weight lookup table and write it as CSV."""
    table = build_weight_table(cfg, w_step=w_step, parallelism=parallelism)
    table.to_csv(output_path)
    return table


# ---------------------------------------------------------------------------
# Invariant battery (also backs the `validate` CLI subcommand).
# ---------------------------------------------------------------------------

@dataclass
class ValidationCheck:
    name: str
    passed: bool
    detail: str


def small_validation_config(seed: int = 7) -> SystemConfig:
    """Scaled-down bandwidths: full physics, second-scale runtime."""
    base = SystemConfig()
    return config.config_from_mapping(
        {
            "sub6.bandwidth_hz": "720e3",       # 12 subcarriers
            "mmwave.bandwidth_hz": "7.2e6",     # 120 subcarriers
            "realizations": "40",
            "seed": str(seed),
        },
        base=base,
    )


def _random_tensor(rng, n, m_rx, m_tx, band="mmwave") -> ChannelTensor:
    data = rng.standard_normal((n, m_rx, m_tx)) + 1j * rng.standard_normal((n, m_rx, m_tx))
    return ChannelTensor(band=band, data=data)


def validate(cfg: SystemConfig | None = None) -> list:
    """Run the fast invariant suite; returns one ValidationCheck per item."""
    if cfg is None:
        cfg = small_validation_config()
    d = derived_params(cfg)
    rng = np.random.default_rng(cfg.seed)
    checks: list[ValidationCheck] = []

    def record(name: str, error: float, bound: float):
        checks.append(ValidationCheck(
            name, bool(error <= bound), f"error {error:.3e} vs bound {bound:.1e}"))

    # SVD factorization quality, semi-unitarity, and power constraint.
    tensor = _random_tensor(rng, 16, cfg.m_rx, cfg.m_tx)
    precoding = svd_precoding(tensor, cfg.transmit_power)
    rebuilt = (precoding.combiner
               * precoding.singular_values[:, None, :]) @ precoding.precoder.conj().transpose(0, 2, 1)
    record("svd_reconstruction",
           float(np.linalg.norm(rebuilt - tensor.data) / np.linalg.norm(tensor.data)),
           1e-10)
    eye = np.eye(precoding.n_streams)
    qhq = precoding.combiner.conj().transpose(0, 2, 1) @ precoding.combiner
    fhf = precoding.precoder.conj().transpose(0, 2, 1) @ precoding.precoder
    record("semi_unitarity",
           float(max(np.abs(qhq - eye).max(), np.abs(fhf - eye).max())), 1e-10)
    scaled = np.sqrt(precoding.stream_power) * precoding.precoder
    power = np.sum(np.abs(scaled) ** 2, axis=(1, 2))
    record("power_constraint",
           float(np.abs(power - cfg.transmit_power).max()), 1e-10)

    # Phase rotation must preserve entrywise magnitudes.
    distances = config.build_distance_matrix(cfg)
    rotated = fusion.phase_rotate(tensor, distances, d.lambda_s, d.lambda_m)
    record("rotation_magnitude",
           float(np.abs(np.abs(rotated.data) - np.abs(tensor.data)).max()), 1e-12)

    # Effectively noiseless line-of-sight pipeline: translating recovers
    # the true mmWave channel.
    rng_los = np.random.default_rng(3)
    real, _, h_hat_s = dual_band_estimates(cfg, 160.0, 600.0, rng_los)
    record("los_translation",
           float(np.linalg.norm(h_hat_s.data - real.h_mm.data)
                 / np.linalg.norm(real.h_mm.data)),
           1e-6)

    # Weighting endpoints reproduce their counterparts bit for bit.
    a = _random_tensor(rng, 12, cfg.m_rx, cfg.m_tx)
    b = _random_tensor(rng, 12, cfg.m_rx, cfg.m_tx)
    truth = _random_tensor(rng, 12, cfg.m_rx, cfg.m_tx)
    endpoint_ok = (
        np.array_equal(fuse(EstimationMethod.WEIGHTING, a, b, truth, 0.0).data,
                       fuse(EstimationMethod.CONVENTIONAL, a, b, truth).data)
        and np.array_equal(fuse(EstimationMethod.WEIGHTING, a, b, truth, 1.0).data,
                           fuse(EstimationMethod.TRANSLATING, a, b, truth).data)
        and np.array_equal(fuse(EstimationMethod.WEIGHTING, a, b, truth, 0.5).data,
                           fuse(EstimationMethod.AVERAGING, a, b, truth).data))
    checks.append(ValidationCheck("fusion_endpoints", endpoint_ok,
                                  "bit-identical at w in {0, 0.5, 1}"))

    # Noiseless training on a frequency-flat channel is recovered exactly.
    flat_matrix = rng.standard_normal((cfg.m_rx, cfg.m_tx)) \
        + 1j * rng.standard_normal((cfg.m_rx, cfg.m_tx))
    flat = ChannelTensor("mmwave", np.broadcast_to(flat_matrix, (d.n_mm, *flat_matrix.shape)).copy())
    plan = training.make_pilot_plan(d.n_mm, cfg.m_tx, rng, cfg.transmit_power)
    y = training.observe_training(flat, plan, 0.0, rng)
    h_est = training.ls_estimate(y, plan, band="mmwave")
    record("flat_ls_recovery",
           float(np.abs(h_est.data - flat.data).max()), 1e-10)

    # Rician split: the two power scales always sum to one.
    k_grid = 10.0 ** (np.array(cfg.k_factor_mm_db_grid) / 10.0)
    split_err = max(abs(channel.rician_scaling(k)[0] ** 2
                        + channel.rician_scaling(k)[1] ** 2 - 1.0) for k in k_grid)
    record("rician_power_split", float(split_err), 1e-15)

    # Cross-band SNR and noise-variance bookkeeping.
    snr_ok = all(
        config.snr_sub6_linear(cfg, g) == d.alpha * d.beta * 10.0 ** (g / 10.0)
        for g in cfg.snr_mm_db_grid)
    real = channel.realize_channels(cfg, 0.0, 0.0, np.random.default_rng(1))
    noise_ok = real.noise_var_sub6 == real.noise_var_mm / (d.alpha * d.beta)
    checks.append(ValidationCheck("snr_band_relation", snr_ok and noise_ok,
                                  "sub6 SNR = alpha*beta*mmWave SNR, exact"))

    # Unit ensemble power of synthesized channel entries.
    synth = ChannelSynthesizer(cfg)
    draws = 700
    acc = 0.0
    power_rng = np.random.default_rng(11)
    for _ in range(draws):
        r = synth.realize(3.0, 0.0, power_rng)
        acc += float(np.mean(np.abs(r.h_mm.data[0]) ** 2))
    record("ensemble_unit_power", abs(acc / draws - 1.0), 0.05)

    # Pilot combs partition the subcarrier set.
    plan = training.make_pilot_plan(d.n_sub6, cfg.m_tx, rng)
    combs = [set(plan.pilot_indices(t).tolist()) for t in range(cfg.m_tx)]
    union = set().union(*combs)
    disjoint = sum(len(c) for c in combs) == len(union)
    checks.append(ValidationCheck(
        "pilot_partition",
        disjoint and union == set(range(d.n_sub6)),
        "combs are disjoint and cover all subcarriers"))

    # Byte-identical sweep artifacts on reruns.
    tiny = config.config_from_mapping({"realizations": "6"}, base=cfg)
    with tempfile.TemporaryDirectory() as tmp:
        paths = [os.path.join(tmp, f"sweep{i}.csv") for i in (0, 1)]
        for path in paths:
            run_sweep(tiny, [EstimationMethod.TRANSLATING], path)
        with open(paths[0], "rb") as fh0, open(paths[1], "rb") as fh1:
            identical = fh0.read() == fh1.read()
    checks.append(ValidationCheck("sweep_determinism", identical,
                                  "identical seed implies identical CSV bytes"))
    return checks


def run_validation(cfg: SystemConfig | None = None, stream=None) -> bool:
    """Print one line per invariant check; True when everything passed."""
    import sys
    stream = stream or sys.stdout
    started = time.perf_counter()
    checks = validate(cfg)
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status}  {check.name}: {check.detail}", file=stream)
    elapsed = time.perf_counter() - started
    ok = all(c.passed for c in checks)
    print(f"{'OK' if ok else 'FAILED'}: {sum(c.passed for c in checks)}/{len(checks)} "
          f"checks passed in {elapsed:.1f}s", file=stream)
    return ok
