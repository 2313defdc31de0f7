"""Cross-band estimate fusion: phase rotation, combining rules, weight table.

The sub-6 GHz estimate, averaged over its band and extended to the
mmWave subcarrier grid, is rotated entrywise by exp(j*2*pi*D*xi) with
xi = 1/lambda_sub6 - 1/lambda_mmwave, which aligns its line-of-sight
component with the mmWave one.  The rotated estimate is then combined
with the in-band mmWave estimate by one of several rules; the weighting
rule draws its convex coefficient from a lookup table built offline by
minimizing the empirical channel estimation error.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelRealization, ChannelSynthesizer, ChannelTensor
from .config import SystemConfig
from .seeding import realization_rng
from .training import band_average_extrapolate, ls_estimate, make_pilot_plan, observe_training


class EstimationMethod(str, Enum):
    """How the operative mmWave channel estimate is formed."""

    CONVENTIONAL = "conventional"   # in-band mmWave estimate only
    PERFECT_CSI = "perfect_csi"     # true channel (upper bound)
    TRANSLATING = "translating"     # rotated sub-6 estimate only
    AVERAGING = "averaging"         # midpoint of the two estimates
    WEIGHTING = "weighting"         # convex combination, table-driven weight

    def __str__(self) -> str:  # argparse/CSV friendliness
        return self.value


def phase_rotate(h_est_sub6_flat: ChannelTensor, distances: np.ndarray,
                 lambda_s: float, lambda_m: float) -> ChannelTensor:
    """Rotate a band-extended sub-6 estimate onto the mmWave carrier phase.

    Entry (r, t) of every subcarrier matrix is multiplied by
    exp(j*2*pi*d_rt*(1/lambda_s - 1/lambda_m)); magnitudes are
    untouched.
    """
    distances = np.asarray(distances, dtype=float)
    if h_est_sub6_flat.data.shape[1:] != distances.shape:
        raise ValueError("distance matrix does not match tensor dimensions")
    inv_wavelength_diff = 1.0 / lambda_s - 1.0 / lambda_m
    rotor = np.exp(2j * np.pi * distances * inv_wavelength_diff)
    return ChannelTensor(band=h_est_sub6_flat.band,
                         data=h_est_sub6_flat.data * rotor[None, :, :])


def fuse(method: EstimationMethod, h_hat_s: ChannelTensor,
         h_tilde_m: ChannelTensor, h_true_m: ChannelTensor,
         w: float | None = None) -> ChannelTensor:
    """Form the operative mmWave estimate from the available inputs.

    ``w`` is the weight on the rotated sub-6 estimate and must be given
    exactly for the weighting method.  w=0, 0.5 and 1 reproduce the
    conventional, averaging and translating outputs bit for bit.
    """
    shapes = {h_hat_s.data.shape, h_tilde_m.data.shape, h_true_m.data.shape}
    if len(shapes) != 1:
        raise ValueError(f"estimate tensors disagree in shape: {shapes}")
    if method is EstimationMethod.WEIGHTING:
        if w is None:
            raise ValueError("weighting requires a weight")
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"weight {w!r} outside [0, 1]")
    elif w is not None:
        raise ValueError(f"weight given but method is {method}")

    if method is EstimationMethod.CONVENTIONAL:
        data = h_tilde_m.data
    elif method is EstimationMethod.PERFECT_CSI:
        data = h_true_m.data
    elif method is EstimationMethod.TRANSLATING:
        data = h_hat_s.data
    elif method is EstimationMethod.AVERAGING:
        data = (h_hat_s.data + h_tilde_m.data) / 2.0
    elif method is EstimationMethod.WEIGHTING:
        if w == 0.0:
            data = h_tilde_m.data
        elif w == 1.0:
            data = h_hat_s.data
        else:
            data = w * h_hat_s.data + (1.0 - w) * h_tilde_m.data
    else:  # pragma: no cover
        raise ValueError(f"unknown method {method!r}")
    return ChannelTensor(band="mmwave", data=data)


@dataclass
class WeightTable:
    """Grid map (K dB, SNR dB) -> weight on the rotated sub-6 estimate."""

    k_grid_db: np.ndarray
    snr_grid_db: np.ndarray
    w: np.ndarray  # shape (len(k_grid_db), len(snr_grid_db)), values in [0, 1]

    def __post_init__(self):
        self.k_grid_db = np.asarray(self.k_grid_db, dtype=float)
        self.snr_grid_db = np.asarray(self.snr_grid_db, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if self.w.shape != (self.k_grid_db.size, self.snr_grid_db.size):
            raise ValueError("weight matrix shape does not match the grids")
        if np.any(np.diff(self.k_grid_db) <= 0) or np.any(np.diff(self.snr_grid_db) <= 0):
            raise ValueError("grids must be strictly increasing")
        if np.any(self.w < 0) or np.any(self.w > 1):
            raise ValueError("weights must lie in [0, 1]")

    def lookup(self, k_mm_db: float, snr_mm_db: float) -> float:
        """Exact-match lookup; off-grid points are an error, never interpolated."""
        ki = np.nonzero(self.k_grid_db == float(k_mm_db))[0]
        gi = np.nonzero(self.snr_grid_db == float(snr_mm_db))[0]
        if ki.size != 1 or gi.size != 1:
            raise ValueError(
                f"({k_mm_db} dB, {snr_mm_db} dB) is not a weight-table grid point")
        return float(self.w[ki[0], gi[0]])

    def to_csv(self, path) -> None:
        """Write the table with SNR columns and one K-factor row per line."""
        lines = ["k_mm_db," + ",".join(f"{g:.2f}" for g in self.snr_grid_db)]
        for i, k in enumerate(self.k_grid_db):
            lines.append(f"{k:.2f}," + ",".join(f"{v:.2f}" for v in self.w[i]))
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "WeightTable":
        with open(path, "r", encoding="ascii") as fh:
            rows = [line.strip().split(",") for line in fh if line.strip()]
        if len(rows) < 2:
            raise ValueError("weight table file has no data rows")
        snr = np.array([float(v) for v in rows[0][1:]])
        k = np.array([float(r[0]) for r in rows[1:]])
        w = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
        return cls(k_grid_db=k, snr_grid_db=snr, w=w)


def dual_band_estimates(
    cfg: SystemConfig, k_mm_db: float, snr_mm_db: float,
    rng: np.random.Generator, synth: ChannelSynthesizer | None = None,
) -> tuple[ChannelRealization, ChannelTensor, ChannelTensor]:
    """Run one realization through training in both bands.

    Returns (realization, in-band mmWave estimate, rotated band-extended
    sub-6 estimate).  The generator is consumed in a fixed order --
    sub-6 taps, mmWave taps, sub-6 pilots, sub-6 noise, mmWave pilots,
    mmWave noise -- which is part of the reproducibility contract.
    """
    if synth is None:
        synth = ChannelSynthesizer(cfg)
    real = synth.realize(k_mm_db, snr_mm_db, rng)

    plan_s = make_pilot_plan(synth.derived.n_sub6, cfg.m_tx, rng, cfg.transmit_power)
    y_s = observe_training(real.h_sub6, plan_s, real.noise_var_sub6, rng)
    h_tilde_s = ls_estimate(y_s, plan_s, band="sub6")

    plan_m = make_pilot_plan(synth.derived.n_mm, cfg.m_tx, rng, cfg.transmit_power)
    y_m = observe_training(real.h_mm, plan_m, real.noise_var_mm, rng)
    h_tilde_m = ls_estimate(y_m, plan_m, band="mmwave")

    flat = band_average_extrapolate(h_tilde_s, synth.derived.n_mm)
    h_hat_s = phase_rotate(flat, synth.distances,
                           synth.derived.lambda_s, synth.derived.lambda_m)
    return real, h_tilde_m, h_hat_s


def make_weight_grid(w_step: float) -> np.ndarray:
    """Candidate weights {0, w_step, ..., 1}; w_step must divide 1 evenly."""
    if w_step <= 0 or w_step > 1:
        raise ValueError("w_step must lie in (0, 1]")
    steps = round(1.0 / w_step)
    if abs(steps * w_step - 1.0) > 1e-9:
        raise ValueError(f"w_step {w_step!r} does not divide 1 evenly")
    return np.arange(steps + 1) / steps


def weight_mse_curve(cfg: SystemConfig, k_mm_db: float, snr_mm_db: float,
                     w_grid: np.ndarray, realizations: int,
                     synth: ChannelSynthesizer | None = None) -> np.ndarray:
    """Empirical channel-error curve E(w) over candidate weights.

    For every realization the fused-estimate error equals
    ``B + w * Delta`` with Delta the difference of the two estimates and
    B the in-band estimate error, so the average squared Frobenius
    error is a quadratic in w.  Accumulating its three coefficients over
    realizations evaluates every candidate on the identical sample set
    (a paired comparison).  Realization seeds come from the
    "weight-table" substream of cfg.seed, so the curve is reproducible.
    """
    if synth is None:
        synth = ChannelSynthesizer(cfg)
    quad = lin = const = 0.0
    for l in range(realizations):
        rng = realization_rng("weight-table", cfg.seed, l, k_mm_db)
        real, h_tilde_m, h_hat_s = dual_band_estimates(
            cfg, k_mm_db, snr_mm_db, rng, synth)
        delta = h_hat_s.data - h_tilde_m.data
        base_err = h_tilde_m.data - real.h_mm.data
        quad += np.sum(delta.real ** 2 + delta.imag ** 2)
        lin += np.sum(delta.real * base_err.real + delta.imag * base_err.imag)
        const += np.sum(base_err.real ** 2 + base_err.imag ** 2)
    w = np.asarray(w_grid, dtype=float)
    scale = realizations * synth.derived.n_mm
    return (w ** 2 * quad + 2.0 * w * lin + const) / scale


def _weight_cell_worker(args) -> tuple[int, int, float]:
    cfg, ki, gi, k_db, snr_db, w_step, realizations = args
    w_grid = make_weight_grid(w_step)
    curve = weight_mse_curve(cfg, k_db, snr_db, w_grid, realizations)
    return ki, gi, float(w_grid[int(np.argmin(curve))])


def build_weight_table(cfg: SystemConfig,
                       k_grid_db=None, snr_grid_db=None,
                       w_step: float = 0.01,
                       realizations: int | None = None,
                       parallelism: int = 1) -> WeightTable:
    """Select the error-minimizing weight for every (K, SNR) grid cell.

    Weight selection assumes perfect knowledge of the true mmWave
    channel, its K-factor and SNR; each cell scans the weight grid over
    a common set of Monte Carlo realizations and stores the argmin
    (ties resolve to the smallest weight).
    """
    k_grid = np.asarray(cfg.k_factor_mm_db_grid if k_grid_db is None else k_grid_db,
                        dtype=float)
    snr_grid = np.asarray(cfg.snr_mm_db_grid if snr_grid_db is None else snr_grid_db,
                          dtype=float)
    if k_grid.size == 0 or snr_grid.size == 0:
        raise ValueError("weight table grids must be nonempty")
    realizations = cfg.realizations if realizations is None else realizations
    make_weight_grid(w_step)  # validate early

    tasks = [(cfg, ki, gi, float(k), float(g), w_step, realizations)
             for ki, k in enumerate(k_grid) for gi, g in enumerate(snr_grid)]
    w = np.zeros((k_grid.size, snr_grid.size))
    if parallelism > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as pool:
            for ki, gi, value in pool.map(_weight_cell_worker, tasks):
                w[ki, gi] = value
    else:
        for task in tasks:
            ki, gi, value = _weight_cell_worker(task)
            w[ki, gi] = value
    return WeightTable(k_grid_db=k_grid, snr_grid_db=snr_grid, w=w)
