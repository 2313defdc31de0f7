"""Frequency-selective Rician channel synthesis for both bands.

Each realization superposes a deterministic free-space component, fixed
by the array geometry and the band wavelength, with a stochastic
tapped-delay-line Rayleigh component drawn fresh per realization:

    H[n] = los_scale * H_fs + scatter_scale * H_rp[n]

with los_scale = sqrt(K/(1+K)) and scatter_scale = sqrt(1/(1+K)).
The path loss of both bands is normalized to one; SNR differences enter
purely through the per-band noise variances.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .config import SystemConfig, derived_params, build_distance_matrix


@dataclass(frozen=True)
class TdlProfile:
    """Tapped-delay-line power delay profile (unit total linear power)."""

    normalized_delays: np.ndarray  # unitless, nondecreasing; scale by RMS delay spread
    powers_db: np.ndarray

    def __post_init__(self):
        delays = np.asarray(self.normalized_delays, dtype=float)
        powers = np.asarray(self.powers_db, dtype=float)
        if delays.size == 0 or powers.size != delays.size:
            raise ValueError("profile needs matching, nonempty delay and power lists")
        if np.any(delays < 0) or np.any(np.diff(delays) < 0):
            raise ValueError("tap delays must be nonnegative and nondecreasing")
        object.__setattr__(self, "normalized_delays", delays)
        object.__setattr__(self, "powers_db", powers)

    @property
    def tap_count(self) -> int:
        return self.normalized_delays.size

    @property
    def powers_linear(self) -> np.ndarray:
        """Per-tap linear powers normalized to sum to one."""
        linear = 10.0 ** (self.powers_db / 10.0)
        return linear / linear.sum()


def load_tdl_profile(name: str = "tdl_a") -> TdlProfile:
    """Load a shipped tap table (``<name>.txt`` under package data)."""
    text = resources.files("dualbandsim.data").joinpath(f"{name}.txt").read_text()
    delays, powers = [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ValueError(f"bad tap line {raw!r}")
        delays.append(float(tokens[0]))
        powers.append(float(tokens[1]))
    return TdlProfile(np.array(delays), np.array(powers))


@dataclass
class ChannelTensor:
    """Per-subcarrier stack of complex m_rx x m_tx channel matrices."""

    band: str           # 'sub6' or 'mmwave': which link the matrices describe
    data: np.ndarray    # (n_subcarriers, m_rx, m_tx) complex128

    @property
    def n_subcarriers(self) -> int:
        return self.data.shape[0]


@dataclass
class ChannelRealization:
    """One joint draw of both bands plus the matching noise variances."""

    h_sub6: ChannelTensor
    h_mm: ChannelTensor
    k_mm_linear: float
    noise_var_sub6: float
    noise_var_mm: float


def rician_scaling(k_linear: float) -> tuple[float, float]:
    """Amplitude scales (los, scatter) for a linear K-factor; squares sum to 1."""
    if k_linear < 0:
        raise ValueError("K-factor must be nonnegative")
    los = np.sqrt(k_linear / (1.0 + k_linear))
    scatter = np.sqrt(1.0 / (1.0 + k_linear))
    return float(los), float(scatter)


def free_space_channel(distances: np.ndarray, wavelength_m: float) -> np.ndarray:
    """Unit-magnitude line-of-sight matrix exp(-j*2*pi*D/wavelength)."""
    if wavelength_m <= 0:
        raise ValueError("wavelength must be positive")
    return np.exp(-2j * np.pi * np.asarray(distances, dtype=float) / wavelength_m)


def _tap_phase_table(profile: TdlProfile, ds_seconds: float,
                     n_subcarriers: int, delta_f_hz: float) -> np.ndarray:
    """(n, taps) matrix of exp(-j*2*pi*(n-1)*delta_f*tau_p)."""
    delays_s = profile.normalized_delays * ds_seconds
    freqs = np.arange(n_subcarriers) * delta_f_hz
    return np.exp(-2j * np.pi * np.outer(freqs, delays_s))


def _draw_tap_gains(profile: TdlProfile, m_rx: int, m_tx: int,
                    rng: np.random.Generator) -> np.ndarray:
    """(taps, m_rx, m_tx) complex Gaussian gains, per-tap variance = tap power."""
    shape = (profile.tap_count, m_rx, m_tx)
    gains = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return gains * np.sqrt(profile.powers_linear / 2.0)[:, None, None]


def rayleigh_tdl_tensor(profile: TdlProfile, ds_seconds: float,
                        n_subcarriers: int, delta_f_hz: float,
                        m_rx: int, m_tx: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Draw one frequency response of the tapped-delay-line Rayleigh part.

    Every antenna pair gets an independent complex Gaussian gain per tap
    (variance equal to the normalized tap power), summed over taps with
    the per-subcarrier delay phasors.  Per-entry ensemble power is one.
    Returns an (n_subcarriers, m_rx, m_tx) array.
    """
    if ds_seconds <= 0:
        raise ValueError("delay spread must be positive")
    phases = _tap_phase_table(profile, ds_seconds, n_subcarriers, delta_f_hz)
    gains = _draw_tap_gains(profile, m_rx, m_tx, rng)
    return np.einsum("np,prt->nrt", phases, gains)


class ChannelSynthesizer:
    """Precomputed geometry and tap tables for fast repeated realizations.

    The free-space matrices and tap phase tables depend only on the
    configuration, so they are built once and reused across Monte Carlo
    draws.  ``realize`` consumes the supplied generator in a fixed order
    (sub-6 gains first, then mmWave gains), which is part of the
    reproducibility contract.
    """

    def __init__(self, cfg: SystemConfig, profile: TdlProfile | None = None):
        self.cfg = cfg
        self.derived = derived_params(cfg)
        self.distances = build_distance_matrix(cfg)
        self.profile = profile if profile is not None else load_tdl_profile()
        self.h_fs_sub6 = free_space_channel(self.distances, self.derived.lambda_s)
        self.h_fs_mm = free_space_channel(self.distances, self.derived.lambda_m)
        self._phases_sub6 = _tap_phase_table(
            self.profile, cfg.sub6.rms_delay_spread_s,
            self.derived.n_sub6, cfg.sub6.subcarrier_spacing_hz)
        self._phases_mm = _tap_phase_table(
            self.profile, cfg.mmwave.rms_delay_spread_s,
            self.derived.n_mm, cfg.mmwave.subcarrier_spacing_hz)

    def _band_tensor(self, band: str, k_linear: float,
                     rng: np.random.Generator) -> ChannelTensor:
        if band == "sub6":
            h_fs, phases = self.h_fs_sub6, self._phases_sub6
        else:
            h_fs, phases = self.h_fs_mm, self._phases_mm
        los, scatter = rician_scaling(k_linear)
        gains = _draw_tap_gains(self.profile, self.cfg.m_rx, self.cfg.m_tx, rng)
        h_rp = np.einsum("np,prt->nrt", phases, gains)
        return ChannelTensor(band=band, data=los * h_fs[None, :, :] + scatter * h_rp)

    def realize(self, k_mm_db: float, snr_mm_db: float,
                rng: np.random.Generator) -> ChannelRealization:
        k_mm = 10.0 ** (k_mm_db / 10.0)
        k_sub6 = k_mm / 10.0
        h_sub6 = self._band_tensor("sub6", k_sub6, rng)
        h_mm = self._band_tensor("mmwave", k_mm, rng)
        noise_var_mm = self.cfg.transmit_power / 10.0 ** (snr_mm_db / 10.0)
        noise_var_sub6 = noise_var_mm / (self.derived.alpha * self.derived.beta)
        return ChannelRealization(
            h_sub6=h_sub6,
            h_mm=h_mm,
            k_mm_linear=k_mm,
            noise_var_sub6=noise_var_sub6,
            noise_var_mm=noise_var_mm,
        )


def realize_channels(cfg: SystemConfig, k_mm_db: float, snr_mm_db: float,
                     rng: np.random.Generator,
                     synth: ChannelSynthesizer | None = None) -> ChannelRealization:
    """Draw one dual-band channel realization.

    The mmWave K-factor is given in dB; the sub-6 GHz link uses one
    tenth of it in linear scale.  Pass a prebuilt synthesizer when
    calling in a loop to skip redundant geometry setup.
    """
    if synth is None:
        synth = ChannelSynthesizer(cfg)
    return synth.realize(k_mm_db, snr_mm_db, rng)
