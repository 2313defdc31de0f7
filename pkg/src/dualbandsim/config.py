"""System configuration and dual-band array geometry.

Holds every simulation parameter (band parameters, array sizes, sweep
grids, Monte Carlo controls) plus the shared transmit/receive element
distance matrix used by both frequency bands.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


class ConfigError(ValueError):
    """Invalid or inconsistent simulation configuration."""


@dataclass(frozen=True)
class BandParams:
    """OFDM and noise parameters of one frequency band."""

    carrier_frequency_hz: float
    bandwidth_hz: float
    subcarrier_spacing_hz: float
    noise_figure_db: float
    rms_delay_spread_s: float
    cyclic_prefix_s: float  # documented only; per-subcarrier model never uses it

    def __post_init__(self):
        for name in ("carrier_frequency_hz", "bandwidth_hz",
                     "subcarrier_spacing_hz", "rms_delay_spread_s",
                     "cyclic_prefix_s"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency_hz

    @property
    def n_subcarriers(self) -> int:
        """Subcarrier count bandwidth/spacing; must be integral to 1e-6."""
        ratio = self.bandwidth_hz / self.subcarrier_spacing_hz
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-6:
            raise ConfigError(
                f"bandwidth/subcarrier spacing = {ratio!r} is not a positive integer")
        return n

    @property
    def noise_figure_linear(self) -> float:
        return 10.0 ** (self.noise_figure_db / 10.0)


def _default_sub6() -> BandParams:
    return BandParams(
        carrier_frequency_hz=2.55e9,
        bandwidth_hz=10.08e6,
        subcarrier_spacing_hz=60e3,
        noise_figure_db=3.0,
        rms_delay_spread_s=1148e-9,
        cyclic_prefix_s=1.19e-6,
    )


def _default_mmwave() -> BandParams:
    return BandParams(
        carrier_frequency_hz=25.5e9,
        bandwidth_hz=100.8e6,
        subcarrier_spacing_hz=60e3,
        noise_figure_db=3.0,
        rms_delay_spread_s=841e-9,
        cyclic_prefix_s=1.19e-6,
    )


# Half the default mmWave wavelength; both physical arrays share this spacing.
DEFAULT_ELEMENT_SPACING_M = 0.5 * SPEED_OF_LIGHT / 25.5e9


@dataclass(frozen=True)
class SystemConfig:
    """Full simulation setup: two bands, one geometry, sweep and MC controls."""

    sub6: BandParams = field(default_factory=_default_sub6)
    mmwave: BandParams = field(default_factory=_default_mmwave)
    m_tx: int = 4
    m_rx: int = 4
    element_spacing_m: float = DEFAULT_ELEMENT_SPACING_M
    link_distance_m: float = 10.0
    k_factor_mm_db_grid: tuple = tuple(float(k) for k in range(-20, 31, 5))
    snr_mm_db_grid: tuple = tuple(float(g) for g in range(-15, 21, 5))
    realizations: int = 1000
    seed: int = 1
    transmit_power: float = 1.0

    def __post_init__(self):
        if self.m_tx < 1 or self.m_rx < 1:
            raise ConfigError("antenna counts must be >= 1")
        if self.element_spacing_m <= 0 or self.link_distance_m <= 0:
            raise ConfigError("element spacing and link distance must be positive")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 unsigned bits")
        if self.transmit_power <= 0:
            raise ConfigError("transmit_power must be positive")
        if not self.k_factor_mm_db_grid or not self.snr_mm_db_grid:
            raise ConfigError("sweep grids must be nonempty")
        ratio = self.mmwave.carrier_frequency_hz / self.sub6.carrier_frequency_hz
        if ratio <= 1:
            raise ConfigError("mmWave carrier must exceed the sub-6 GHz carrier")
        # Force materialization so bad bandwidth/spacing pairs fail at build time.
        self.sub6.n_subcarriers
        self.mmwave.n_subcarriers


@dataclass(frozen=True)
class DerivedParams:
    """Quantities computed once from a SystemConfig."""

    alpha: float    # squared carrier frequency ratio (> 1)
    beta: float     # mmWave/sub-6 ratio of bandwidth * linear noise figure
    n_sub6: int
    n_mm: int
    lambda_s: float
    lambda_m: float


def derived_params(cfg: SystemConfig) -> DerivedParams:
    """Compute the cross-band ratios and per-band subcarrier counts."""
    alpha = (cfg.mmwave.carrier_frequency_hz / cfg.sub6.carrier_frequency_hz) ** 2
    beta = (cfg.mmwave.bandwidth_hz * cfg.mmwave.noise_figure_linear) / (
        cfg.sub6.bandwidth_hz * cfg.sub6.noise_figure_linear)
    return DerivedParams(
        alpha=alpha,
        beta=beta,
        n_sub6=cfg.sub6.n_subcarriers,
        n_mm=cfg.mmwave.n_subcarriers,
        lambda_s=cfg.sub6.wavelength_m,
        lambda_m=cfg.mmwave.wavelength_m,
    )


def snr_sub6_linear(cfg: SystemConfig, snr_mm_db: float) -> float:
    """Sub-6 GHz pre-beamforming SNR implied by a given mmWave SNR.

    The sub-6 link enjoys an alpha*beta SNR advantage; the value is
    materialized as the literal product so the relation holds exactly.
    """
    d = derived_params(cfg)
    return d.alpha * d.beta * 10.0 ** (snr_mm_db / 10.0)


def build_distance_matrix(cfg: SystemConfig) -> np.ndarray:
    """Element-pair distances for two parallel broadside-facing ULAs.

    Element i of either array sits at i * element_spacing_m along its
    line; the lines are link_distance_m apart along boresight.  Both
    bands share the returned (m_rx, m_tx) matrix since their arrays are
    co-located and aligned.
    """
    x_tx = np.arange(cfg.m_tx) * cfg.element_spacing_m
    x_rx = np.arange(cfg.m_rx) * cfg.element_spacing_m
    offsets = x_rx[:, None] - x_tx[None, :]
    return np.sqrt(cfg.link_distance_m ** 2 + offsets ** 2)


# ---------------------------------------------------------------------------
# Flat key = value config files.  Keys mirror SystemConfig field names; band
# fields are addressed as "sub6.<field>" / "mmwave.<field>".  Grids are
# comma-separated.  '#' starts a comment.
# ---------------------------------------------------------------------------

_GRID_FIELDS = {"k_factor_mm_db_grid", "snr_mm_db_grid"}
_INT_FIELDS = {"m_tx", "m_rx", "realizations", "seed"}
_FLOAT_FIELDS = {"element_spacing_m", "link_distance_m", "transmit_power"}
_BAND_FIELDS = {f.name for f in fields(BandParams)}


def parse_config_text(text: str) -> dict:
    """Parse flat config text into a {key: raw string} mapping."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        out[key] = value
    return out


def config_from_mapping(mapping: dict, base: SystemConfig | None = None) -> SystemConfig:
    """Build a SystemConfig from string key/value pairs over a base config."""
    cfg = base if base is not None else SystemConfig()
    band_updates: dict[str, dict] = {"sub6": {}, "mmwave": {}}
    top_updates: dict = {}
    for key, value in mapping.items():
        try:
            if "." in key:
                band, _, sub = key.partition(".")
                if band not in band_updates or sub not in _BAND_FIELDS:
                    raise ConfigError(f"unknown config key {key!r}")
                band_updates[band][sub] = float(value)
            elif key in _GRID_FIELDS:
                items = [v for v in (s.strip() for s in value.split(",")) if v]
                top_updates[key] = tuple(float(v) for v in items)
            elif key in _INT_FIELDS:
                top_updates[key] = int(value)
            elif key in _FLOAT_FIELDS:
                top_updates[key] = float(value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    for band, updates in band_updates.items():
        if updates:
            top_updates[band] = replace(getattr(cfg, band), **updates)
    return replace(cfg, **top_updates)


def config_from_file(path, overrides: dict | None = None) -> SystemConfig:
    """Load a config file and apply override key/value pairs on top."""
    with open(path, "r", encoding="utf-8") as fh:
        mapping = parse_config_text(fh.read())
    if overrides:
        mapping.update({k: str(v) for k, v in overrides.items()})
    return config_from_mapping(mapping)
