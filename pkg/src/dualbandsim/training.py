"""Pilot-aided training: comb allocation, noisy observation, LS + interpolation.

One antenna transmits per subcarrier, on an interleaved comb, so pilots
never collide.  Least-squares estimates at each antenna's pilot
subcarriers are linearly interpolated (complex-valued) to the rest of
the grid; before the first and past the last pilot of a comb the
nearest pilot value is held.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelTensor

# Unit-modulus 4-QAM alphabet used for pilot symbols.
QPSK_ALPHABET = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


@dataclass
class PilotPlan:
    """Comb pilot allocation for one band.

    ``owner[i]`` is the 0-based transmit antenna active on subcarrier i
    (i % m_tx, the interleaved comb).  ``pilot_symbols`` are unit
    modulus; the transmitted pilot is ``amplitude * pilot_symbols[i]``
    so each occupied subcarrier carries the full transmit power.
    """

    n_subcarriers: int
    m_tx: int
    pilot_symbols: np.ndarray   # (n,) complex, |value| = 1
    owner: np.ndarray           # (n,) int, 0-based antenna index
    amplitude: float = 1.0      # sqrt(transmit power)

    def pilot_indices(self, antenna: int) -> np.ndarray:
        """Subcarrier indices owned by a 0-based antenna index."""
        return np.arange(antenna, self.n_subcarriers, self.m_tx)


def make_pilot_plan(n_subcarriers: int, m_tx: int, rng: np.random.Generator,
                    transmit_power: float = 1.0) -> PilotPlan:
    """Draw random 4-QAM pilots on the interleaved comb."""
    if n_subcarriers < m_tx:
        raise ValueError("need at least one subcarrier per transmit antenna")
    symbols = QPSK_ALPHABET[rng.integers(0, 4, size=n_subcarriers)]
    owner = np.arange(n_subcarriers) % m_tx
    return PilotPlan(
        n_subcarriers=n_subcarriers,
        m_tx=m_tx,
        pilot_symbols=symbols,
        owner=owner,
        amplitude=float(np.sqrt(transmit_power)),
    )


def observe_training(h: ChannelTensor, plan: PilotPlan, noise_var: float,
                     rng: np.random.Generator) -> np.ndarray:
    """Received pilots y[n] = H[n] phi[n] + w[n], one m_rx vector per subcarrier.

    phi[n] has the pilot value at the owner antenna's entry and zeros
    elsewhere; w is circular complex Gaussian with the given variance
    per receive antenna.
    """
    n, m_rx, m_tx = h.data.shape
    if n != plan.n_subcarriers or m_tx != plan.m_tx:
        raise ValueError("pilot plan does not match channel tensor dimensions")
    active_columns = h.data[np.arange(n), :, plan.owner]          # (n, m_rx)
    pilots = plan.amplitude * plan.pilot_symbols
    noise = np.sqrt(noise_var / 2.0) * (
        rng.standard_normal((n, m_rx)) + 1j * rng.standard_normal((n, m_rx)))
    return active_columns * pilots[:, None] + noise


def ls_estimate(y: np.ndarray, plan: PilotPlan, band: str) -> ChannelTensor:
    """Per-pilot least-squares estimates, interpolated to every subcarrier.

    At subcarrier i owned by antenna t, column t of the estimate is
    y[i] / pilot[i].  Between an antenna's pilots the estimate is a
    complex linear interpolation; outside them the nearest pilot value
    is held.
    """
    n, m_rx = y.shape
    if n != plan.n_subcarriers:
        raise ValueError("observation length does not match pilot plan")
    pilots = plan.amplitude * plan.pilot_symbols
    grid = np.arange(n, dtype=float)
    estimate = np.empty((n, m_rx, plan.m_tx), dtype=complex)
    for t in range(plan.m_tx):
        idx = plan.pilot_indices(t)
        ls_columns = y[idx] / pilots[idx, None]                   # (pilots, m_rx)
        for r in range(m_rx):
            estimate[:, r, t] = np.interp(grid, grid[idx], ls_columns[:, r])
    return ChannelTensor(band=band, data=estimate)


def band_average_extrapolate(h_est_sub6: ChannelTensor, n_mm: int) -> ChannelTensor:
    """Average a sub-6 GHz estimate over its subcarriers, repeat to mmWave width.

    Returns the per-entry complex mean replicated across n_mm
    subcarriers; the result still describes the sub-6 GHz link, only on
    the mmWave subcarrier grid.
    """
    mean_matrix = h_est_sub6.data.mean(axis=0)
    data = np.broadcast_to(mean_matrix, (n_mm, *mean_matrix.shape)).copy()
    return ChannelTensor(band="sub6", data=data)
