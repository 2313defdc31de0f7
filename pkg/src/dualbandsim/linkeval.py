"""Data-phase evaluation: SVD precoding and spectral efficiency.

The precoder/combiner pair comes from a compact SVD of the *estimated*
channel while the gains are measured through the *true* channel; the
mismatch between the two is exactly the quantity under study.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelTensor


@dataclass
class Precoding:
    """Per-subcarrier semi-unitary combiner/precoder with equal power loading."""

    combiner: np.ndarray         # (n, m_rx, n_streams) left singular vectors
    precoder: np.ndarray         # (n, m_tx, n_streams) right singular vectors
    singular_values: np.ndarray  # (n, n_streams), descending
    total_power: float

    @property
    def n_streams(self) -> int:
        return self.precoder.shape[2]

    @property
    def stream_power(self) -> float:
        return self.total_power / self.n_streams


def _anchor_phases(vectors: np.ndarray) -> np.ndarray:
    """Unit phasor of the largest-magnitude entry of each column."""
    idx = np.argmax(np.abs(vectors), axis=1)                      # (n, streams)
    anchors = np.take_along_axis(vectors, idx[:, None, :], axis=1)[:, 0, :]
    return anchors / np.abs(anchors)


def svd_precoding(h_bar: ChannelTensor, transmit_power: float) -> Precoding:
    """Compact SVD of the estimate with min(m_rx, m_tx) streams.

    Singular values are sorted descending and power is split equally
    across streams.  For reproducibility each right singular vector is
    rotated so its largest-magnitude entry is real and positive (the
    matching left vector gets the same rotation, preserving the
    factorization).  A frequency-flat tensor is decomposed once and
    broadcast.
    """
    data = h_bar.data
    if data.size == 0:
        raise ValueError("cannot precode an empty tensor")
    n = data.shape[0]
    flat = n > 1 and bool((data[1:] == data[0]).all())
    u, s, vh = np.linalg.svd(data[:1] if flat else data, full_matrices=False)
    f = vh.conj().transpose(0, 2, 1)
    phases = _anchor_phases(f).conj()[:, None, :]
    f = f * phases
    q = u * phases
    if flat:
        q = np.broadcast_to(q, (n, *q.shape[1:]))
        f = np.broadcast_to(f, (n, *f.shape[1:]))
        s = np.broadcast_to(s, (n, s.shape[1]))
    return Precoding(combiner=q, precoder=f, singular_values=s,
                     total_power=transmit_power)


def channel_gain(precoding: Precoding, h_true: ChannelTensor) -> np.ndarray:
    """Effective per-subcarrier stream coupling through the true channel.

    Returns the (n, n_streams, n_streams) stack of
    combiner^H @ H_true @ precoder scaled by sqrt(stream power); the
    diagonal carries the useful gains, off-diagonals the inter-stream
    leakage caused by estimate mismatch.
    """
    if h_true.data.shape[0] != precoding.combiner.shape[0]:
        raise ValueError("subcarrier counts differ between precoding and channel")
    if (h_true.data.shape[1] != precoding.combiner.shape[1]
            or h_true.data.shape[2] != precoding.precoder.shape[1]):
        raise ValueError("antenna dimensions differ between precoding and channel")
    coupled = precoding.combiner.conj().transpose(0, 2, 1) @ h_true.data @ precoding.precoder
    return np.sqrt(precoding.stream_power) * coupled


def spectral_efficiency(gains: np.ndarray, noise_var: float,
                        precoding: Precoding, per_stream: bool = False) -> float:
    """Subcarrier-averaged log2(1 + SINR) in bits/s/Hz.

    The headline metric aggregates all streams into one SINR per
    subcarrier: summed diagonal gain power over summed leakage power
    plus noise_var * ||combiner||_F^2.  ``per_stream=True`` instead sums
    log2(1 + SINR) over individual streams (each against its own row
    leakage and combiner column); that variant is a diagnostic only and
    is not used by the headline results.
    """
    abs2 = gains.real ** 2 + gains.imag ** 2                      # (n, l, l)
    q_abs2 = np.abs(precoding.combiner) ** 2                      # (n, m_rx, l)
    signal = np.einsum("nii->ni", abs2).copy()                    # (n, l)
    off_diag = abs2.copy()
    streams = np.arange(abs2.shape[1])
    off_diag[:, streams, streams] = 0.0
    if per_stream:
        sinr = signal / (off_diag.sum(axis=2) + noise_var * q_abs2.sum(axis=1))
        return float(np.mean(np.log2(1.0 + sinr).sum(axis=1)))
    sinr = signal.sum(axis=1) / (off_diag.sum(axis=(1, 2))
                                 + noise_var * q_abs2.sum(axis=(1, 2)))
    return float(np.mean(np.log2(1.0 + sinr)))
