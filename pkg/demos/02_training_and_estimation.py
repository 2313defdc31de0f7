"""Pilot-aided training walkthrough.

Shows the interleaved comb allocation, runs least-squares estimation
with linear interpolation on both bands, and separates the two error
mechanisms: receiver noise (where the sub-6 GHz link enjoys its big SNR
advantage) and interpolation error on a frequency-selective channel.
The closing step averages the sub-6 estimate over its band, which is
how the fusion chain strips frequency structure before rotating the
estimate onto the mmWave carrier.
"""

import numpy as np

from dualbandsim import (
    ChannelSynthesizer, band_average_extrapolate, config_from_mapping,
    derived_params, ls_estimate, make_pilot_plan, observe_training,
    rician_scaling,
)

cfg = config_from_mapping({
    "sub6.bandwidth_hz": "2.88e6",     # 48 subcarriers: easy to eyeball
    "mmwave.bandwidth_hz": "28.8e6",   # 480 subcarriers
})
d = derived_params(cfg)
rng = np.random.default_rng(0)

# --- comb allocation -------------------------------------------------------
plan = make_pilot_plan(d.n_sub6, cfg.m_tx, rng, cfg.transmit_power)
print("Comb pilot allocation (first 12 subcarriers, antenna indices):")
print(" ", plan.owner[:12].tolist())
for t in range(cfg.m_tx):
    idx = plan.pilot_indices(t)
    print(f"  antenna {t}: {idx.size} pilots, first few {idx[:4].tolist()}")

# --- noise error vs interpolation error -------------------------------------
synth = ChannelSynthesizer(cfg)
k_db, snr_db, draws = 10.0, -5.0, 80
pilot_m = pilot_s = full_m = full_s = 0.0
for l in range(draws):
    rng_l = np.random.default_rng(100 + l)
    real = synth.realize(k_db, snr_db, rng_l)
    plan_s = make_pilot_plan(d.n_sub6, cfg.m_tx, rng_l, cfg.transmit_power)
    y_s = observe_training(real.h_sub6, plan_s, real.noise_var_sub6, rng_l)
    est_s = ls_estimate(y_s, plan_s, band="sub6")
    plan_m = make_pilot_plan(d.n_mm, cfg.m_tx, rng_l, cfg.transmit_power)
    y_m = observe_training(real.h_mm, plan_m, real.noise_var_mm, rng_l)
    est_m = ls_estimate(y_m, plan_m, band="mmwave")
    # error restricted to each antenna's own pilot subcarriers = pure LS noise
    for t in range(cfg.m_tx):
        i_s, i_m = plan_s.pilot_indices(t), plan_m.pilot_indices(t)
        pilot_s += np.mean(np.abs(est_s.data[i_s, :, t] - real.h_sub6.data[i_s, :, t]) ** 2)
        pilot_m += np.mean(np.abs(est_m.data[i_m, :, t] - real.h_mm.data[i_m, :, t]) ** 2)
    full_s += np.mean(np.abs(est_s.data - real.h_sub6.data) ** 2)
    full_m += np.mean(np.abs(est_m.data - real.h_mm.data) ** 2)
pilot_s /= draws * cfg.m_tx
pilot_m /= draws * cfg.m_tx
full_s /= draws
full_m /= draws

print(f"\nPer-entry estimation MSE at K = {k_db:.0f} dB, mmWave SNR {snr_db:+.0f} dB "
      f"({draws} draws):")
print(f"  at pilot positions : mmWave {pilot_m:8.4f}   sub-6 {pilot_s:.6f}   "
      f"advantage {10*np.log10(pilot_m/pilot_s):.1f} dB")
print(f"  after interpolation: mmWave {full_m:8.4f}   sub-6 {full_s:.6f}")
print("At the pilots the error is pure receiver noise, so the sub-6 link wins")
print("by the full alpha*beta SNR gap; between pilots, linear interpolation of")
print("a frequency-selective channel adds a model-error floor to both bands.")

# --- band averaging and extension ------------------------------------------
rng_l = np.random.default_rng(500)
real = synth.realize(k_db, 0.0, rng_l)
plan_s = make_pilot_plan(d.n_sub6, cfg.m_tx, rng_l, cfg.transmit_power)
y_s = observe_training(real.h_sub6, plan_s, real.noise_var_sub6, rng_l)
est_s = ls_estimate(y_s, plan_s, band="sub6")
flat = band_average_extrapolate(est_s, d.n_mm)
print(f"\nBand-averaged sub-6 estimate: {est_s.data.shape} -> {flat.data.shape}")
los_scale, scatter_scale = rician_scaling(10 ** (k_db / 10) / 10)
residual = np.abs(flat.data[0] - los_scale * synth.h_fs_sub6)
print(f"  residual scatter+noise per entry after averaging: mean {residual.mean():.3f}")
print(f"  raw scattering amplitude before averaging       : {scatter_scale:.3f}")
print("Averaging over subcarriers suppresses the scattering term toward the")
print("stable line-of-sight component (wider sub-6 bands suppress it further);")
print("the result is then phase-rotated onto the mmWave carrier for fusion.")
