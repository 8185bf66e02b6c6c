"""How the energy-based fusion weight responds to signal structure.

The frequency-branch weight w_f is the share of one-sided spectral
energy captured by the five leading harmonics of the strongest period.
Periodic windows push it toward 1, broadband noise pulls it toward 0,
and a constant window falls back to the time branch entirely.
"""

import numpy as np

from wavecast.fusion import fusion_weights_batch

t = np.arange(24)
rng = np.random.default_rng(42)

cases = {
    "pure 8h tone": np.sin(2 * np.pi * 3 * t / 24),
    "two tones (4:1 energy)": 2 * np.cos(2 * np.pi * 2 * t / 24) + np.cos(2 * np.pi * 5 * t / 24),
    "tone + noise": np.sin(2 * np.pi * 3 * t / 24) + rng.normal(0, 0.5, 24),
    "white noise": rng.normal(0, 1.0, 24),
    "constant window": np.full(24, 3.0),
}

print(f"{'window content':26s} {'w_f':>8s} {'w_t':>8s}")
for name, hs in cases.items():
    w_f = fusion_weights_batch(hs[None, :], n_harmonics=5)[0]
    print(f"{name:26s} {w_f:8.4f} {1 - w_f:8.4f}")

draws = fusion_weights_batch(rng.normal(size=(5000, 24)), n_harmonics=5)
print(f"\n5000 gaussian windows: mean w_f {draws.mean():.4f}, "
      f"p95 {np.quantile(draws, 0.95):.4f}")
print("periodic structure earns the frequency branch its weight; "
      "noise does not")
