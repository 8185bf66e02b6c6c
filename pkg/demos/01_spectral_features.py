"""Walk through the spectral feature extractors on a known signal.

Builds an hourly series with 12 h and 24 h cycles, then shows that the
DFT period picker recovers both, that frequency folding arranges the
series into period-aligned rows, and what the Morlet scalogram looks
like around those scales.
"""

import numpy as np

from wavecast.spectral import cwt_morlet, default_scales, dft, frequency_reshape, topk_periods

rng = np.random.default_rng(0)
t = np.arange(240)
hs = 1.5 + 0.8 * np.sin(2 * np.pi * t / 12) + 0.4 * np.sin(2 * np.pi * t / 24)
hs += rng.normal(0.0, 0.05, t.size)

print("=== dominant periods ===")
spectrum = dft(hs - hs.mean())
for rank, (index, period) in enumerate(topk_periods(spectrum, 3), start=1):
    amp = spectrum.amplitudes[index]
    print(f"  #{rank}: bin {index:3d}  period {period:6.1f} h  amplitude {amp:8.2f}")

print("\n=== folding at the strongest period ===")
_, period = topk_periods(spectrum, 1)[0]
p = int(round(period))
folded = frequency_reshape(hs[:48], p)
print(f"  48 samples folded at period {p} -> grid {folded.shape[0]} x {folded.shape[1]}")
print("  column means (one per phase):")
print("  " + " ".join(f"{v:5.2f}" for v in folded.mean(axis=0)[:12]))

print("\n=== Morlet scalogram ===")
scales = default_scales(8)
scalogram = cwt_morlet(hs[:96], scales)
peak = scales[scalogram.magnitudes.mean(axis=1).argmax()]
print(f"  scales {scales[0]:.2f} .. {scales[-1]:.2f}, "
      f"strongest mean response at scale {peak:.2f}")
for s, row in zip(scalogram.scales, scalogram.magnitudes):
    bar = "#" * int(40 * row.mean() / scalogram.magnitudes.mean(axis=1).max())
    print(f"  scale {s:6.2f} | {bar}")
