# Emulated multiple-quantum experiment: label by S_z precession, read out by time reversal,
# and compare DFT peaks with the directly computed order intensities.
import numpy as np

from mqfactor import SpinGeometry, antisymmetric_part, initial_state_uniform, order_intensities, synthesize_signal

state0 = initial_state_uniform(SpinGeometry(1, 21))

for m in (1, 2, 3):
    spectrum = order_intensities(antisymmetric_part(2, m, state0))
    signal = synthesize_signal(state0, 2, m)
    print(f"m={m}  K={len(signal.t1)}  {len(signal.experiments)} coadded experiments")
    for p in spectrum.orders():
        if abs(spectrum[p]) > 1e-12 or abs(signal.peaks[p]) > 1e-12:
            print(f"   p={p:+d}  direct {spectrum[p]:.6f}  dft {signal.peaks[p]:.6f}")
    if spectrum.total < 1e-12:
        print("   zero point, flat signal:", np.allclose(signal.series, 0))

# the unfiltered state rho(m) carries diagonal power too, all of it at p=0
full = synthesize_signal(state0, 2, 1, component="full")
print("\nfull rho(1) peaks:", {p: round(v, 6) for p, v in full.peaks.items() if abs(v) > 1e-12})
