# A Hermitian generator for the modular multiplication unitary and how far
# a range-N Fourier transform gets towards diagonalizing it.
import numpy as np
from scipy.linalg import expm

from mqfactor import approx_diagonalizer, build_propagator, split_hamiltonian

for y, N in [(2, 15), (2, 21), (4, 21)]:
    split = split_hamiltonian(y, N)
    U = build_propagator(y, 1, N).matrix()
    err = np.max(np.abs(expm(-1j * split.H) - U))
    h1 = np.linalg.norm(split.H1)
    print(f"y={y} N={N}: |exp(-iH)-U|max={err:.1e}  |H1|={h1:.3f}  series vs spectral {split.series_mismatch:.1e}")

# doubling mod 15 is a cyclic bit rotation, so it never changes Hamming weight: H1 = 0

for y, N in [(4, 21), (2, 15), (2, 21)]:
    d = approx_diagonalizer(y, N)
    print(f"diagonalizer y={y} N={N}: residual {d.residual:.6g}")
