"""Hamiltonian of the modular multiplication operator and related diagnostics.

The eigenphases on an orbit of period r are fixed to 2*pi*s/r for s = 0..r-1
(not the principal branch of the logarithm), which is what makes the power-series
coefficients below come out as printed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .errors import NotCoprime
from .modarith import Modulus, OrbitTable, orbit_decompose
from .mqspec import order_matrix
from .spinops import (
    StructuredState,
    assemble,
    build_propagator,
    evolve,
)


@dataclass(frozen=True)
class OrbitEigenpairs:
    representative: int
    period: int
    Lambda: np.ndarray  # exp(-2 pi i s / r_x)
    lam: np.ndarray  # 2 pi s / r_x
    vectors: np.ndarray  # L x r_x, column s is |Psi_s(x_l)>


@dataclass(frozen=True)
class EigenSystem:
    table: OrbitTable
    L: int
    orbits: tuple

    def vectors(self) -> np.ndarray:
        """L x N matrix of all eigenvectors, grouped by orbit."""
        return np.hstack([o.vectors for o in self.orbits])

    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([o.Lambda for o in self.orbits])

    def phases(self) -> np.ndarray:
        return np.concatenate([o.lam for o in self.orbits])


def eigensystem(table: OrbitTable) -> EigenSystem:
    """Orbit-Fourier eigenvectors (1/sqrt r) sum_k exp(2 pi i s k / r)|x y^k>."""
    L = Modulus(table.N).L
    orbits = []
    for o in table.orbits:
        r = o.period
        s = np.arange(r)
        V = np.zeros((L, r), dtype=complex)
        V[list(o.cycle), :] = np.exp(2j * np.pi * np.outer(np.arange(r), s) / r) / math.sqrt(r)
        orbits.append(
            OrbitEigenpairs(o.representative, r, np.exp(-2j * np.pi * s / r), 2 * np.pi * s / r, V)
        )
    return EigenSystem(table, L, tuple(orbits))


def power_series_coefficients(r: int) -> np.ndarray:
    """alpha_k = sum_l (2 pi l / r^2) exp(2 pi i k l / r), k = 0..r-1."""
    l = np.arange(r)
    return np.array([np.sum(2 * np.pi * l / r**2 * np.exp(2j * np.pi * k * l / r)) for k in range(r)])


@dataclass(frozen=True)
class SplitHamiltonian:
    """H = H0 + H1 with H0 the zero-quantum part of H on the S register."""

    table: OrbitTable
    H: np.ndarray
    H0: np.ndarray
    H1: np.ndarray
    series_mismatch: float


def _spectral_hamiltonian(eig: EigenSystem) -> np.ndarray:
    H = np.zeros((eig.L, eig.L), dtype=complex)
    for o in eig.orbits:
        H += (o.vectors * o.lam) @ o.vectors.conj().T
    return H


def _series_hamiltonian(table: OrbitTable, L: int) -> np.ndarray:
    """Per-orbit power series sum_k alpha_k U^k built with each orbit's own period."""
    H = np.zeros((L, L), dtype=complex)
    for o in table.orbits:
        r = o.period
        alpha = power_series_coefficients(r)
        idx = np.array(o.cycle)
        for k in range(r):
            # U^k restricted to the orbit: |x y^j> -> |x y^(j+k)>
            H[np.roll(idx, -k), idx] += alpha[k]
    return H


def hamiltonian_from_orbits(table: OrbitTable) -> SplitHamiltonian:
    """H with exp(-iH) = U on [0, N) and zero block on [N, L), split by coherence order.

    Built by spectral synthesis; the power-series construction is computed
    alongside and the largest entrywise difference kept as ``series_mismatch``.
    """
    eig = eigensystem(table)
    H = _spectral_hamiltonian(eig)
    series = _series_hamiltonian(table, eig.L)
    mismatch = float(np.max(np.abs(H - series))) if H.size else 0.0
    n = eig.L.bit_length() - 1
    zero_quantum = order_matrix(n) == 0
    H0 = np.where(zero_quantum, H, 0)
    return SplitHamiltonian(table, H, H0, H - H0, mismatch)


def split_hamiltonian(y: int, N) -> SplitHamiltonian:
    return hamiltonian_from_orbits(orbit_decompose(y, Modulus.coerce(N).N))


def _joint(geometry, A: np.ndarray) -> np.ndarray:
    # H on the joint space: every I spin in |1> applies one copy of H
    n_i = geometry.n_i
    weights = np.array([bin(a).count("1") for a in range(1 << n_i)], dtype=float)
    return np.kron(np.diag(weights), A)


def interaction_frame_series(
    state0: StructuredState, split: SplitHamiltonian, m: int, order: int = 2
) -> tuple[np.ndarray, float]:
    """Truncated interaction-frame expansion of rho(m) and its distance to the exact state.

    rho(t) ~ e^{-iH0 t} {rho0 - i t [H1(t), rho0] - t^2/2 [H1(t), [H1(t), rho0]]} e^{iH0 t}
    with H1(t) = e^{iH0 t} H1 e^{-iH0 t} and t = m.  Returns the dense approximate
    joint operator and ``||approx - exact||_F``.  This is a diagnostic: nothing
    guarantees the residual is small.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    geo = state0.geometry
    rho0 = assemble(state0)
    H0 = _joint(geo, split.H0)
    H1 = _joint(geo, split.H1)
    t = float(m)
    U0 = expm(-1j * H0 * t)
    H1t = U0.conj().T @ H1 @ U0
    first = H1t @ rho0 - rho0 @ H1t
    inner = rho0 - 1j * t * first
    if order == 2:
        inner = inner - 0.5 * t**2 * (H1t @ first - first @ H1t)
    approx = U0 @ inner @ U0.conj().T
    exact = assemble(evolve(state0, split.table.y, m))
    return approx, float(np.linalg.norm(approx - exact))


@dataclass(frozen=True)
class Diagonalizer:
    V: np.ndarray
    residual: float
    kept: tuple  # (orbit index, s) of the surviving candidate columns


def _offdiagonal_mass(A: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(A) ** 2) - np.sum(np.abs(np.diag(A)) ** 2)))


def approx_diagonalizer(
    y: int,
    N,
    post_rotation: Callable[[int, int], np.ndarray] | None = None,
    null_tol: float = 1e-10,
) -> Diagonalizer:
    """Unitary built from Fourier sums over the whole range 0..N-1 instead of each period.

    Candidate column (l, s) is (1/sqrt N) sum_{k<N} exp(2 pi i s k / N)|x_l y^k mod N>,
    s = 0..N-1.  Within each orbit the candidates are taken in ascending s and
    orthonormalized by modified Gram-Schmidt; columns whose remaining norm is
    below ``null_tol`` are dropped.  Basis states N..L-1 complete the unitary.
    ``post_rotation(y, N)`` returns an optional L x L unitary applied on the right
    (identity by default).  The residual is the off-diagonal Frobenius mass of
    V^+ U V.
    """
    mod = Modulus.coerce(N)
    g = math.gcd(int(y), mod.N)
    if g != 1:
        raise NotCoprime(y, mod.N, g)
    table = orbit_decompose(y, mod.N)
    L = mod.L
    k = np.arange(mod.N)
    columns, kept = [], []
    for l, o in enumerate(table.orbits):
        support = np.array(o.cycle)[k % o.period]
        basis = []
        for s in range(mod.N):
            v = np.zeros(L, dtype=complex)
            np.add.at(v, support, np.exp(2j * np.pi * s * k / mod.N) / math.sqrt(mod.N))
            for _ in range(2):  # second pass restores orthogonality lost to rounding
                for b in basis:
                    v -= (b.conj() @ v) * b
            norm = np.linalg.norm(v)
            if norm < null_tol:
                continue
            basis.append(v / norm)
            kept.append((l, s))
            if len(basis) == o.period:
                break
        columns.extend(basis)
    for x in range(mod.N, L):
        e = np.zeros(L, dtype=complex)
        e[x] = 1.0
        columns.append(e)
    V = np.column_stack(columns)
    if post_rotation is not None:
        V = V @ post_rotation(int(y), mod.N)
    U = build_propagator(y, 1, mod).matrix()
    residual = _offdiagonal_mass(V.conj().T @ U @ V)
    return Diagonalizer(V, residual, tuple(kept))
