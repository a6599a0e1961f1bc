"""Multiple-quantum spectroscopy of the S register.

Coherence order convention: the S-basis entry |a><b| has order
``p = popcount(b) - popcount(a)``.  With S_kz|0> = +|0>/2 the labelling
Hamiltonian ``omega_S * S_z`` multiplies that entry by ``exp(-i p omega_S t1)``.
This is the only place a sign choice enters.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import GridTooCoarse, TooLarge
from .modarith import OrbitTable
from .spinops import (
    MAX_JOINT_QUBITS,
    StructuredState,
    assemble,
    evolve,
)

log = logging.getLogger(__name__)


def coherence_order(a: int, b: int) -> int:
    return bin(b).count("1") - bin(a).count("1")


@lru_cache(maxsize=None)
def order_matrix(n: int) -> np.ndarray:
    """L x L integer matrix of coherence orders."""
    weights = np.array([bin(x).count("1") for x in range(1 << n)])
    out = weights[None, :] - weights[:, None]
    out.setflags(write=False)
    return out


def _n_from_dim(M) -> int:
    L = M.shape[0]
    n = L.bit_length() - 1
    if M.shape != (L, L) or 1 << n != L:
        raise ValueError(f"expected a 2^n square matrix, got shape {M.shape}")
    return n


def decompose_orders(M) -> dict[int, np.ndarray]:
    """Split an S-register matrix into its coherence-order components sigma_p."""
    M = np.asarray(M)
    n = _n_from_dim(M)
    orders = order_matrix(n)
    return {p: np.where(orders == p, M, 0) for p in range(-n, n + 1)}


@dataclass(frozen=True)
class CoherenceSpectrum:
    intensities: dict
    metadata: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(sum(self.intensities.values()))

    def __getitem__(self, p: int) -> float:
        return self.intensities[p]

    def orders(self) -> list[int]:
        return sorted(self.intensities)


def _check_cap(state: StructuredState) -> None:
    geo = state.geometry
    if geo.n_i + geo.n > MAX_JOINT_QUBITS:
        raise TooLarge(f"n_i + n = {geo.n_i + geo.n} exceeds {MAX_JOINT_QUBITS}")


def _normalized(state: StructuredState, value: float) -> float:
    eps = state.geometry.eps_i
    return 0.0 if eps == 0 else value / eps


def order_intensities(state: StructuredState, **metadata) -> CoherenceSpectrum:
    """I(p) = Tr{sigma_p^+ sigma_p} / eps_i over the joint operator.

    Elementary I words are Hilbert-Schmidt orthonormal, so the joint trace is the
    sum of S-register Frobenius norms over words.
    """
    _check_cap(state)
    n = state.geometry.n
    orders = order_matrix(n)
    power = np.zeros(2 * n + 1)
    for _, M in state.elementary().terms:
        sq = np.abs(M) ** 2
        power += np.bincount((orders + n).ravel(), weights=sq.ravel(), minlength=2 * n + 1)
    intensities = {p: _normalized(state, float(power[p + n])) for p in range(-n, n + 1)}
    meta = {"N": state.geometry.N, "n_i": state.geometry.n_i, "eps_i": state.geometry.eps_i}
    meta.update(metadata)
    return CoherenceSpectrum(intensities, meta)


def total_intensity(state: StructuredState) -> float:
    """Tr{rho^+ rho} / eps_i (invariant under any unitary evolution)."""
    _check_cap(state)
    return _normalized(state, float(sum(np.sum(np.abs(M) ** 2) for _, M in state.elementary().terms)))


def coherent_intensity(state: StructuredState) -> float:
    """Power in S-register off-diagonal entries only, divided by eps_i.

    This is what the closed-form I(m) counts: S-diagonal (longitudinal
    magnetization and spin order) terms carry no coherence.
    """
    _check_cap(state)
    total = 0.0
    for _, M in state.elementary().terms:
        sq = np.abs(M) ** 2
        total += float(sq.sum() - np.trace(sq))
    return _normalized(state, total)


def _i_trace_factor(n_i: int) -> float:
    # Tr{I_x^2} over the I register for I_x = sum_k I_kx
    return 0.25 * n_i * 2**n_i


def closed_form_I(table: OrbitTable, m: int, n_i: int = 1, eps_i: float = 1.0) -> float:
    """Coherent intensity of rho(m) from the orbit periods alone."""
    return _i_trace_factor(n_i) * eps_i * (table.N - table.short_orbit_count(m))


def closed_form_Iy(table: OrbitTable, m: int, n_i: int = 1, eps_i: float = 1.0) -> float:
    """Total intensity of rho_y(m) from the orbit periods alone."""
    return 0.5 * _i_trace_factor(n_i) * eps_i * (table.N - table.short_orbit_count(2 * m))


def Iy_lower_bound(N: int, p: int, q: int, n_i: int = 1, eps_i: float = 1.0) -> float:
    """Lower bound on I_y(m) away from its zero points."""
    return 0.125 * n_i * 2**n_i * eps_i * (N - (p + q - 1))


def initial_intensity(n: int, n_i: int = 1, eps_i: float = 1.0) -> float:
    """I_i0 = eps_i Tr{I_z^2} on the full ensemble."""
    return 0.25 * n_i * eps_i * 2 ** (n + n_i)


def efficiency_lower_bound(N: int, p: int, q: int, n: int) -> float:
    """Lower bound on I_y(m) / I_i0 away from zero points."""
    return 0.5 * (N - (p + q - 1)) / 2**n


# --------------------------------------------------------------------------
# Signal synthesis


@dataclass(frozen=True)
class Signal:
    t1: np.ndarray
    series: np.ndarray
    dft: np.ndarray
    peaks: dict
    omega_s: float
    experiments: tuple


def _experiments(component: str):
    """(preparation sign, readout sign, weight) for each emulated experiment."""
    if component == "full":
        return ((1, 1, 1.0),)
    if component == "antisymmetric":
        # rho_y = (rho(m) - rho(-m))/2 prepared in two experiments, each read out
        # through V = U^-m and V = U^+m: four experiments, coadded
        return ((1, 1, 0.25), (-1, 1, -0.25), (1, -1, -0.25), (-1, -1, 0.25))
    raise ValueError(f"unknown component {component!r}")


def _label(state: StructuredState, phase_ket: np.ndarray) -> StructuredState:
    # exp(-i H_S t) rho exp(i H_S t) with H_S diagonal
    factor = np.outer(phase_ket, phase_ket.conj())
    return StructuredState(state.geometry, tuple((l, M * factor) for l, M in state.terms))


def synthesize_signal(
    state0: StructuredState,
    y: int,
    m: int,
    component: str = "antisymmetric",
    omega_s: float = 1.0,
    samples: int | None = None,
) -> Signal:
    """Emulate the frequency-labelled multiple-quantum experiment.

    The prepared state (rho(m), or rho_y(m) for ``component="antisymmetric"``)
    precesses under ``omega_s * S_z`` for each t1, is read out through the
    time-reversed propagator and detected with ``F = state0 / eps_i`` (for the
    uniform preparation this is ``I_x``).  Antisymmetric spectra coadd four
    experiments with the signs listed in ``Signal.experiments``.

    The t1 grid has step ``2*pi/(omega_s*K)`` so that every order lands on an
    exact DFT bin; ``peaks[p]`` is the DFT amplitude at order p.
    """
    geo = state0.geometry
    n = geo.n
    K = samples if samples is not None else 4 * (2 * n + 1)
    if K < 2 * (2 * n + 1):
        raise GridTooCoarse(f"K={K} < 2(2n+1)={2 * (2 * n + 1)}")
    eps = geo.eps_i
    experiments = _experiments(component)
    log.debug("synthesize_signal: %d emulated experiments %s", len(experiments), experiments)

    detector = assemble(state0) / eps if eps else assemble(state0)
    step = 2 * math.pi / (omega_s * K)
    t1 = step * np.arange(K)
    sz = 0.5 * (n - 2 * np.array([bin(x).count("1") for x in range(geo.L)]))

    prepared = {a: evolve(state0, y, a * m) for a in {e[0] for e in experiments}}
    series = np.zeros(K, dtype=complex)
    for j, t in enumerate(t1):
        phase = np.exp(-1j * omega_s * sz * t)
        for a, b, w in experiments:
            labelled = _label(prepared[a], phase)
            final = evolve(labelled, y, -b * m)
            series[j] += w * np.trace(detector @ assemble(final))
    dft = np.fft.fft(series) / K
    # sum_p I_p exp(-i p omega t_j) = sum_p I_p exp(-2 pi i p j / K): order p sits in bin -p
    peaks = {p: float(dft[(-p) % K].real) for p in range(-n, n + 1)}
    return Signal(t1, series, dft, peaks, omega_s, experiments)


# --------------------------------------------------------------------------
# Transition census


@dataclass(frozen=True)
class TransitionCensus:
    n: int
    counts: dict
    stirling: dict


def transition_census(n: int) -> TransitionCensus:
    """Number of p-quantum transitions among n spin-1/2 and its Stirling form.

    Z_0 counts unordered pairs of distinct equal-weight states; Z_p for p >= 1
    counts pairs whose weights differ by p.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = {0: (math.comb(2 * n, n) - 2**n) // 2}
    stirling = {}
    for p in range(1, n + 1):
        counts[p] = math.comb(2 * n, n - p)
        stirling[p] = 4**n / math.sqrt(math.pi * n) * math.exp(-(p**2) / n)
    return TransitionCensus(n, counts, stirling)


# --------------------------------------------------------------------------
# LOMSO expansion


def lomso_basis(n_i: int) -> list[np.ndarray]:
    """Diagonals of the symmetric k-body operators F_0..F_{n_i}.

    F_0 = E, F_1 = I_z, F_k = 2^(k-1) * sum over k-subsets of products of I_jz.
    """
    if not 1 <= n_i <= 4:
        raise ValueError("n_i must be in 1..4")
    dim = 1 << n_i
    # I_jz eigenvalue on basis state a: +1/2 for bit 0, -1/2 for bit 1; spin 1 is the MSB
    iz = np.array([[0.5 - ((a >> (n_i - 1 - j)) & 1) for j in range(n_i)] for a in range(dim)])
    basis = [np.ones(dim), iz.sum(axis=1)]
    for k in range(2, n_i + 1):
        term = np.zeros(dim)
        for subset in combinations(range(n_i), k):
            term += np.prod(iz[:, subset], axis=1)
        basis.append(2 ** (k - 1) * term)
    return basis


def lomso_expand(theta: float, n_i: int) -> np.ndarray:
    """Coefficients alpha_p with exp(i theta I_z) = sum_p alpha_p F_p."""
    basis = np.array(lomso_basis(n_i)).T
    target = np.exp(1j * theta * basis[:, 1])
    # one representative row per spin-down count; F_p depends on nothing else
    reps = [(1 << k) - 1 for k in range(n_i + 1)]
    alpha = np.linalg.solve(basis[reps].astype(complex), target[reps])
    return alpha


# --------------------------------------------------------------------------
# CSV formats


def format_number(x: float) -> str:
    """12 significant digits, '.' decimal separator, no negative zero."""
    x = float(x)
    if x == 0:
        x = 0.0
    return f"{x:.12g}"


def spectrum_to_csv(spectrum: CoherenceSpectrum, extra: dict | None = None) -> str:
    """``order,intensity`` rows in ascending order; ``extra`` adds named columns."""
    extra = extra or {}
    buf = io.StringIO(newline="")
    buf.write(",".join(["order", "intensity", *extra]) + "\n")
    for p in spectrum.orders():
        cells = [str(p), format_number(spectrum[p])]
        cells += [format_number(col[p]) for col in extra.values()]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def scan_to_csv(rows, n: int | None = None) -> str:
    """``m,I,Iy`` rows; with ``n`` given, per-order columns ``Iy_p-n..Iy_pn`` follow.

    Each row is a mapping with keys ``m``, ``I``, ``Iy`` and optionally ``Iy_p``
    (order -> intensity).
    """
    header = ["m", "I", "Iy"]
    if n is not None:
        header += [f"Iy_p{p}" for p in range(-n, n + 1)]
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = [str(int(row["m"])), format_number(row["I"]), format_number(row["Iy"])]
        if n is not None:
            cells += [format_number(row["Iy_p"][p]) for p in range(-n, n + 1)]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
