"""Density operators of the I_{n_i} S_n spin ensemble and their exact evolution.

A joint operator is kept as a sum of ``I-label (x) S-matrix`` terms.  The I-label
is a word with one symbol per I spin, drawn from

    E00 = |0><0|   E11 = |1><1|   E01 = |0><1|   E10 = |1><0|
    Ix, Iy         (spin-1/2 operators, Ix = (E01 + E10)/2)
    E              (2x2 identity)

The conditional propagator applies ``x -> x*y mod N`` to the S register once for
every I spin in state |1> (|1>-controlled convention), and leaves S states
``x >= N`` untouched.  Conjugating an elementary word |a><b| (x) M therefore gives
``|a><b| (x) P^(m|a|) M P^(-m|b|)`` where |a| counts the 1s in ``a``; this is done
by index remapping, so the evolution is exact.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    NotCoprime,
    PreconditionError,
    TooLarge,
    UnsupportedNi,
)
from .modarith import Modulus, mod_inverse, mod_pow

MAX_NI = 2
# Cap on n_i + n for anything that builds the dense joint matrix.
MAX_JOINT_QUBITS = 14

_HALF = 0.5
_SYMBOL_MATRIX = {
    "E00": np.array([[1, 0], [0, 0]], dtype=complex),
    "E11": np.array([[0, 0], [0, 1]], dtype=complex),
    "E01": np.array([[0, 1], [0, 0]], dtype=complex),
    "E10": np.array([[0, 0], [1, 0]], dtype=complex),
    "Ix": np.array([[0, _HALF], [_HALF, 0]], dtype=complex),
    "Iy": np.array([[0, -0.5j], [0.5j, 0]], dtype=complex),
    "E": np.eye(2, dtype=complex),
}
# symbol -> [(coefficient, (ket bit, bra bit))]
_SYMBOL_EXPANSION = {
    "E00": [(1.0, (0, 0))],
    "E11": [(1.0, (1, 1))],
    "E01": [(1.0, (0, 1))],
    "E10": [(1.0, (1, 0))],
    "Ix": [(_HALF, (0, 1)), (_HALF, (1, 0))],
    "Iy": [(-0.5j, (0, 1)), (0.5j, (1, 0))],
    "E": [(1.0, (0, 0)), (1.0, (1, 1))],
}
_ELEMENTARY = {(0, 0): "E00", (1, 1): "E11", (0, 1): "E01", (1, 0): "E10"}
SYMBOLS = tuple(_SYMBOL_MATRIX)


@dataclass(frozen=True)
class SpinGeometry:
    """Spin counts and polarizations of the ensemble.

    ``eps_s`` is carried for bookkeeping only; the S-spin magnetization is
    removed at preparation (two-step phase cycling).
    """

    n_i: int
    modulus: Modulus
    eps_i: float = 1.0
    eps_s: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "modulus", Modulus.coerce(self.modulus))
        if self.n_i < 1:
            raise PreconditionError("need at least one I spin")
        if self.n_i > MAX_NI:
            raise UnsupportedNi(f"n_i={self.n_i} > {MAX_NI} is not supported")

    @property
    def N(self) -> int:
        return self.modulus.N

    @property
    def n(self) -> int:
        return self.modulus.n

    @property
    def L(self) -> int:
        return self.modulus.L


@dataclass(frozen=True)
class ModExpPropagator:
    """Permutation pi_m of {0..L-1}: x -> x*y^m mod N below N, identity above."""

    y: int
    m: int
    N: int
    perm: np.ndarray

    @property
    def L(self) -> int:
        return len(self.perm)

    def inverse(self) -> "ModExpPropagator":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.L)
        return ModExpPropagator(self.y, -self.m, self.N, inv)

    def __call__(self, x):
        return self.perm[x]

    def matrix(self) -> np.ndarray:
        """Dense L x L permutation matrix with P|x> = |pi(x)>."""
        P = np.zeros((self.L, self.L))
        P[self.perm, np.arange(self.L)] = 1.0
        return P


def build_propagator(y: int, m: int, N) -> ModExpPropagator:
    """Permutation for U(y)^m on the full 2^n register.

    Negative powers go through the modular inverse of ``y``.
    """
    mod = Modulus.coerce(N)
    g = math.gcd(int(y), mod.N)
    if g != 1:
        raise NotCoprime(y, mod.N, g)
    base = int(y) if m >= 0 else mod_inverse(y, mod.N)
    factor = mod_pow(base, abs(int(m)), mod.N)
    perm = np.arange(mod.L)
    perm[: mod.N] = perm[: mod.N] * factor % mod.N
    return ModExpPropagator(int(y), int(m), mod.N, perm)


def _freeze(M) -> np.ndarray:
    M = np.array(M, dtype=complex)
    M.setflags(write=False)
    return M


@dataclass(frozen=True)
class StructuredState:
    """Joint operator ``sum_k label_k (x) S_k``.

    ``diagnostics`` carries preparation reports (see :func:`initial_state_general`).
    """

    geometry: SpinGeometry
    terms: tuple
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        L, n_i = self.geometry.L, self.geometry.n_i
        frozen = []
        for label, M in self.terms:
            label = tuple(label)
            if len(label) != n_i or any(s not in _SYMBOL_MATRIX for s in label):
                raise PreconditionError(f"bad I-label {label!r} for n_i={n_i}")
            M = _freeze(M)
            if M.shape != (L, L):
                raise DimensionMismatch(f"S-matrix shape {M.shape} != ({L}, {L})")
            frozen.append((label, M))
        object.__setattr__(self, "terms", tuple(frozen))

    @classmethod
    def zero(cls, geometry: SpinGeometry) -> "StructuredState":
        return cls(geometry, ())

    def _combine(self, other: "StructuredState", sign: float) -> "StructuredState":
        if other.geometry != self.geometry:
            raise PreconditionError("states live on different geometries")
        return _merge(self.geometry, list(self.terms) + [(l, sign * M) for l, M in other.terms])

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        return StructuredState(self.geometry, tuple((l, scalar * M) for l, M in self.terms))

    __rmul__ = __mul__

    def elementary(self) -> "StructuredState":
        """Same operator rewritten over elementary words |a><b| only."""
        return _merge(self.geometry, _expand(self.terms))

    def is_zero(self) -> bool:
        return all(not np.any(M) for _, M in self.terms)


def _expand(terms):
    """Split every label into elementary words; returns [(word, M)]."""
    out = []
    for label, M in terms:
        choices = [_SYMBOL_EXPANSION[s] for s in label]
        for combo in itertools.product(*choices):
            coef = reduce(lambda acc, c: acc * c[0], combo, 1.0)
            if coef == 0:
                continue
            word = tuple(_ELEMENTARY[bits] for _, bits in combo)
            out.append((word, coef * M if coef != 1.0 else M))
    return out


def _merge(geometry, terms) -> StructuredState:
    acc: dict = {}
    order = []
    for label, M in terms:
        label = tuple(label)
        if label in acc:
            acc[label] = acc[label] + M
        else:
            acc[label] = np.array(M, dtype=complex)
            order.append(label)
    return StructuredState(geometry, tuple((l, acc[l]) for l in order))


def word_bits(word) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Ket and bra bit strings of an elementary word."""
    inv = {v: k for k, v in _ELEMENTARY.items()}
    pairs = [inv[s] for s in word]
    return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)


def initial_state_uniform(geometry: SpinGeometry) -> StructuredState:
    """eps_i * sum_k I_kx (x) identity on the S register."""
    n_i, L = geometry.n_i, geometry.L
    ident = geometry.eps_i * np.eye(L)
    terms = []
    for k in range(n_i):
        label = tuple("Ix" if j == k else "E" for j in range(n_i))
        terms.append((label, ident))
    return StructuredState(geometry, tuple(terms))


def initial_state_general(
    geometry: SpinGeometry,
    diagonals,
    factors: tuple[int, int] | None = None,
    dominance: float = 10.0,
) -> StructuredState:
    """sum_j eps_i I_jx (x) diag(rho_j) for per-I-spin real diagonals.

    Two conversion-efficiency conditions are evaluated for every diagonal and
    stored in ``state.diagnostics["conditions"]``; a ``UserWarning`` is emitted
    when one fails.

    * ``dominant``: ``sum_{k<N} rho^2 >= dominance * (p+q-1) * max_{k<N} rho^2``.
      Needs the factors (argument or ``geometry.modulus``); ``None`` otherwise.
    * ``bounded_tail``: ``sum_{k<L} rho^2 / sum_{k<N} rho^2 <= n**2``, a
      polynomial stand-in.
    """
    n_i, L, N, n = geometry.n_i, geometry.L, geometry.N, geometry.n
    diagonals = [np.asarray(d) for d in diagonals]
    if len(diagonals) != n_i:
        raise DimensionMismatch(f"need {n_i} diagonals, got {len(diagonals)}")
    for d in diagonals:
        if d.shape != (L,):
            raise DimensionMismatch(f"diagonal length {d.shape} != ({L},)")
        if np.iscomplexobj(d) and np.any(d.imag):
            raise PreconditionError("diagonal entries must be real")
    if factors is None and geometry.modulus.p is not None:
        factors = (geometry.modulus.p, geometry.modulus.q)

    terms, conditions = [], []
    for j, d in enumerate(diagonals):
        d = np.real(d).astype(float)
        label = tuple("Ix" if k == j else "E" for k in range(n_i))
        terms.append((label, geometry.eps_i * np.diag(d)))

        sq = d**2
        head = float(sq[:N].sum())
        total = float(sq.sum())
        peak = float(sq[:N].max())
        report = {"sum_below_N": head, "max_below_N": peak, "sum_all": total}
        if factors is not None:
            p, q = factors
            report["threshold"] = dominance * (p + q - 1) * peak
            report["dominant"] = head >= report["threshold"]
        else:
            report["dominant"] = None
        report["tail_ratio"] = total / head if head else math.inf
        report["bounded_tail"] = report["tail_ratio"] <= n**2
        conditions.append(report)
        if report["dominant"] is False or not report["bounded_tail"]:
            warnings.warn(
                f"diagonal {j}: initial state is a poor multiple-quantum source "
                f"(dominant={report['dominant']}, tail_ratio={report['tail_ratio']:.3g})",
                UserWarning,
                stacklevel=2,
            )
    return StructuredState(geometry, tuple(terms), {"conditions": conditions})


class _PermCache:
    def __init__(self, y, N):
        self.y, self.N = y, N
        self._cache = {}

    def inverse_perm(self, power: int) -> np.ndarray:
        # index array g with (P^power M)[i, :] = M[g[i], :]
        if power not in self._cache:
            self._cache[power] = build_propagator(self.y, -power, self.N).perm
        return self._cache[power]


def evolve(state: StructuredState, y: int, m: int) -> StructuredState:
    """Exact U^m rho U^-m for the |1>-controlled propagator of every I spin."""
    geo = state.geometry
    if geo.n_i > MAX_NI:
        raise UnsupportedNi(f"n_i={geo.n_i} > {MAX_NI}")
    g = math.gcd(int(y), geo.N)
    if g != 1:
        raise NotCoprime(y, geo.N, g)
    cache = _PermCache(int(y), geo.modulus)
    out = []
    for word, M in _expand(state.terms):
        ket, bra = word_bits(word)
        rows = cache.inverse_perm(m * sum(ket))
        cols = cache.inverse_perm(m * sum(bra))
        out.append((word, M[np.ix_(rows, cols)]))
    return _merge(geo, out)


def antisymmetric_part(y: int, m: int, state0: StructuredState) -> StructuredState:
    """rho_y(m) = (rho(m) - rho(-m)) / 2, the coherent sum of two experiments."""
    plus = evolve(state0, y, m)
    minus = evolve(state0, y, -m)
    return 0.5 * (plus - minus)


def label_matrix(label) -> np.ndarray:
    return reduce(np.kron, (_SYMBOL_MATRIX[s] for s in label))


def assemble(state: StructuredState) -> np.ndarray:
    """Dense joint matrix of dimension 2^n_i * L (I spins are the leading factors)."""
    geo = state.geometry
    if geo.n_i + geo.n > MAX_JOINT_QUBITS:
        raise TooLarge(
            f"n_i + n = {geo.n_i + geo.n} exceeds the dense cap of {MAX_JOINT_QUBITS}"
        )
    dim = (1 << geo.n_i) * geo.L
    out = np.zeros((dim, dim), dtype=complex)
    for label, M in state.terms:
        out += np.kron(label_matrix(label), M)
    return out


def joint_propagator(geometry: SpinGeometry, y: int, m: int) -> np.ndarray:
    """Dense conditional propagator sum_a |a><a| (x) P^(m|a|); used by test oracles."""
    blocks = []
    for a in range(1 << geometry.n_i):
        weight = bin(a).count("1")
        blocks.append(build_propagator(y, m * weight, geometry.modulus).matrix())
    dim = len(blocks) * geometry.L
    U = np.zeros((dim, dim))
    for a, B in enumerate(blocks):
        s = slice(a * geometry.L, (a + 1) * geometry.L)
        U[s, s] = B
    return U


def shift_diagonal(diagonal, table, shift: int) -> np.ndarray:
    """Permute a diagonal within each orbit: new[x_l y^k] = old[x_l y^((k - shift) mod r_l)].

    Entries at or above N are left in place.
    """
    diagonal = np.asarray(diagonal)
    out = diagonal.copy()
    for orbit in table.orbits:
        r = orbit.period
        for k, x in enumerate(orbit.cycle):
            out[x] = diagonal[orbit.cycle[(k - shift) % r]]
    return out


def save_matrix(M: np.ndarray, path, fmt: str = "csv") -> None:
    """Write a complex matrix row-major as (re, im) pairs.

    ``csv``: one matrix row per line, ``re,im`` interleaved, 17 significant digits.
    ``bin``: raw little-endian float64 pairs.
    """
    M = np.asarray(M, dtype=np.complex128)
    path = Path(path)
    if fmt == "bin":
        M.astype("<c16").tofile(path)
    elif fmt == "csv":
        pairs = np.empty((M.shape[0], 2 * M.shape[1]))
        pairs[:, 0::2] = M.real
        pairs[:, 1::2] = M.imag
        with open(path, "w", newline="\n") as fh:
            for row in pairs:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def load_matrix(path, fmt: str = "csv", dim: int | None = None) -> np.ndarray:
    path = Path(path)
    if fmt == "bin":
        flat = np.fromfile(path, dtype="<c16")
        dim = dim or math.isqrt(flat.size)
        return flat.reshape(dim, dim)
    if fmt == "csv":
        pairs = np.loadtxt(path, delimiter=",", ndmin=2)
        return pairs[:, 0::2] + 1j * pairs[:, 1::2]
    raise ValueError(f"unknown format {fmt!r}")
