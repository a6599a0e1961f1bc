"""Integer and orbit arithmetic for the modular multiplication map x -> x*y mod N."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import BadFactorization, NotCoprime, PreconditionError

# Desk-scale cap on the modulus.  Dense simulation gives out long before this.
MAX_MODULUS_BITS = 20


def _check_modulus(N: int, minimum: int = 2) -> int:
    N = int(N)
    if N < minimum:
        raise PreconditionError(f"modulus must be >= {minimum}, got {N}")
    if N >= 1 << MAX_MODULUS_BITS:
        raise PreconditionError(
            f"N={N} exceeds the desk-scale cap N < 2**{MAX_MODULUS_BITS}"
        )
    return N


@dataclass(frozen=True)
class Modulus:
    """The number to factor together with its register size.

    ``n`` is the bit width with ``2**(n-1) <= N < 2**n`` and ``L = 2**n`` is the
    dimension of the S-spin register.  ``p`` and ``q`` may be attached when the
    factorization is known (theorem checks, efficiency bounds).
    """

    N: int
    p: int | None = None
    q: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "N", _check_modulus(self.N, minimum=3))
        if (self.p is None) != (self.q is None):
            raise PreconditionError("supply both p and q or neither")
        if self.p is not None and self.p * self.q != self.N:
            raise BadFactorization(f"{self.p}*{self.q} != {self.N}")

    @property
    def n(self) -> int:
        return self.N.bit_length()

    @property
    def L(self) -> int:
        return 1 << self.n

    @classmethod
    def coerce(cls, value) -> "Modulus":
        return value if isinstance(value, Modulus) else cls(int(value))


def _as_int(N) -> int:
    return N.N if isinstance(N, Modulus) else int(N)


def mod_pow(y: int, m: int, N) -> int:
    """Return ``y**m mod N`` (square-and-multiply, via the builtin ``pow``)."""
    N = _check_modulus(_as_int(N))
    if m < 0:
        raise PreconditionError("exponent must be nonnegative; use mod_inverse first")
    return pow(int(y), int(m), N)


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) = s*a + t*b``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
        old_t, t = t, old_t - quot * t
    return old_r, old_s, old_t


def mod_inverse(y: int, N) -> int:
    """Multiplicative inverse of ``y`` modulo ``N`` by the extended Euclidean algorithm.

    Raises :class:`NotCoprime` when ``gcd(y, N) != 1``; the exception carries the
    common divisor, which is itself a factor lead.
    """
    N = _check_modulus(_as_int(N))
    g, s, _ = extended_gcd(int(y) % N, N)
    if g != 1:
        raise NotCoprime(y, N, g)
    return s % N


def _require_coprime(y: int, N: int) -> None:
    g = math.gcd(int(y), N)
    if g != 1:
        raise NotCoprime(y, N, g)


def multiplicative_order(y: int, N) -> int:
    """Smallest ``r >= 1`` with ``y**r = 1 (mod N)``.

    Deliberately a plain loop: this is the reference the rest of the package is
    tested against.
    """
    N = _check_modulus(_as_int(N))
    _require_coprime(y, N)
    y %= N
    value, r = y, 1
    while value != 1 % N:
        value = value * y % N
        r += 1
    return r


class Orbit(NamedTuple):
    representative: int
    cycle: tuple[int, ...]
    period: int


@dataclass(frozen=True)
class OrbitTable:
    """Cycle decomposition of {0..N-1} under x -> x*y mod N.

    Orbits are listed by ascending representative, the representative being the
    smallest element of its cycle; each cycle starts at its representative.
    """

    y: int
    N: int
    orbits: tuple[Orbit, ...]
    _index: dict = field(default=None, repr=False, compare=False)

    @property
    def r(self) -> int:
        return max(o.period for o in self.orbits)

    @property
    def t(self) -> int:
        return len(self.orbits)

    @property
    def d(self) -> int:
        r = self.r
        return sum(1 for o in self.orbits if o.period == r)

    @property
    def periods(self) -> list[int]:
        return [o.period for o in self.orbits]

    def orbit_of(self, x: int) -> Orbit:
        """Orbit containing residue ``x``."""
        return self.orbits[self._index[x][0]]

    def position(self, x: int) -> tuple[int, int]:
        """``(orbit index l, step k)`` with ``x = x_l * y**k mod N``."""
        return self._index[x]

    def short_orbit_count(self, m: int) -> int:
        """Number of residues whose orbit period divides ``m`` (all of them for m=0)."""
        m = abs(int(m))
        return sum(o.period for o in self.orbits if m % o.period == 0)


def orbit_decompose(y: int, N) -> OrbitTable:
    """Enumerate the cycles of x -> x*y mod N and check the table invariants."""
    N = _check_modulus(_as_int(N))
    _require_coprime(y, N)
    yy = int(y) % N
    seen = [False] * N
    orbits = []
    index = {}
    for x0 in range(N):
        if seen[x0]:
            continue
        cycle = []
        x = x0
        while not seen[x]:
            seen[x] = True
            index[x] = (len(orbits), len(cycle))
            cycle.append(x)
            x = x * yy % N
        if x != x0:
            raise AssertionError("map is not a permutation; y not coprime?")
        orbits.append(Orbit(x0, tuple(cycle), len(cycle)))
    table = OrbitTable(int(y), N, tuple(orbits), index)
    _verify_table(table)
    return table


def _verify_table(table: OrbitTable) -> None:
    N, yy = table.N, table.y % table.N
    r = table.r
    assert sum(o.period for o in table.orbits) == N
    assert all(r % o.period == 0 for o in table.orbits)
    assert table.orbits[0].cycle == (0,)
    if N > 1:
        assert table.orbit_of(1).period == r
    for o in table.orbits:
        for k, x in enumerate(o.cycle):
            assert o.cycle[(k + 1) % o.period] == x * yy % N


class ParkerPlenioCheck(NamedTuple):
    count: int
    bound: int
    passed: bool
    deficit: int
    deficit_bound: int


def parker_plenio_check(table: OrbitTable, p: int, q: int) -> ParkerPlenioCheck:
    """Count residues lying in full-period orbits and compare with (p-1)(q-1).

    Passes when ``r*d >= (p-1)(q-1)`` and the number of residues in short
    orbits, ``N - r*d``, is at most ``p + q - 1``.
    """
    if p * q != table.N:
        raise BadFactorization(f"{p}*{q} != {table.N}")
    count = table.r * table.d
    bound = (p - 1) * (q - 1)
    deficit = table.N - count
    deficit_bound = p + q - 1
    return ParkerPlenioCheck(
        count, bound, count >= bound and deficit <= deficit_bound, deficit, deficit_bound
    )


def coprime_bases(N) -> list[int]:
    """All y in [1, N) coprime to N, ascending."""
    N = _as_int(N)
    return [y for y in range(1, N) if math.gcd(y, N) == 1]
