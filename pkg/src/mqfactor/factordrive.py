"""Factoring pipeline: scan I_y(m), locate zero points, extract factors with gcds."""

from __future__ import annotations

import json
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .errors import Exhausted, NoZeroFound, NotCoprime, PreconditionError, RetryNewY
from .modarith import Modulus, coprime_bases, mod_pow, orbit_decompose
from .mqspec import (
    closed_form_I,
    closed_form_Iy,
    coherent_intensity,
    order_intensities,
    scan_to_csv,
    total_intensity,
)
from .spinops import SpinGeometry, antisymmetric_part, evolve, initial_state_uniform

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScanPoint:
    m: int
    I: float
    Iy: float
    Iy_p: dict
    I_closed: float
    Iy_closed: float

    @property
    def discrepancy(self) -> float:
        return max(abs(self.I - self.I_closed), abs(self.Iy - self.Iy_closed))


@dataclass(frozen=True)
class ScanResult:
    y: int
    N: int
    n: int
    points: tuple
    mode: str = "exhaustive"

    @property
    def ms(self) -> list[int]:
        return [pt.m for pt in self.points]

    @property
    def Iy(self) -> list[float]:
        return [pt.Iy for pt in self.points]

    @property
    def max_discrepancy(self) -> float:
        return max((pt.discrepancy for pt in self.points), default=0.0)

    def to_csv(self, per_order: bool = False) -> str:
        rows = [{"m": pt.m, "I": pt.I, "Iy": pt.Iy, "Iy_p": pt.Iy_p} for pt in self.points]
        return scan_to_csv(rows, self.n if per_order else None)


def local_window(center: int, half_width: int) -> range:
    """m values within ``half_width`` of a suspected zero point (never negative)."""
    return range(max(0, center - half_width), center + half_width + 1)


def _scan_point(state0, table, y, m, n_i, eps_i) -> ScanPoint:
    rho = evolve(state0, y, m)
    rho_y = antisymmetric_part(y, m, state0)
    spectrum = order_intensities(rho_y)
    return ScanPoint(
        m=m,
        I=coherent_intensity(rho),
        Iy=total_intensity(rho_y),
        Iy_p=dict(spectrum.intensities),
        I_closed=closed_form_I(table, m, n_i, eps_i),
        Iy_closed=closed_form_Iy(table, m, n_i, eps_i),
    )


def scan_intensity(
    y: int,
    N,
    m_range,
    n_i: int = 1,
    eps_i: float = 1.0,
    mode: str = "exhaustive",
    workers: int = 1,
) -> ScanResult:
    """Simulate I(m), I_y(m) and the per-order I_y(p, m) over ``m_range``.

    Direct values come from the evolved density operators; the closed forms are
    stored next to them.  ``workers > 1`` evaluates points in a thread pool;
    results keep the order of ``m_range``.
    """
    mod = Modulus.coerce(N)
    g = math.gcd(int(y), mod.N)
    if g != 1:
        raise NotCoprime(y, mod.N, g)
    if y % mod.N == 1:
        log.warning("y=%d is the identity modulo N; every intensity vanishes", y)
    table = orbit_decompose(y, mod.N)
    state0 = initial_state_uniform(SpinGeometry(n_i, mod, eps_i))
    ms = [int(m) for m in m_range]

    def run(m):
        return _scan_point(state0, table, y, m, n_i, eps_i)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            points = list(pool.map(run, ms))
    else:
        points = [run(m) for m in ms]
    return ScanResult(int(y), mod.N, mod.n, tuple(points), mode)


@dataclass(frozen=True)
class ZeroPoints:
    points: list
    r_prime: int


def find_zero_points(scan: ScanResult, tol: float = 1e-9) -> ZeroPoints:
    """All scanned m with I_y(m) <= tol; r' is the smallest positive one.

    Intensities are eps times exact rationals here, and away from zero points
    I_y >= (1/8) n_i 2^n_i eps (N - (p+q-1)), so any tol below that works.
    """
    if tol < 0:
        raise PreconditionError("tol must be nonnegative")
    zeros = sorted(pt.m for pt in scan.points if pt.Iy <= tol)
    positive = [m for m in zeros if m > 0]
    if not positive:
        raise NoZeroFound(f"no positive zero point of I_y in the scanned range (y={scan.y})")
    return ZeroPoints(zeros, positive[0])


@dataclass
class FactorResult:
    N: int
    factors: tuple | None = None
    status: str = "pending"
    y_trace: list = field(default_factory=list)
    r_prime: int | None = None
    f_chain: list = field(default_factory=list)
    gcd_outcomes: list = field(default_factory=list)
    seed: int | None = None

    def to_json(self) -> str:
        data = asdict(self)
        data["factors"] = list(self.factors) if self.factors else None
        return json.dumps(data, sort_keys=False)


def classical_postprocess(r_prime: int, y: int, N, result: FactorResult | None = None) -> FactorResult:
    """Turn a zero point r' into factors of N.

    f = y^r' mod N.  If f = -1 the base is useless.  If f = 1 the exponent is
    halved and tried again (at most bit-length-of-N times).  Otherwise gcd(f-1, N)
    and gcd(f+1, N) are inspected for a nontrivial divisor.  Raises
    :class:`RetryNewY` with the partial trace when no factor comes out.
    """
    N = Modulus.coerce(N).N
    if r_prime < 1:
        raise PreconditionError("r' must be >= 1")
    result = result or FactorResult(N)
    result.r_prime = r_prime
    exponent = r_prime
    for _ in range(N.bit_length() + 1):
        f = mod_pow(y, exponent, N)
        result.f_chain.append({"y": y, "exponent": exponent, "f": f})
        if f == N - 1:
            result.status = "retry_new_y"
            raise RetryNewY(f"y^{exponent} = -1 mod {N}", result)
        if f == 1:
            if exponent % 2:
                break
            exponent //= 2
            continue
        g_minus, g_plus = math.gcd(f - 1, N), math.gcd(f + 1, N)
        result.gcd_outcomes.append({"f": f, "gcd_minus": g_minus, "gcd_plus": g_plus})
        for g in (g_minus, g_plus):
            if 1 < g < N:
                result.factors = tuple(sorted((g, N // g)))
                result.status = "success"
                return result
        break
    result.status = "retry_new_y"
    raise RetryNewY(f"no nontrivial factor from y={y}, r'={r_prime}", result)


def _is_prime_power(N: int) -> bool:
    for k in range(2, N.bit_length() + 1):
        root = round(N ** (1 / k))
        for c in (root - 1, root, root + 1):
            if c > 1 and c**k == N:
                return True
    return False


def _is_prime(N: int) -> bool:
    if N < 2:
        return False
    return all(N % d for d in range(2, math.isqrt(N) + 1))


def check_factor_preconditions(N: int) -> None:
    if N < 15 or N % 2 == 0:
        raise PreconditionError(f"N={N} must be odd and >= 15")
    if _is_prime(N):
        raise PreconditionError(f"N={N} is prime")
    if _is_prime_power(N):
        raise PreconditionError(f"N={N} is a prime power")


@dataclass(frozen=True)
class FactorPolicy:
    """How :func:`factor` chooses bases and how long it searches.

    ``y_order`` is ``"ascending"``, ``"random"`` (driven by ``seed``) or an
    explicit sequence of bases.
    """

    y_order: object = "ascending"
    seed: int = 0
    m_budget: int | None = None
    max_tries: int = 20
    tol: float = 1e-9
    n_i: int = 1
    eps_i: float = 1.0


def _bases(N: int, policy: FactorPolicy) -> list[int]:
    candidates = [y for y in coprime_bases(N) if y != 1]
    if policy.y_order == "ascending":
        return candidates
    if policy.y_order == "random":
        rng = random.Random(policy.seed)
        rng.shuffle(candidates)
        return candidates
    return [int(y) for y in policy.y_order]


def factor(N: int, policy: FactorPolicy | None = None) -> FactorResult:
    """Factor an odd composite non-prime-power N through simulated zero-point search.

    For each base the scan walks m = 0, 1, ... up to the m budget (default N) and
    stops at the first positive zero point of I_y.
    """
    policy = policy or FactorPolicy()
    N = int(N)
    check_factor_preconditions(N)
    result = FactorResult(N, seed=policy.seed)
    budget = policy.m_budget if policy.m_budget is not None else N
    for y in _bases(N, policy)[: policy.max_tries]:
        entry = {"y": y}
        result.y_trace.append(entry)
        g = math.gcd(y, N)
        if g != 1:
            entry["outcome"] = "not_coprime"
            continue
        table = orbit_decompose(y, N)
        state0 = initial_state_uniform(SpinGeometry(policy.n_i, N, policy.eps_i))
        zero = None
        for m in range(1, budget + 1):
            point = _scan_point(state0, table, y, m, policy.n_i, policy.eps_i)
            if point.Iy <= policy.tol:
                zero = m
                break
        if zero is None:
            entry["outcome"] = "no_zero"
            continue
        entry["r_prime"] = zero
        try:
            classical_postprocess(zero, y, N, result)
        except RetryNewY:
            entry["outcome"] = "retry"
            log.info("N=%d: base y=%d gave r'=%d, retrying", N, y, zero)
            continue
        entry["outcome"] = "success"
        return result
    result.status = "exhausted"
    raise Exhausted(f"no factor of {N} within the policy budget", result)
