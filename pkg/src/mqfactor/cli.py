"""Command-line front end.

Usage:
    mqfactor orbits   --N 15 --y 2
    mqfactor scan     --N 15 --y 2 --m-max 8 [--per-order]
    mqfactor spectrum --N 15 --y 2 --m 1
    mqfactor factor   --N 21
    mqfactor verify   --N 21 --y 4

Every flag may also come from ``--config FILE`` holding ``flag-name=value``
lines (``#`` starts a comment); flags given on the command line win.
Exit codes: 0 success, 2 precondition violated, 3 computation failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from .errors import ComputationError, MQFactorError, PreconditionError
from .factordrive import FactorPolicy, factor, scan_intensity
from .hamiltonian import approx_diagonalizer, split_hamiltonian
from .modarith import orbit_decompose, parker_plenio_check
from .mqspec import (
    closed_form_I,
    closed_form_Iy,
    coherent_intensity,
    order_intensities,
    spectrum_to_csv,
    synthesize_signal,
    total_intensity,
    transition_census,
)
from .spinops import (
    SpinGeometry,
    antisymmetric_part,
    build_propagator,
    evolve,
    initial_state_uniform,
)

EXIT_OK, EXIT_PRECONDITION, EXIT_COMPUTATION = 0, 2, 3


@dataclass
class RunConfig:
    N: int | None = None
    y: int | None = None
    ni: int = 1
    eps_i: float = 1.0
    m: int | None = None
    m_max: int | None = None
    omega_s: float = 1.0
    t1_samples: int | None = None
    tol: float = 1e-9
    seed: int = 0
    y_order: str = "ascending"
    per_order: bool = False
    out: str | None = None

    def validate(self, command: str) -> None:
        if self.N is None:
            raise PreconditionError("--N is required")
        if command in ("orbits", "scan", "spectrum", "verify") and self.y is None:
            raise PreconditionError("--y is required")
        if command == "spectrum" and self.m is None:
            raise PreconditionError("--m is required")
        if self.ni < 1:
            raise PreconditionError("--ni must be >= 1")
        if self.tol < 0:
            raise PreconditionError("--tol must be nonnegative")
        if self.y_order not in ("ascending", "random"):
            raise PreconditionError("--y-order must be 'ascending' or 'random'")


_CASTS = {f.name: f.type for f in fields(RunConfig)}


def _cast(name: str, raw: str):
    kind = _CASTS[name]
    if "bool" in kind:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if "int" in kind:
        return int(raw)
    if "float" in kind:
        return float(raw)
    return raw


def read_config(path) -> dict:
    """Parse a flat ``key=value`` file whose keys mirror the flag names."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionError(f"{path}:{lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        name = key.lstrip("-").replace("-", "_")
        if name not in _CASTS:
            raise PreconditionError(f"{path}:{lineno}: unknown key {key!r}")
        values[name] = _cast(name, raw)
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int)
    common.add_argument("--y", type=int)
    common.add_argument("--ni", type=int)
    common.add_argument("--eps-i", dest="eps_i", type=float)
    common.add_argument("--m", type=int)
    common.add_argument("--m-max", dest="m_max", type=int)
    common.add_argument("--omega-s", dest="omega_s", type=float)
    common.add_argument("--t1-samples", dest="t1_samples", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--y-order", dest="y_order")
    common.add_argument("--per-order", dest="per_order", action="store_const", const=True)
    common.add_argument("--config")
    common.add_argument("--out")

    parser = argparse.ArgumentParser(prog="mqfactor", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("orbits", "orbit decomposition and full-period count"),
        ("scan", "I(m) and I_y(m) over m = 0..m-max as CSV"),
        ("spectrum", "per-order spectrum of rho_y(m) as CSV"),
        ("factor", "end-to-end factoring, JSON trace"),
        ("verify", "closed-form versus simulation report"),
    ]:
        sub.add_parser(name, parents=[common], help=text)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = read_config(args.config) if args.config else {}
    for name in _CASTS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    cfg = RunConfig(**values)
    cfg.validate(args.command)
    return cfg


def _semiprime_split(N: int):
    for d in range(2, math.isqrt(N) + 1):
        if N % d == 0:
            return (d, N // d) if _is_prime(d) and _is_prime(N // d) else None
    return None


def _is_prime(k: int) -> bool:
    return k > 1 and all(k % d for d in range(2, math.isqrt(k) + 1))


def cmd_orbits(cfg: RunConfig) -> tuple[str, int]:
    table = orbit_decompose(cfg.y, cfg.N)
    report = {
        "N": cfg.N,
        "y": cfg.y,
        "seed": cfg.seed,
        "r": table.r,
        "t": table.t,
        "d": table.d,
        "orbits": [
            {"representative": o.representative, "cycle": list(o.cycle), "period": o.period}
            for o in table.orbits
        ],
        "pp_count": table.r * table.d,
        "pp_bound": None,
        "pp_pass": None,
    }
    if table.r == 1:
        report["warning"] = "degenerate base: y = 1 mod N, every orbit is a fixed point"
    split = _semiprime_split(cfg.N)
    code = EXIT_OK
    if split:
        check = parker_plenio_check(table, *split)
        report.update(
            p=split[0],
            q=split[1],
            pp_bound=check.bound,
            pp_pass=check.passed,
            pp_deficit=check.deficit,
            pp_deficit_bound=check.deficit_bound,
        )
        code = EXIT_OK if check.passed else EXIT_COMPUTATION
    return json.dumps(report, indent=2) + "\n", code


def cmd_scan(cfg: RunConfig) -> tuple[str, int]:
    result = scan_intensity(cfg.y, cfg.N, range((8 if cfg.m_max is None else cfg.m_max) + 1), cfg.ni, cfg.eps_i)
    return result.to_csv(per_order=cfg.per_order), EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> tuple[str, int]:
    geo = SpinGeometry(cfg.ni, cfg.N, cfg.eps_i)
    state0 = initial_state_uniform(geo)
    rho_y = antisymmetric_part(cfg.y, cfg.m, state0)
    spectrum = order_intensities(rho_y, y=cfg.y, m=cfg.m)
    signal = synthesize_signal(state0, cfg.y, cfg.m, "antisymmetric", cfg.omega_s, cfg.t1_samples)
    return spectrum_to_csv(spectrum, {"dft_intensity": signal.peaks}), EXIT_OK


def cmd_factor(cfg: RunConfig) -> tuple[str, int]:
    y_order = cfg.y_order
    if cfg.y is not None:
        rest = [y for y in range(2, cfg.N) if y != cfg.y and math.gcd(y, cfg.N) == 1]
        y_order = [cfg.y] + rest
    policy = FactorPolicy(
        y_order=y_order,
        seed=cfg.seed,
        m_budget=cfg.m_max,
        tol=cfg.tol,
        n_i=cfg.ni,
        eps_i=cfg.eps_i,
    )
    try:
        result = factor(cfg.N, policy)
    except ComputationError as exc:
        if getattr(exc, "result", None) is not None:
            return exc.result.to_json() + "\n", EXIT_COMPUTATION
        raise
    return result.to_json() + "\n", EXIT_OK


def _check(name, value, tol, passed=None):
    ok = bool(value <= tol) if passed is None else bool(passed)
    return {"name": name, "value": float(value), "tol": tol, "pass": ok}


def _enumerate_transitions(n: int) -> dict:
    weight = [bin(a).count("1") for a in range(1 << n)]
    counts = {p: 0 for p in range(n + 1)}
    for a, b in combinations(range(1 << n), 2):
        counts[abs(weight[b] - weight[a])] += 1
    return counts


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    table = orbit_decompose(cfg.y, cfg.N)
    report = {"N": cfg.N, "y": cfg.y, "seed": cfg.seed, "r": table.r, "checks": [], "warnings": []}
    if table.r == 1:
        report["warnings"].append("degenerate base: y = 1 mod N; checks skipped")
        report["all_pass"] = True
        report["max_discrepancy"] = 0.0
        return json.dumps(report, indent=2) + "\n", EXIT_OK

    geo = SpinGeometry(cfg.ni, cfg.N, cfg.eps_i)
    state0 = initial_state_uniform(geo)
    power0 = total_intensity(state0)
    worst_iy = worst_i = worst_power = 0.0
    for m in range(2 * table.r + 1):
        rho_y = antisymmetric_part(cfg.y, m, state0)
        rho = evolve(state0, cfg.y, m)
        iy_c = closed_form_Iy(table, m, cfg.ni, cfg.eps_i)
        worst_iy = max(worst_iy, abs(total_intensity(rho_y) - iy_c) / max(1.0, abs(iy_c)))
        i_c = closed_form_I(table, m, cfg.ni, cfg.eps_i)
        worst_i = max(worst_i, abs(coherent_intensity(rho) - i_c) / max(1.0, abs(i_c)))
        worst_power = max(worst_power, abs(total_intensity(rho) - power0) / power0)
    checks = report["checks"]
    checks.append(_check("closed_form_Iy", worst_iy, 1e-9))
    checks.append(_check("closed_form_I", worst_i, 1e-9))
    checks.append(_check("power_invariance", worst_power, 1e-12))

    census = transition_census(geo.n)
    if geo.n <= 6:
        enum = _enumerate_transitions(geo.n)
        mismatch = sum(abs(enum[p] - census.counts[p]) for p in census.counts)
        checks.append(_check("transition_census", mismatch, 0))

    split = split_hamiltonian(cfg.y, cfg.N)
    U = build_propagator(cfg.y, 1, cfg.N).matrix()
    checks.append(_check("hamiltonian_exp", np.max(np.abs(expm(-1j * split.H) - U)), 1e-9))
    checks.append(_check("hamiltonian_series", split.series_mismatch, 1e-9))
    checks.append(_check("hamiltonian_hermitian", np.max(np.abs(split.H - split.H.conj().T)), 1e-12))

    diag = approx_diagonalizer(cfg.y, cfg.N)
    report["diagonalizer_residual"] = diag.residual
    if all(cfg.N % period == 0 for period in table.periods):
        checks.append(_check("diagonalizer_exact", diag.residual, 1e-9))

    report["max_discrepancy"] = max(c["value"] for c in checks if c["name"] != "transition_census")
    report["all_pass"] = all(c["pass"] for c in checks)
    return json.dumps(report, indent=2) + "\n", EXIT_OK if report["all_pass"] else EXIT_COMPUTATION


COMMANDS = {
    "orbits": cmd_orbits,
    "scan": cmd_scan,
    "spectrum": cmd_spectrum,
    "factor": cmd_factor,
    "verify": cmd_verify,
}


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out
    try:
        cfg = resolve_config(args)
        out = cfg.out
        text, code = COMMANDS[args.command](cfg)
    except MQFactorError as exc:
        code = EXIT_PRECONDITION if isinstance(exc, PreconditionError) else EXIT_COMPUTATION
        text = json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
    _emit(text, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
