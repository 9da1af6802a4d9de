"""Command-line front end: curves, crossing reports, summaries, verification.

Subcommands: ``curve`` (CSV protocol sweeps), ``crossing`` (where the
incoherent and coherent single-cycle curves exchange dominance), ``summary``
(every boxed limit quantity as JSON), ``verify`` (the oracle suite; exit
status 1 on any failing check), ``ladder`` (second-law saturation data).

Machine parameters are taken from flags or from a plain key-value config file
(keys: E, E_C, T_R, T_H, N, seed); flags override the file.  The environment
variable ``FRIDGE_SEED`` overrides the default oracle seed.  Exit status:
0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import oracle, protocols, verify
from .ladder import LadderSpec, coherent_ladder, incoherent_ladder
from .majorization import InfeasibleTargetError
from .protocols import single_cycle_coherent_cost
from .thermal import (
    DomainError,
    INFINITE,
    MachineSpec,
    boltzmann_population,
    temperature_from_population,
)

CSV_HEADER = "control,delta_f,temperature,r"

SCENARIOS = (
    "inc-single",
    "coh-single",
    "inc-repeat",
    "coh-repeat",
    "algo",
    "internal-inc",
    "internal-coh",
    "ladder-coh",
    "ladder-inc",
)


@dataclass(frozen=True)
class CurvePoint:
    """One sampled point of a cooling curve, ordered by its control value."""

    control: float
    delta_f: float
    temperature: float
    r: float


@dataclass(frozen=True)
class CrossingReport:
    """Where the incoherent curve stops beating the coherent one."""

    delta_f_crit: float | None
    t_crit: float | None
    delta_f_crit_prime: float | None
    sign_changes: int

    def to_dict(self) -> dict:
        return {
            "delta_f_crit": self.delta_f_crit,
            "t_crit": self.t_crit,
            "delta_f_crit_prime": self.delta_f_crit_prime,
            "sign_changes": self.sign_changes,
        }


# ---------------------------------------------------------------------------
# Curve generation.
# ---------------------------------------------------------------------------


def _hot_bath_grid(t_room: float, grid: int) -> list[float]:
    # Log grid in (t_hot - t_room)/t_room: the curve saturates slowly, plus
    # the exact infinite endpoint appended.
    if grid <= 1:
        return [INFINITE]
    ratios = np.logspace(-3, 3, grid - 1)
    return [t_room * (1.0 + float(u)) for u in ratios] + [INFINITE]


def _repetition_grid(grid: int) -> list[float]:
    if grid <= 1:
        return [INFINITE]
    return [float(k) for k in range(grid - 1)] + [INFINITE]


def curve_points(
    scenario: str,
    spec: MachineSpec,
    grid: int,
    nu: float = 1.0,
    r0: float | None = None,
    t_cold: float | None = None,
) -> list[CurvePoint]:
    """Sample one protocol's cooling curve on its natural control grid."""
    if grid < 1:
        raise DomainError(f"grid must be >= 1, got {grid}")
    points: list[CurvePoint] = []
    if scenario == "inc-single":
        for t_hot in _hot_bath_grid(spec.t_room, grid):
            out = protocols.two_qubit_incoherent_single(
                MachineSpec(spec.target, spec.machine, spec.t_room, t_hot)
            )
            points.append(CurvePoint(t_hot, out.work_cost, out.t_final, out.r_final))
    elif scenario == "coh-single":
        for mu in np.linspace(0.0, 1.0, max(grid, 1)):
            r_target = _coherent_population(spec, float(mu))
            out = protocols.two_qubit_coherent_single(spec, r_target)
            points.append(CurvePoint(float(mu), out.work_cost, out.t_final, out.r_final))
    elif scenario == "inc-repeat":
        spec.require_hot_bath()
        for n in _repetition_grid(grid):
            out = protocols.repeated_incoherent(spec, protocols.RepetitionPlan(n=n))
            points.append(CurvePoint(n, out.work_cost, out.t_final, out.r_final))
    elif scenario == "coh-repeat":
        for n in _repetition_grid(grid):
            out = protocols.repeated_coherent(spec, n)
            points.append(CurvePoint(n, out.work_cost, out.t_final, out.r_final))
    elif scenario == "algo":
        for n in _repetition_grid(grid):
            out = protocols.algorithmic_cooling(spec, n, nu=nu, r0=r0)
            points.append(CurvePoint(n, out.work_cost, out.t_final, out.r_final))
    elif scenario == "internal-inc":
        for t_hot in _hot_bath_grid(spec.t_room, grid):
            out = protocols.internal_resource(spec, "incoherent", t_hot)
            points.append(CurvePoint(t_hot, out.work_cost, out.t_final, out.r_final))
    elif scenario == "internal-coh":
        for mu in np.linspace(0.0, 1.0, max(grid, 1)):
            out = protocols.internal_resource(spec, "coherent", float(mu))
            points.append(CurvePoint(float(mu), out.work_cost, out.t_final, out.r_final))
    elif scenario in ("ladder-coh", "ladder-inc"):
        if t_cold is None:
            raise DomainError(f"scenario {scenario} needs t_cold")
        for n in range(1, grid + 1):
            lspec = LadderSpec(
                n, t_cold, spec.t_room, t_hot=spec.t_hot, target_gap=spec.e
            )
            out = coherent_ladder(lspec) if scenario == "ladder-coh" else incoherent_ladder(lspec)
            stage = out.per_step[-1]
            points.append(CurvePoint(float(n), out.w_total, stage.temperature, stage.r))
    else:
        raise DomainError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    return points


def _coherent_population(spec: MachineSpec, mu: float) -> float:
    r = boltzmann_population(spec.e, spec.t_room)
    r_b = boltzmann_population(spec.e_b, spec.t_room)
    r_c = boltzmann_population(spec.e_c, spec.t_room)
    if spec.e_c <= spec.e:
        return r + mu * (r_b - r)
    if mu <= 0.5:
        return r + 2.0 * mu * (r_c - r)
    return r_c + (2.0 * mu - 1.0) * (r_b - r_c)


# ---------------------------------------------------------------------------
# Crossing point.
# ---------------------------------------------------------------------------


def incoherent_temperature_of_work(spec: MachineSpec, delta_f: float) -> float:
    """Invert the t_hot-parametrized incoherent curve at a given work budget."""
    if delta_f <= 0.0:
        return spec.t_room

    def work_of(y: float) -> float:
        # y in [0, 1) maps monotonically onto t_hot in [t_room, inf).
        t_hot = spec.t_room / (1.0 - y) if y < 1.0 else INFINITE
        out = protocols.two_qubit_incoherent_single(
            MachineSpec(spec.target, spec.machine, spec.t_room, t_hot)
        )
        return out.work_cost

    lo, hi = 0.0, 1.0 - 1e-16
    if delta_f >= work_of(hi):
        raise InfeasibleTargetError("work budget beyond the incoherent curve")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if work_of(mid) < delta_f:
            lo = mid
        else:
            hi = mid
    t_hot = spec.t_room / (1.0 - 0.5 * (lo + hi))
    out = protocols.two_qubit_incoherent_single(
        MachineSpec(spec.target, spec.machine, spec.t_room, t_hot)
    )
    return out.t_final


def coherent_temperature_of_work(spec: MachineSpec, delta_f: float) -> float:
    """Invert the piecewise-linear coherent curve at a given work budget."""
    r = boltzmann_population(spec.e, spec.t_room)
    r_b = boltzmann_population(spec.e_b, spec.t_room)
    r_c = boltzmann_population(spec.e_c, spec.t_room)
    if delta_f <= 0.0 or r_b <= r:
        return spec.t_room
    if spec.e_c <= spec.e:
        full = spec.e_c * (r_b - r)
        r_pop = r + min(delta_f / full, 1.0) * (r_b - r)
    else:
        first = (spec.e_c - spec.e) * (r_c - r)
        if delta_f <= first:
            r_pop = r + delta_f / (spec.e_c - spec.e)
        else:
            r_pop = r_c + min((delta_f - first) / (spec.e_c * (r_b - r_c)), 1.0) * (
                r_b - r_c
            )
    if r_pop >= 1.0:  # saturated at double precision
        return 0.0
    return temperature_from_population(spec.e, r_pop)


def crossing_report(spec: MachineSpec, tolerance: float) -> CrossingReport:
    """Locate every sign change of T_inc(dF) - T_coh(dF) on the common domain.

    The shared origin (both curves start at zero cost, temperature t_room)
    always counts as one sign change when the domain is non-empty; interior
    zeros are bracketed on a log grid and refined by bisection to
    ``tolerance``.  ``delta_f_crit`` is the first interior zero and
    ``delta_f_crit_prime`` the last (the two coincide when the crossing is
    unique, which is not assumed).
    """
    if not tolerance > 0.0:
        raise DomainError(f"tolerance must be > 0, got {tolerance}")
    spec.require_resonance()
    f_max = single_cycle_coherent_cost(spec)
    if f_max <= 0.0:
        return CrossingReport(None, None, None, 0)

    def gap(f: float) -> float:
        return incoherent_temperature_of_work(spec, f) - coherent_temperature_of_work(
            spec, f
        )

    probes = np.concatenate(
        (f_max * np.logspace(-9.0, -0.0001, 160), [f_max])
    )
    values = [gap(float(f)) for f in probes]
    zeros: list[float] = []
    for (f_lo, g_lo), (f_hi, g_hi) in zip(
        zip(probes, values), zip(probes[1:], values[1:])
    ):
        if g_lo == 0.0:
            zeros.append(float(f_lo))
            continue
        if g_lo * g_hi >= 0.0:
            continue
        lo, hi = float(f_lo), float(f_hi)
        while hi - lo > tolerance:
            mid = 0.5 * (lo + hi)
            if gap(mid) * g_lo > 0.0:
                lo = mid
            else:
                hi = mid
        zeros.append(0.5 * (lo + hi))
    if not zeros:
        return CrossingReport(None, None, None, 1)
    t_crit = 0.5 * (
        incoherent_temperature_of_work(spec, zeros[0])
        + coherent_temperature_of_work(spec, zeros[0])
    )
    return CrossingReport(zeros[0], t_crit, zeros[-1], 1 + len(zeros))


# ---------------------------------------------------------------------------
# Summary.
# ---------------------------------------------------------------------------


def summary_quantities(spec: MachineSpec) -> dict:
    """Every boxed limit quantity for the one- and two-qubit machines."""
    e, e_b, e_c, t = spec.e, spec.e_b, spec.e_c, spec.t_room
    r = boltzmann_population(e, t)
    r_b = boltzmann_population(e_b, t)
    r_c = boltzmann_population(e_c, t)
    r_inc_star = 0.5 * (r + r_b)
    t_coh_star = t * e / e_b
    df_coh_star = single_cycle_coherent_cost(spec)
    t_coh_inf = t * e / (e_b + e_c)
    r_coh_inf = boltzmann_population(e, t_coh_inf)
    df_coh_inf = df_coh_star + 2.0 * e_c * (r_coh_inf - r_b)
    t_algo_inf = t * e / (2.0 * e_b)
    r_algo_inf = boltzmann_population(e, t_algo_inf)
    df_algo_inf = (
        df_coh_inf + e * (r_b - r_c) + (2.0 * e_c + e) * (r_algo_inf - r_coh_inf)
    )
    return {
        "machine": {"e": e, "e_b": e_b, "e_c": e_c, "t_room": t, "t_hot": spec.t_hot},
        "one_qubit": {
            "t_coh_star": t_coh_star,
            "r_coh_star": r_b,
            "delta_f_coh_star": (r_b - r) * (e_b - e),
        },
        "two_qubit": {
            "t_inc_star": temperature_from_population(e, r_inc_star),
            "r_inc_star": r_inc_star,
            "delta_f_inc_star": e_c * (r_c - 0.5),
            "t_auto_star": t_coh_star,
            "r_auto_star": r_b,
            "delta_f_auto_star": e_c * (r_c - 0.5 + r_b - r),
            "t_coh_star": t_coh_star,
            "r_coh_star": r_b,
            "delta_f_coh_star": df_coh_star,
            "delta_f_coh_star_ab_swap": e_c * (r_b - r),
            "delta_f_coh_star_two_swap": (e_c - e) * (r_c - r) + e_c * (r_b - r_c),
            "t_coh_inf": t_coh_inf,
            "r_coh_inf": r_coh_inf,
            "delta_f_coh_inf": df_coh_inf,
            "t_algo_inf": t_algo_inf,
            "r_algo_inf": r_algo_inf,
            "delta_f_algo_inf": df_algo_inf,
        },
    }


# ---------------------------------------------------------------------------
# Argument handling.
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {"e": "e", "e_c": "e_c", "t_r": "t_r", "t_h": "t_h", "n": "n", "seed": "seed"}


def _parse_value(text: str) -> float:
    text = text.strip().lower()
    if text in ("inf", "infinite", "infinity"):
        return INFINITE
    return float(text)


def load_config(path: str) -> dict:
    """Plain key-value config: one `key = value` (or `key value`) per line."""
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, _, value = line.partition("=")
            else:
                parts = line.split(None, 1)
                if len(parts) != 2:
                    raise DomainError(f"{path}:{lineno}: cannot parse {raw!r}")
                key, value = parts
            key = key.strip().lower()
            if key not in _CONFIG_KEYS:
                raise DomainError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _parse_value(value)
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfridge",
        description="Cooling limits and work costs of minimal quantum refrigerators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_machine_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key-value config file (flags override it)")
        p.add_argument("--e", type=_parse_value, default=None, help="target gap (default 1)")
        p.add_argument("--e-c", type=_parse_value, default=None, help="machine qubit C gap")
        p.add_argument("--t-r", type=_parse_value, default=None, help="room temperature (default 1)")
        p.add_argument("--t-h", type=_parse_value, default=None, help="hot bath temperature ('inf' allowed)")

    curve = sub.add_parser("curve", help="write a cooling curve as CSV")
    curve.add_argument("scenario", choices=SCENARIOS)
    add_machine_args(curve)
    curve.add_argument("--grid", type=int, default=100, help="number of control samples")
    curve.add_argument("--nu", type=float, default=1.0, help="precooling mix for the algo scenario")
    curve.add_argument("--r0", type=float, default=None, help="starting population for the algo scenario")
    curve.add_argument("--t-c", type=_parse_value, default=None, help="cold target temperature (ladder scenarios)")
    curve.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
    curve.add_argument(
        "--full-precision",
        action="store_true",
        help="write full float precision instead of 6 significant digits",
    )

    crossing = sub.add_parser("crossing", help="locate the coherent/incoherent crossing")
    add_machine_args(crossing)
    crossing.add_argument("--tolerance", type=float, default=1e-10)

    summary = sub.add_parser("summary", help="emit every boxed limit quantity as JSON")
    add_machine_args(summary)

    ver = sub.add_parser("verify", help="run the oracle verification suite")
    add_machine_args(ver)
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--samples", type=int, default=10_000, help="Haar samples (0 skips the sweep)")
    ver.add_argument("--machines", type=int, default=60)
    ver.add_argument("--instances", type=int, default=60)
    ver.add_argument(
        "--mutate",
        choices=verify.MUTATIONS,
        default=None,
        help="corrupt one formula on purpose (falsifiability smoke test)",
    )

    lad = sub.add_parser("ladder", help="second-law saturation data for one N")
    add_machine_args(lad)
    lad.add_argument("--n", type=int, default=None, help="number of ladder stages")
    lad.add_argument("--t-c", type=_parse_value, default=None, help="cold target temperature")
    lad.add_argument("--e-g", type=_parse_value, default=None, help="embedded-ladder ground offset")
    return parser


def _resolved(args: argparse.Namespace, key: str, config: dict, default):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _machine_from(args: argparse.Namespace, config: dict) -> MachineSpec:
    e = _resolved(args, "e", config, 1.0)
    e_c = _resolved(args, "e_c", config, None)
    t_r = _resolved(args, "t_r", config, 1.0)
    t_h = _resolved(args, "t_h", config, None)
    if e_c is None:
        raise DomainError("machine qubit gap E_C is required (--e-c or config)")
    return MachineSpec.two_qubit(e_c, t_r, t_h, e=e)


def _default_seed(args: argparse.Namespace, config: dict) -> int:
    flag = getattr(args, "seed", None)
    if flag is not None:
        return int(flag)
    if "seed" in config:
        return int(config["seed"])
    env = os.environ.get("FRIDGE_SEED")
    if env is not None:
        return int(env)
    return oracle.DEFAULT_SEED


def _format_value(value: float, full: bool) -> str:
    if full:
        return repr(float(value))
    return f"{value:.6g}"


def _write_curve(points: Iterable[CurvePoint], handle, full: bool) -> None:
    handle.write(CSV_HEADER + "\n")
    for p in points:
        row = ",".join(
            _format_value(v, full) for v in (p.control, p.delta_f, p.temperature, p.r)
        )
        handle.write(row + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if getattr(args, "config", None) else {}
        if args.command == "curve":
            spec = _machine_from(args, config)
            points = curve_points(
                args.scenario,
                spec,
                args.grid,
                nu=args.nu,
                r0=args.r0,
                t_cold=args.t_c,
            )
            if args.output == "-":
                _write_curve(points, sys.stdout, args.full_precision)
            else:
                with open(args.output, "w", encoding="utf-8") as handle:
                    _write_curve(points, handle, args.full_precision)
            return 0
        if args.command == "crossing":
            spec = _machine_from(args, config)
            report = crossing_report(spec, args.tolerance)
            json.dump(report.to_dict(), sys.stdout, indent=2)
            sys.stdout.write("\n")
            return 0
        if args.command == "summary":
            spec = _machine_from(args, config)
            json.dump(summary_quantities(spec), sys.stdout, indent=2)
            sys.stdout.write("\n")
            return 0
        if args.command == "verify":
            seed = _default_seed(args, config)
            report = verify.run_verification(
                seed,
                args.samples,
                machines=args.machines,
                instances=args.instances,
                mutate=args.mutate,
            )
            json.dump(report.to_dict(), sys.stdout, indent=2)
            sys.stdout.write("\n")
            return 0 if report.passed else 1
        if args.command == "ladder":
            n = _resolved(args, "n", config, None)
            if n is None:
                raise DomainError("ladder needs --n (or config key N)")
            t_c = getattr(args, "t_c", None)
            if t_c is None:
                raise DomainError("ladder needs --t-c")
            e = _resolved(args, "e", config, 1.0)
            t_r = _resolved(args, "t_r", config, 1.0)
            t_h = _resolved(args, "t_h", config, None)
            lspec = LadderSpec(
                int(n), t_c, t_r, t_hot=t_h, e_ground_offset=args.e_g, target_gap=e
            )
            coh = coherent_ladder(lspec)
            payload = {
                "n": int(n),
                "coherent": {
                    "w_total": coh.w_total,
                    "df_target": coh.df_target,
                    "gap": coh.gap,
                },
            }
            if t_h is not None:
                inc = incoherent_ladder(lspec)
                payload["incoherent"] = {
                    "w_total": inc.w_total,
                    "df_target": inc.df_target,
                    "gap": inc.gap,
                    "q_init": inc.q_init,
                }
            json.dump(payload, sys.stdout, indent=2)
            sys.stdout.write("\n")
            return 0
        raise DomainError(f"unknown command {args.command!r}")
    except (DomainError, InfeasibleTargetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
