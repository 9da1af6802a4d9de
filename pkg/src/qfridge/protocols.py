"""Closed-form evaluators for every named cooling protocol.

Each evaluator returns a :class:`ProtocolOutcome` holding the final ground
population, the extracted temperature, the resource free-energy cost, the
heat drawn (incoherent scenarios only), and the per-step trajectory.  The
evaluators are purely closed-form; the dense density-matrix route lives in
:mod:`qfridge.oracle` so that formula/oracle independence is architectural.

Infinite repetition counts and infinite hot-bath temperatures are exact limit
branches, never large-number approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from . import majorization, virtual
from .majorization import InfeasibleTargetError, Regime
from .thermal import (
    ConfigurationError,
    DomainError,
    INFINITE,
    MachineSpec,
    RESONANCE_RTOL,
    boltzmann_population,
    hamiltonian_diagonal,
    resource_free_energy,
    temperature_from_population,
    thermal_populations,
)


class TrajectoryPoint(NamedTuple):
    step: float
    r: float
    delta_f: float


@dataclass(frozen=True)
class ProtocolOutcome:
    """Final state and cost of one protocol run."""

    r_final: float
    t_final: float
    work_cost: float
    heat_drawn: float | None = None
    trajectory: tuple[TrajectoryPoint, ...] = ()
    flag: str | None = None


@dataclass(frozen=True)
class RepetitionPlan:
    """Repetition count plus the protocol's control parameter map.

    ``n`` may be a non-negative integer or ``math.inf``.  Recognized control
    keys: ``t_hot`` (incoherent; overrides the machine's), ``mu``
    (single-cycle coherent), ``nu`` (partial precooling).
    """

    n: float
    control: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.n >= 0:
            raise DomainError(f"repetition count must be >= 0, got {self.n}")
        for key in ("mu", "nu"):
            value = self.control.get(key)
            if value is not None and not 0.0 <= value <= 1.0:
                raise DomainError(f"{key} must lie in [0, 1], got {value}")


def _room_population(spec: MachineSpec) -> float:
    return boltzmann_population(spec.e, spec.t_room)


def _machine_room_populations(spec: MachineSpec) -> tuple[float, float]:
    return (
        boltzmann_population(spec.e_b, spec.t_room),
        boltzmann_population(spec.e_c, spec.t_room),
    )


def _final_temperature(spec: MachineSpec, r_final: float) -> float:
    # Populations saturate to exactly 1.0 in double precision once
    # gap/temperature exceeds ~37; the corresponding temperature is below
    # anything a float population can resolve, reported as 0.0.
    if r_final >= 1.0:
        return 0.0
    return temperature_from_population(spec.e, r_final)


def one_qubit_incoherent(spec: MachineSpec) -> ProtocolOutcome:
    """Single-qubit machine under energy-conserving unitaries: no cooling.

    With one machine qubit the joint spectrum offers no degeneracy that can
    raise the target's ground population: zero gaps make the state
    proportional to the identity on the degenerate subspaces, and equal gaps
    leave the favorable level already more populated.
    """
    if len(spec.machine) != 1:
        raise DomainError("one-qubit protocol needs exactly one machine qubit")
    e, e_b = spec.e, spec.e_b
    scale = max(1.0, e, e_b)
    if e <= RESONANCE_RTOL * scale or e_b <= RESONANCE_RTOL * scale:
        reason = "zero-gap degeneracy: state proportional to identity on it"
    elif abs(e - e_b) <= RESONANCE_RTOL * scale:
        reason = "equal gaps: unitaries on the degenerate subspace only heat"
    else:
        reason = "no degeneracy: only trivial energy-conserving unitaries exist"
    r = _room_population(spec)
    return ProtocolOutcome(
        r_final=r,
        t_final=spec.t_room,
        work_cost=0.0,
        heat_drawn=0.0,
        trajectory=(TrajectoryPoint(0, r, 0.0),),
        flag=f"no cooling possible: {reason}",
    )


def one_qubit_coherent(spec: MachineSpec, r_target: float) -> ProtocolOutcome:
    """Work-optimal single-cycle cooling against one machine qubit."""
    if len(spec.machine) != 1:
        raise DomainError("one-qubit protocol needs exactly one machine qubit")
    if spec.e >= spec.e_b:
        raise DomainError(
            f"cooling impossible: needs e < e_b, got e={spec.e}, e_b={spec.e_b}"
        )
    rho_in = thermal_populations(spec.gaps, (spec.t_room,) * 2)
    h = hamiltonian_diagonal(spec.gaps)
    result = majorization.solve_one_qubit(rho_in, h, r_target)
    work = result.objective - float(rho_in @ h)
    r = _room_population(spec)
    return ProtocolOutcome(
        r_final=r_target,
        t_final=_final_temperature(spec, r_target),
        work_cost=work,
        trajectory=(TrajectoryPoint(0, r, 0.0), TrajectoryPoint(1, r_target, work)),
    )


def two_qubit_incoherent_single(spec: MachineSpec) -> ProtocolOutcome:
    """Heat qubit C, swap the degenerate pair |010>, |101> once."""
    spec.require_resonance()
    t_hot = spec.require_hot_bath()
    r = _room_population(spec)
    r_b, r_c = _machine_room_populations(spec)
    r_ch = boltzmann_population(spec.e_c, t_hot)
    r_final = r * r_b + ((1.0 - r) * r_b + r * (1.0 - r_b)) * (1.0 - r_ch)
    heat = spec.e_c * (r_c - r_ch)
    work = resource_free_energy(heat, t_hot, spec.t_room)
    return ProtocolOutcome(
        r_final=r_final,
        t_final=_final_temperature(spec, r_final),
        work_cost=work,
        heat_drawn=heat,
        trajectory=(TrajectoryPoint(0, r, 0.0), TrajectoryPoint(1, r_final, work)),
    )


def single_cycle_coherent_cost(spec: MachineSpec) -> float:
    """Optimal work of maximal single-cycle coherent cooling (r_target = r_B)."""
    r = _room_population(spec)
    r_b, r_c = _machine_room_populations(spec)
    if spec.e_c <= spec.e:
        return spec.e_c * (r_b - r)
    return (spec.e_c - spec.e) * (r_c - r) + spec.e_c * (r_b - r_c)


def two_qubit_coherent_single(spec: MachineSpec, r_target: float) -> ProtocolOutcome:
    """Work-optimal single-cycle coherent cooling of the resonant machine."""
    spec.require_resonance()
    rho_in = thermal_populations(spec.gaps, (spec.t_room,) * 3)
    h = hamiltonian_diagonal(spec.gaps)
    regime = Regime.EC_LE_E if spec.e_c <= spec.e else Regime.EC_GT_E
    result = majorization.solve_two_qubit(rho_in, h, r_target, regime)
    work = result.objective - float(rho_in @ h)
    r = _room_population(spec)
    return ProtocolOutcome(
        r_final=r_target,
        t_final=_final_temperature(spec, r_target),
        work_cost=work,
        trajectory=(TrajectoryPoint(0, r, 0.0), TrajectoryPoint(1, r_target, work)),
    )


def _incoherent_virtual_qubit(spec: MachineSpec, t_hot: float) -> virtual.VirtualQubit:
    r_b, _ = _machine_room_populations(spec)
    r_ch = boltzmann_population(spec.e_c, t_hot)
    machine_state = np.kron([r_b, 1.0 - r_b], [r_ch, 1.0 - r_ch])
    return virtual.extract_virtual_qubit(machine_state, 1, 2, spec.e_b - spec.e_c)


def repeated_incoherent(spec: MachineSpec, plan: RepetitionPlan) -> ProtocolOutcome:
    """n reset-and-swap incoherent cycles (asymptote: the autonomous fridge).

    The heat ledger holds the initial preheat of qubit C plus the re-heats
    before every swap after the first; the work cost is that heat times the
    Carnot factor.
    """
    spec.require_resonance()
    t_hot = plan.control.get("t_hot", spec.t_hot)
    if t_hot is None:
        raise ConfigurationError("repeated incoherent operation needs t_hot")
    if not t_hot >= spec.t_room:
        raise DomainError(f"t_hot must be >= t_room, got {t_hot}")
    n = plan.n
    r = _room_population(spec)
    _, r_c = _machine_room_populations(spec)
    r_ch = boltzmann_population(spec.e_c, t_hot)
    vq = _incoherent_virtual_qubit(spec, t_hot)
    preheat = spec.e_c * (r_c - r_ch)

    def heat_after(steps: int) -> float:
        if steps == 0:
            return preheat
        return preheat + spec.e_c * (virtual.n_swap_population(r, vq, steps - 1) - r)

    if math.isinf(n):
        t_final = _incoherent_limit_temperature(spec, t_hot)
        r_final = boltzmann_population(spec.e, t_final)
        heat = preheat + spec.e_c * (r_final - r)
        work = resource_free_energy(heat, t_hot, spec.t_room)
        trajectory = (
            TrajectoryPoint(0, r, resource_free_energy(preheat, t_hot, spec.t_room)),
            TrajectoryPoint(INFINITE, r_final, work),
        )
    else:
        steps = int(n)
        points = []
        for k in range(steps + 1):
            r_k = virtual.n_swap_population(r, vq, k)
            f_k = resource_free_energy(heat_after(k), t_hot, spec.t_room)
            points.append(TrajectoryPoint(k, r_k, f_k))
        trajectory = tuple(points)
        r_final = trajectory[-1].r
        t_final = _final_temperature(spec, r_final)
        heat = heat_after(steps)
        work = trajectory[-1].delta_f
    return ProtocolOutcome(
        r_final=r_final,
        t_final=t_final,
        work_cost=work,
        heat_drawn=heat,
        trajectory=trajectory,
    )


def _incoherent_limit_temperature(spec: MachineSpec, t_hot: float) -> float:
    return spec.e / (spec.e_b / spec.t_room - spec.e_c / t_hot)


def autonomous_steady_state(spec: MachineSpec) -> ProtocolOutcome:
    """Steady state of the always-on three-qubit fridge.

    Identical final population and cumulative heat to infinitely repeated
    incoherent operations; only the steady-state formulas are implemented,
    not the open-system dynamics reaching them.
    """
    spec.require_resonance()
    t_hot = spec.require_hot_bath()
    r = _room_population(spec)
    _, r_c = _machine_room_populations(spec)
    r_ch = boltzmann_population(spec.e_c, t_hot)
    t_auto = _incoherent_limit_temperature(spec, t_hot)
    r_auto = boltzmann_population(spec.e, t_auto)
    heat = spec.e_c * (r_c - r_ch + r_auto - r)
    work = resource_free_energy(heat, t_hot, spec.t_room)
    return ProtocolOutcome(
        r_final=r_auto,
        t_final=t_auto,
        work_cost=work,
        heat_drawn=heat,
        trajectory=(TrajectoryPoint(0, r, 0.0), TrajectoryPoint(INFINITE, r_auto, work)),
    )


def _coherent_virtual_qubit(spec: MachineSpec, r_c_pop: float) -> virtual.VirtualQubit:
    r_b, _ = _machine_room_populations(spec)
    machine_state = np.kron([r_b, 1.0 - r_b], [r_c_pop, 1.0 - r_c_pop])
    return virtual.extract_virtual_qubit(machine_state, 0, 3, spec.e_b + spec.e_c)


def repeated_coherent(spec: MachineSpec, n: float) -> ProtocolOutcome:
    """Optimal first cycle, then reset-and-swap against the {00,11} subspace.

    The first cycle is the work-optimal single-cycle operation (it lands on
    exactly the same population r_B as one {00,11}-subspace swap, but at
    lower cost); each later cycle swaps |100> with |011> after the machine is
    rethermalized, moving population at gradient e_b + e_c - e = 2 e_c.
    """
    spec.require_resonance()
    if not n >= 0:
        raise DomainError(f"repetition count must be >= 0, got {n}")
    r = _room_population(spec)
    r_b, r_c = _machine_room_populations(spec)
    vq = _coherent_virtual_qubit(spec, r_c)
    first_cost = single_cycle_coherent_cost(spec)

    def cost_at(r_k: float) -> float:
        return first_cost + 2.0 * spec.e_c * (r_k - r_b)

    if math.isinf(n):
        t_final = spec.t_room * spec.e / (spec.e_b + spec.e_c)
        r_final = boltzmann_population(spec.e, t_final)
        work = cost_at(r_final)
        trajectory = (
            TrajectoryPoint(0, r, 0.0),
            TrajectoryPoint(INFINITE, r_final, work),
        )
    else:
        steps = int(n)
        points = [TrajectoryPoint(0, r, 0.0)]
        for k in range(1, steps + 1):
            r_k = virtual.n_swap_population(r, vq, k)
            points.append(TrajectoryPoint(k, r_k, cost_at(r_k)))
        trajectory = tuple(points)
        r_final = trajectory[-1].r
        t_final = spec.t_room if steps == 0 else _final_temperature(spec, r_final)
        work = trajectory[-1].delta_f
    return ProtocolOutcome(
        r_final=r_final,
        t_final=t_final,
        work_cost=work,
        trajectory=trajectory,
    )


def precooled_population(spec: MachineSpec, nu: float) -> float:
    """Qubit C ground population after a nu-partial precooling swap with B."""
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"nu must lie in [0, 1], got {nu}")
    r_b, r_c = _machine_room_populations(spec)
    return r_c + nu * (r_b - r_c)


def precool_mixing_for_population(spec: MachineSpec, r_target: float) -> float:
    """Mixing nu whose asymptotic {00,11} population equals ``r_target``."""
    r_b, r_c = _machine_room_populations(spec)
    denom = r_target * (1.0 - r_b) + r_b * (1.0 - r_target)
    c_pop = r_target * (1.0 - r_b) / denom
    span = r_b - r_c
    if span <= 0.0:
        return 0.0
    return min(max((c_pop - r_c) / span, 0.0), 1.0)


def algorithmic_cooling(
    spec: MachineSpec, n: float, nu: float = 1.0, r0: float | None = None
) -> ProtocolOutcome:
    """Precool C through B, then swap the target against the {00,11} subspace.

    ``nu`` tunes the precooling partial swap (1 = full algorithmic cooling,
    0 = plain repeated coherent populations); ``r0`` is the target population
    the procedure starts from (default: thermal at t_room).  Work per cycle:
    2 e_c per unit of population cooled plus e per unit of precooling
    restored.
    """
    spec.require_resonance()
    if not n >= 0:
        raise DomainError(f"repetition count must be >= 0, got {n}")
    r = _room_population(spec)
    if r0 is None:
        r0 = r
    if r0 < r - 1e-12:
        raise DomainError(f"starting population {r0} below the thermal value {r}")
    _, r_c = _machine_room_populations(spec)
    c_pop = precooled_population(spec, nu)
    vq = _coherent_virtual_qubit(spec, c_pop)
    precool_cost = spec.e * (c_pop - r_c)

    def cost_at(r_k: float, r_prev: float) -> float:
        return precool_cost + 2.0 * spec.e_c * (r_k - r0) + spec.e * (r_prev - r0)

    if math.isinf(n):
        if nu == 1.0:
            t_final = spec.t_room * spec.e / (2.0 * spec.e_b)
            r_final = boltzmann_population(spec.e, t_final)
        else:
            r_final = vq.r_v
            t_final = _final_temperature(spec, r_final)
        work = cost_at(r_final, r_final)
        trajectory = (
            TrajectoryPoint(0, r0, 0.0),
            TrajectoryPoint(INFINITE, r_final, work),
        )
    else:
        steps = int(n)
        points = [TrajectoryPoint(0, r0, 0.0)]
        for k in range(1, steps + 1):
            r_k = virtual.n_swap_population(r0, vq, k)
            r_prev = virtual.n_swap_population(r0, vq, k - 1)
            points.append(TrajectoryPoint(k, r_k, cost_at(r_k, r_prev)))
        trajectory = tuple(points)
        r_final = trajectory[-1].r
        t_final = spec.t_room if steps == 0 and r0 == r else (
            _final_temperature(spec, r_final)
        )
        work = trajectory[-1].delta_f
    return ProtocolOutcome(
        r_final=r_final,
        t_final=t_final,
        work_cost=work,
        trajectory=trajectory,
    )


def optimal_sequence(spec: MachineSpec, t_target: float) -> ProtocolOutcome:
    """Cheapest route to ``t_target``: swap chain, repeats, tuned precooling.

    Phases in order, each at its energy gradient, stopping at the phase that
    reaches the target: (if e_c > e) target<->C swap, target<->B swap,
    repeated {00,11} swaps down to their asymptote, then precooling tuned so
    the asymptotic population matches the target exactly.
    """
    spec.require_resonance()
    if not t_target > 0.0:
        raise DomainError(f"target temperature must be > 0, got {t_target}")
    r = _room_population(spec)
    r_b, r_c = _machine_room_populations(spec)
    t_floor = spec.t_room * spec.e / (2.0 * spec.e_b)
    r_t = boltzmann_population(spec.e, t_target)
    r_floor = boltzmann_population(spec.e, t_floor)
    if r_t > r_floor * (1.0 + 1e-12) or t_target < t_floor * (1.0 - 1e-12):
        raise InfeasibleTargetError(
            f"target temperature {t_target} below the reachable floor {t_floor}"
        )
    r_t = min(r_t, r_floor)
    if r_t <= r:
        return ProtocolOutcome(
            r_final=r, t_final=spec.t_room, work_cost=0.0, trajectory=()
        )

    r_coh_inf = boltzmann_population(
        spec.e, spec.t_room * spec.e / (spec.e_b + spec.e_c)
    )
    phases: list[tuple[float, float]] = []  # (population endpoint, gradient)
    if spec.e_c > spec.e:
        phases.append((r_c, spec.e_c - spec.e))
    phases.append((r_b, spec.e_b - spec.e))
    phases.append((r_coh_inf, spec.e_b + spec.e_c - spec.e))

    work = 0.0
    r_now = r
    trajectory: list[TrajectoryPoint] = [TrajectoryPoint(0, r, 0.0)]
    for index, (r_end, gradient) in enumerate(phases, start=1):
        if r_t <= r_end:
            work += (r_t - r_now) * gradient
            trajectory.append(TrajectoryPoint(index, r_t, work))
            return ProtocolOutcome(
                r_final=r_t,
                t_final=t_target,
                work_cost=work,
                trajectory=tuple(trajectory),
            )
        work += (r_end - r_now) * gradient
        r_now = r_end
        trajectory.append(TrajectoryPoint(index, r_end, work))

    # Tuned-precooling tail from the repeated-coherent asymptote to the target.
    nu = precool_mixing_for_population(spec, r_t)
    c_pop = precooled_population(spec, nu)
    work += spec.e * (c_pop - r_c) + (spec.e + 2.0 * spec.e_c) * (r_t - r_now)
    trajectory.append(TrajectoryPoint(len(phases) + 1, r_t, work))
    return ProtocolOutcome(
        r_final=r_t,
        t_final=t_target,
        work_cost=work,
        trajectory=tuple(trajectory),
        flag=f"precool mixing nu={nu!r}",
    )


_INTERNAL_DOMINANCE = (
    "incoherent internal resource dominates the coherent one at any "
    "temperature both can reach"
)


def internal_resource(
    spec: MachineSpec, scenario: str, control: float
) -> ProtocolOutcome:
    """Single-cycle cooling with qubit C itself as the resource.

    ``scenario='incoherent'``: C is exchanged with a copy thermal at
    ``control`` (= T_H >= t_room) and the free energy is charged from the
    system state, entropy term included.  ``scenario='coherent'``: a local
    unitary with mixing ``control`` (= mu in [0, 1]) is applied to C and the
    energy change of the state is charged.  Both end with the degenerate-pair
    swap.
    """
    spec.require_resonance()
    r = _room_population(spec)
    r_b, r_c = _machine_room_populations(spec)
    if scenario == "incoherent":
        t_hot = control
        if not t_hot >= spec.t_room:
            raise DomainError(f"internal hot temperature must be >= t_room, got {t_hot}")
        c_pop = boltzmann_population(spec.e_c, t_hot)
        work = spec.e_c * (1.0 - spec.t_room / t_hot) * (1.0 - c_pop) + (
            spec.t_room * math.log(c_pop / r_c)
        )
    elif scenario == "coherent":
        mu = control
        if not 0.0 <= mu <= 1.0:
            raise DomainError(f"mu must lie in [0, 1], got {mu}")
        c_pop = (1.0 - mu) * r_c + mu * (1.0 - r_c)
        work = (r_c - c_pop) * spec.e_c
    else:
        raise DomainError(f"unknown scenario {scenario!r}")
    r_final = r * r_b + (1.0 - c_pop) * ((1.0 - r) * r_b + r * (1.0 - r_b))
    return ProtocolOutcome(
        r_final=r_final,
        t_final=_final_temperature(spec, r_final),
        work_cost=work,
        trajectory=(TrajectoryPoint(0, r, 0.0), TrajectoryPoint(1, r_final, work)),
        flag=_INTERNAL_DOMINANCE,
    )


@dataclass(frozen=True)
class DegeneracyClassification:
    """Degeneracy relations of a three-qubit spectrum and whether they cool."""

    degeneracies: tuple[str, ...]
    cooling_enabled: bool
    enabling_subspace: tuple[int, int] | None = None


def degeneracy_classifier(e: float, e_b: float, e_c: float) -> DegeneracyClassification:
    """Enumerate the spectrum's degeneracy types and whether cooling is enabled.

    Only the resonance e_b = e + e_c opens a degenerate pair (|010>, |101>)
    whose populations an energy-conserving unitary can tilt toward the target
    ground state; every other relation (equal gaps, zero gaps, the other sum
    rules, and their combinations) leaves the target no colder.  The
    resonance itself goes dead when e_c = 0, which forces the pair's
    populations equal at any hot-bath temperature.
    """
    for name, value in (("e", e), ("e_b", e_b), ("e_c", e_c)):
        if not value >= 0.0:
            raise DomainError(f"{name} must be >= 0, got {value}")
    tol = RESONANCE_RTOL * max(1.0, e, e_b, e_c)
    found: list[str] = []
    labels = {"a": e, "b": e_b, "c": e_c}
    for name, value in labels.items():
        if value <= tol:
            found.append(f"E_{name.upper()}=0")
    for x, y in (("a", "b"), ("a", "c"), ("b", "c")):
        if abs(labels[x] - labels[y]) <= tol:
            found.append(f"E_{x.upper()}=E_{y.upper()}")
    sums = (
        ("E_A=E_B+E_C", e, e_b + e_c),
        ("E_B=E_A+E_C", e_b, e + e_c),
        ("E_C=E_A+E_B", e_c, e + e_b),
    )
    for label, left, right in sums:
        if abs(left - right) <= tol:
            found.append(label)
    enabled = abs(e_b - e - e_c) <= tol and e_c > tol and e_b > tol
    return DegeneracyClassification(
        degeneracies=tuple(found),
        cooling_enabled=enabled,
        enabling_subspace=(2, 5) if enabled else None,
    )
