"""N-stage ladder machines that squeeze the work cost toward the second law.

A single swap against a large-gap qubit reaches any temperature but wastes
work; splitting the descent over N machine qubits with linearly increasing
gaps moves each unit of population against a smaller gradient, and the excess
over the target's free-energy increase shrinks as O(1/N).  The incoherent
twin runs one resonant two-qubit stage per step and pays the same
stage-by-stage work plus only the Carnot-weighted preheating of its hot-side
qubits, which an embedded multilevel ladder makes arbitrarily small.

Each stage is evaluated in its fully swapped / steady limit; stage repetition
counts are not modeled (repeating swaps against the same virtual qubit costs
the same work per unit population).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .thermal import (
    ConfigurationError,
    DomainError,
    binary_entropy,
    boltzmann_population,
)


class LadderStage(NamedTuple):
    index: int
    temperature: float
    r: float
    work: float


@dataclass(frozen=True)
class LadderSpec:
    """Ladder machine description: stage count, temperatures, optional extras.

    ``t_hot`` is needed for the incoherent twin only.  ``e_ground_offset``
    selects the embedded-virtual-ladder preheating model; when left unset the
    incoherent ladder preheats N real C-qubits instead.
    """

    n_steps: int
    t_cold: float
    t_room: float
    t_hot: float | None = None
    e_ground_offset: float | None = None
    target_gap: float = 1.0

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise DomainError(f"ladder needs n_steps >= 1, got {self.n_steps}")
        if not self.t_room > 0.0:
            raise DomainError(f"t_room must be > 0, got {self.t_room}")
        if not 0.0 < self.t_cold <= self.t_room:
            raise DomainError(
                f"t_cold must satisfy 0 < t_cold <= t_room, got {self.t_cold}"
            )
        if self.t_hot is not None and not self.t_hot >= self.t_room:
            raise DomainError(f"t_hot must be >= t_room, got {self.t_hot}")
        if self.e_ground_offset is not None and not self.e_ground_offset >= 0.0:
            raise DomainError("e_ground_offset must be >= 0")
        if not self.target_gap > 0.0:
            raise DomainError(f"target gap must be > 0, got {self.target_gap}")


@dataclass(frozen=True)
class LadderOutcome:
    """Total work, target free-energy increase, and their second-law gap."""

    w_total: float
    df_target: float
    gap: float
    q_init: float | None = None
    per_step: tuple[LadderStage, ...] = ()


def _stage_exponents(spec: LadderSpec) -> list[float]:
    """E/T_i for i = 0..N along the inverse-temperature interpolation."""
    e = spec.target_gap
    x_room = e / spec.t_room
    x_cold = e / spec.t_cold
    return [x_room + (i / spec.n_steps) * (x_cold - x_room) for i in range(spec.n_steps + 1)]


def _target_free_energy_increase(spec: LadderSpec, r_start: float, r_end: float) -> float:
    e = spec.target_gap
    return spec.t_room * (binary_entropy(r_start) - binary_entropy(r_end)) - e * (
        r_end - r_start
    )


def coherent_ladder(spec: LadderSpec) -> LadderOutcome:
    """Sequential swaps against N qubits with linearly increasing gaps.

    Stage i leaves the target at 1/T_i = 1/T_R + (i/N)(1/T_C - 1/T_R) and
    costs the population increment times the gap excess E_i - E.  The gap
    over the target's free-energy increase is positive and O(1/N).
    """
    e = spec.target_gap
    ratio = spec.t_room / spec.t_cold
    exponents = _stage_exponents(spec)
    rs = [1.0 / (1.0 + math.exp(-x)) for x in exponents]
    stages = []
    w_total = 0.0
    for i in range(1, spec.n_steps + 1):
        e_i = e * (1.0 + (i / spec.n_steps) * (ratio - 1.0))
        work = (rs[i] - rs[i - 1]) * (e_i - e)
        w_total += work
        stages.append(LadderStage(i, e / exponents[i], rs[i], work))
    df_target = _target_free_energy_increase(spec, rs[0], rs[-1])
    return LadderOutcome(
        w_total=w_total,
        df_target=df_target,
        gap=w_total - df_target,
        per_step=tuple(stages),
    )


def _incoherent_max_gap(spec: LadderSpec, t_hot: float) -> float:
    e = spec.target_gap
    return e * (1.0 / spec.t_cold - 1.0 / t_hot) / (1.0 / spec.t_room - 1.0 / t_hot)


def embedded_ladder_preheat(spec: LadderSpec) -> float:
    """Preheating cost of the embedded (N+2)-level virtual ladder.

    Average-energy difference between thermal states at t_hot and t_room of
    an evenly spaced (N+1)-level ladder plus one extra ground level offset
    e_ground_offset below it.  Decays to zero once the offset freezes the
    ladder out at both temperatures (offsets well above t_hot); defaults the
    offset to 50 max(t_hot, t_room) (N+1) when unset, which puts the cost
    below double precision.
    """
    t_hot = spec.t_hot
    if t_hot is None:
        raise ConfigurationError("embedded preheating needs t_hot")
    if t_hot == spec.t_room:
        return 0.0
    e_g = spec.e_ground_offset
    if e_g is None:
        e_g = 50.0 * max(t_hot, spec.t_room) * (spec.n_steps + 1)
    spacing = _incoherent_max_gap(spec, t_hot) - spec.target_gap
    # Shift by +e_g so the extra ground level sits at zero; the average-energy
    # difference between two temperatures is shift invariant.
    levels = [e_g + (i / spec.n_steps) * spacing for i in range(spec.n_steps + 1)]

    def mean_energy(temp: float) -> float:
        weights = [math.exp(-lv / temp) for lv in levels]
        partition = 1.0 + sum(weights)
        return sum(lv * w for lv, w in zip(levels, weights)) / partition

    return mean_energy(t_hot) - mean_energy(spec.t_room)


def _real_qubit_preheat(spec: LadderSpec, t_hot: float) -> float:
    spacing = _incoherent_max_gap(spec, t_hot) - spec.target_gap
    total = 0.0
    for i in range(1, spec.n_steps + 1):
        e_ci = (i / spec.n_steps) * spacing
        total += e_ci * (
            boltzmann_population(e_ci, spec.t_room) - boltzmann_population(e_ci, t_hot)
        )
    return total


def incoherent_ladder(spec: LadderSpec) -> LadderOutcome:
    """2N-qubit incoherent twin of the coherent ladder.

    Stage gaps are chosen so each resonant two-qubit stage steadies the
    target at exactly the coherent stage temperature; the work cost is the
    coherent one plus the Carnot-weighted preheating heat q_init of the N
    hot-side qubits (real qubits, or the embedded virtual ladder when
    e_ground_offset is set).
    """
    t_hot = spec.t_hot
    if t_hot is None:
        raise ConfigurationError("incoherent ladder needs t_hot")
    coherent = coherent_ladder(spec)
    carnot = 1.0 - spec.t_room / t_hot
    if spec.e_ground_offset is not None:
        q_init = embedded_ladder_preheat(spec)
    else:
        q_init = _real_qubit_preheat(spec, t_hot)
    w_total = q_init * carnot + coherent.w_total
    return LadderOutcome(
        w_total=w_total,
        df_target=coherent.df_target,
        gap=w_total - coherent.df_target,
        q_init=q_init,
        per_step=coherent.per_step,
    )
