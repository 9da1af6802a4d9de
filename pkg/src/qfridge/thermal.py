"""Thermal-state arithmetic shared by every cooling protocol.

Energies and temperatures are in natural units (k_B = hbar = 1) and every
qubit has its ground state at zero energy.  ``math.inf`` serves as the
distinguished infinite temperature: ``exp(-gap/inf)`` evaluates to ``exp(0.0)``
exactly, so hot-bath limits such as the half-filled population carry no
rounding error, and the Carnot factor ``1 - t_room/t_hot`` collapses to
exactly ``1.0``.

All values are immutable after construction and all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

INFINITE: float = math.inf

# Relative tolerance accepted for the machine resonance condition e_b = e + e_c.
RESONANCE_RTOL = 1e-9


class DomainError(ValueError):
    """An argument lies outside the physically meaningful domain."""


class ConfigurationError(DomainError):
    """A protocol needs a piece of machine configuration that was not set."""


class NegativeTemperatureError(DomainError):
    """Temperature extraction hit a ground population at or below one half.

    A population below 1/2 corresponds to an inverted (negative-temperature)
    qubit.  No cooling protocol in this package produces one, so reaching this
    error in protocol code indicates a bug rather than a physical regime.
    """


@dataclass(frozen=True)
class QubitSpec:
    """A two-level system with ground state at zero energy."""

    gap: float

    def __post_init__(self) -> None:
        if not self.gap >= 0.0:
            raise DomainError(f"qubit gap must be >= 0, got {self.gap}")


@dataclass(frozen=True)
class MachineSpec:
    """Target qubit, machine qubits, and the bath temperatures driving them.

    ``t_room`` is the environment temperature every qubit starts at;
    ``t_hot`` is the optional hot-bath temperature used by incoherent
    protocols (``math.inf`` for the unbounded hot bath).  For two-qubit
    machines the convention is ``machine = (B, C)`` with qubit C the one
    coupled to the hot bath.
    """

    target: QubitSpec
    machine: tuple[QubitSpec, ...]
    t_room: float
    t_hot: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "machine", tuple(self.machine))
        if not self.t_room > 0.0:
            raise DomainError(f"t_room must be > 0, got {self.t_room}")
        if self.t_hot is not None and not self.t_hot >= self.t_room:
            raise DomainError(
                f"t_hot must be >= t_room, got t_hot={self.t_hot}, t_room={self.t_room}"
            )

    @classmethod
    def one_qubit(
        cls, e_b: float, t_room: float, t_hot: float | None = None, e: float = 1.0
    ) -> "MachineSpec":
        """Target of gap ``e`` plus a single machine qubit of gap ``e_b``."""
        return cls(QubitSpec(e), (QubitSpec(e_b),), t_room, t_hot)

    @classmethod
    def two_qubit(
        cls, e_c: float, t_room: float, t_hot: float | None = None, e: float = 1.0
    ) -> "MachineSpec":
        """Resonant two-qubit machine: ``e_b`` is derived as ``e + e_c``.

        Deriving the B gap removes any tolerance question about the resonance
        condition at the source.
        """
        return cls(QubitSpec(e), (QubitSpec(e + e_c), QubitSpec(e_c)), t_room, t_hot)

    @property
    def e(self) -> float:
        return self.target.gap

    @property
    def e_b(self) -> float:
        return self.machine[0].gap

    @property
    def e_c(self) -> float:
        return self.machine[1].gap

    @property
    def gaps(self) -> tuple[float, ...]:
        """Gaps in product-basis order: target first, then machine qubits."""
        return (self.target.gap,) + tuple(q.gap for q in self.machine)

    @property
    def n_qubits(self) -> int:
        return 1 + len(self.machine)

    def is_resonant(self) -> bool:
        """Whether e_b = e + e_c holds within RESONANCE_RTOL (two-qubit machines)."""
        if len(self.machine) != 2:
            return False
        return abs(self.e_b - self.e - self.e_c) <= RESONANCE_RTOL * max(1.0, self.e_b)

    def require_resonance(self) -> None:
        if not self.is_resonant():
            raise DomainError(
                "two-qubit machine with e_b = e + e_c required, got "
                f"gaps {self.gaps}"
            )

    def require_hot_bath(self) -> float:
        if self.t_hot is None:
            raise ConfigurationError("this protocol needs t_hot, but none was set")
        return self.t_hot


def boltzmann_population(gap: float, temp: float) -> float:
    """Ground-state population 1/(1 + exp(-gap/temp)) of a thermal qubit.

    ``temp = math.inf`` returns exactly 0.5.  Monotone increasing in ``gap``
    and decreasing in ``temp``.
    """
    if not gap >= 0.0:
        raise DomainError(f"gap must be >= 0, got {gap}")
    if not temp > 0.0:
        raise DomainError(f"temperature must be > 0 or infinite, got {temp}")
    return 1.0 / (1.0 + math.exp(-gap / temp))


def temperature_from_population(gap: float, r: float) -> float:
    """Invert the Boltzmann distribution: gap / ln(r/(1-r)).

    Returns ``math.inf`` for r = 1/2 (symmetric populations).  Populations
    below 1/2 would correspond to a negative temperature and raise
    :class:`NegativeTemperatureError` instead of being silently returned.
    """
    if not gap > 0.0:
        raise DomainError(f"gap must be > 0, got {gap}")
    if not 0.0 < r < 1.0:
        raise DomainError(f"population must satisfy 0 < r < 1, got {r}")
    if r == 0.5:
        return INFINITE
    if r < 0.5:
        raise NegativeTemperatureError(
            f"population {r} < 1/2 corresponds to a non-positive temperature"
        )
    return gap / (math.log(r) - math.log1p(-r))


def resource_free_energy(heat: float, t_hot: float, t_room: float) -> float:
    """Free energy drawn from a hot bath: heat times the Carnot factor.

    ``t_hot = math.inf`` returns ``heat`` exactly; ``t_hot = t_room`` returns
    zero (an equilibrium resource carries no free energy).
    """
    if not t_room > 0.0:
        raise DomainError(f"t_room must be > 0, got {t_room}")
    if not t_hot >= t_room:
        raise DomainError(f"t_hot must be >= t_room, got {t_hot} < {t_room}")
    return heat * (1.0 - t_room / t_hot)


def binary_entropy(r: float) -> float:
    """Shannon entropy -r ln r - (1-r) ln(1-r) of a two-outcome distribution."""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"population must lie in [0, 1], got {r}")
    if r == 0.0 or r == 1.0:
        return 0.0
    return -r * math.log(r) - (1.0 - r) * math.log1p(-r)


def thermal_populations(
    gaps: Sequence[float], temps: Sequence[float]
) -> np.ndarray:
    """Diagonal of the tensor product of single-qubit Gibbs states.

    Product-basis ordering |a b c ...> with the first qubit's bit most
    significant, i.e. index 4a + 2b + c for three qubits.
    """
    if len(gaps) != len(temps):
        raise DomainError(
            f"got {len(gaps)} gaps but {len(temps)} temperatures"
        )
    pops = np.array([1.0])
    for gap, temp in zip(gaps, temps):
        r = boltzmann_population(gap, temp)
        pops = np.multiply.outer(pops, np.array([r, 1.0 - r])).ravel()
    return pops


def hamiltonian_diagonal(gaps: Sequence[float]) -> np.ndarray:
    """Diagonal of the non-interacting Hamiltonian in the same basis ordering."""
    h = np.array([0.0])
    for gap in gaps:
        h = np.add.outer(h, np.array([0.0, gap])).ravel()
    return h


def target_ground_population(pops: Sequence[float]) -> float:
    """Ground population of the first (target) qubit: sum of the lower half."""
    pops = np.asarray(pops, dtype=float)
    if pops.size % 2 != 0:
        raise DomainError("population vector length must be even")
    return float(pops[: pops.size // 2].sum())
