"""Independent dense density-matrix verification engine.

Everything here works on explicit complex matrices of dimension 2, 4, or 8
(product basis |a b c> with the target bit most significant) and never calls
into the closed-form protocol evaluators, so formula/oracle agreement is a
genuine two-route check.  Contents: thermal-state construction, unitary
application with invariant assertions, step-by-step protocol simulators,
seeded Haar Pareto sweeps, degenerate-subspace sweeps, and the
thermalization-gradient finite-difference check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .thermal import (
    DomainError,
    MachineSpec,
    boltzmann_population,
    hamiltonian_diagonal,
)

DEFAULT_SEED = 879190747  # fixed 64-bit-safe default, recorded in every report

UNITARITY_ATOL = 1e-10
TRACE_ATOL = 1e-12
ENERGY_ATOL = 1e-10


@dataclass(frozen=True)
class DenseState:
    """Hermitian PSD trace-one matrix over the product basis |a b c>."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DomainError("state matrix must be square")
        if mat.shape[0] not in (2, 4, 8):
            raise DomainError("oracle states are capped at dimension 8")
        if abs(np.trace(mat).real - 1.0) > TRACE_ATOL or abs(np.trace(mat).imag) > TRACE_ATOL:
            raise DomainError("state matrix must have unit trace")
        if np.linalg.eigvalsh((mat + mat.conj().T) / 2.0).min() < -1e-12:
            raise DomainError("state matrix must be positive semidefinite")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def target_ground_population(self) -> float:
        return float(self.diagonal()[: self.dim // 2].sum())


@dataclass(frozen=True)
class UnitaryOp:
    """A unitary with a tag recording whether it must conserve energy."""

    matrix: np.ndarray
    tag: str = "general"

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        if self.tag not in ("energy_conserving", "general"):
            raise DomainError(f"unknown unitary tag {self.tag!r}")
        dim = mat.shape[0]
        if np.abs(mat @ mat.conj().T - np.eye(dim)).max() > UNITARITY_ATOL:
            raise DomainError("matrix is not unitary within 1e-10")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def swap_unitary(dim: int, i: int, j: int, tag: str = "general") -> UnitaryOp:
    """Permutation unitary exchanging basis levels i and j."""
    mat = np.eye(dim, dtype=complex)
    mat[[i, j]] = mat[[j, i]]
    return UnitaryOp(mat, tag)


def partial_swap_unitary(
    dim: int, i: int, j: int, weight: float, tag: str = "general"
) -> UnitaryOp:
    """Two-level rotation moving population fraction ``weight`` between i and j."""
    if not 0.0 <= weight <= 1.0:
        raise DomainError(f"swap weight must lie in [0, 1], got {weight}")
    mat = np.eye(dim, dtype=complex)
    c, s = math.sqrt(1.0 - weight), math.sqrt(weight)
    mat[i, i] = mat[j, j] = c
    mat[i, j] = s
    mat[j, i] = -s
    return UnitaryOp(mat, tag)


def qubit_swap_unitary(n_qubits: int, qa: int, qb: int, weight: float = 1.0) -> UnitaryOp:
    """Partial swap of two whole qubits: rotates every (...0a..1b.., ...1a..0b..) pair."""
    dim = 2**n_qubits
    mat = np.eye(dim, dtype=complex)
    c, s = math.sqrt(1.0 - weight), math.sqrt(weight)
    bit_a, bit_b = n_qubits - 1 - qa, n_qubits - 1 - qb
    for idx in range(dim):
        if (idx >> bit_a) & 1 == 0 and (idx >> bit_b) & 1 == 1:
            jdx = idx | (1 << bit_a)
            jdx &= ~(1 << bit_b)
            mat[idx, idx] = mat[jdx, jdx] = c
            mat[idx, jdx] = s
            mat[jdx, idx] = -s
    return UnitaryOp(mat)


def build_thermal_state(spec: MachineSpec, per_qubit_temps: Sequence[float]) -> DenseState:
    """Diagonal tensor product of single-qubit Gibbs states, target first."""
    gaps = spec.gaps
    if len(per_qubit_temps) != len(gaps):
        raise DomainError(
            f"need {len(gaps)} temperatures, got {len(per_qubit_temps)}"
        )
    if 2 ** len(gaps) > 8:
        raise DomainError("oracle states are capped at dimension 8")
    mat = np.array([[1.0]], dtype=complex)
    for gap, temp in zip(gaps, per_qubit_temps):
        r = boltzmann_population(gap, temp)
        mat = np.kron(mat, np.diag([r, 1.0 - r]).astype(complex))
    return DenseState(mat)


def state_with_diagonal(pops: Sequence[float]) -> DenseState:
    return DenseState(np.diag(np.asarray(pops, dtype=complex)))


def assert_energy_conserving(u: UnitaryOp, h: Sequence[float]) -> None:
    h_arr = np.asarray(h, dtype=float)
    comm = u.matrix @ np.diag(h_arr) - np.diag(h_arr) @ u.matrix
    if np.abs(comm).max() > ENERGY_ATOL * max(1.0, float(np.abs(h_arr).max())):
        raise DomainError("unitary tagged energy_conserving does not commute with H")


def apply_and_measure(
    state: DenseState, u: UnitaryOp, h: Sequence[float]
) -> tuple[float, float]:
    """Apply U, assert the oracle invariants, and read off the observables.

    Returns the target ground population of U rho U^dagger and the change in
    <H>.  Unitarity and trace preservation are asserted on every application;
    energy-conserving tagged unitaries are additionally checked to change <H>
    by less than 1e-10.
    """
    if u.dim != state.dim:
        raise DomainError(f"dimension mismatch: state {state.dim}, unitary {u.dim}")
    h_arr = np.asarray(h, dtype=float)
    if h_arr.size != state.dim:
        raise DomainError("energy vector length must match the state dimension")
    if np.abs(u.matrix @ u.matrix.conj().T - np.eye(u.dim)).max() > UNITARITY_ATOL:
        raise DomainError("unitary drifted away from unitarity")
    final = u.matrix @ state.matrix @ u.matrix.conj().T
    if abs(np.trace(final).real - 1.0) > TRACE_ATOL:
        raise DomainError("trace not preserved")
    delta_energy = float((final.diagonal().real - state.diagonal()) @ h_arr)
    if u.tag == "energy_conserving":
        assert_energy_conserving(u, h_arr)
        if abs(delta_energy) > ENERGY_ATOL:
            raise DomainError("energy-conserving unitary changed <H>")
    r_target = float(final.diagonal().real[: state.dim // 2].sum())
    return r_target, delta_energy


def _partial_trace(mat: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    tensor = mat.reshape((2,) * (2 * n_qubits))
    traced = np.trace(tensor, axis1=qubit, axis2=n_qubits + qubit)
    half = 2 ** (n_qubits - 1)
    return traced.reshape(half, half)


def replace_qubit_marginal(
    state: DenseState, qubit: int, ground_population: float
) -> DenseState:
    """Trace one qubit out and re-insert it in a fresh diagonal state."""
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise DomainError(f"qubit index {qubit} out of range for {n} qubits")
    rest = _partial_trace(state.matrix, n, qubit)
    tau = np.diag([ground_population, 1.0 - ground_population]).astype(complex)
    full = np.kron(rest, tau).reshape((2,) * (2 * n))
    # kron left the fresh qubit in the least significant slot; move it home.
    remaining = [q for q in range(n) if q != qubit]
    src_axis = {q: a for a, q in enumerate(remaining)}
    src_axis[qubit] = n - 1
    perm = [src_axis[q] for q in range(n)]
    full = np.transpose(full, perm + [n + p for p in perm])
    return DenseState(full.reshape(state.dim, state.dim))


def rethermalize(state: DenseState, qubit: int, gap: float, temp: float) -> DenseState:
    """Replace one qubit's marginal with a fresh Gibbs state at ``temp``."""
    return replace_qubit_marginal(state, qubit, boltzmann_population(gap, temp))


# ---------------------------------------------------------------------------
# Step-by-step protocol simulators (dense route only).
# ---------------------------------------------------------------------------


def simulate_one_qubit_partial_swap(
    e: float, e_b: float, t_room: float, mu: float
) -> tuple[float, float]:
    """Partial |01><10| swap on a 4-dimensional thermal product state."""
    spec = MachineSpec.one_qubit(e_b, t_room, e=e)
    state = build_thermal_state(spec, (t_room, t_room))
    h = hamiltonian_diagonal(spec.gaps)
    u = partial_swap_unitary(4, 1, 2, mu)
    return apply_and_measure(state, u, h)


def simulate_incoherent_single(spec: MachineSpec) -> tuple[float, float, float]:
    """Heat C, apply the |010><101| swap; returns (r, heat, work)."""
    t_hot = spec.require_hot_bath()
    h = hamiltonian_diagonal(spec.gaps)
    state = build_thermal_state(spec, (spec.t_room, spec.t_room, t_hot))
    heat = spec.e_c * (
        boltzmann_population(spec.e_c, spec.t_room) - boltzmann_population(spec.e_c, t_hot)
    )
    u = swap_unitary(8, 2, 5, tag="energy_conserving")
    r_final, _ = apply_and_measure(state, u, h)
    work = heat * (1.0 - spec.t_room / t_hot)
    return r_final, heat, work


def simulate_coherent_single(spec: MachineSpec, mu: float) -> tuple[float, float]:
    """Apply the mu-parametrized work-optimal single-cycle unitary; (r, work)."""
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0, 1], got {mu}")
    h = hamiltonian_diagonal(spec.gaps)
    state = build_thermal_state(spec, (spec.t_room,) * 3)
    if spec.e_c <= spec.e:
        unit = (
            partial_swap_unitary(8, 2, 4, mu).matrix
            @ partial_swap_unitary(8, 3, 5, mu).matrix
        )
    else:
        w_ac = min(2.0 * mu, 1.0)
        w_ab = max(2.0 * mu - 1.0, 0.0)
        unit = (
            partial_swap_unitary(8, 2, 4, w_ab).matrix
            @ partial_swap_unitary(8, 3, 5, w_ab).matrix
            @ partial_swap_unitary(8, 1, 4, w_ac).matrix
            @ partial_swap_unitary(8, 3, 6, w_ac).matrix
        )
    return apply_and_measure(state, UnitaryOp(unit), h)


def simulate_repeated_incoherent(
    spec: MachineSpec, n: int, r0: float | None = None
) -> tuple[list[float], list[float]]:
    """n reset-and-swap incoherent cycles; returns (r after k, heat after k).

    ``r0`` overrides the target's starting population (default: thermal at
    t_room), which lets ladder stages be chained.
    """
    t_hot = spec.require_hot_bath()
    h = hamiltonian_diagonal(spec.gaps)
    r_ch = boltzmann_population(spec.e_c, t_hot)
    state = build_thermal_state(spec, (spec.t_room,) * 3)
    if r0 is not None:
        state = replace_qubit_marginal(state, 0, r0)
    swap = swap_unitary(8, 2, 5, tag="energy_conserving")

    heat = spec.e_c * (boltzmann_population(spec.e_c, spec.t_room) - r_ch)
    rs = [state.target_ground_population()]
    heats = [heat]
    for step in range(n):
        if step > 0:
            state = rethermalize(state, 1, spec.e_b, spec.t_room)
            c_ground = float(_partial_trace(state.matrix, 3, 0).diagonal().real.reshape(2, 2).sum(0)[0])
            heat += spec.e_c * (c_ground - r_ch)
            state = rethermalize(state, 2, spec.e_c, t_hot)
        else:
            state = rethermalize(state, 2, spec.e_c, t_hot)
        r_new, _ = apply_and_measure(state, swap, h)
        final = swap.matrix @ state.matrix @ swap.matrix.conj().T
        state = DenseState(final)
        rs.append(r_new)
        heats.append(heat)
    return rs, heats


def simulate_repeated_coherent(
    spec: MachineSpec, n: int
) -> tuple[list[float], list[float]]:
    """Optimal first cycle, then reset-and-|100><011|-swap cycles; (r_k, work_k)."""
    h = hamiltonian_diagonal(spec.gaps)
    state = build_thermal_state(spec, (spec.t_room,) * 3)
    rs = [state.target_ground_population()]
    works = [0.0]
    work = 0.0
    swap_00_11 = swap_unitary(8, 3, 4)
    for step in range(n):
        if step == 0:
            if spec.e_c <= spec.e:
                u = qubit_swap_unitary(3, 0, 1)
            else:
                u = UnitaryOp(
                    qubit_swap_unitary(3, 0, 1).matrix
                    @ qubit_swap_unitary(3, 0, 2).matrix
                )
        else:
            state = rethermalize(state, 1, spec.e_b, spec.t_room)
            state = rethermalize(state, 2, spec.e_c, spec.t_room)
            u = swap_00_11
        r_new, delta_e = apply_and_measure(state, u, h)
        state = DenseState(u.matrix @ state.matrix @ u.matrix.conj().T)
        work += delta_e
        rs.append(r_new)
        works.append(work)
    return rs, works


def _c_ground_population(state: DenseState) -> float:
    diag = state.diagonal()
    return float(diag[[0, 2, 4, 6]].sum())


def simulate_algorithmic(
    spec: MachineSpec,
    n: int,
    nu: float = 1.0,
    r0: float | None = None,
    precool: str = "unitary",
) -> tuple[list[float], list[float]]:
    """Precool-and-swap cycles; returns (r after k, work after k).

    ``precool='unitary'`` runs the literal four-step cycle: reset B, partial
    B<->C swap landing C's marginal on the nu-precooled population, reset B,
    cooling swap.  At nu = 1 the full swap hands C a fresh decorrelated
    thermal state and this matches the closed forms exactly; at nu < 1 the
    partial swap leaves residual target-machine correlations the closed
    forms idealize away.  ``precool='reset'`` models the precooling as a
    marginal replacement (decorrelating, charged at the B-swap gradient
    e_b - e_c per unit population), which is the closed forms' idealization;
    it coincides with the unitary cycle at nu = 1.
    """
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"nu must lie in [0, 1], got {nu}")
    if precool not in ("unitary", "reset"):
        raise DomainError(f"unknown precool model {precool!r}")
    h = hamiltonian_diagonal(spec.gaps)
    r_b = boltzmann_population(spec.e_b, spec.t_room)
    r_c = boltzmann_population(spec.e_c, spec.t_room)
    r_c_nu = r_c + nu * (r_b - r_c)

    if r0 is None:
        state = build_thermal_state(spec, (spec.t_room,) * 3)
    else:
        pops = np.kron(
            [r0, 1.0 - r0],
            np.kron([r_b, 1.0 - r_b], [r_c, 1.0 - r_c]),
        )
        state = state_with_diagonal(pops)
    cool_swap = swap_unitary(8, 3, 4)

    rs = [state.target_ground_population()]
    works = [0.0]
    work = 0.0
    for _ in range(n):
        state = rethermalize(state, 1, spec.e_b, spec.t_room)
        c_now = _c_ground_population(state)
        if precool == "unitary":
            weight = (
                0.0
                if r_b - c_now <= 0.0
                else min(max((r_c_nu - c_now) / (r_b - c_now), 0.0), 1.0)
            )
            swap = qubit_swap_unitary(3, 1, 2, weight)
            _, delta_e = apply_and_measure(state, swap, h)
            state = DenseState(swap.matrix @ state.matrix @ swap.matrix.conj().T)
            work += delta_e
            state = rethermalize(state, 1, spec.e_b, spec.t_room)
        else:
            state = replace_qubit_marginal(state, 2, r_c_nu)
            work += (spec.e_b - spec.e_c) * (r_c_nu - c_now)
        r_new, delta_e = apply_and_measure(state, cool_swap, h)
        state = DenseState(cool_swap.matrix @ state.matrix @ cool_swap.matrix.conj().T)
        work += delta_e
        rs.append(r_new)
        works.append(work)
    return rs, works


# ---------------------------------------------------------------------------
# Haar Pareto sweep.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DominatingPoint:
    index: int
    r: float
    delta_f: float
    excess: float


@dataclass(frozen=True)
class DominanceReport:
    """Outcome of a Haar sweep against an analytic optimal curve."""

    samples: int
    seed: int
    slack: float
    dominating: tuple[DominatingPoint, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.dominating

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "slack": self.slack,
            "dominating": [
                {"index": p.index, "r": p.r, "delta_f": p.delta_f, "excess": p.excess}
                for p in self.dominating
            ],
            "passed": self.passed,
        }


def haar_unitaries(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of Haar-distributed unitaries via QR with phase-fixed diagonal."""
    z = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    q, r = np.linalg.qr(z / math.sqrt(2.0))
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def _curve_arrays(curve: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray([(float(f), float(r)) for f, r in curve], dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise DomainError("analytic curve needs at least two (delta_f, r) points")
    arr = arr[np.argsort(arr[:, 1])]
    return arr[:, 0], arr[:, 1]


def dominates_curve(
    r_value: float,
    delta_f: float,
    curve: Sequence[tuple[float, float]],
    slack: float = 1e-9,
) -> bool:
    """Whether one (population, cost) point strictly beats the claimed frontier.

    True when the point reaches a population the curve says is unreachable, or
    reaches a curve population at strictly lower cost than claimed (both
    beyond ``slack``).
    """
    curve_f, curve_r = _curve_arrays(curve)
    r_in, r_max = float(curve_r[0]), float(curve_r[-1])
    if r_value > r_max + slack:
        return True
    needed = float(np.interp(r_value, curve_r, curve_f))
    return r_value > r_in + slack and delta_f < needed - slack


def haar_pareto_sweep(
    spec: MachineSpec,
    samples: int,
    analytic_curve: Sequence[tuple[float, float]],
    seed: int = DEFAULT_SEED,
    slack: float = 1e-9,
    batch: int = 10_000,
) -> DominanceReport:
    """Search for Haar-random unitaries beating the analytic cooling frontier.

    ``analytic_curve`` is a sequence of (delta_f, r) points ordered by
    increasing r; the claimed minimal cost at intermediate populations is its
    linear interpolation (exact when the curve includes its kinks, since the
    analytic frontier is piecewise linear).  A sample dominates if it reaches
    a higher population at strictly lower cost than the curve, beyond
    ``slack``.  The expected report is empty.
    """
    if samples < 0:
        raise DomainError("sample count must be >= 0")
    curve_f, curve_r = _curve_arrays(analytic_curve)

    state = build_thermal_state(spec, (spec.t_room,) * spec.n_qubits)
    pops = state.diagonal()
    h = hamiltonian_diagonal(spec.gaps)
    dim = state.dim
    base_energy = float(pops @ h)
    r_in, r_max = float(curve_r[0]), float(curve_r[-1])

    rng = np.random.default_rng(seed)
    dominating: list[DominatingPoint] = []
    done = 0
    while done < samples:
        count = min(batch, samples - done)
        units = haar_unitaries(dim, count, rng)
        final_pops = np.abs(units) ** 2 @ pops
        r_s = final_pops[:, : dim // 2].sum(axis=1)
        f_s = final_pops @ h - base_energy
        needed = np.interp(r_s, curve_r, curve_f)
        bad = (r_s > r_max + slack) | ((r_s > r_in + slack) & (f_s < needed - slack))
        for local_idx in np.nonzero(bad)[0]:
            excess = max(
                float(needed[local_idx] - f_s[local_idx]),
                float(r_s[local_idx] - r_max),
            )
            dominating.append(
                DominatingPoint(
                    index=done + int(local_idx),
                    r=float(r_s[local_idx]),
                    delta_f=float(f_s[local_idx]),
                    excess=excess,
                )
            )
        done += count
    return DominanceReport(
        samples=samples, seed=seed, slack=slack, dominating=tuple(dominating)
    )


# ---------------------------------------------------------------------------
# Degenerate-subspace sweep and thermalization gradients.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubspaceSweepReport:
    subspace: tuple[int, int]
    baseline_r: float
    best_r: float
    best_weight: float
    grid: int

    @property
    def improvement(self) -> float:
        return self.best_r - self.baseline_r

    def to_dict(self) -> dict:
        return {
            "subspace": list(self.subspace),
            "baseline_r": self.baseline_r,
            "best_r": self.best_r,
            "best_weight": self.best_weight,
            "grid": self.grid,
            "improvement": self.improvement,
        }


def degenerate_subspace_sweep(
    spec: MachineSpec, subspace: tuple[int, int], grid: int
) -> SubspaceSweepReport:
    """Sweep the partial-swap family on one degenerate level pair.

    The machine is prepared with qubit C heated to t_hot (when set); the
    sweep covers the one-parameter family of phase-free rotations, which is
    exhaustive for diagonal states.  Reports the best reachable target ground
    population.
    """
    i, j = subspace
    h = hamiltonian_diagonal(spec.gaps)
    scale = max(1.0, float(np.abs(h).max()))
    if abs(h[i] - h[j]) > 1e-9 * scale:
        raise DomainError(
            f"levels {i} and {j} are not degenerate (energies {h[i]}, {h[j]})"
        )
    if grid < 2:
        raise DomainError("grid must have at least 2 points")
    temps = [spec.t_room] * spec.n_qubits
    if spec.t_hot is not None and spec.n_qubits >= 2:
        temps[-1] = spec.t_hot
    state = build_thermal_state(spec, temps)
    dim = state.dim

    best_r, best_w = -1.0, 0.0
    baseline = state.target_ground_population()
    for weight in np.linspace(0.0, 1.0, grid):
        u = partial_swap_unitary(dim, i, j, float(weight))
        r_final, _ = apply_and_measure(state, u, h)
        if r_final > best_r:
            best_r, best_w = r_final, float(weight)
    return SubspaceSweepReport(
        subspace=(i, j), baseline_r=baseline, best_r=best_r, best_weight=best_w, grid=grid
    )


def thermalization_gradient_check(
    spec: MachineSpec, t_b: float, t_c: float
) -> tuple[float, float]:
    """Central finite differences of the degenerate-pair bias p_101 - p_010.

    Returns (d/dT_B, d/dT_C) of the population difference that the cooling
    swap exploits.  The first is negative (B as cold as possible is best) and
    the second positive (C as hot as possible is best).
    """
    spec.require_resonance()

    def bias(tb: float, tc: float) -> float:
        state = build_thermal_state(spec, (spec.t_room, tb, tc))
        diag = state.diagonal()
        return float(diag[5] - diag[2])

    step_b = 1e-5 * t_b
    step_c = 1e-5 * t_c
    slope_b = (bias(t_b + step_b, t_c) - bias(t_b - step_b, t_c)) / (2.0 * step_b)
    slope_c = (bias(t_b, t_c + step_c) - bias(t_b, t_c - step_c)) / (2.0 * step_c)
    return slope_b, slope_c
