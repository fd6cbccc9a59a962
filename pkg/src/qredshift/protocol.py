"""The phase-measurement protocol: state preparation, readout, estimation.

The register is split by the sign of its dephasing angles, and the
prepared superposition excites the positive-angle sites in one branch and
the negative-angle sites in the other, which maximizes the phase
difference dphi = phi_plus - phi_minus the two branches accrue.  The
ancilla-based circuit is

    H(ancilla); X on minus sites; S(ancilla);
    ancilla-controlled X on all sites;      # entangle: |0>|minus> + i|1>|plus>
    diagonal dephasing phase;               # wait
    ancilla-controlled X on all sites;      # disentangle the register again
    H(ancilla); measure(ancilla)

The S gate makes the readout linear in the phase: P(1) = 1/2 + sin(dphi)/2,
with slope 1/2 at dphi = 0, where the plain phase-estimation readout
(cosine law, see standard_pea_probabilities) has slope 0.  The second
controlled-X layer is what moves the branch phase difference onto the
ancilla; without it the register stays entangled and the ancilla reads
P(1) = 1/2 regardless of dphi.

Shot sampling is vectorized against the exact ancilla probability using
the counter-based streams of qredshift.rng, so a run is reproducible from
(seed, shot index) alone on either backend.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import fsum

import numpy as np

from . import branch as branch_engine
from . import statevector as sv
from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .gravity import ChipGeometry, DephasingAngles, GravScenario, dephasing_angles, vertical_displacements
from .rng import shot_uniforms

__all__ = [
    "SignPartition",
    "ProtocolOutcome",
    "CumulativePhase",
    "partition_by_sign",
    "branch_phases",
    "expected_delta_phi",
    "build_circuit",
    "final_state",
    "sample_outcomes",
    "run_protocol",
    "standard_pea_probabilities",
    "cumulative_phase_1d",
]


@dataclass(frozen=True)
class SignPartition:
    """Register sites split by angle sign: theta >= 0 goes to plus_set, theta < 0 to minus_set."""

    plus_set: tuple[int, ...]
    minus_set: tuple[int, ...]

    @property
    def site_count(self) -> int:
        return len(self.plus_set) + len(self.minus_set)


@dataclass(frozen=True)
class ProtocolOutcome:
    """Shot statistics of one protocol run and the phase estimate they imply."""

    shots: int
    count_one: int
    p_hat: float
    delta_phi_hat: float
    std_error: float
    backend: str
    analytic_delta_phi: float
    p_one: float
    saturated: bool = False
    range_exceeded: bool = False


def partition_by_sign(angles: DephasingAngles) -> SignPartition:
    """Split 1-based site indices by the sign of their angle (exact zeros count as plus)."""
    theta = angles.angles
    plus = tuple(int(k) + 1 for k in np.flatnonzero(theta >= 0.0))
    minus = tuple(int(k) + 1 for k in np.flatnonzero(theta < 0.0))
    return SignPartition(plus_set=plus, minus_set=minus)


def branch_phases(angles: DephasingAngles, partition: SignPartition | None = None) -> tuple[float, float]:
    """(phi_plus, phi_minus): each branch's phase, compensated-summed over its sites.

    fsum keeps the rounding error of summing 1e5..1e7 tiny angles below
    anything the 1e-12 comparisons can see.
    """
    if partition is None:
        partition = partition_by_sign(angles)
    theta = angles.angles
    phi_plus = fsum(float(theta[k - 1]) for k in partition.plus_set)
    phi_minus = fsum(float(theta[k - 1]) for k in partition.minus_set)
    return phi_plus, phi_minus


def expected_delta_phi(angles: DephasingAngles) -> float:
    """Analytic dphi = phi_plus - phi_minus = sum of |theta_k| for the sign partition."""
    return fsum(abs(float(t)) for t in angles.angles)


def build_circuit(partition: SignPartition, angles: DephasingAngles) -> list[sv.Gate]:
    """Gate sequence of the measurement circuit (ancilla = bit 0, site k = bit k)."""
    if partition.site_count != len(angles):
        raise ValueError(
            f"partition covers {partition.site_count} sites but {len(angles)} angles were given"
        )
    all_sites = sorted(partition.plus_set + partition.minus_set)
    gates = [sv.hadamard(0)]
    gates.extend(sv.x_gate(k) for k in sorted(partition.minus_set))
    gates.append(sv.s_gate(0))
    gates.extend(sv.controlled_x(0, k) for k in all_sites)
    gates.append(sv.diagonal_phase(angles))
    gates.extend(sv.controlled_x(0, k) for k in all_sites)
    gates.append(sv.hadamard(0))
    gates.append(sv.measure(0))
    return gates


def final_state(circuit: list[sv.Gate], qubit_count: int) -> sv.StateVector:
    """Run the circuit up to (not including) the measurement."""
    state = sv.init_zero(qubit_count)
    for gate in circuit:
        if gate.kind == "measure":
            break
        sv.apply_gate(state, gate)
    return state


def sample_outcomes(p_one: float, shots: int, seed: int) -> np.ndarray:
    """Seeded ancilla outcomes: shot i is 1 iff uniform u_i < p_one."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    return (shot_uniforms(seed, shots) < p_one).astype(np.uint8)


def _estimate(p_hat: float) -> tuple[float, float, bool]:
    """(delta_phi_hat, std_error, saturated) from an observed P(1).

    Inverts p = 1/2 + sin(dphi)/2 and propagates the binomial error through
    the slope dP/dphi = cos(dphi)/2 evaluated at the estimate.  p_hat of
    exactly 0 or 1 saturates the arcsine at -+pi/2 where the slope vanishes.
    """
    x = 2.0 * p_hat - 1.0
    saturated = p_hat <= 0.0 or p_hat >= 1.0
    delta_hat = math.asin(max(-1.0, min(1.0, x)))
    return delta_hat, 0.5 * math.sqrt(max(0.0, 1.0 - x * x)), saturated


def run_protocol(
    scenario: GravScenario,
    t: float,
    shots: int,
    seed: int,
    backend: str = "branch",
) -> ProtocolOutcome:
    """Execute the protocol on `backend` ("branch" or "statevector") and estimate dphi."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    angles = dephasing_angles(scenario, t)
    partition = partition_by_sign(angles)
    analytic = expected_delta_phi(angles)

    if backend == "branch":
        phi_plus, phi_minus = branch_phases(angles, partition)
        state = branch_engine.accumulate(branch_engine.init_entangled(), phi_plus, phi_minus)
        _, p_one = branch_engine.ancilla_probabilities(state)
    elif backend == "statevector":
        qubit_count = scenario.geometry.qubit_count + 1
        if qubit_count > sv.MAX_QUBITS:
            raise sv.ResourceCapError(
                f"{scenario.geometry.qubit_count} register qubits exceed the dense backend; "
                "use backend='branch'"
            )
        state = final_state(build_circuit(partition, angles), qubit_count)
        p_one = sv.probability_of(state, 0, 1)
    else:
        raise ValueError(f"backend must be 'branch' or 'statevector', got {backend!r}")

    outcomes = sample_outcomes(p_one, shots, seed)
    count_one = int(np.count_nonzero(outcomes))
    p_hat = count_one / shots
    delta_hat, slope, saturated = _estimate(p_hat)
    if saturated:
        warnings.warn(
            f"p_hat = {p_hat} saturates the estimator at {delta_hat:+.6f} rad", stacklevel=2
        )
        std_error = math.nan
    else:
        std_error = math.sqrt(p_hat * (1.0 - p_hat) / shots) / slope
    range_exceeded = abs(analytic) > math.pi / 2.0
    if range_exceeded:
        warnings.warn(
            f"analytic dphi = {analytic:.6f} rad lies outside the estimator range [-pi/2, pi/2]",
            stacklevel=2,
        )
    return ProtocolOutcome(
        shots=shots,
        count_one=count_one,
        p_hat=p_hat,
        delta_phi_hat=delta_hat,
        std_error=std_error,
        backend=backend,
        analytic_delta_phi=analytic,
        p_one=p_one,
        saturated=saturated,
        range_exceeded=range_exceeded,
    )


def standard_pea_probabilities(delta_phi: float) -> tuple[float, float]:
    """(P(0), P(1)) of plain phase estimation (no S gate): the cosine law.

    Quadratic around dphi = 0, hence the comparison baseline for the
    linear readout above.
    """
    p_zero = 0.5 + 0.5 * math.cos(delta_phi)
    return p_zero, 1.0 - p_zero


@dataclass(frozen=True)
class CumulativePhase:
    """Exact site sum and closed-form approximation of the rotated-chip dphi."""

    exact: float
    closed_form: float


def cumulative_phase_1d(
    geometry: ChipGeometry,
    t: float,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> CumulativePhase:
    """dphi accumulated by a 1D chip rotated from horizontal to vertical.

    exact       = (g t / c^2) * sum_k omega_k |x_k|
    closed_form = g * mean(omega) * spacing * n^2 * t / (4 c^2)

    For uniform frequencies and even n the two coincide, because the
    centered heights satisfy sum_k |x_k| = n^2 * spacing / 4.
    """
    if geometry.layout != "line":
        raise ValueError("cumulative_phase_1d needs a 1D line geometry")
    if geometry.qubit_count % 2 != 0:
        raise ValueError("cumulative_phase_1d assumes an even number of equally spaced sites")
    heights = vertical_displacements(geometry, math.pi / 2.0)
    scale = constants.g0 * t / constants.c_squared
    exact = scale * fsum(float(w * abs(x)) for w, x in zip(geometry.frequencies, heights))
    mean_omega = fsum(float(w) for w in geometry.frequencies) / geometry.qubit_count
    closed = (
        constants.g0
        * mean_omega
        * geometry.spacing
        * geometry.qubit_count**2
        * t
        / (4.0 * constants.c_squared)
    )
    return CumulativePhase(exact=exact, closed_form=closed)
