"""Hardware resource estimates for an n-qubit emulator."""

import logging
from dataclasses import dataclass

from .errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResourceEstimate:
    """Scaling figures of the frequency-multiplexed design.

    Args:
        num_qubits: Register size n
        base_frequency_hz: Fundamental f0 of the layout
        bandwidth_hz: Signal band, 2**n f0
        gate_time_s: One fundamental period, 1 / f0
        comb_passbands: Positive pass-band frequencies of each projection
            comb filter, 2**n / 4
        projection_ops_per_2q_gate: Distinct projection operations, n (n - 1)
    """

    num_qubits: int
    base_frequency_hz: float
    bandwidth_hz: float
    gate_time_s: float
    comb_passbands: int
    projection_ops_per_2q_gate: int


def resource_estimate(num_qubits: int, base_frequency_hz: float) -> ResourceEstimate:
    if num_qubits < 1:
        raise DomainError(f"Need at least one qubit, got {num_qubits}")
    if base_frequency_hz <= 0:
        raise DomainError(f"Base frequency must be positive, got {base_frequency_hz}")
    # a single-qubit comb keeps only DC, so no positive pass band remains
    passbands = 2**num_qubits // 4
    estimate = ResourceEstimate(
        num_qubits=num_qubits,
        base_frequency_hz=base_frequency_hz,
        bandwidth_hz=2**num_qubits * base_frequency_hz,
        gate_time_s=1 / base_frequency_hz,
        comb_passbands=passbands,
        projection_ops_per_2q_gate=num_qubits * (num_qubits - 1),
    )
    logger.debug(f"Resource estimate: {estimate}")
    return estimate
