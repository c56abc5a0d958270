"""
RF link budget and communication latencies between satellites and the GS.

Powers are given in dBm and converted to dBW before being combined with the
thermal-noise term ``10*log10(k_B * T * B)``, which is in dBW.  The linear
symmetric-channel SNR and the dB uplink/downlink forms therefore agree to
rounding error for the same inputs.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .orbital_mechanics import EARTH, PhysicalConstants


def to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def from_db(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def dbm_to_dbw(p_dbm: float) -> float:
    return p_dbm - 30.0


@dataclass(frozen=True)
class LinkBudget:
    """Link parameters.  ``fixed_rate`` (bit/s) replaces the Shannon rate when set."""

    tx_power_sat: float = 40.0        # dBm
    tx_power_gs: float = 40.0         # dBm
    gain_sat: float = 6.98            # dBi
    gain_gs: float = 6.98             # dBi
    carrier_freq: float = 2.4e9       # Hz
    noise_temp: float = 354.81        # K
    total_bandwidth: float = 1e6      # Hz
    num_resource_blocks: int = 5
    isl_bandwidth: float = 16e6       # Hz
    isl_spectral_efficiency: float = 1.0  # bit/s/Hz
    fixed_rate: Optional[float] = 16e6  # bit/s

    def __post_init__(self) -> None:
        for name in ("tx_power_sat", "tx_power_gs", "gain_sat", "gain_gs"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"LinkBudget.{name} must be finite")
        for name in ("carrier_freq", "noise_temp", "total_bandwidth", "isl_bandwidth", "isl_spectral_efficiency"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"LinkBudget.{name} must be > 0, got {value!r}")
        if self.num_resource_blocks < 1:
            raise ValueError(f"num_resource_blocks must be >= 1, got {self.num_resource_blocks}")
        if self.fixed_rate is not None and not self.fixed_rate > 0:
            raise ValueError(f"fixed_rate must be > 0 when set, got {self.fixed_rate!r}")

    @property
    def rb_bandwidth(self) -> float:
        """Bandwidth of one resource block, B / N."""
        return self.total_bandwidth / self.num_resource_blocks

    @property
    def isl_rate(self) -> float:
        return self.isl_bandwidth * self.isl_spectral_efficiency


@dataclass(frozen=True)
class PayloadSpec:
    sample_bits: float = 8.0
    num_samples: float = 1_000_000

    def __post_init__(self) -> None:
        if not self.bits > 0:
            raise ValueError(f"payload size must be > 0 bits, got {self.bits}")

    @property
    def bits(self) -> float:
        return self.sample_bits * self.num_samples


def free_space_path_loss(distance: float, freq: float, constants: PhysicalConstants = EARTH) -> float:
    """Linear path loss ``(4*pi*d*f/c)**2``."""
    if not distance > 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    if not freq > 0:
        raise ValueError(f"frequency must be > 0, got {freq}")
    return (4 * math.pi * distance * freq / constants.light_speed) ** 2


def free_space_path_loss_db(distance: float, freq: float, constants: PhysicalConstants = EARTH) -> float:
    return to_db(free_space_path_loss(distance, freq, constants))


def noise_power_dbw(noise_temp: float, bandwidth: float, constants: PhysicalConstants = EARTH) -> float:
    return to_db(constants.boltzmann * noise_temp * bandwidth)


def snr_symmetric(
    budget: LinkBudget,
    distance: float,
    tx_power_dbm: float | None = None,
    bandwidth: float | None = None,
    constants: PhysicalConstants = EARTH,
) -> float:
    """Linear SNR P*G_k*G_GS / (k_B*T*B*L) on a symmetric AWGN channel."""
    p_dbm = budget.tx_power_sat if tx_power_dbm is None else tx_power_dbm
    bw = budget.total_bandwidth if bandwidth is None else bandwidth
    power_w = from_db(dbm_to_dbw(p_dbm))
    gains = from_db(budget.gain_sat) * from_db(budget.gain_gs)
    loss = free_space_path_loss(distance, budget.carrier_freq, constants)
    return power_w * gains / (constants.boltzmann * budget.noise_temp * bw * loss)


def snr_uplink_db(budget: LinkBudget, distance: float, constants: PhysicalConstants = EARTH) -> float:
    """GS -> satellites broadcast over the full band B with GS power."""
    return (
        dbm_to_dbw(budget.tx_power_gs) + budget.gain_sat + budget.gain_gs
        - free_space_path_loss_db(distance, budget.carrier_freq, constants)
        - noise_power_dbw(budget.noise_temp, budget.total_bandwidth, constants)
    )


def snr_downlink_db(budget: LinkBudget, distance: float, constants: PhysicalConstants = EARTH) -> float:
    """Satellite -> GS on a single resource block B / N with satellite power."""
    return (
        dbm_to_dbw(budget.tx_power_sat) + budget.gain_sat + budget.gain_gs
        - free_space_path_loss_db(distance, budget.carrier_freq, constants)
        - noise_power_dbw(budget.noise_temp, budget.rb_bandwidth, constants)
    )


def shannon_rate(bandwidth: float, snr: float) -> float:
    if snr < 0:
        raise ValueError(f"SNR must be >= 0 (linear), got {snr}")
    return bandwidth * math.log2(1.0 + snr)


def comm_time(payload: PayloadSpec | float, rate: float, distance: float, constants: PhysicalConstants = EARTH) -> float:
    """Transmission plus propagation time; processing delays are taken as zero."""
    if not rate > 0:
        raise ValueError(f"rate must be > 0, got {rate}")
    bits = payload.bits if isinstance(payload, PayloadSpec) else float(payload)
    return bits / rate + distance / constants.light_speed


def uplink_rate(budget: LinkBudget, distance: float, constants: PhysicalConstants = EARTH) -> float:
    if budget.fixed_rate is not None:
        return budget.fixed_rate
    return shannon_rate(budget.total_bandwidth, from_db(snr_uplink_db(budget, distance, constants)))


def downlink_rate(budget: LinkBudget, distance: float, constants: PhysicalConstants = EARTH) -> float:
    if budget.fixed_rate is not None:
        return budget.fixed_rate
    return shannon_rate(budget.rb_bandwidth, from_db(snr_downlink_db(budget, distance, constants)))


def uplink_latency(budget: LinkBudget, payload: PayloadSpec, distance: float, constants: PhysicalConstants = EARTH) -> float:
    return comm_time(payload, uplink_rate(budget, distance, constants), distance, constants)


def downlink_latency(budget: LinkBudget, payload: PayloadSpec, distance: float, constants: PhysicalConstants = EARTH) -> float:
    return comm_time(payload, downlink_rate(budget, distance, constants), distance, constants)


def isl_hop_time(payload: PayloadSpec | float, budget: LinkBudget) -> float:
    """One intra-plane hop: payload bits over B_h * beta_h."""
    rate = budget.isl_rate
    if not rate > 0:
        raise ValueError("ISL rate must be > 0")
    bits = payload.bits if isinstance(payload, PayloadSpec) else float(payload)
    return bits / rate


class ResourceBlockPool:
    """Slotted-ALOHA style access to the N downlink resource blocks.

    A request that finds every block busy backs off to ``floor(t) + k`` slots,
    ``k`` uniform in ``{1, ..., max_backoff}``.  Requests must be offered in
    non-decreasing time order.
    """

    def __init__(self, num_blocks: int, rng: random.Random, slot: float = 1.0, max_backoff: int = 8):
        if num_blocks < 1:
            raise ValueError("num_blocks must be >= 1")
        self.num_blocks = num_blocks
        self.rng = rng
        self.slot = slot
        self.max_backoff = max_backoff
        self._busy: list[tuple[float, float]] = []
        self.collisions = 0

    def busy_count(self, t0: float, t1: float) -> int:
        return sum(1 for s, e in self._busy if s < t1 and t0 < e)

    def request(self, t: float, duration: float) -> Optional[float]:
        """Grant ``[t, t + duration)`` and return None, or return the retry time."""
        if self.busy_count(t, t + duration) < self.num_blocks:
            self._busy.append((t, t + duration))
            return None
        self.collisions += 1
        k = self.rng.randint(1, self.max_backoff)
        return (math.floor(t / self.slot) + k) * self.slot
