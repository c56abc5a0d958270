"""
Intra-plane model propagation and sink-satellite selection for one orbit.

Ring flooding: every satellite that received the global model from the GS
forwards it to both ring neighbours, except neighbours that were themselves
served by the GS; every other satellite forwards what it first received to
the neighbour it did not hear from.  Later copies are dropped.

Sink selection minimises

    t_c^U + t_c^D + t_wait + t_train(orbit) + t_relay

over the satellites whose next usable access window can hold the sink's
on-contact work (downlink of the partial model plus uplink of the next
global model).  Ties go to the earliest window start, then the lowest slot.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .link_model import LinkBudget, PayloadSpec, downlink_latency, isl_hop_time, uplink_latency
from .orbital_mechanics import EARTH, AccessWindow, PhysicalConstants, ring_hop_distance


class UnschedulableError(RuntimeError):
    """No satellite of the orbit has a usable access window."""


@dataclass(frozen=True)
class PropagationPlan:
    orbit: int
    source_slots: tuple[int, ...]
    receive_times: tuple[float, ...]
    duplicate_drops: int

    @property
    def last_receive(self) -> float:
        return max(self.receive_times)


def propagate_on_ring(
    orbit: int,
    source_slots: Sequence[int],
    num_slots: int,
    hop_time: float,
    t0: float = 0.0,
) -> PropagationPlan:
    """Flood the model around a ring of ``num_slots`` satellites from ``source_slots``."""
    sources = sorted(set(source_slots))
    if not sources:
        raise ValueError(f"orbit {orbit}: propagation needs at least one source satellite")
    for s in sources:
        if not 0 <= s < num_slots:
            raise IndexError(f"source slot {s} out of range for a ring of {num_slots}")

    received: dict[int, float] = {}
    drops = 0
    # (arrival time, receiver, sender); sender -1 is the GS
    queue = [(t0, s, -1) for s in sources]
    heapq.heapify(queue)
    source_set = set(sources)
    while queue:
        t, node, sender = heapq.heappop(queue)
        if node in received:
            drops += 1
            continue
        received[node] = t
        if num_slots == 1:
            continue
        neighbours = {(node - 1) % num_slots, (node + 1) % num_slots}
        if sender == -1:
            targets = neighbours - source_set
        else:
            targets = neighbours - {sender}
        for nb in sorted(targets):
            heapq.heappush(queue, (t + hop_time, nb, node))
    times = tuple(received[k] for k in range(num_slots))
    return PropagationPlan(orbit, tuple(sources), times, drops)


def relay_time_to_sink(
    sink_slot: int, num_slots: int, payload: PayloadSpec | float, budget: LinkBudget
) -> float:
    """Longest relay from any other satellite of the ring to the sink."""
    if not 0 <= sink_slot < num_slots:
        raise IndexError(f"sink slot {sink_slot} out of range for a ring of {num_slots}")
    hops = max((ring_hop_distance(k, sink_slot, num_slots) for k in range(num_slots)), default=0)
    return hops * isl_hop_time(payload, budget)


@dataclass(frozen=True)
class LatencyBreakdown:
    uplink: float
    downlink: float
    wait: float
    train: float
    relay: float

    @property
    def total(self) -> float:
        return self.uplink + self.downlink + self.wait + self.train + self.relay


@dataclass(frozen=True)
class SinkDecision:
    orbit: int
    sink_slot: int
    candidate_set: tuple[int, ...]
    t_sum_star: float
    chosen_window: AccessWindow
    breakdown: LatencyBreakdown
    required_contact: float


def next_usable_window(
    windows: Sequence[AccessWindow], t_ready: float
) -> Optional[AccessWindow]:
    """First window that is still open at or after ``t_ready``."""
    for w in windows:
        if w.t_end > t_ready:
            return w
    return None


def _link_costs(budget, payload, distance, constants):
    return (
        uplink_latency(budget, payload, distance, constants),
        downlink_latency(budget, payload, distance, constants),
    )


def total_round_latency(
    candidate_slot: int,
    windows: Sequence[AccessWindow],
    t_now: float,
    t_train: float,
    budget: LinkBudget,
    payload: PayloadSpec,
    num_slots: int,
    distance: float,
    constants: PhysicalConstants = EARTH,
) -> LatencyBreakdown:
    """Objective value for one candidate sink.

    ``windows`` are the candidate's own access windows; the models are ready at
    the sink after ``t_now + relay``, and the wait is measured from ``t_now``.
    """
    relay = relay_time_to_sink(candidate_slot, num_slots, payload, budget)
    window = next_usable_window(windows, t_now + relay)
    if window is None:
        raise UnschedulableError(f"slot {candidate_slot} has no access window after t={t_now:.2f}")
    t_up, t_down = _link_costs(budget, payload, distance, constants)
    wait = max(0.0, window.t_start - t_now)
    return LatencyBreakdown(t_up, t_down, wait, t_train, relay)


def select_sink(
    orbit: int,
    windows: Mapping[int, Sequence[AccessWindow]],
    t_now: float,
    t_train: float,
    budget: LinkBudget,
    payload: PayloadSpec,
    num_slots: int,
    distance: float,
    strict_admission: bool = False,
    constants: PhysicalConstants = EARTH,
) -> SinkDecision:
    """Pick the sink of ``orbit``; ``windows`` maps slot -> that slot's access windows.

    With ``strict_admission`` the whole window must be at least as long as
    the objective value; otherwise the part of the window left once the
    models reach the sink must hold the on-contact work.
    """
    t_up, t_down = _link_costs(budget, payload, distance, constants)
    required = t_up + t_down
    best = None
    candidates = []
    for slot in range(num_slots):
        try:
            b = total_round_latency(slot, windows.get(slot, ()), t_now, t_train, budget, payload,
                                    num_slots, distance, constants)
        except UnschedulableError:
            continue
        window = next_usable_window(windows.get(slot, ()), t_now + b.relay)
        if strict_admission:
            admissible = window.duration >= b.total
        else:
            admissible = window.t_end - max(window.t_start, t_now + b.relay) >= required
        if not admissible:
            continue
        candidates.append(slot)
        key = (b.total, window.t_start, slot)
        if best is None or key < best[0]:
            best = (key, slot, window, b)
    if best is None:
        raise UnschedulableError(f"orbit {orbit}: no admissible sink after t={t_now:.2f}")
    _, slot, window, b = best
    return SinkDecision(orbit, slot, tuple(candidates), b.total, window, b,
                        b.total if strict_admission else required)
