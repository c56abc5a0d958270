"""
Deterministic simulation of FedLEO rounds and of the sequential star baseline.

Both protocols share one :class:`SimContext` (data shards, access windows,
link parameters) and train identical local models: the SGD seed of satellite
``(l, k)`` in round ``t`` depends only on the master seed, so final weights
never depend on link parameters or on the protocol's timing.

FedLEO round ``t`` (starting at the previous global aggregation):
  1. per orbit, the GS broadcasts ``w^t`` at the first contact with any of the
     orbit's satellites; every satellite of the orbit visible then receives it;
  2. the model floods around the ring over intra-plane ISL;
  3. each satellite trains as soon as it has the model;
  4. once the orbit has finished training, the sink is selected and the
     trained models are relayed to it and averaged into the partial model;
  5. the sink uploads during its chosen window, contending for one of the
     N resource blocks;
  6. after all L partials arrive the GS aggregates, evaluates, and starts
     round ``t + 1``.

Star round ``t``: per orbit, the GS serves one satellite at a time, always
the next one to come into view: download, train, upload within the same
contact if it fits, else at that satellite's next contact.  Orbits are
served concurrently; the GS aggregates all K*L local models when the last
orbit is done.
"""
from __future__ import annotations

import heapq
import logging
import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .fl_engine import (
    SOFTMAX,
    DataShard,
    Dataset,
    ModelState,
    TrainingConfig,
    aggregate_global,
    aggregate_partial,
    evaluate,
    fedavg,
    global_loss,
    local_train,
    partition_data,
    pooled,
    train_test_split,
    training_time,
)
from .link_model import (
    LinkBudget,
    PayloadSpec,
    ResourceBlockPool,
    downlink_latency,
    isl_hop_time,
    uplink_latency,
)
from .orbital_mechanics import (
    AccessWindow,
    ConstellationSpec,
    GroundStation,
    PhysicalConstants,
    compute_access_windows,
    max_slant_range,
    ring_hop_distance,
    slant_range,
)
from .propagation_scheduler import (
    SinkDecision,
    UnschedulableError,
    next_usable_window,
    propagate_on_ring,
    select_sink,
)
from .scenario import Scenario
from .seeding import derive_seed

log = logging.getLogger(__name__)

EVENT_KINDS = (
    "broadcast-start",
    "model-received",
    "train-complete",
    "sink-selected",
    "relay-complete",
    "sink-upload-start",
    "sink-upload-complete",
    "global-aggregate",
    "eval",
)
_KIND_RANK = {k: i for i, k in enumerate(EVENT_KINDS)}


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    subject: str
    round: int
    detail: str = ""

    def sort_key(self):
        return (self.time, _KIND_RANK[self.kind], self.subject, self.round)


def sat_name(sat: tuple[int, int]) -> str:
    return f"sat-{sat[0]}-{sat[1]}"


@dataclass(frozen=True)
class OrbitRound:
    """Consecutive phases of one orbit's round; they sum to ``round_time``.

    FedLEO: ``wait_broadcast`` until the first contact, ``uplink`` of w^t,
    ``train`` = slowest local training, ``relay`` = remaining ISL time on the
    critical path (ring propagation plus relay to the sink), ``wait_sink``
    until the upload starts, ``downlink`` of the partial model.

    Star: each field is the sum over the orbit's satellites; ``wait_sink``
    collects the second waits of satellites that missed their first contact.

    ``baseline_time`` (FedLEO records only) is the star chain's time for the
    same orbit started at the same round start; ``inf`` if that chain cannot
    finish within the window table.
    """

    orbit: int
    wait_broadcast: float = 0.0
    uplink: float = 0.0
    train: float = 0.0
    relay: float = 0.0
    wait_sink: float = 0.0
    downlink: float = 0.0
    sink_slot: int = -1
    second_waits: int = 0
    complete: bool = True
    baseline_time: float = math.nan

    @property
    def round_time(self) -> float:
        return self.wait_broadcast + self.uplink + self.train + self.relay + self.wait_sink + self.downlink


@dataclass(frozen=True)
class RoundRecord:
    round: int
    t_broadcast: float
    orbits: tuple[OrbitRound, ...]
    t_aggregate: float
    global_accuracy: float
    global_loss: float
    complete: bool = True

    @property
    def round_wall_time(self) -> float:
        return self.t_aggregate - self.t_broadcast


@dataclass
class SimulationResult:
    protocol: str
    scenario: Scenario
    rounds: list[RoundRecord]
    events: list[Event]
    final_model: ModelState
    models_per_round: list[np.ndarray] = field(default_factory=list)
    sink_decisions: list[tuple[int, SinkDecision]] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def completed(self) -> list[RoundRecord]:
        return [r for r in self.rounds if r.complete]


@dataclass
class SimContext:
    """Everything a run needs, derived once from a scenario."""

    scenario: Scenario
    spec: ConstellationSpec
    gs: GroundStation
    constants: PhysicalConstants
    budget: LinkBudget
    payload: PayloadSpec
    training: TrainingConfig
    shards: dict[tuple[int, int], DataShard]
    test: Dataset
    windows: dict[tuple[int, int], list[AccessWindow]]
    horizon: float
    planning_distance: float

    @classmethod
    def from_scenario(cls, scenario: Scenario, windows=None) -> "SimContext":
        spec = scenario.constellation.build()
        gs = scenario.ground_station.build()
        constants = scenario.constants.build()
        seed = scenario.seed
        base = scenario.base_dir
        data = scenario.dataset.build(derive_seed(seed, "dataset"), None if base is None else Path(base))
        train, test = train_test_split(data, scenario.dataset.test_fraction, derive_seed(seed, "split"))
        shards = partition_data(train, spec, scenario.partition, derive_seed(seed, "partition"))
        horizon = scenario.horizon_s
        if windows is None:
            windows = compute_access_windows(
                spec, gs, (0.0, horizon + scenario.solver.lookahead_s), scenario.solver.build(), constants
            )
        planning = max(max_slant_range(h, gs.min_elevation, constants) for h in spec.altitudes)
        return cls(
            scenario=scenario,
            spec=spec,
            gs=gs,
            constants=constants,
            budget=scenario.link.build(spec.num_orbits),
            payload=scenario.link.payload(),
            training=scenario.training.build(),
            shards=shards,
            test=test,
            windows=windows,
            horizon=horizon,
            planning_distance=planning,
        )

    # -- helpers shared by both protocols ---------------------------------

    def orbit_windows(self, orbit: int) -> dict[int, list[AccessWindow]]:
        return {k: self.windows[(orbit, k)] for k in range(self.spec.sats_per_orbit)}

    def distance(self, sat: tuple[int, int], t: float) -> float:
        return slant_range(self.spec, self.gs, sat[0], sat[1], t, self.constants)

    def t_up(self, distance: float) -> float:
        return uplink_latency(self.budget, self.payload, distance, self.constants)

    def t_down(self, distance: float) -> float:
        return downlink_latency(self.budget, self.payload, distance, self.constants)

    def train_cfg(self, rnd: int, sat: tuple[int, int]) -> TrainingConfig:
        return replace(self.training, seed=derive_seed(self.scenario.seed, "train", rnd, sat[0], sat[1]))

    def train_time(self, sat: tuple[int, int]) -> float:
        return training_time(self.shards[sat].size, self.training)

    def initial_model(self) -> ModelState:
        w = SOFTMAX.init_weights(self.test.num_features, self.test.num_classes)
        return ModelState(w, 0, np.zeros(self.test.num_classes, dtype=np.int64))

    def first_contact(self, sat: tuple[int, int], t: float, need: float) -> Optional[tuple[float, AccessWindow]]:
        """Earliest time >= t at which ``sat`` is in view with ``need`` seconds of contact left."""
        for w in self.windows[sat]:
            start = max(w.t_start, t)
            if w.t_end - start >= need:
                return start, w
        return None

    def score(self, model: ModelState) -> tuple[float, float]:
        acc = evaluate(model, self.test.X, self.test.y)
        loss = global_loss(self.shards.values(), model)
        return acc, loss


def _aggregate_and_score(ctx, rnd, t_round, orbit_rounds, model, events, result, t_agg):
    acc, loss = ctx.score(model)
    events.append(Event(t_agg, "global-aggregate", "GS", rnd))
    events.append(Event(t_agg, "eval", "GS", rnd, f"accuracy={acc:.6f};loss={loss:.6f}"))
    result.rounds.append(RoundRecord(rnd, t_round, tuple(orbit_rounds), t_agg, acc, loss, True))
    result.models_per_round.append(model.weights.copy())
    return acc


def _incomplete(result, rnd, t_round, orbit_rounds, why):
    msg = f"round {rnd}: {why}"
    log.warning(msg)
    result.diagnostics.append(msg)
    result.rounds.append(RoundRecord(rnd, t_round, tuple(orbit_rounds), math.nan, math.nan, math.nan, False))


# -- FedLEO ------------------------------------------------------------------


@dataclass
class _OrbitPlan:
    orbit: int
    t_broadcast: float
    t_received: float
    t_ready: float
    t_train_max: float
    decision: SinkDecision
    partial: ModelState
    window: AccessWindow


def _fedleo_orbit(ctx: SimContext, rnd: int, orbit: int, t_round: float, model: ModelState, events: list):
    """Steps 1-4 for one orbit; returns a plan or a reason string."""
    K = ctx.spec.sats_per_orbit
    plan_up = ctx.t_up(ctx.planning_distance)
    contacts = {}
    for k in range(K):
        hit = ctx.first_contact((orbit, k), t_round, plan_up)
        if hit is not None:
            contacts[k] = hit
    if not contacts:
        return f"orbit {orbit} has no contact after t={t_round:.2f}"
    tb = min(start for start, _ in contacts.values())
    if tb > ctx.horizon:
        return f"orbit {orbit}: first contact at t={tb:.2f} is past the horizon"
    # every satellite of the orbit in view at tb with enough contact left is a source
    sources = sorted(k for k, (start, _) in contacts.items() if start == tb)
    t_up = ctx.t_up(max(ctx.distance((orbit, k), tb) for k in sources))
    t0 = tb + t_up
    events.append(Event(tb, "broadcast-start", "GS", rnd, f"orbit={orbit};sources={'/'.join(map(str, sources))}"))

    hop = isl_hop_time(ctx.payload, ctx.budget)
    prop = propagate_on_ring(orbit, sources, K, hop, t0)
    done = {}
    locals_ = []
    for k in range(K):
        sat = (orbit, k)
        events.append(Event(prop.receive_times[k], "model-received", sat_name(sat), rnd))
        done[k] = prop.receive_times[k] + ctx.train_time(sat)
        events.append(Event(done[k], "train-complete", sat_name(sat), rnd))
        locals_.append(local_train(model, ctx.shards[sat], ctx.train_cfg(rnd, sat)))
    t_train_max = max(ctx.train_time((orbit, k)) for k in range(K))

    t_now = max(done.values())
    limit = ctx.horizon + ctx.scenario.solver.lookahead_s
    while True:
        try:
            decision = select_sink(
                orbit, ctx.orbit_windows(orbit), t_now, t_train_max, ctx.budget, ctx.payload, K,
                ctx.planning_distance, ctx.scenario.solver.strict_admission, ctx.constants,
            )
            break
        except UnschedulableError:
            # defer to the next set of windows
            ends = [w.t_end for k in range(K) for w in ctx.windows[(orbit, k)] if w.t_end > t_now]
            if not ends or min(ends) > limit:
                return f"orbit {orbit}: no admissible sink (starvation) after t={t_now:.2f}"
            t_now = min(ends)
    sink = decision.sink_slot
    b = decision.breakdown
    events.append(Event(
        t_now, "sink-selected", sat_name((orbit, sink)), rnd,
        f"T*={b.total:.6f};uplink={b.uplink:.6f};downlink={b.downlink:.6f};wait={b.wait:.6f};"
        f"train={b.train:.6f};relay={b.relay:.6f};candidates={'/'.join(map(str, decision.candidate_set))}",
    ))
    t_ready = max(done[k] + ring_hop_distance(k, sink, K) * hop for k in range(K))
    events.append(Event(t_ready, "relay-complete", sat_name((orbit, sink)), rnd))
    partial = aggregate_partial(locals_)
    return _OrbitPlan(orbit, tb, t0, t_ready, t_train_max, decision, partial, decision.chosen_window)


def run_fedleo(scenario: Scenario | SimContext) -> SimulationResult:
    ctx = scenario if isinstance(scenario, SimContext) else SimContext.from_scenario(scenario)
    sc = ctx.scenario
    L, K = ctx.spec.num_orbits, ctx.spec.sats_per_orbit
    model = ctx.initial_model()
    events: list[Event] = []
    result = SimulationResult("fedleo", sc, [], events, model)
    pool = ResourceBlockPool(
        ctx.budget.num_resource_blocks, random.Random(derive_seed(sc.seed, "aloha")),
        sc.link.aloha_slot_s, sc.link.aloha_max_backoff,
    )
    reweight = None if sc.solver.reweight == "none" else sc.solver.reweight
    t_round = 0.0
    for rnd in range(sc.max_rounds):
        plans: dict[int, _OrbitPlan] = {}
        failure = None
        for l in range(L):
            plan = _fedleo_orbit(ctx, rnd, l, t_round, model, events)
            if isinstance(plan, str):
                failure = plan
                break
            plans[l] = plan
            result.sink_decisions.append((rnd, plan.decision))
        if failure:
            _incomplete(result, rnd, t_round, [], failure)
            break

        # step 5: sink uploads through the shared resource blocks, in time order
        queue = [(max(p.window.t_start, p.t_ready), l, p.window) for l, p in plans.items()]
        heapq.heapify(queue)
        uploads: dict[int, tuple[float, float]] = {}
        while queue and failure is None:
            t, l, window = heapq.heappop(queue)
            sink = (l, plans[l].decision.sink_slot)
            dur = ctx.t_down(ctx.distance(sink, t))
            if t + dur > window.t_end:
                hit = ctx.first_contact(sink, window.t_end, ctx.t_down(ctx.planning_distance))
                if hit is None:
                    failure = f"orbit {l}: sink {sink} has no later window for its upload"
                    break
                heapq.heappush(queue, (hit[0], l, hit[1]))
                continue
            retry = pool.request(t, dur)
            if retry is not None:
                heapq.heappush(queue, (retry, l, window))
                continue
            uploads[l] = (t, t + dur)
            events.append(Event(t, "sink-upload-start", sat_name(sink), rnd))
            events.append(Event(t + dur, "sink-upload-complete", sat_name(sink), rnd))

        orbit_rounds = []
        limit = ctx.horizon + sc.solver.lookahead_s
        for l, p in plans.items():
            start, end = uploads.get(l, (math.nan, math.nan))
            chain = star_orbit_schedule(ctx, l, t_round, limit)
            baseline = math.inf if isinstance(chain, str) else chain[-1].end - t_round
            orbit_rounds.append(OrbitRound(
                orbit=l,
                wait_broadcast=p.t_broadcast - t_round,
                uplink=p.t_received - p.t_broadcast,
                train=p.t_train_max,
                relay=(p.t_ready - p.t_received) - p.t_train_max,
                wait_sink=start - p.t_ready,
                downlink=end - start,
                sink_slot=p.decision.sink_slot,
                complete=l in uploads,
                baseline_time=baseline,
            ))
            if l in uploads and not _beats(orbit_rounds[-1].round_time, baseline, K):
                msg = (f"round {rnd}: orbit {l} took {orbit_rounds[-1].round_time:.2f} s, "
                       f"not below the star chain's {baseline:.2f} s")
                log.warning(msg)
                result.diagnostics.append(msg)
        if failure:
            _incomplete(result, rnd, t_round, orbit_rounds, failure)
            break
        t_agg = max(end for _, end in uploads.values())
        if t_agg > ctx.horizon:
            _incomplete(result, rnd, t_round, orbit_rounds, f"aggregation at t={t_agg:.2f} is past the horizon")
            break
        model = aggregate_global({l: p.partial for l, p in plans.items()}, L, reweight)
        acc = _aggregate_and_score(ctx, rnd, t_round, orbit_rounds, model, events, result, t_agg)
        t_round = t_agg
        if acc >= sc.target_accuracy:
            break

    result.final_model = model
    result.events = sorted(events, key=Event.sort_key)
    return result


# -- star baseline -----------------------------------------------------------


@dataclass(frozen=True)
class StarExchange:
    """One satellite's turn in the sequential star chain."""

    slot: int
    t_wait_from: float
    start: float
    download: float
    train: float
    upload_start: float
    upload: float
    second_wait: bool

    @property
    def end(self) -> float:
        return self.upload_start + self.upload


def star_orbit_schedule(ctx: SimContext, orbit: int, t_round: float, limit: Optional[float] = None):
    """Timing of the star chain for one orbit starting at ``t_round``.

    The GS serves the satellite that comes into view next, waits for its
    upload, then moves on.  Returns the list of exchanges, or a reason string
    when some satellite has no contact starting before ``limit``.
    """
    K = ctx.spec.sats_per_orbit
    limit = ctx.horizon if limit is None else limit
    plan_up = ctx.t_up(ctx.planning_distance)
    plan_down = ctx.t_down(ctx.planning_distance)
    tau = t_round
    pending = set(range(K))
    chain = []
    while pending:
        options = []
        for k in sorted(pending):
            hit = ctx.first_contact((orbit, k), tau, plan_up)
            if hit is not None:
                options.append((hit[0], k, hit[1]))
        if not options:
            return f"orbit {orbit}: no contact for satellites {sorted(pending)}"
        start, k, window = min(options)
        if start > limit:
            return f"orbit {orbit}: satellite {k} not in view before t={limit:.2f}"
        sat = (orbit, k)
        t_dl = ctx.t_up(ctx.distance(sat, start))
        t_train = ctx.train_time(sat)
        done = start + t_dl + t_train
        up_start = done
        t_ul = ctx.t_down(ctx.distance(sat, done))
        second = done + t_ul > window.t_end
        if second:
            hit = ctx.first_contact(sat, done, plan_down)
            if hit is None:
                return f"orbit {orbit}: satellite {k} has no window to upload"
            up_start = hit[0]
            t_ul = ctx.t_down(ctx.distance(sat, up_start))
        ex = StarExchange(k, tau, start, t_dl, t_train, up_start, t_ul, second)
        chain.append(ex)
        tau = ex.end
        pending.remove(k)
    return chain


def star_orbit_record(orbit: int, chain) -> OrbitRound:
    """Sum a chain's phases into an :class:`OrbitRound`."""
    return OrbitRound(
        orbit=orbit,
        wait_broadcast=math.fsum(e.start - e.t_wait_from for e in chain),
        uplink=math.fsum(e.download for e in chain),
        train=math.fsum(e.train for e in chain),
        wait_sink=math.fsum(e.upload_start - (e.start + e.download + e.train) for e in chain),
        downlink=math.fsum(e.upload for e in chain),
        second_waits=sum(e.second_wait for e in chain),
    )


def _star_orbit(ctx: SimContext, rnd: int, orbit: int, t_round: float, model: ModelState, events: list):
    chain = star_orbit_schedule(ctx, orbit, t_round)
    if isinstance(chain, str):
        return chain, None, None
    locals_ = []
    for e in chain:
        sat = (orbit, e.slot)
        received = e.start + e.download
        events.append(Event(e.start, "broadcast-start", "GS", rnd, f"orbit={orbit};sources={e.slot}"))
        events.append(Event(received, "model-received", sat_name(sat), rnd))
        events.append(Event(received + e.train, "train-complete", sat_name(sat), rnd))
        events.append(Event(e.upload_start, "sink-upload-start", sat_name(sat), rnd))
        events.append(Event(e.end, "sink-upload-complete", sat_name(sat), rnd))
        locals_.append(local_train(model, ctx.shards[sat], ctx.train_cfg(rnd, sat)))
    return star_orbit_record(orbit, chain), chain[-1].end, locals_


def run_star_baseline(scenario: Scenario | SimContext) -> SimulationResult:
    ctx = scenario if isinstance(scenario, SimContext) else SimContext.from_scenario(scenario)
    sc = ctx.scenario
    model = ctx.initial_model()
    events: list[Event] = []
    result = SimulationResult("star", sc, [], events, model)
    t_round = 0.0
    for rnd in range(sc.max_rounds):
        orbit_rounds, ends, locals_ = [], [], []
        failure = None
        for l in range(ctx.spec.num_orbits):
            rec, t_end, models = _star_orbit(ctx, rnd, l, t_round, model, events)
            if isinstance(rec, str):
                failure = rec
                break
            orbit_rounds.append(rec)
            ends.append(t_end)
            locals_.extend(models)
        if failure:
            _incomplete(result, rnd, t_round, orbit_rounds, failure)
            break
        t_agg = max(ends)
        if t_agg > ctx.horizon:
            _incomplete(result, rnd, t_round, orbit_rounds, f"aggregation at t={t_agg:.2f} is past the horizon")
            break
        model = fedavg(locals_)
        acc = _aggregate_and_score(ctx, rnd, t_round, orbit_rounds, model, events, result, t_agg)
        t_round = t_agg
        if acc >= sc.target_accuracy:
            break
    result.final_model = model
    result.events = sorted(events, key=Event.sort_key)
    return result


# -- comparison --------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonRow:
    round: int
    fedleo_round_s: float
    star_round_s: float
    fedleo_cum_s: float
    star_cum_s: float
    fedleo_accuracy: float
    star_accuracy: float
    dominance: bool


@dataclass(frozen=True)
class Comparison:
    """Side-by-side summary of a FedLEO run and a star run of one scenario.

    ``speedup`` is wall-clock: star's cumulative time over FedLEO's after the
    rounds both completed.  ``orbit_speedup`` sums, over every completed
    FedLEO round and orbit, the star chain's time from the same round start
    and divides by FedLEO's own orbit times.  A FedLEO round dominates when
    each of its orbits beats that same-start star chain.
    """

    rows: tuple[ComparisonRow, ...]
    fedleo_rounds: int
    star_rounds: int
    fedleo_rounds_to_target: Optional[int]
    star_rounds_to_target: Optional[int]
    fedleo_time_to_target: Optional[float]
    star_time_to_target: Optional[float]
    speedup: float
    orbit_speedup: float
    dominance_violations: int
    target_accuracy: float


def _to_target(result: SimulationResult, target: float):
    for r in result.completed:
        if r.global_accuracy >= target:
            return r.round + 1, r.t_aggregate
    return None, None


def _beats(fedleo_time: float, star_time: float, sats_per_orbit: int) -> bool:
    # with one satellite per orbit both protocols do the same exchange
    return fedleo_time < star_time if sats_per_orbit > 1 else fedleo_time <= star_time


def round_dominates(record: RoundRecord, sats_per_orbit: int) -> bool:
    return all(_beats(o.round_time, o.baseline_time, sats_per_orbit) for o in record.orbits)


def compare_results(fedleo: SimulationResult, star: SimulationResult) -> Comparison:
    """Per-round timings, rounds to target, dominance and speedups."""
    if fedleo.scenario != star.scenario:
        raise ValueError("cannot compare runs of different scenarios")
    if fedleo.protocol != "fedleo" or star.protocol != "star":
        raise ValueError("compare_results expects (fedleo, star) results")
    a, b = fedleo.completed, star.completed
    K = fedleo.scenario.constellation.sats_per_orbit
    n = min(len(a), len(b))
    rows = []
    for i in range(n):
        rows.append(ComparisonRow(
            i, a[i].round_wall_time, b[i].round_wall_time, a[i].t_aggregate, b[i].t_aggregate,
            a[i].global_accuracy, b[i].global_accuracy, round_dominates(a[i], K),
        ))
    violations = sum(not round_dominates(r, K) for r in a)
    speedup = b[n - 1].t_aggregate / a[n - 1].t_aggregate if n and a[n - 1].t_aggregate > 0 else math.nan
    pairs = [(o.baseline_time, o.round_time) for r in a for o in r.orbits if math.isfinite(o.baseline_time)]
    own = math.fsum(f for _, f in pairs)
    orbit_speedup = math.fsum(s for s, _ in pairs) / own if own > 0 else math.nan
    target = fedleo.scenario.target_accuracy
    fr, ft = _to_target(fedleo, target)
    sr, st = _to_target(star, target)
    return Comparison(tuple(rows), len(a), len(b), fr, sr, ft, st, speedup, orbit_speedup, violations, target)


def compare(scenario: Scenario) -> tuple[Comparison, SimulationResult, SimulationResult]:
    ctx = SimContext.from_scenario(scenario)
    fedleo = run_fedleo(ctx)
    star = run_star_baseline(ctx)
    return compare_results(fedleo, star), fedleo, star


def centralized_oracle(ctx: SimContext, rounds: int) -> tuple[ModelState, float]:
    """SGD on the pooled training data for ``rounds`` times the local epochs.

    Returns the model and its test accuracy; the reference point for how
    close federated training gets.
    """
    data = pooled(ctx.shards[s] for s in sorted(ctx.shards))
    shard = DataShard((-1, -1), data.X, data.y, data.num_classes)
    cfg = replace(
        ctx.training,
        local_epochs=rounds * ctx.training.local_epochs,
        seed=derive_seed(ctx.scenario.seed, "centralized"),
    )
    model = local_train(ctx.initial_model(), shard, cfg)
    return model, evaluate(model, ctx.test.X, ctx.test.y)
