"""Two-timescale simulation engine and its closed-form companions.

A run nests one-second-scale service steps inside epoch-scale planning:
each epoch regenerates the vehicle population at the current demand
level, refreshes the popular cache partitions over the backhaul, and
lets the policy fix sleep modes and user quotas; each step inside moves
vehicles, stages prefetches ahead of handovers, throttles serving to the
energy actually available, and settles the battery ledger.

Everything is driven by one seeded generator in a fixed consumption
order, so a scenario and a seed pin the full output byte-for-byte.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .catalog import build_catalog
from .energy import Battery, EnergyProfile, battery_step, harvest_rates, mean_rate
from .mobility import (
    Highway,
    TrafficProfile,
    cell_indices,
    handovers_from_arrays,
    spawn_vehicles,
    traffic_multiplier,
)
from .policy import (
    DEFAULT_HIGH_WATERMARK,
    DEFAULT_LOW_WATERMARK,
    BackhaulBudget,
    greedy_large_step,
    greedy_small_step,
    plan_popular_update,
    plan_prefetch,
    sustainable_large_step,
    sustainable_small_step,
)
from .station import CacheStore, Mode, PowerModel, StationState

__all__ = [
    "Scenario",
    "EpochMetrics",
    "MetricsReport",
    "StepRecord",
    "SweepPoint",
    "EnergyComparison",
    "run",
    "run_many",
    "expected_offload",
    "sweep_cache",
    "compare_energy",
]

POLICIES = ("sustainable", "greedy")


@dataclass(frozen=True)
class Scenario:
    """Complete, immutable description of one simulation run.

    Defaults describe the reference setup: a 10-station ring of 1 km
    cells, a 1000-file Zipf(1) catalog, 0.01 vehicles/m/direction at
    rush peak, solar harvesting normalised to the full station draw,
    100-file split caches, and the sustainable policy at 900 s epochs
    of 1 s steps over one day.
    """

    highway: Highway = Highway(n_stations=10, cell_length=1000.0)
    n_files: int = 1000
    gamma: float = 1.0
    traffic: TrafficProfile = TrafficProfile()
    speed: float = 25.0
    energy: EnergyProfile = EnergyProfile()
    battery_capacity: float = math.inf
    power: PowerModel = PowerModel()
    cache_capacity: int = 100
    split_ratio: float = 0.8
    backhaul: BackhaulBudget = BackhaulBudget()
    prefetch_budget: int = 2
    low_watermark: float = DEFAULT_LOW_WATERMARK
    high_watermark: float = DEFAULT_HIGH_WATERMARK
    greedy_partial: bool = False
    policy: str = "sustainable"
    epoch_seconds: int = 900
    step_seconds: int = 1
    duration: int = 86400
    seed: int = 42

    def __post_init__(self) -> None:
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if self.step_seconds < 1 or self.epoch_seconds < 1:
            raise ValueError("epoch_seconds and step_seconds must be >= 1")
        if self.epoch_seconds % self.step_seconds != 0:
            raise ValueError(
                f"epoch_seconds ({self.epoch_seconds}) must be a multiple of "
                f"step_seconds ({self.step_seconds})"
            )
        if self.duration < 1 or self.duration % self.epoch_seconds != 0:
            raise ValueError(
                f"duration ({self.duration}) must be a positive multiple of "
                f"epoch_seconds ({self.epoch_seconds})"
            )
        if self.cache_capacity < 0:
            raise ValueError("cache_capacity must be >= 0")
        if not 0.0 <= self.split_ratio <= 1.0:
            raise ValueError("split_ratio must lie in [0, 1]")
        if self.prefetch_budget < 0:
            raise ValueError("prefetch_budget must be >= 0")
        if not 0.0 <= self.low_watermark <= self.high_watermark:
            raise ValueError("watermarks must satisfy 0 <= low <= high")
        if not self.speed > 0:
            raise ValueError("speed must be > 0")
        if not self.battery_capacity > 0:
            raise ValueError("battery_capacity must be > 0 (inf for unbounded)")
        if self.n_files < 1:
            raise ValueError("n_files must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


@dataclass(frozen=True)
class EpochMetrics:
    epoch_start_s: int
    offered: int
    scs_served: int
    mbs_served: int
    hit_rate: float
    mean_power: float
    mean_battery: float
    outage_energy: float
    overflow_energy: float
    continuity_rate: float
    pushes: int
    defers: int


@dataclass(frozen=True)
class StepRecord:
    """Per-step trace row passed to an observer hook (testing aid)."""

    t: int
    offered: int
    hits: np.ndarray
    served: np.ndarray
    quotas: np.ndarray
    active: np.ndarray


@dataclass(frozen=True)
class MetricsReport:
    """Run outcome: per-epoch rows plus whole-run aggregates."""

    seed: int
    policy: str
    epochs: list[EpochMetrics]
    offered: int
    scs_served: int
    mbs_served: int
    normalized_offload: float
    hit_rate: float
    continuity_rate: float
    outage_energy: float
    overflow_energy: float
    pushes: int
    defers: int
    batteries: Battery = field(repr=False)


def run(scenario: Scenario, step_hook: Callable[[StepRecord], None] | None = None) -> MetricsReport:
    """Simulate one scenario and return its metrics report.

    ``step_hook``, when given, receives a :class:`StepRecord` after every
    small step; it is meant for invariant checks and stays off the hot
    path otherwise.
    """
    sc = scenario
    hw = sc.highway
    n_stations = hw.n_stations
    catalog = build_catalog(sc.n_files, sc.gamma)
    rng = np.random.default_rng(sc.seed)
    pm = sc.power

    masks = np.zeros((n_stations, sc.n_files + 1), dtype=bool)
    stations = [
        StationState(
            index=i,
            cache=CacheStore(sc.cache_capacity, sc.split_ratio, mask=masks[i]),
            power=pm,
        )
        for i in range(n_stations)
    ]
    bank = Battery(level=np.zeros(n_stations), capacity=sc.battery_capacity)

    sustainable = sc.policy == "sustainable"
    dt = float(sc.step_seconds)
    n_sub = sc.epoch_seconds // sc.step_seconds
    n_epochs = sc.duration // sc.epoch_seconds
    prefetch_on = (
        sc.prefetch_budget > 0 and stations[0].cache.prefetch_capacity > 0 and sc.cache_capacity > 0
    )
    forecast = np.empty(n_stations)

    epochs: list[EpochMetrics] = []
    tot_offered = tot_scs = tot_hits = 0
    tot_handovers = tot_cont = tot_pushes = tot_defers = 0
    prev_deficit = prev_overflow = 0.0

    for e in range(n_epochs):
        t0 = e * sc.epoch_seconds
        density = sc.traffic.base_density * traffic_multiplier(sc.traffic, float(t0))
        vehicles = spawn_vehicles(density, hw, catalog, rng, speed=sc.speed, entry_time=float(t0))
        budgets = [sc.backhaul.realize(rng) for _ in range(n_stations)]
        for st, budget in zip(stations, budgets):
            evict, fetch = plan_popular_update(
                st.cache.popular, catalog, budget, st.cache.popular_capacity
            )
            st.cache.apply_popular_update(evict, fetch)

        forecast[:] = mean_rate(sc.energy, float(t0), float(t0 + sc.epoch_seconds))
        if sustainable:
            mode_plan, power_plan = sustainable_large_step(
                stations, bank.level, forecast, float(sc.epoch_seconds)
            )
        else:
            mode_plan, power_plan = greedy_large_step(stations)
        for st, mode, quota in zip(stations, mode_plan.modes, power_plan.quotas):
            st.mode = mode
            st.quota = quota
        active = np.array([m is Mode.ACTIVE for m in mode_plan.modes])
        quotas = np.array(power_plan.quotas, dtype=np.int64)
        all_active = bool(active.all())

        n_veh = vehicles.n
        contents = vehicles.active_content
        directions = vehicles.direction
        speeds = vehicles.speed
        prev_cells = cell_indices(vehicles.position, hw)
        prev_pos = vehicles.position
        harvests = harvest_rates(sc.energy, t0 + np.arange(n_sub) * dt)

        ep_offered = ep_scs = ep_hits = 0
        ep_handovers = ep_cont = ep_pushes = ep_defers = 0
        ep_delivered = ep_level = 0.0
        any_active = bool(active.any())
        zero_served = np.zeros(n_stations, dtype=np.int64)

        # Trajectories are closed-form per epoch; evaluate them in blocks
        # to bound the working-set size for big populations. The same
        # block tells us which steps contain a cell crossing at all, so
        # quiet steps skip handover prediction and continuity checks.
        block = max(1, min(n_sub, 2_000_000 // max(n_veh, 1)))
        for s0 in range(0, n_sub, block):
            s1 = min(s0 + block, n_sub)
            offsets = np.arange(s0 + 1, s1 + 1) * dt
            positions = vehicles.positions_at(offsets, hw)
            cells_block = cell_indices(positions, hw)
            if n_veh:
                allc = np.vstack((prev_cells[None, :], cells_block))
                row_changed = (allc[1:] != allc[:-1]).any(axis=1)
            else:
                row_changed = np.zeros(s1 - s0, dtype=bool)

            for s in range(s0, s1):
                j = s - s0
                cells = cells_block[j]
                harvest = harvests[s]
                changed = row_changed[j]

                if prefetch_on and changed:
                    idx, nxt, eta = handovers_from_arrays(
                        prev_pos, directions, speeds, hw, horizon=dt
                    )
                    if idx.size:
                        triples = [
                            (int(contents[i]), int(nxt[k]), float(eta[k]))
                            for k, i in enumerate(idx)
                        ]
                        for st_idx, picks in plan_prefetch(
                            triples, stations, sc.prefetch_budget, horizon=dt
                        ).items():
                            cache = stations[st_idx].cache
                            for content in picks:
                                cache.prefetch_insert(content)

                if n_veh:
                    hit_mask = masks[cells, contents]
                    n_hits = int(np.count_nonzero(hit_mask))
                    if any_active or step_hook is not None:
                        hits_per_cell = np.bincount(cells[hit_mask], minlength=n_stations)
                    else:
                        hits_per_cell = zero_served
                else:
                    n_hits = 0
                    hits_per_cell = zero_served

                if sustainable:
                    if any_active:
                        plan = sustainable_small_step(
                            pm, bank.level, harvest, hits_per_cell, quotas, dt,
                            sc.low_watermark, sc.high_watermark,
                        )
                        if all_active:
                            served = plan.served
                            draw = plan.draw
                            ep_pushes += int(np.count_nonzero(plan.push))
                            ep_defers += int(np.count_nonzero(plan.defer))
                        else:
                            served = np.where(active, plan.served, 0)
                            sleep_draw = np.minimum(pm.p_sleep, bank.level / dt + harvest)
                            draw = np.where(active, plan.draw, sleep_draw)
                            ep_pushes += int(np.count_nonzero(plan.push & active))
                            ep_defers += int(np.count_nonzero(plan.defer & active))
                        _, delivered = battery_step(bank, harvest, draw, dt)
                        ep_scs += int(served.sum())
                    else:
                        served = zero_served
                        draw = np.minimum(pm.p_sleep, bank.level / dt + harvest)
                        _, delivered = battery_step(bank, harvest, draw, dt)
                else:
                    _, delivered = battery_step(bank, harvest, 1.0, dt)
                    served = greedy_small_step(pm, hits_per_cell, delivered, sc.greedy_partial)
                    ep_scs += int(served.sum())

                ep_offered += n_veh
                ep_hits += n_hits
                ep_delivered += float(delivered.sum())
                ep_level += float(bank.level.sum())

                if changed:
                    crossed = cells != prev_cells
                    ep_handovers += int(np.count_nonzero(crossed))
                    ep_cont += int(np.count_nonzero(masks[cells[crossed], contents[crossed]]))
                    prev_cells = cells
                prev_pos = positions[j]

                if step_hook is not None:
                    step_hook(
                        StepRecord(
                            t=t0 + (s + 1) * sc.step_seconds,
                            offered=n_veh,
                            hits=hits_per_cell.copy(),
                            served=np.array(served, dtype=np.int64),
                            quotas=quotas.copy(),
                            active=active.copy(),
                        )
                    )

        deficit_now = float(np.sum(bank.cum_deficit))
        overflow_now = float(np.sum(bank.cum_overflow))
        epochs.append(
            EpochMetrics(
                epoch_start_s=t0,
                offered=ep_offered,
                scs_served=ep_scs,
                mbs_served=ep_offered - ep_scs,
                hit_rate=ep_hits / ep_offered if ep_offered else 0.0,
                mean_power=ep_delivered / (n_stations * n_sub),
                mean_battery=ep_level / (n_stations * n_sub),
                outage_energy=deficit_now - prev_deficit,
                overflow_energy=overflow_now - prev_overflow,
                continuity_rate=ep_cont / ep_handovers if ep_handovers else 1.0,
                pushes=ep_pushes,
                defers=ep_defers,
            )
        )
        prev_deficit, prev_overflow = deficit_now, overflow_now
        tot_offered += ep_offered
        tot_scs += ep_scs
        tot_hits += ep_hits
        tot_handovers += ep_handovers
        tot_cont += ep_cont
        tot_pushes += ep_pushes
        tot_defers += ep_defers

    return MetricsReport(
        seed=sc.seed,
        policy=sc.policy,
        epochs=epochs,
        offered=tot_offered,
        scs_served=tot_scs,
        mbs_served=tot_offered - tot_scs,
        normalized_offload=tot_scs / tot_offered if tot_offered else 0.0,
        hit_rate=tot_hits / tot_offered if tot_offered else 0.0,
        continuity_rate=tot_cont / tot_handovers if tot_handovers else 1.0,
        outage_energy=prev_deficit,
        overflow_energy=prev_overflow,
        pushes=tot_pushes,
        defers=tot_defers,
        batteries=bank,
    )


def run_many(scenarios: list[Scenario], workers: int = 1) -> list[MetricsReport]:
    """Run several scenarios, optionally across processes.

    Results come back in input order regardless of worker scheduling, so
    concurrency never changes the output.
    """
    if workers <= 1 or len(scenarios) <= 1:
        return [run(sc) for sc in scenarios]
    with ProcessPoolExecutor(max_workers=min(workers, len(scenarios))) as pool:
        return list(pool.map(run, scenarios))


def expected_offload(mu: float, c: int) -> float:
    """Mean of ``min(X, c)`` for ``X ~ Poisson(mu)``.

    This is the stationary per-cell offload when hit traffic arrives as
    a Poisson flow of intensity ``mu`` and at most ``c`` users are served
    in parallel: hits beyond the cap spill to the macro cell.

    Parameters
    ----------
    mu : float
        Poisson mean, >= 0.
    c : int
        Serving cap, >= 0.

    Returns
    -------
    float
        ``sum_k min(k, c) P[X = k]``, absolute error below 1e-9.
    """
    if mu < 0 or not math.isfinite(mu):
        raise ValueError(f"mu must be finite and >= 0, got {mu}")
    if c < 0:
        raise ValueError(f"c must be >= 0, got {c}")
    if c == 0 or mu == 0.0:
        return 0.0
    # E[min(X, c)] = sum_{k<c} k p_k + c (1 - CDF(c-1)); the head terms
    # come from the stable pmf recursion (log-space for very large mu).
    if mu <= 700.0:
        p = math.exp(-mu)
        cdf = p
        head = 0.0
        for k in range(1, c):
            p *= mu / k
            head += k * p
            cdf += p
    else:
        head = 0.0
        cdf = 0.0
        log_mu = math.log(mu)
        for k in range(c):
            p = math.exp(k * log_mu - mu - math.lgamma(k + 1))
            head += k * p
            cdf += p
    return head + c * max(0.0, 1.0 - cdf)


@dataclass(frozen=True)
class SweepPoint:
    cache_capacity: int
    offload_mbps: float
    report: MetricsReport


def sweep_cache(base: Scenario, cache_sizes: list[int], workers: int = 1) -> list[SweepPoint]:
    """Run one simulation per cache size, identical seeds across points.

    The per-point figure is the time-mean number of station-served users
    per cell scaled by the per-user rate, i.e. the offloaded throughput
    one station sustains.
    """
    scenarios = [replace(base, cache_capacity=int(c)) for c in cache_sizes]
    reports = run_many(scenarios, workers)
    points = []
    for c, rep in zip(cache_sizes, reports):
        steps = base.duration // base.step_seconds
        mean_served = rep.scs_served / (steps * base.highway.n_stations)
        points.append(
            SweepPoint(
                cache_capacity=int(c),
                offload_mbps=mean_served * base.power.rate_per_user_mbps,
                report=rep,
            )
        )
    return points


@dataclass(frozen=True)
class EnergyComparison:
    sustainable: MetricsReport
    greedy: MetricsReport
    capacity_ratio: float


def compare_energy(base: Scenario, workers: int = 1) -> EnergyComparison:
    """Run the sustainable policy and the always-on baseline side by side.

    Both runs share the seed, so vehicles, contents, and cache updates
    are identical; only the energy management differs. The capacity
    ratio is daily station-served traffic, sustainable over greedy
    (defined as 1.0 when both sit at zero).
    """
    sus, greedy = run_many(
        [replace(base, policy="sustainable"), replace(base, policy="greedy")], workers
    )
    if greedy.scs_served == 0:
        ratio = 1.0 if sus.scs_served == 0 else math.inf
    else:
        ratio = sus.scs_served / greedy.scs_served
    return EnergyComparison(sustainable=sus, greedy=greedy, capacity_ratio=ratio)
