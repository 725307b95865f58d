"""Engine-level behavior: determinism, conservation, oracle agreement."""
import numpy as np
import pytest
import scipy.stats

from scsim.catalog import build_catalog, hit_rate, top_k
from scsim.energy import EnergyProfile, ledger_residual
from scsim.engine import (
    Scenario,
    compare_energy,
    expected_offload,
    run,
    run_many,
    sweep_cache,
)
from scsim.mobility import TrafficProfile
from scsim.policy import BackhaulBudget


def poisson_truncated_mean(mu, c):
    """Independent route: head sum plus survival mass at the cap."""
    if c == 0 or mu == 0:
        return 0.0
    ks = np.arange(c)
    head = float(np.sum(ks * scipy.stats.poisson.pmf(ks, mu)))
    return head + c * float(scipy.stats.poisson.sf(c - 1, mu))


def test_expected_offload_matches_poisson_truncation():
    for mu in (0.3, 2.67, 10.76, 20.0, 150.0):
        for c in (0, 1, 5, 10, 50):
            assert expected_offload(mu, c) == pytest.approx(
                poisson_truncated_mean(mu, c), abs=1e-9
            )


def test_expected_offload_frozen_values():
    assert expected_offload(20.0, 10) == pytest.approx(9.991791057899624, abs=1e-12)
    assert expected_offload(0.5, 10) == pytest.approx(0.5, abs=1e-9)


def test_expected_offload_large_mu_branch():
    # above the pmf-recursion cutoff the log-space route takes over
    for mu in (800.0, 1200.0):
        for c in (700, 900):
            assert expected_offload(mu, c) == pytest.approx(
                poisson_truncated_mean(mu, c), abs=1e-8
            )


def test_expected_offload_continuous_at_cutoff():
    below = expected_offload(699.999999, 650)
    above = expected_offload(700.000001, 650)
    assert abs(above - below) < 1e-4


def test_expected_offload_monotone_and_capped():
    grid = [0.0, 0.5, 2.0, 8.0, 20.0]
    for mu in grid:
        vals = [expected_offload(mu, c) for c in range(0, 30)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(v <= min(mu, c) + 1e-12 for c, v in enumerate(vals))
    for c in (1, 10):
        vals = [expected_offload(mu, c) for mu in grid]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_expected_offload_unbinding_cap_returns_mean():
    assert expected_offload(5.0, 200) == pytest.approx(5.0, abs=1e-9)


def test_expected_offload_rejects_bad_args():
    with pytest.raises(ValueError):
        expected_offload(-1.0, 10)
    with pytest.raises(ValueError):
        expected_offload(float("nan"), 10)
    with pytest.raises(ValueError):
        expected_offload(1.0, -1)


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(policy="laziest")
    with pytest.raises(ValueError):
        Scenario(epoch_seconds=900, step_seconds=7)
    with pytest.raises(ValueError):
        Scenario(duration=1000)
    with pytest.raises(ValueError):
        Scenario(split_ratio=1.5)
    with pytest.raises(ValueError):
        Scenario(cache_capacity=-1)
    with pytest.raises(ValueError):
        Scenario(speed=0.0)
    with pytest.raises(ValueError):
        Scenario(low_watermark=10.0, high_watermark=5.0)
    with pytest.raises(ValueError):
        Scenario(seed=-1)


QUICK = Scenario(
    traffic=TrafficProfile(base_density=0.004, enabled=False),
    duration=1800,
)


def test_run_is_deterministic():
    a = run(QUICK)
    b = run(QUICK)
    assert a.epochs == b.epochs
    assert a.offered == b.offered and a.scs_served == b.scs_served
    c = run(Scenario(
        traffic=TrafficProfile(base_density=0.004, enabled=False),
        duration=1800,
        seed=43,
    ))
    assert c.offered != a.offered or c.epochs != a.epochs


def test_offered_splits_exactly_between_scs_and_mbs():
    rep = run(QUICK)
    for em in rep.epochs:
        assert em.offered == em.scs_served + em.mbs_served
        assert 0.0 <= em.hit_rate <= 1.0
        assert 0.0 <= em.continuity_rate <= 1.0
        assert em.mean_power >= 0.0 and em.mean_battery >= 0.0
    assert rep.offered == rep.scs_served + rep.mbs_served
    assert rep.offered == sum(em.offered for em in rep.epochs)


def test_battery_ledger_closes():
    rep = run(QUICK)
    residual = ledger_residual(rep.batteries)
    assert np.max(np.abs(residual)) < 1e-9


def test_sustainable_requests_only_available_power():
    rep = run(Scenario(duration=7200))
    assert rep.outage_energy == 0.0


def test_greedy_without_harvest_books_full_deficit():
    rep = run(Scenario(
        policy="greedy",
        energy=EnergyProfile(kind="zero"),
        traffic=TrafficProfile(base_density=0.001, enabled=False),
        duration=1800,
    ))
    # every station requests 1.0 for 1800 s against an empty store
    assert rep.outage_energy == pytest.approx(18000.0, abs=1e-9)
    assert rep.scs_served == 0


def test_policies_coincide_under_constant_energy():
    kw = dict(
        traffic=TrafficProfile(base_density=0.004, enabled=False),
        energy=EnergyProfile(kind="constant", peak_rate=1.0),
        duration=1800,
    )
    sus = run(Scenario(policy="sustainable", **kw))
    greedy = run(Scenario(policy="greedy", **kw))
    for a, b in zip(sus.epochs, greedy.epochs):
        assert a.offered == b.offered
        assert a.scs_served == b.scs_served
        assert a.hit_rate == b.hit_rate


def test_step_hook_sees_every_step_and_cap_law_holds():
    records = []
    sc = Scenario(
        traffic=TrafficProfile(base_density=0.002, enabled=False),
        duration=900,
    )
    run(sc, step_hook=records.append)
    assert len(records) == 900
    assert [r.t for r in records] == list(range(1, 901))
    pm = sc.power
    for r in records:
        cap = np.minimum(np.minimum(r.hits, r.quotas), pm.max_users)
        assert np.all(r.served <= cap)
        assert np.all(r.served[~r.active] == 0)
        assert np.all(r.served >= 0)


def test_prefetch_never_hurts_continuity():
    kw = dict(
        traffic=TrafficProfile(base_density=0.002, enabled=False),
        energy=EnergyProfile(kind="constant", peak_rate=1.0),
        cache_capacity=31,
        duration=3600,
        seed=7,
    )
    with_pf = run(Scenario(prefetch_budget=4, **kw))
    without = run(Scenario(prefetch_budget=0, **kw))
    assert with_pf.continuity_rate > without.continuity_rate
    assert without.continuity_rate > 0.3


def test_regeneration_follows_traffic_profile():
    # narrow rush peak placed on the second epoch only
    sc = Scenario(
        traffic=TrafficProfile(
            base_density=0.01, peak_hours=(0.25, 12.0), peak_width_h=0.1
        ),
        duration=1800,
    )
    rep = run(sc)
    quiet, rush = rep.epochs[0].offered, rep.epochs[1].offered
    assert rush > 10 * max(quiet, 1)


def test_sweep_cache_is_monotone_with_shared_seeds():
    base = Scenario(
        traffic=TrafficProfile(enabled=False),
        energy=EnergyProfile(kind="constant", peak_rate=1.0),
        split_ratio=1.0,
        backhaul=BackhaulBudget(files_per_epoch=2000, variability=(1.0, 1.0)),
        duration=1800,
    )
    points = sweep_cache(base, [0, 10, 100])
    vals = [p.offload_mbps for p in points]
    assert vals[0] == 0.0
    assert vals[0] < vals[1] < vals[2]
    for p in points:
        steps = base.duration // base.step_seconds
        expect = p.report.scs_served / (steps * base.highway.n_stations) * 10.0
        assert p.offload_mbps == pytest.approx(expect, rel=1e-12)
    # pointwise per-epoch dominance, not just on the mean
    for small, big in zip(points, points[1:]):
        for a, b in zip(small.report.epochs, big.report.epochs):
            assert a.scs_served <= b.scs_served


def test_compare_energy_defines_zero_over_zero_as_one():
    cmp = compare_energy(Scenario(
        energy=EnergyProfile(kind="zero"),
        traffic=TrafficProfile(base_density=0.0005, enabled=False),
        duration=900,
    ))
    assert cmp.sustainable.scs_served == 0
    assert cmp.greedy.scs_served == 0
    assert cmp.capacity_ratio == 1.0


def test_run_many_preserves_order_and_matches_sequential():
    scenarios = [
        Scenario(traffic=TrafficProfile(base_density=0.001, enabled=False),
                 duration=900, seed=s)
        for s in (1, 2)
    ]
    seq = [run(sc) for sc in scenarios]
    batch = run_many(scenarios, workers=1)
    forked = run_many(scenarios, workers=2)
    for ref, got in zip(seq, batch):
        assert ref.epochs == got.epochs
    for ref, got in zip(seq, forked):
        assert ref.epochs == got.epochs
        assert ref.seed == got.seed


def test_hit_rate_tracks_cache_mass_without_prefetch():
    sc = Scenario(
        traffic=TrafficProfile(enabled=False),
        energy=EnergyProfile(kind="constant", peak_rate=1.0),
        split_ratio=1.0,
        cache_capacity=31,
        backhaul=BackhaulBudget(files_per_epoch=2000, variability=(1.0, 1.0)),
        duration=9000,
    )
    rep = run(sc)
    cat = build_catalog(sc.n_files, sc.gamma)
    mass = hit_rate(cat, set(top_k(cat, 31)))
    per_epoch = np.array([em.hit_rate for em in rep.epochs])
    se = per_epoch.std(ddof=1) / np.sqrt(len(per_epoch))
    assert abs(per_epoch.mean() - mass) <= 3.5 * se + 1e-4
