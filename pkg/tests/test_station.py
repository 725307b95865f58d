from __future__ import annotations

import numpy as np
import pytest

from scsim.energy import Battery
from scsim.mobility import Vehicle
from scsim.station import (
    CacheStore,
    Mode,
    PowerModel,
    StationState,
    admit,
    cache_contains,
    mbs_serve,
    power_draw,
)


def make_station(capacity=10, split=0.8, quota=10, mode=Mode.ACTIVE, popular=()):
    st = StationState(
        index=0,
        cache=CacheStore(capacity, split),
        mode=mode,
        quota=quota,
        battery=Battery(),
    )
    st.cache.apply_popular_update([], list(popular))
    return st


class TestPowerModel:
    def test_defaults_normalised(self):
        pm = PowerModel()
        assert pm.p_const + pm.max_users * pm.p_per_user == pytest.approx(1.0, abs=1e-9)

    def test_rejects_unnormalised_model(self):
        with pytest.raises(ValueError):
            PowerModel(p_const=0.6)  # 0.6 + 10*0.05 = 1.1

    def test_rejects_sleep_above_const(self):
        with pytest.raises(ValueError):
            PowerModel(p_const=0.5, p_sleep=0.5)

    def test_draw_levels(self):
        st = make_station()
        st.mode = Mode.SLEEP
        assert power_draw(st) == pytest.approx(0.01, abs=1e-12)
        st.mode = Mode.ACTIVE
        st.served = 0
        assert power_draw(st) == pytest.approx(0.5, abs=1e-12)
        st.served = 10
        assert power_draw(st) == pytest.approx(1.0, abs=1e-12)
        st.served = 4
        assert power_draw(st) == pytest.approx(0.7, abs=1e-12)


class TestCacheStore:
    def test_split_partition_sizes(self):
        c = CacheStore(100, 0.8)
        assert c.popular_capacity == 80 and c.prefetch_capacity == 20
        c = CacheStore(31, 0.8)
        assert c.popular_capacity == 25 and c.prefetch_capacity == 6
        c = CacheStore(10, 1.0)
        assert c.popular_capacity == 10 and c.prefetch_capacity == 0

    def test_zero_capacity_caches_nothing(self):
        c = CacheStore(0, 0.8)
        assert c.prefetch_insert(5) is None
        assert not c.contains(5)

    def test_membership_is_union_of_partitions(self):
        c = CacheStore(10, 0.5)
        c.apply_popular_update([], [1, 2])
        c.prefetch_insert(7)
        assert c.contains(1) and c.contains(7)
        assert not c.contains(3)

    def test_fifo_eviction_order(self):
        c = CacheStore(5, 0.5)  # prefetch capacity 2
        assert c.prefetch_insert(11) is None
        assert c.prefetch_insert(12) is None
        assert c.prefetch_insert(13) == 11
        assert c.prefetch_insert(14) == 12
        assert c.prefetch == [13, 14]

    def test_duplicate_prefetch_is_noop(self):
        c = CacheStore(5, 0.5)
        c.prefetch_insert(11)
        assert c.prefetch_insert(11) is None
        assert c.prefetch == [11]

    def test_mask_written_through(self):
        mask = np.zeros(50, dtype=bool)
        c = CacheStore(4, 0.5, mask=mask)
        c.apply_popular_update([], [3, 4])
        c.prefetch_insert(9)
        assert mask[3] and mask[4] and mask[9]
        c.prefetch_insert(10)
        c.prefetch_insert(11)  # evicts 9
        assert not mask[9] and mask[10] and mask[11]
        c.apply_popular_update([4], [5])
        assert not mask[4] and mask[5]

    def test_mask_keeps_id_cached_in_both_partitions(self):
        mask = np.zeros(50, dtype=bool)
        c = CacheStore(4, 0.5, mask=mask)
        c.apply_popular_update([], [7])
        c.prefetch_insert(7)  # duplicate across partitions is a no-op
        c.apply_popular_update([7], [])
        assert not c.contains(7) or mask[7] == c.contains(7)

    def test_popular_overfull_rejected(self):
        c = CacheStore(4, 0.5)
        with pytest.raises(ValueError):
            c.apply_popular_update([], [1, 2, 3])

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            CacheStore(-1)
        with pytest.raises(ValueError):
            CacheStore(10, split_ratio=1.5)


class TestAdmit:
    def test_earliest_entry_then_position_wins(self):
        st = make_station(quota=1, popular=[1])
        a = Vehicle(500.0, 1, 25.0, 1, entry_time=10.0)
        b = Vehicle(100.0, 1, 25.0, 1, entry_time=5.0)
        c = Vehicle(50.0, 1, 25.0, 1, entry_time=10.0)
        served, rejected = admit(st, [a, b, c])
        assert served == [b]
        assert set(id(v) for v in rejected) == {id(a), id(c)}
        st.quota = 2
        served, _ = admit(st, [a, b, c])
        assert served == [b, c]  # tie on entry_time broken by position

    def test_misses_never_admitted(self):
        st = make_station(quota=10, popular=[1])
        hit = Vehicle(10.0, 1, 25.0, 1)
        miss = Vehicle(20.0, 1, 25.0, 999)
        served, rejected = admit(st, [hit, miss])
        assert served == [hit]
        assert rejected == [miss]

    def test_quota_and_max_users_cap(self):
        st = make_station(quota=3, popular=[1])
        vehicles = [Vehicle(float(i), 1, 25.0, 1, entry_time=0.0) for i in range(8)]
        served, rejected = admit(st, vehicles)
        assert len(served) == 3 and len(rejected) == 5
        st.quota = 99  # beyond max_users; hardware cap still binds
        served, _ = admit(st, [Vehicle(float(i), 1, 25.0, 1) for i in range(15)])
        assert len(served) == 10

    def test_sleeping_station_serves_nothing(self):
        st = make_station(mode=Mode.SLEEP, popular=[1])
        served, rejected = admit(st, [Vehicle(10.0, 1, 25.0, 1)])
        assert served == [] and len(rejected) == 1

    def test_cap_law_random_cases(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            quota = int(rng.integers(0, 15))
            popular = list(range(1, int(rng.integers(1, 6))))
            st = make_station(quota=quota, popular=popular)
            vehicles = [
                Vehicle(float(rng.random() * 1000), 1, 25.0, int(rng.integers(1, 9)),
                        entry_time=float(rng.integers(0, 3)))
                for _ in range(int(rng.integers(0, 25)))
            ]
            served, rejected = admit(st, vehicles)
            hits = [v for v in vehicles if st.cache.contains(v.active_content)]
            assert len(served) == min(len(hits), quota, 10)
            assert all(st.cache.contains(v.active_content) for v in served)
            assert len(served) + len(rejected) == len(vehicles)

    def test_cache_contains_delegates(self):
        st = make_station(popular=[2])
        assert cache_contains(st, 2)
        assert not cache_contains(st, 3)


class TestMbsServe:
    def test_serves_everything_with_backhaul(self):
        assert mbs_serve(0) == (0, 0)
        assert mbs_serve(17) == (17, 17)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            mbs_serve(-1)
