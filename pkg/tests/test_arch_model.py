import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from ldpc_fa.arch_model import (IEEE8023AN_LUT, IEEE8023AN_MS, ArchParams, compare_report,
                                energy_pj_per_bit, f_fast_max, f_slow_max, format_report,
                                limiting_path, q_max, register_count, register_formula, report,
                                slow_period_ns, throughput_gbps)


def test_q_max():
    assert q_max(5, 5, "MS") == 5
    assert q_max(3, 4, "LUT") == 3
    assert q_max(2, 8, "LUT") == 4
    assert q_max(2, 8, "MS") == 8
    with pytest.raises(ValueError):
        q_max(3, 3, "BP")


def test_lut_clocking():
    assert slow_period_ns(IEEE8023AN_LUT) == pytest.approx(3.48)
    assert f_fast_max(IEEE8023AN_LUT) == pytest.approx(862.07, abs=0.005)
    assert throughput_gbps(IEEE8023AN_LUT) == pytest.approx(588.5, abs=0.05)


def test_ms_clocking():
    assert slow_period_ns(IEEE8023AN_MS) == pytest.approx(7.55)
    assert f_fast_max(IEEE8023AN_MS) == pytest.approx(662.25, abs=0.005)
    assert throughput_gbps(IEEE8023AN_MS) == pytest.approx(271.3, abs=0.05)


def test_vn_dominated_period():
    p = ArchParams(10, 3, 6, 5, 5, 5, "MS", t_cp_route=0.1, t_cp_vn=9.0, t_cp_cn=1.0)
    assert slow_period_ns(p) == 9.0
    assert limiting_path(p) == "vn"
    assert not report(p).routing_limited


def test_unit_throughput():
    p = ArchParams(1, 2, 4, 1, 1, 1, "MS", t_cp_route=1.0, t_cp_vn=1.0, t_cp_cn=1.0)
    assert f_slow_max(p) == pytest.approx(1000.0)
    assert throughput_gbps(p) == pytest.approx(1.0)


def test_register_formula():
    assert register_formula(2048, 6, 5, 5) == 2_078_720
    assert register_formula(1, 1, 1, 1) == 10
    assert register_count(IEEE8023AN_MS) == (2_078_720, 2_078_720)
    lo, hi = register_count(IEEE8023AN_LUT)
    assert (lo, hi) == (register_formula(2048, 6, 3, 5), register_formula(2048, 6, 4, 5))


def test_energy():
    assert energy_pj_per_bit(13350, 588) == pytest.approx(22.7, abs=0.05)
    assert energy_pj_per_bit(12248, 271) == pytest.approx(45.2, abs=0.05)
    assert energy_pj_per_bit(1000, 1000) == 1.0
    with pytest.raises(ValueError):
        energy_pj_per_bit(0, 1)


def test_report_invariants():
    for p in (IEEE8023AN_LUT, IEEE8023AN_MS):
        r = report(p)
        assert r.f_fast_mhz == pytest.approx(r.q_max * r.f_slow_mhz)
        assert r.latency_fast_cycles == 4 * p.iters * r.q_max
        assert r.latency_slow_cycles == 4 * p.iters
        assert r.latency_ns == pytest.approx(r.latency_slow_cycles * r.slow_period_ns)
        assert r.routing_limited and r.limiting_path == "route"
        d = r.to_dict()
        assert d["throughput_gbps"] == r.throughput_gbps
        assert "throughput [Gbps]" in format_report(r)


def test_compare():
    c = compare_report(IEEE8023AN_MS, IEEE8023AN_LUT)
    assert round(c["throughput"], 1) == 2.2
    assert round(c["area"], 1) == 1.4
    assert round(c["area_efficiency"], 1) == 3.1
    assert round(c["energy"], 1) == 2.0
    same = compare_report(IEEE8023AN_LUT, IEEE8023AN_LUT)
    assert all(v == pytest.approx(1.0) for v in same.values())
    bare = dataclasses.replace(IEEE8023AN_LUT, area_mm2=None, total_power_mw=None)
    c = compare_report(IEEE8023AN_MS, bare)
    assert c["area_efficiency"] is None and c["energy"] is None


@pytest.mark.parametrize("kw", [dict(t_cp_vn=0.0), dict(q_msg=0), dict(decoder_kind="X"),
                                dict(total_power_mw=-1.0), dict(area_mm2=0.0)])
def test_validation(kw):
    with pytest.raises(ValueError):
        dataclasses.replace(IEEE8023AN_LUT, **kw)


delays = st.floats(0.05, 10.0)


@settings(max_examples=200, deadline=None)
@given(delays, delays, delays, st.floats(0.0, 5.0), st.sampled_from(["route", "vn", "cn"]))
def test_throughput_monotone_in_delays(r, v, c, bump, which):
    p = ArchParams(2048, 6, 32, 5, 3, 4, "LUT", r, v, c)
    q = dataclasses.replace(p, **{f"t_cp_{which}": getattr(p, f"t_cp_{which}") + bump})
    assert throughput_gbps(q) <= throughput_gbps(p) * (1 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(1, 8))
def test_lut_throughput_nonincreasing_in_q_msg_when_routing_limited(q, q_ch):
    base = ArchParams(2048, 6, 32, 5, q, q_ch, "LUT", 1.0, 0.01, 0.01)
    fewer = dataclasses.replace(base, q_msg=max(q - 1, 1))
    assert throughput_gbps(fewer) >= throughput_gbps(base)
