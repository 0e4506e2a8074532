"""Analytical timing/throughput/memory model of the unrolled serial-transfer decoder.

Units: delays in ns, frequencies in MHz, throughput in Gbps, power in mW,
energy in pJ/bit, area in mm^2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

KINDS = ("MS", "LUT")


@dataclass(frozen=True)
class ArchParams:
    n: int
    d_v: int
    d_c: int
    iters: int
    q_msg: int
    q_ch: int
    decoder_kind: str
    t_cp_route: float
    t_cp_vn: float
    t_cp_cn: float
    total_power_mw: float | None = None
    area_mm2: float | None = None

    def __post_init__(self):
        if self.decoder_kind not in KINDS:
            raise ValueError(f"decoder_kind must be one of {KINDS}")
        if min(self.t_cp_route, self.t_cp_vn, self.t_cp_cn) <= 0:
            raise ValueError("critical-path delays must be positive")
        if min(self.q_msg, self.q_ch, self.iters, self.n, self.d_v) < 1:
            raise ValueError("bit widths, iterations, n and d_v must be >= 1")
        if self.total_power_mw is not None and self.total_power_mw <= 0:
            raise ValueError("power must be positive")
        if self.area_mm2 is not None and self.area_mm2 <= 0:
            raise ValueError("area must be positive")


# Post-layout figures for the (2048, 1723) IEEE 802.3an code, 28 nm FD-SOI.
IEEE8023AN_MS = ArchParams(2048, 6, 32, 5, 5, 5, "MS", t_cp_route=1.51, t_cp_vn=0.96,
                           t_cp_cn=2.38, total_power_mw=12248, area_mm2=23.3)
IEEE8023AN_LUT = ArchParams(2048, 6, 32, 5, 3, 4, "LUT", t_cp_route=1.16, t_cp_vn=1.24,
                            t_cp_cn=1.42, total_power_mw=13350, area_mm2=16.2)


def q_max(q_msg: int, q_ch: int, kind: str) -> int:
    """Fast-clock cycles per slow cycle.

    The LUT decoder ships channel values two bits per fast cycle, so only
    ceil(q_ch/2) cycles are needed for them.
    """
    if kind == "MS":
        return max(q_msg, q_ch)
    if kind == "LUT":
        return max(q_msg, math.ceil(q_ch / 2))
    raise ValueError(f"unknown decoder kind {kind!r}")


def slow_period_ns(p: ArchParams) -> float:
    qm = q_max(p.q_msg, p.q_ch, p.decoder_kind)
    return max(qm * p.t_cp_route, p.t_cp_vn, p.t_cp_cn)


def f_slow_max(p: ArchParams) -> float:
    """Maximum slow-clock frequency in MHz."""
    return 1e3 / slow_period_ns(p)


def f_fast_max(p: ArchParams) -> float:
    return q_max(p.q_msg, p.q_ch, p.decoder_kind) * f_slow_max(p)


def limiting_path(p: ArchParams) -> str:
    qm = q_max(p.q_msg, p.q_ch, p.decoder_kind)
    paths = {"route": qm * p.t_cp_route, "vn": p.t_cp_vn, "cn": p.t_cp_cn}
    return max(paths, key=paths.get)


def throughput_gbps(p: ArchParams) -> float:
    """One codeword per slow cycle: N * f_slow."""
    return p.n * f_slow_max(p) / 1e3


def register_formula(n: int, d_v: int, q: int, iters: int) -> int:
    return n * (d_v + 1) * q * (6 * iters - 1)


def register_count(p: ArchParams) -> tuple[int, int]:
    """Register estimate as (low, high).

    The formula assumes Q = Q_msg = Q_ch. MS evaluates it once with
    Q = max(q_msg, q_ch); LUT brackets it with Q = q_msg and Q = q_ch.
    """
    if p.decoder_kind == "MS":
        r = register_formula(p.n, p.d_v, max(p.q_msg, p.q_ch), p.iters)
        return r, r
    a = register_formula(p.n, p.d_v, p.q_msg, p.iters)
    b = register_formula(p.n, p.d_v, p.q_ch, p.iters)
    return min(a, b), max(a, b)


def energy_pj_per_bit(total_power_mw: float, throughput: float) -> float:
    if total_power_mw <= 0 or throughput <= 0:
        raise ValueError("power and throughput must be positive")
    return total_power_mw / throughput


@dataclass(frozen=True)
class ArchReport:
    decoder_kind: str
    q_max: int
    slow_period_ns: float
    f_slow_mhz: float
    f_fast_mhz: float
    throughput_gbps: float
    latency_slow_cycles: int
    latency_fast_cycles: int
    latency_ns: float
    registers_total: tuple[int, int]
    limiting_path: str
    routing_limited: bool
    energy_pj_per_bit: float | None = None
    area_efficiency_gbps_per_mm2: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["registers_total"] = list(self.registers_total)
        return d


def report(p: ArchParams) -> ArchReport:
    qm = q_max(p.q_msg, p.q_ch, p.decoder_kind)
    fs = f_slow_max(p)
    ff = qm * fs
    thr = throughput_gbps(p)
    lat_fast = 4 * p.iters * qm
    return ArchReport(
        decoder_kind=p.decoder_kind,
        q_max=qm,
        slow_period_ns=slow_period_ns(p),
        f_slow_mhz=fs,
        f_fast_mhz=ff,
        throughput_gbps=thr,
        latency_slow_cycles=4 * p.iters,
        latency_fast_cycles=lat_fast,
        latency_ns=lat_fast / ff * 1e3,
        registers_total=register_count(p),
        limiting_path=limiting_path(p),
        routing_limited=limiting_path(p) == "route",
        energy_pj_per_bit=(energy_pj_per_bit(p.total_power_mw, thr)
                           if p.total_power_mw is not None else None),
        area_efficiency_gbps_per_mm2=thr / p.area_mm2 if p.area_mm2 is not None else None,
    )


def compare_report(a: ArchParams, b: ArchParams) -> dict:
    """Ratios of ``b`` relative to ``a`` (b is the candidate, a the baseline).

    Keys: throughput (b/a), area (a/b, i.e. how much smaller b is),
    area_efficiency (b/a), power (a/b), energy (a/b, i.e. how much less
    energy per bit b spends). Missing inputs give None.
    """
    ra, rb = report(a), report(b)
    out = {"throughput": rb.throughput_gbps / ra.throughput_gbps,
           "area": None, "area_efficiency": None, "power": None, "energy": None}
    if a.area_mm2 is not None and b.area_mm2 is not None:
        out["area"] = a.area_mm2 / b.area_mm2
        out["area_efficiency"] = rb.area_efficiency_gbps_per_mm2 / ra.area_efficiency_gbps_per_mm2
    if a.total_power_mw is not None and b.total_power_mw is not None:
        out["power"] = a.total_power_mw / b.total_power_mw
        out["energy"] = ra.energy_pj_per_bit / rb.energy_pj_per_bit
    return out


def format_report(r: ArchReport) -> str:
    rows = [("decoder", r.decoder_kind), ("Q_max", r.q_max),
            ("slow period [ns]", f"{r.slow_period_ns:.3f}"),
            ("f_slow [MHz]", f"{r.f_slow_mhz:.2f}"), ("f_fast [MHz]", f"{r.f_fast_mhz:.2f}"),
            ("throughput [Gbps]", f"{r.throughput_gbps:.1f}"),
            ("latency [slow cycles]", r.latency_slow_cycles),
            ("latency [fast cycles]", r.latency_fast_cycles),
            ("latency [ns]", f"{r.latency_ns:.2f}"),
            ("registers", r.registers_total[0] if r.registers_total[0] == r.registers_total[1]
             else f"{r.registers_total[0]}..{r.registers_total[1]}"),
            ("limiting path", r.limiting_path + (" (routing-limited)" if r.routing_limited else ""))]
    if r.energy_pj_per_bit is not None:
        rows.append(("energy [pJ/bit]", f"{r.energy_pj_per_bit:.1f}"))
    if r.area_efficiency_gbps_per_mm2 is not None:
        rows.append(("area efficiency [Gbps/mm2]", f"{r.area_efficiency_gbps_per_mm2:.2f}"))
    w = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{w}}  {v}" for k, v in rows)
