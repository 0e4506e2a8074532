"""Monte Carlo FER/BER sweeps with block-keyed, worker-independent seeding.

Frames are grouped in fixed-size blocks. Block b of SNR point i draws its
noise from PCG64(SeedSequence(seed, spawn_key=(i, b))), so counters depend
only on (seed, job), never on how blocks are spread across workers. Blocks
are consumed in index order and a point stops after the first block that
brings the frame-error count to the target (or at ``max_frames``).

The all-zero codeword is always sent; every decoder here is odd-symmetric
and the channel is output-symmetric, so error rates do not depend on the
transmitted word.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .channel import ChannelParams, UniformQuantizer, quantize_uniform
from .code_model import TannerGraph, build_peg_regular, read_alist
from .lut_decoder import LutDecoder
from .lut_design import LutSet, design_lut_set, read_lutset
from .ms_decoder import DecoderConfig, MinSumDecoder

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = ("snr_db", "frames", "frame_errors", "bit_errors", "fer", "ber",
               "fer_lo", "fer_hi", "avg_iters", "seconds")


class MixedStatisticsError(ValueError):
    pass


@dataclass
class SimJob:
    code: str                              # "peg:n,d_v,d_c,seed" or "alist:PATH"
    decoder: str                           # ms_float | oms:OFF | ms_fixed:Q | lut:auto | lut:PATH
    snr_points: list[float]
    max_frames: int = 1_000_000
    target_frame_errors: int = 100
    max_iters: int = 5
    early_stop: bool = True
    seed: int = 0
    workers: int = 1
    block_size: int = 500
    snr_kind: str = "ebn0"
    rate: float | None = None              # overrides the design rate of the code
    design_snr_db: float | None = None     # LUT design / fixed-point step; default min(snr_points)
    saturation_stds: float = 4.5           # fixed-point: saturation point in LLR std devs
    fixed_step: float | None = None        # fixed-point: explicit step, wins over saturation_stds
    q_ch: int = 4                          # lut:auto
    q_msg: int = 3                         # lut:auto
    q_int: int | None = None               # lut:auto

    def __post_init__(self):
        self.snr_points = [float(s) for s in self.snr_points]
        if not self.snr_points:
            raise ValueError("snr_points must not be empty")
        if self.max_frames < 0 or self.target_frame_errors < 1:
            raise ValueError("max_frames must be >= 0 and target_frame_errors >= 1")
        if self.workers < 1 or self.block_size < 1:
            raise ValueError("workers and block_size must be >= 1")
        parse_decoder_spec(self.decoder)

    @property
    def reference_snr(self) -> float:
        return self.design_snr_db if self.design_snr_db is not None else min(self.snr_points)

    @classmethod
    def from_dict(cls, d: dict) -> "SimJob":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown job fields: {', '.join(sorted(unknown))}")
        return cls(**d)


def parse_decoder_spec(spec: str):
    kind, _, arg = spec.partition(":")
    if kind == "ms_float" and not arg:
        return kind, None
    if kind == "oms":
        off = float(arg) if arg else 0.5
        if off < 0:
            raise ValueError("offset must be >= 0")
        return kind, off
    if kind == "ms_fixed":
        q = int(arg) if arg else 5
        if q < 2:
            raise ValueError("fixed-point width must be >= 2")
        return kind, q
    if kind == "lut":
        return kind, arg or "auto"
    raise ValueError(f"unknown decoder spec {spec!r}")


def build_code(spec: str, rate=None) -> TannerGraph:
    kind, _, arg = spec.partition(":")
    if kind == "peg":
        try:
            n, dv, dc, *rest = (int(v) for v in arg.split(","))
        except ValueError:
            raise ValueError(f"bad PEG spec {spec!r}; expected peg:n,d_v,d_c[,seed]") from None
        g = build_peg_regular(n, dv, dc, rest[0] if rest else 0)
    elif kind == "alist":
        g = read_alist(arg)
    else:
        raise ValueError(f"unknown code spec {spec!r}")
    return g.with_rate(rate) if rate is not None else g


class FrameDecoder:
    """Channel LLRs in, decisions out; wraps front-end quantization."""

    def __init__(self, decoder, quantizer: UniformQuantizer | None = None):
        self.decoder = decoder
        self.quantizer = quantizer

    def __call__(self, llrs):
        if self.quantizer is not None:
            llrs = quantize_uniform(llrs, self.quantizer)
        bits, iters, _ = self.decoder.decode_batch(llrs)
        return bits, iters


def build_decoder(job: SimJob, g: TannerGraph, luts: LutSet | None = None) -> FrameDecoder:
    kind, arg = parse_decoder_spec(job.decoder)
    if kind == "ms_float":
        return FrameDecoder(MinSumDecoder(g, DecoderConfig(job.max_iters, job.early_stop)))
    if kind == "oms":
        return FrameDecoder(MinSumDecoder(
            g, DecoderConfig(job.max_iters, job.early_stop, oms_offset=arg)))
    if kind == "ms_fixed":
        cfg = DecoderConfig(job.max_iters, job.early_stop, "fixed", arg)
        if job.fixed_step is not None:
            uq = UniformQuantizer(arg, job.fixed_step)
        else:
            p = ChannelParams(job.reference_snr, float(g.rate), job.snr_kind)
            uq = UniformQuantizer.for_channel(arg, p, job.saturation_stds)
        return FrameDecoder(MinSumDecoder(g, cfg), uq)
    if luts is None:
        if arg == "auto":
            luts = design_lut_set(g.d_v, g.d_c, job.q_ch, job.q_msg, job.max_iters,
                                  job.reference_snr, q_int=job.q_int, snr_kind=job.snr_kind,
                                  rate=float(g.rate))
        else:
            luts = read_lutset(arg)
    return FrameDecoder(LutDecoder(g, luts, early_stop=job.early_stop, max_iters=job.max_iters))


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


@dataclass
class PointResult:
    snr_db: float
    frames: int = 0
    frame_errors: int = 0
    bit_errors: int = 0
    iter_sum: int = 0
    seconds: float = 0.0
    early_stop: bool = True
    n: int = 1

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else float("nan")

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.n) if self.frames else float("nan")

    @property
    def fer_interval(self) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.frames)

    @property
    def avg_iters(self) -> float | None:
        if not self.early_stop or not self.frames:
            return None
        return self.iter_sum / self.frames

    def row(self) -> dict:
        lo, hi = self.fer_interval
        return {"snr_db": self.snr_db, "frames": self.frames, "frame_errors": self.frame_errors,
                "bit_errors": self.bit_errors, "fer": self.fer, "ber": self.ber,
                "fer_lo": lo, "fer_hi": hi, "avg_iters": self.avg_iters,
                "seconds": self.seconds}


@dataclass
class SimResult:
    job: SimJob
    points: list[PointResult] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    @property
    def early_stop(self) -> bool:
        return self.job.early_stop

    def counters(self):
        """Integer counters only (timing excluded), for reproducibility checks."""
        return [(p.snr_db, p.frames, p.frame_errors, p.bit_errors, p.iter_sum)
                for p in self.points]

    def to_csv(self) -> str:
        buf = io.StringIO()
        mode = "early-stop" if self.early_stop else "fixed-iterations"
        buf.write(f"# ldpc-fa sweep schema={CSV_SCHEMA_VERSION} statistics={mode} "
                  f"decoder={self.job.decoder}\n")
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for p in self.points:
            row = p.row()
            w.writerow({k: ("" if v is None else (repr(v) if isinstance(v, float) else v))
                        for k, v in row.items()})
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"schema": CSV_SCHEMA_VERSION, "manifest": self.manifest,
                "points": [p.row() for p in self.points]}


def merge_results(a: SimResult, b: SimResult) -> SimResult:
    """Concatenate two sweeps of the same decoder; refuses to mix statistics modes."""
    if a.early_stop != b.early_stop:
        raise MixedStatisticsError("cannot mix early-stopped and fixed-iteration statistics")
    if a.job.decoder != b.job.decoder or a.job.max_iters != b.job.max_iters:
        raise MixedStatisticsError("cannot merge sweeps of different decoders")
    return SimResult(a.job, a.points + b.points, a.manifest)


# -- execution --------------------------------------------------------------------

def block_generator(seed: int, point: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(point, block))))


def run_block(frame_decoder: FrameDecoder, n: int, p: ChannelParams, seed: int, point: int,
              block: int, frames: int):
    """Decode one block; returns (frame_errors, bit_errors, iteration_sum)."""
    rng = block_generator(seed, point, block)
    y = 1.0 + p.sigma * rng.standard_normal((frames, n))
    bits, iters = frame_decoder(p.llr_scale * y)
    errs = bits.sum(axis=1)
    return int(np.count_nonzero(errs)), int(errs.sum()), int(iters.sum())


_WORKER: dict = {}


def _init_worker(frame_decoder, n):
    _WORKER["dec"] = frame_decoder
    _WORKER["n"] = n


def _worker_block(args):
    p, seed, point, block, frames = args
    return run_block(_WORKER["dec"], _WORKER["n"], p, seed, point, block, frames)


def _manifest(job: SimJob, g: TannerGraph) -> dict:
    import numba
    import scipy
    return {"package": "ldpc_fa", "version": __version__, "job": asdict(job),
            "code": {"n": g.n_vns, "m": g.n_cns, "d_v": g.d_v, "d_c": g.d_c,
                     "rate": str(Fraction(g.rate))},
            "rng": "PCG64 + SeedSequence(seed, spawn_key=(point, block)), ziggurat normals",
            "versions": {"python": platform.python_version(), "numpy": np.__version__,
                         "scipy": scipy.__version__, "numba": numba.__version__}}


def run_sweep(job: SimJob, g: TannerGraph | None = None,
              frame_decoder: FrameDecoder | None = None, progress=None) -> SimResult:
    """Run every SNR point of ``job``. ``progress(point_result)`` is called per point."""
    if g is None:
        g = build_code(job.code, job.rate)
    if frame_decoder is None:
        frame_decoder = build_decoder(job, g)
    result = SimResult(job, [], _manifest(job, g))
    if job.max_frames == 0:
        return result
    rate = float(g.rate)
    pool = None
    if job.workers > 1:
        pool = ProcessPoolExecutor(job.workers, initializer=_init_worker,
                                   initargs=(frame_decoder, g.n_vns))
    try:
        for i, snr in enumerate(job.snr_points):
            p = ChannelParams(snr, rate, job.snr_kind)
            pr = PointResult(snr, early_stop=job.early_stop, n=g.n_vns)
            t0 = time.perf_counter()
            _run_point(job, pr, p, i, frame_decoder, g.n_vns, pool)
            pr.seconds = time.perf_counter() - t0
            result.points.append(pr)
            if progress is not None:
                progress(pr)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return result


def _run_point(job, pr, p, i, frame_decoder, n, pool):
    def sizes():
        b = 0
        left = job.max_frames
        while left > 0:
            k = min(job.block_size, left)
            yield b, k
            left -= k
            b += 1

    def absorb(res, k):
        fe, be, it = res
        pr.frames += k
        pr.frame_errors += fe
        pr.bit_errors += be
        pr.iter_sum += it
        return pr.frame_errors >= job.target_frame_errors

    if pool is None:
        for b, k in sizes():
            if absorb(run_block(frame_decoder, n, p, job.seed, i, b, k), k):
                return
        return
    pending = deque()
    gen = sizes()
    for b, k in gen:
        pending.append((pool.submit(_worker_block, (p, job.seed, i, b, k)), k))
        if len(pending) >= 2 * job.workers:
            break
    while pending:
        fut, k = pending.popleft()
        if absorb(fut.result(), k):
            for f, _ in pending:
                f.cancel()
            return
        nxt = next(gen, None)
        if nxt is not None:
            b, k2 = nxt
            pending.append((pool.submit(_worker_block, (p, job.seed, i, b, k2)), k2))


def snr_at_fer(points: list[PointResult], target: float = 1e-3) -> tuple[float, bool]:
    """SNR where the FER curve crosses ``target``, linear in (dB, log10 FER).

    Uses the first bracketing pair of points; without one, extrapolates from
    the two points nearest the target. Returns (snr_db, extrapolated).
    """
    pts = sorted((p.snr_db, p.fer) for p in points if p.frames and p.frame_errors)
    if len(pts) < 2:
        raise ValueError("need at least two points with observed frame errors")
    lt = math.log10(target)
    xy = [(s, math.log10(f)) for s, f in pts]
    for (x0, y0), (x1, y1) in zip(xy, xy[1:]):
        if (y0 - lt) * (y1 - lt) <= 0 and y0 != y1:
            return x0 + (lt - y0) * (x1 - x0) / (y1 - y0), False
    near = sorted(xy, key=lambda v: abs(v[1] - lt))[:2]
    (x0, y0), (x1, y1) = sorted(near)
    if y0 == y1:
        raise ValueError("flat FER curve; cannot locate the crossing")
    return x0 + (lt - y0) * (x1 - x0) / (y1 - y0), True
