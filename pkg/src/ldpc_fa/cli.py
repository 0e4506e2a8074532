"""ldpc-fa command line: sweep, design-luts, arch-report, alist."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import arch_model
from .code_model import AlistError, parse_alist, write_alist
from .lut_design import LutFormatError, design_lut_set, dump_lutset
from .sim import SimJob, build_code, run_sweep

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3


class CliIOError(Exception):
    pass


def _write(path: str, text: str, force: bool):
    p = Path(path)
    if p.exists() and not force:
        raise CliIOError(f"{path}: exists (use --force to overwrite)")
    try:
        p.write_text(text)
    except OSError as e:
        raise CliIOError(f"{path}: {e.strerror or e}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliIOError(f"{path}: {e.strerror or e}") from None


def _float_list(s: str) -> list[float]:
    return [float(v) for v in s.replace(",", " ").split()]


# -- sweep --------------------------------------------------------------------

_SWEEP_FLAGS = ("code", "decoder", "snr_points", "max_frames", "target_frame_errors",
                "max_iters", "seed", "workers", "block_size", "snr_kind", "design_snr_db",
                "saturation_stds", "fixed_step", "q_ch", "q_msg", "q_int", "rate")


def cmd_sweep(a) -> int:
    cfg = {}
    if a.config:
        try:
            cfg = json.loads(_read(a.config))
        except json.JSONDecodeError as e:
            raise ValueError(f"{a.config}: line {e.lineno}: {e.msg}") from None
        if not isinstance(cfg, dict):
            raise ValueError(f"{a.config}: top level must be an object")
    for k in _SWEEP_FLAGS:
        v = getattr(a, k)
        if v is not None:
            cfg[k] = v
    if a.early_stop is not None:
        cfg["early_stop"] = a.early_stop
    for k in ("code", "decoder", "snr_points"):
        if k not in cfg:
            raise ValueError(f"missing required setting {k!r} (config file or --{k.replace('_', '-')})")
    job = SimJob.from_dict(cfg)
    for path in (a.out, a.out + ".json"):
        if Path(path).exists() and not a.force:
            raise CliIOError(f"{path}: exists (use --force to overwrite)")

    def progress(pr):
        if not a.quiet:
            print(f"{pr.snr_db:7.3f} dB  frames={pr.frames:<9d} fe={pr.frame_errors:<6d} "
                  f"fer={pr.fer:.3e}  {pr.seconds:.1f}s", file=sys.stderr)

    res = run_sweep(job, progress=progress)
    _write(a.out, res.to_csv(), a.force)
    _write(a.out + ".json", json.dumps(res.to_json(), indent=2) + "\n", a.force)
    return EXIT_OK


# -- design-luts --------------------------------------------------------------

def cmd_design_luts(a) -> int:
    ls = design_lut_set(a.dv, a.dc, a.q_ch, a.q_msg, a.iters, a.design_snr, q_int=a.q_int,
                        snr_kind=a.snr_kind, rate=a.rate)
    _write(a.out, dump_lutset(ls), a.force)
    if not a.quiet:
        vn = ", ".join(f"{v:.4f}" for v in ls.mi_trace.get("vn", []))
        print(f"wrote {a.out}: {len(ls.vn_luts)} VN stages, channel MI "
              f"{ls.mi_trace.get('channel', float('nan')):.4f}, VN MI [{vn}]", file=sys.stderr)
    return EXIT_OK


# -- arch-report --------------------------------------------------------------

_PRESETS = {"lut": arch_model.IEEE8023AN_LUT, "ms": arch_model.IEEE8023AN_MS}


def _arch_params(a) -> arch_model.ArchParams:
    if a.preset:
        base = asdict(_PRESETS[a.preset])
    else:
        base = {}
    for k in ("n", "d_v", "d_c", "iters", "q_msg", "q_ch", "decoder_kind", "t_cp_route",
              "t_cp_vn", "t_cp_cn", "total_power_mw", "area_mm2"):
        v = getattr(a, k)
        if v is not None:
            base[k] = v
    missing = [k for k in ("n", "d_v", "d_c", "iters", "q_msg", "q_ch", "decoder_kind",
                           "t_cp_route", "t_cp_vn", "t_cp_cn") if k not in base]
    if missing:
        raise ValueError(f"missing architecture parameters: {', '.join(missing)}")
    return arch_model.ArchParams(**base)


def cmd_arch_report(a) -> int:
    if a.compare:
        lut, ms = arch_model.IEEE8023AN_LUT, arch_model.IEEE8023AN_MS
        out = {"LUT": arch_model.report(lut).to_dict(), "MS": arch_model.report(ms).to_dict(),
               "ratios_lut_vs_ms": arch_model.compare_report(ms, lut)}
        text = json.dumps(out, indent=2) + "\n"
    else:
        r = arch_model.report(_arch_params(a))
        text = (json.dumps(r.to_dict(), indent=2) + "\n" if a.format == "json"
                else arch_model.format_report(r) + "\n")
    if a.out:
        _write(a.out, text, a.force)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- alist --------------------------------------------------------------------

def cmd_alist(a) -> int:
    if (a.input is None) == (a.peg is None):
        raise ValueError("give exactly one of --in or --peg")
    if a.input is not None:
        try:
            g = parse_alist(_read(a.input))
        except AlistError as e:
            raise ValueError(f"{a.input}: {e}") from None
    else:
        g = build_code("peg:" + a.peg)
    _write(a.out, write_alist(g), a.force)
    if not a.quiet:
        print(f"wrote {a.out}: N={g.n_vns} M={g.n_cns} E={g.n_edges}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldpc-fa", description=__doc__)
    ap.add_argument("-q", "--quiet", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("sweep", help="Monte Carlo FER/BER sweep")
    s.add_argument("--config", help="JSON job file; flags override its fields")
    s.add_argument("--code", help="peg:n,d_v,d_c[,seed] or alist:PATH")
    s.add_argument("--decoder", help="ms_float | oms:OFFSET | ms_fixed:Q | lut:auto | lut:PATH")
    s.add_argument("--snr", dest="snr_points", type=_float_list, help='e.g. "3.5,4,4.5"')
    s.add_argument("--max-frames", type=int)
    s.add_argument("--target-frame-errors", type=int)
    s.add_argument("--max-iters", type=int)
    s.add_argument("--early-stop", dest="early_stop", action="store_true", default=None)
    s.add_argument("--no-early-stop", dest="early_stop", action="store_false")
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--block-size", type=int)
    s.add_argument("--snr-kind", choices=("ebn0", "esn0"))
    s.add_argument("--design-snr", dest="design_snr_db", type=float)
    s.add_argument("--saturation-stds", type=float)
    s.add_argument("--fixed-step", type=float)
    s.add_argument("--q-ch", type=int)
    s.add_argument("--q-msg", type=int)
    s.add_argument("--q-int", type=int)
    s.add_argument("--rate", type=float)
    s.add_argument("--out", required=True, help="CSV path; the manifest goes to OUT.json")
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("design-luts", help="design a LUT set by density evolution")
    d.add_argument("--dv", type=int, required=True)
    d.add_argument("--dc", type=int, required=True)
    d.add_argument("--q-ch", type=int, default=4)
    d.add_argument("--q-msg", type=int, default=3)
    d.add_argument("--q-int", type=int)
    d.add_argument("--iters", type=int, default=5)
    d.add_argument("--design-snr", type=float, default=2.0)
    d.add_argument("--snr-kind", choices=("ebn0", "esn0"), default="ebn0")
    d.add_argument("--rate", type=float)
    d.add_argument("--out", required=True)
    d.add_argument("--force", action="store_true")
    d.set_defaults(func=cmd_design_luts)

    r = sub.add_parser("arch-report", help="throughput/latency/register report")
    r.add_argument("--preset", choices=sorted(_PRESETS))
    r.add_argument("--compare", action="store_true", help="LUT vs MS presets side by side")
    for k, t in (("n", int), ("d_v", int), ("d_c", int), ("iters", int), ("q_msg", int),
                 ("q_ch", int), ("t_cp_route", float), ("t_cp_vn", float), ("t_cp_cn", float),
                 ("total_power_mw", float), ("area_mm2", float)):
        r.add_argument("--" + k.replace("_", "-"), dest=k, type=t)
    r.add_argument("--kind", dest="decoder_kind", choices=arch_model.KINDS)
    r.add_argument("--format", choices=("json", "text"), default="json")
    r.add_argument("--out")
    r.add_argument("--force", action="store_true")
    r.set_defaults(func=cmd_arch_report)

    c = sub.add_parser("alist", help="normalize an alist file or write a PEG code as alist")
    c.add_argument("--in", dest="input")
    c.add_argument("--peg", help="n,d_v,d_c[,seed]")
    c.add_argument("--out", required=True)
    c.add_argument("--force", action="store_true")
    c.set_defaults(func=cmd_alist)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.func(a)
    except CliIOError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        name = f"{e.filename}: " if e.filename else ""
        print(f"error: {name}{e.strerror or e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, LutFormatError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
