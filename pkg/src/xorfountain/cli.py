"""Command-line tools: encoder, decoder, repair, check generation, failure simulation.

Exit codes: 0 success, 1 decode/repair impossible, 2 usage or parameter
error, 3 I/O or metadata error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import metadata as md
from .checks import gen_checks
from .codec import Code, choose_parameters, decode_file, encode_file
from .errors import (ConfigurationError, DecodeFailure, FountainError, MetadataError,
                     NonConvergenceError, ParameterError, RepairFailure)
from .reliability import simdisk, write_report
from .repair import execute_repair
from .rngdist import DEFAULT_SEED

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser, workers_help: str) -> None:
    p.add_argument("-f", dest="file", required=True, help="file name")
    p.add_argument("-m", dest="workers", type=int, default=None, help=workers_help)
    p.add_argument("-C", dest="coding_dir", default=md.CODING_DIR,
                   help="coding directory (default: %(default)s)")
    p.add_argument("-v", dest="verbose", action="store_true", help="print parameters and statistics")


def _run(fn, argv):
    try:
        return fn(argv)
    except (DecodeFailure, RepairFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ParameterError, ConfigurationError, NonConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MetadataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FountainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def _print_meta(meta: md.Metadata) -> None:
    print(f"file={meta.filename} size={meta.filesize} b={meta.b} k={meta.k} n={meta.n} "
          f"t={meta.t} s={meta.s} seed={meta.seed} dist={meta.dist} precode={meta.precode} "
          f"stripes={meta.stripes} padding={meta.redundant_zeros}")


def enc_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xf-enc", description="Encode a file into s disk files.")
    _common(p, "worker threads (default: s)")
    p.add_argument("-k", type=int, required=True, help="number of data symbols (before adjustment)")
    p.add_argument("-n", type=int, required=True, help="number of coding symbols")
    p.add_argument("-t", type=int, required=True, help="bytes per symbol")
    p.add_argument("-d", dest="dist", default="FiniteDist", help="degree distribution: FiniteDist or RSD")
    p.add_argument("-p", dest="precode", default="ArrayLDPC", help="precode: ArrayLDPC or None")
    p.add_argument("-s", type=int, default=10, help="number of disks")
    p.add_argument("-r", dest="rate", type=float, default=0.95, help="precode rate b/k")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--rsd-c", type=float, default=0.1)
    p.add_argument("--rsd-delta", type=float, default=0.5)
    return p


def _enc(argv):
    a = enc_parser().parse_args(argv)
    size = os.path.getsize(a.file)
    meta = choose_parameters(a.file, size, a.k, a.n, a.t, a.s, a.dist, a.precode, a.rate,
                             a.seed, a.rsd_c, a.rsd_delta)
    start = time.perf_counter()
    encode_file(a.file, a.coding_dir, meta, a.workers)
    took = time.perf_counter() - start
    if a.verbose:
        _print_meta(meta)
        print(f"encoded {size} bytes in {took:.3f} s ({size / 1e6 / max(took, 1e-9):.1f} MB/s)")
    return EXIT_OK


def dec_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xf-dec", description="Decode a file from its disk files.")
    _common(p, "worker threads (default: CPU count)")
    return p


def _dec(argv):
    a = dec_parser().parse_args(argv)
    workers = a.workers or os.cpu_count() or 1
    start = time.perf_counter()
    out, plan = decode_file(a.file, a.coding_dir, workers)
    took = time.perf_counter() - start
    if a.verbose:
        meta = md.read_metadata(a.coding_dir, a.file)
        _print_meta(meta)
        print(f"decoded to {out} in {took:.3f} s using {len(plan.coding_used)} coding symbols")
    return EXIT_OK


def rep_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xf-rep", description="Repair missing disk files or "
                                "materialize disks added by an update.")
    _common(p, "worker threads (default: number of repaired chunks)")
    p.add_argument("--mode", choices=("auto", "fast", "conventional"), default="auto")
    return p


def _rep(argv):
    a = rep_parser().parse_args(argv)
    rep = execute_repair(a.file, a.coding_dir, a.workers, a.mode)
    if rep.mode == "none":
        if a.verbose:
            print("nothing to repair")
        return EXIT_OK
    print(f"{rep.mode} repair of disks {list(rep.disks)}: {len(rep.targets)} chunks, "
          f"{rep.bytes_read} bytes read, {rep.bytes_written} bytes written, "
          f"{rep.speed_mb_s:.1f} MB/s")
    if a.verbose and rep.bytes_needed is not None:
        print(f"decode path needed {rep.bytes_needed} of those bytes")
    return EXIT_OK


def genchecks_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xf-genchecks", description="Generate the check-data file "
                                "for fast repair, optionally updating the code.")
    p.add_argument("-f", dest="file", required=True)
    p.add_argument("-m", dest="modify", type=int, choices=(0, 1), default=0,
                   help="1: record the check-data size in the metadata")
    p.add_argument("-e", dest="extend", type=int, default=0,
                   help="add (or with a negative value remove) this many disks")
    p.add_argument("-C", dest="coding_dir", default=md.CODING_DIR)
    p.add_argument("-v", dest="verbose", action="store_true")
    return p


def _genchecks(argv):
    a = genchecks_parser().parse_args(argv)
    res = gen_checks(a.file, a.coding_dir, bool(a.modify), a.extend)
    if a.verbose:
        _print_meta(res.meta)
        state = "converged" if res.converged else "did NOT converge"
        print(f"check generation {state}: {res.stored} stored groups, {res.derived} derived, "
              f"{res.ints} integers (bound {res.bound}) -> {res.path}")
    return EXIT_OK


def simdisk_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xf-simdisk", description="Try every combination of f "
                                "failed disks.  Exit status 0 iff every pattern decodes.")
    p.add_argument("-f", dest="file", help="use the metadata of an encoded file")
    p.add_argument("-C", dest="coding_dir", default=md.CODING_DIR)
    p.add_argument("-k", type=int)
    p.add_argument("-n", type=int)
    p.add_argument("-t", type=int, default=512)
    p.add_argument("-d", dest="dist", default="FiniteDist")
    p.add_argument("-p", dest="precode", default="ArrayLDPC")
    p.add_argument("-s", type=int, default=10)
    p.add_argument("-r", dest="rate", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-x", dest="failures", type=int, nargs="+", default=[1],
                   help="number(s) of failed disks")
    p.add_argument("-m", dest="workers", type=int, default=1)
    p.add_argument("-o", dest="report", help="write a machine-readable report here")
    p.add_argument("-v", dest="verbose", action="store_true")
    return p


def _simdisk(argv):
    parser = simdisk_parser()
    a = parser.parse_args(argv)
    if a.file:
        meta = md.read_metadata(a.coding_dir, a.file)
    else:
        if a.k is None or a.n is None:
            parser.error("either -f or both -k and -n are required")
        nominal = a.t * max(1, int(a.k * a.rate))
        meta = choose_parameters("simdisk", nominal, a.k, a.n, a.t, a.s, a.dist, a.precode,
                                 a.rate, a.seed)
    code = Code.from_metadata(meta)
    reports = [simdisk(code, f, a.workers) for f in a.failures]
    if a.verbose:
        _print_meta(meta)
    for r in reports:
        print(f"f={r.f}: {r.decodable}/{r.total_combinations} patterns decodable "
              f"(fraction {r.fraction:.4f})")
        if a.verbose and r.failing_patterns:
            print(f"  failing: {r.failing_patterns}")
    if a.report:
        write_report(reports, a.report)
    return EXIT_OK if all(r.fraction == 1.0 for r in reports) else EXIT_FAIL


def _entry(fn):
    def main(argv=None):
        logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
        return _run(fn, sys.argv[1:] if argv is None else argv)
    return main


enc_main = _entry(_enc)
dec_main = _entry(_dec)
rep_main = _entry(_rep)
genchecks_main = _entry(_genchecks)
simdisk_main = _entry(_simdisk)

TOOLS = {"enc": enc_main, "dec": dec_main, "rep": rep_main,
         "genchecks": genchecks_main, "simdisk": simdisk_main}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] not in TOOLS:
        print(f"usage: python3 -m xorfountain {{{','.join(TOOLS)}}} [options]", file=sys.stderr)
        return EXIT_USAGE
    return TOOLS[argv[0]](argv[1:])
