"""
Encode a file, lose a disk, get it back
=======================================

A random 2 MiB file is spread over ten disk files, one of them is deleted,
and the decoder rebuilds the original from the other nine.
"""
import os
import tempfile
from pathlib import Path

import numpy as np

from xorfountain import choose_parameters, decode_file, encode_file
from xorfountain import metadata as md

work = Path(tempfile.mkdtemp())
src = work / "photo.raw"
src.write_bytes(np.random.default_rng(1).integers(0, 256, 2 << 20, dtype=np.uint8).tobytes())

# b user symbols per stripe, extended to k by the precode, then n coding chunks
meta = choose_parameters(str(src), src.stat().st_size, 500, 1000, 512, 10)
print(f"b={meta.b} k={meta.k} n={meta.n} stripes={meta.stripes} per disk={meta.per_disk}")

coding = work / "Coding"
encode_file(src, coding, meta)
print(sorted(p.name for p in coding.iterdir()))

os.remove(md.disk_path(coding, meta.filename, 7))
out, plan = decode_file(meta.filename, coding)
print("decoded", out, "identical:", out.read_bytes() == src.read_bytes())
print("coding chunks used per stripe:", len(plan.coding_used))
