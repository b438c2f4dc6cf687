"""
Repairing two disks without a full decode
=========================================

After ``gen_checks`` has written the coding-only XOR groups, a lost disk can
be rebuilt by reading just the chunks in those groups.
"""
import os
import tempfile
from pathlib import Path

import numpy as np

from xorfountain import choose_parameters, encode_file, execute_repair, gen_checks
from xorfountain import metadata as md

work = Path(tempfile.mkdtemp())
src = work / "archive.tar"
size = 8 << 20
src.write_bytes(np.random.default_rng(4).integers(0, 256, size, dtype=np.uint8).tobytes())
meta = choose_parameters(str(src), size, 1024, 2180, 512, 10)
coding = work / "Coding"
encode_file(src, coding, meta)

lost = (2, 5)
before = {d: md.disk_path(coding, meta.filename, d).read_bytes() for d in lost}


def drop():
    for d in lost:
        os.remove(md.disk_path(coding, meta.filename, d))


drop()
conv = execute_repair(meta.filename, coding)
print(f"{conv.mode:12s} read {conv.bytes_read:>10d} B  (decode path needed {conv.bytes_needed})")

res = gen_checks(meta.filename, coding, modify_metadata=True)
print(f"check.data: {res.ints} ints, converged={res.converged}")

drop()
fast = execute_repair(meta.filename, coding)
print(f"{fast.mode:12s} read {fast.bytes_read:>10d} B")
print("ratio", round(fast.bytes_read / conv.bytes_read, 3))
print("bytes match:", all(md.disk_path(coding, meta.filename, d).read_bytes() == before[d]
                          for d in lost))
