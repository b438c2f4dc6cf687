"""
Growing the array
=================

Adding two disks extends the generator with two more per-disk streams.  The
old disk files stay as they are and repair fills in the new ones.
"""
import tempfile
from pathlib import Path

import numpy as np

from xorfountain import choose_parameters, encode_file, execute_repair, gen_checks, read_metadata

work = Path(tempfile.mkdtemp())
src = work / "log.bin"
src.write_bytes(np.random.default_rng(5).integers(0, 256, 1 << 20, dtype=np.uint8).tobytes())
meta = choose_parameters(str(src), 1 << 20, 500, 1000, 512, 10)
coding = work / "Coding"
encode_file(src, coding, meta)

gen_checks(meta.filename, coding, extend_disks=2)
grown = read_metadata(coding, meta.filename)
print(f"n {meta.n} -> {grown.n}, s {meta.s} -> {grown.s}")

rep = execute_repair(meta.filename, coding)
print(f"{rep.mode} repair wrote disks {rep.disks}: {rep.bytes_written} B")
