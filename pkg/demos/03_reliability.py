"""
How many disks can we lose?
===========================

Enumerate every f-disk failure pattern and count the decodable ones.
Only the graph is needed, no data is touched.
"""
from xorfountain import Code, choose_parameters, simdisk

meta = choose_parameters("virtual.bin", 64 << 20, 500, 1000, 512, 10)
code = Code.from_metadata(meta)

for f in range(5):
    rep = simdisk(code, f)
    print(rep.line(), rep.failing_patterns[:3])
