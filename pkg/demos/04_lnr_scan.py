"""
Where do L^nR orbits live?
==========================

Scan the (tau_L, tau_R) plane of the three-dimensional map with
sigma = 1.4, delta = 0.7, mu = 1 and count, for each n, the grid cells with an
existing and with a stable L^nR orbit. The full table is written as CSV.
"""

import sys
import time

from pwlorbit import lnr_scan_spec, scan, write_scan_csv

steps = int(sys.argv[1]) if len(sys.argv) > 1 else 60
spec = lnr_scan_spec(steps=steps, n_max=8)

start = time.perf_counter()
res = scan(spec)
print(f"{steps}x{steps} grid, {len(res.words)} words, {time.perf_counter() - start:.1f} s")

for k, word in enumerate(res.words):
    print(f"{str(word):5s} exists in {int(res.exists[:, :, k].sum()):5d} cells, stable in {int(res.stable[:, :, k].sum()):5d}")

# a coarse text picture of the stable region of each word: digit n marks L^nR
for iy in range(steps - 1, -1, -max(1, steps // 20)):
    row = ""
    for ix in range(0, steps, max(1, steps // 40)):
        hit = [k for k in range(len(res.words)) if res.stable[ix, iy, k]]
        row += str(hit[0] + 1) if hit else "."
    print(row)

write_scan_csv(res, "lnr_scan.csv")
print("wrote lnr_scan.csv")
