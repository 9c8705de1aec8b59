"""
Timing the three ways of powering
=================================

Batches of random normal-form matrices are raised to a fixed power by the
scalar recurrences, by repeated dense products and by diagonalisation. Each
batch result is checked against the recurrence before its time is kept.
"""

from pwlorbit import BenchSpec, run_bench, write_bench_csv
from pwlorbit.bench_harness import loglog_slope

spec = BenchSpec(mode="dim", values=(10, 20, 40, 80), fixed=10, batch=50, repeats=5)
table = run_bench(spec)

for row in table.sorted_rows():
    flags = ";".join(row.flags)
    print(f"N={row.variable:3d} {row.algorithm:6s} {row.mean_seconds * 1e3:9.3f} ms  +- {row.std_seconds * 1e3:7.3f}  {flags}")

# cost grows like N^2 for the recurrence and N^3 for dense products
for algo in ("gamma", "brute", "diag"):
    print(f"{algo:6s} log-log slope {loglog_slope(*table.series(algo)):.2f}")

# with the dimension fixed, the recurrence is linear in the power
by_power = run_bench(BenchSpec(mode="power", values=(10, 100, 1000), fixed=20, batch=50, repeats=5,
                               algorithms=("gamma", "diag")))
for row in by_power.sorted_rows():
    print(f"n={row.variable:4d} {row.algorithm:6s} {row.mean_seconds * 1e3:9.3f} ms  {';'.join(row.flags)}")

write_bench_csv(table, "bench_dim.csv")
print("wrote bench_dim.csv")
