"""
Periodic orbits of a piecewise-linear map
=========================================

Each symbolic word gives a linear equation for the first orbit point. The
solution is an orbit only if the iterates really visit the partitions named
by the word.
"""

from pwlorbit import PWLMap, SymbolWord, classify_orbit, fixed_points

pwl = PWLMap.from_rho([0.2, 0.0], [-3.0, 0.0], mu=1.0)

rec = classify_orbit(pwl, SymbolWord.parse("L1R1"))
print("LR candidate", rec.candidate)
print("points", [p.tolist() for p in rec.points])
print(f"trace {rec.trace:.3g}  det {rec.det:.3g}  spectral radius {rec.spectral_radius:.3g}  stable {rec.stable}")

# same linear algebra, but the candidate lands on the wrong side
bad = classify_orbit(PWLMap.from_rho([0.0, 0.0], [0.0, 0.0], mu=1.0), SymbolWord.parse("L1R1"))
print("nilpotent map:", bad.exists, bad.reason)

# fixed points sit at the period-1 end of the family
for r in fixed_points(PWLMap.from_rho([0.1, 0.0], [0.5, 0.0], mu=1.0)):
    print(r.word, r.exists, r.candidate, r.reason)

# a longer word in three dimensions
pwl3 = PWLMap.from_rho([-0.5, 0.2, 0.1], [-1.2, 0.3, -0.2], mu=1.0)
for text in ("L1R1", "L2R1", "L1R2", "L2R1L1R1"):
    r = classify_orbit(pwl3, SymbolWord.parse(text))
    radius = "" if r.spectral_radius is None else f"{r.spectral_radius:.3f}"
    print(f"{text:10s} exists={r.exists!s:5s} stable={r.stable!s:5s} radius={radius:6s} {r.reason}")
