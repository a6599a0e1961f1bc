# Orbits of x -> x*y mod N and the full-period count.
import math

from mqfactor import orbit_decompose, parker_plenio_check

N, p, q = 15, 3, 5

for y in [y for y in range(2, N) if math.gcd(y, N) == 1]:
    table = orbit_decompose(y, N)
    check = parker_plenio_check(table, p, q)
    cycles = " ".join("{" + ",".join(map(str, o.cycle)) + "}" for o in table.orbits)
    print(f"y={y:2d}  r={table.r}  t={table.t}  d={table.d}  rd={check.count:2d} >= {check.bound}  {cycles}")

# states that share no factor with N always sit on a full-period orbit,
# so at most p+q-1 = 7 residues can be left over
table = orbit_decompose(2, N)
full = {x for o in table.orbits if o.period == table.r for x in o.cycle}
print("coprime residues all on full orbits:", all(x in full for x in range(1, N) if math.gcd(x, N) == 1))
