# Scan I(m) and I_y(m) and watch the zero points appear at multiples of r/2.
from mqfactor import find_zero_points, scan_intensity
from mqfactor.mqspec import Iy_lower_bound, initial_intensity

for y, N, pq in [(2, 15, (3, 5)), (2, 21, (3, 7)), (4, 21, (3, 7))]:
    scan = scan_intensity(y, N, range(13))
    print(f"\ny={y}, N={N}")
    print(" m      I(m)    Iy(m)  closed-form gap")
    for pt in scan.points:
        print(f"{pt.m:2d} {pt.I:9.4f} {pt.Iy:8.4f}  {pt.discrepancy:.1e}")
    zeros = find_zero_points(scan)
    floor = Iy_lower_bound(N, *pq)
    print("zero points:", zeros.points, " r' =", zeros.r_prime)
    print(f"away from zeros Iy >= {floor:g}, i.e. {floor / initial_intensity(N.bit_length()):.3f} of the initial power")

# per-order split, ready for plotting elsewhere
print()
print(scan_intensity(2, 21, range(7)).to_csv(per_order=True))
