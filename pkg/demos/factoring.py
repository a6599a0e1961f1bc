# End-to-end: scan I_y for the first zero point, then split N with gcds.
import json
import logging

from mqfactor import FactorPolicy, factor

logging.basicConfig(level=logging.INFO, format="%(message)s")

for N in (15, 21, 33, 35, 39, 51, 55, 57, 65, 77, 85, 91):
    result = factor(N)
    tried = " ".join(f"{e['y']}:{e['outcome']}" for e in result.y_trace)
    print(f"N={N:3d} -> {result.factors}  r'={result.r_prime}  bases {tried}")

# y = N-1 has order 2 and y^(r/2) = -1, which is useless; the driver moves on
print(json.dumps(json.loads(factor(15, FactorPolicy(y_order=[14, 2])).to_json()), indent=1))
