# Constructing and verifying the two matrices a scheme needs.

import numpy as np

from tgt import (
    BitMatrix,
    DefectiveSet,
    construct_disjunct,
    construct_good,
    is_good_for,
    critical_zero_cover,
    verify_disjunct,
    verify_threshold_disjunct,
)
from tgt.semantics import SchemeParams

rng = np.random.default_rng(42)

# The solver matrix M must be (d+1)-disjunct: every column escapes the
# union of any d+1 others in some row.  Construction is randomized and
# certified per instance, exhaustively when the subset enumeration fits
# the work budget.

m, cert = construct_disjunct(n=16, d=2, rng=rng)
print(f"M: {m.shape[0]}x{m.shape[1]}, certified {cert.d}-disjunct "
      f"({cert.method}, {cert.trials} checks)")

# Identity matrices are maximally disjunct; a repeated row is not.

print("identity 8x8 is 7-disjunct:", verify_disjunct(BitMatrix.identity(8), 7).verified)
bad = verify_disjunct(BitMatrix.ones(2, 5), 1)
print("all-ones rows fail, witness:", bad.witness)

# The locator matrix G provides, for every defective set D, rows whose
# pools contain exactly u defectives, covering D, each defective more than
# e times.  The universal property is exponential, so G is validated
# against sampled defective sets of every cardinality.

params = SchemeParams(n=32, d=4, u=2, e=1, p=0.65)
g = construct_good(params, rng)
print(f"\nG: {g.shape[0]} rows for n={params.n} (p={params.p} margin)")

dset = DefectiveSet(rng.choice(32, size=4, replace=False).tolist())
report = is_good_for(g, dset, u=2, e=2 * params.e)
print(f"goodness for {dset.to_one_based()}: {report.is_good}, "
      f"counts {sorted(report.per_item_counts.values())}")

# At desk scale the stronger threshold-disjunct property can be checked by
# full enumeration, and it implies fixed-D goodness for every D.

tiny = np.zeros((15, 6), dtype=np.uint8)
for row, pair in enumerate([(i, j) for i in range(6) for j in range(i + 1, 6)]):
    tiny[row, list(pair)] = 1
tiny_report = verify_threshold_disjunct(BitMatrix(tiny), d=2, u=2, e=0)
print(f"\ncomplete weight-2 matrix on 6 items: threshold-disjunct pass = "
      f"{tiny_report.passed}, min count = {tiny_report.min_count}")

# The covering split behind that implication is constructive:

pairs = critical_zero_cover(DefectiveSet([0, 2, 4, 6, 8]), n=20, d=5, u=2)
for pair in pairs:
    print("critical", sorted(pair.critical), "zero", sorted(pair.zero),
          "distinguished", pair.distinguished)
