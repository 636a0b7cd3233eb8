# Bit-packed matrices and the on-disk format.

import numpy as np

from tgt import (
    BitMatrix,
    BitVector,
    complement,
    deserialize_matrix,
    restrict_row,
    serialize_matrix,
    stack,
)

# Everything binary in this library is a BitMatrix or BitVector: immutable,
# hashable, and backed by numpy.

m = BitMatrix.from_rows([[1, 0, 1, 0], [0, 1, 1, 0], [1, 1, 0, 1]])
print("matrix:")
print(m.to_array())
print("row 1:", m.row(1).to_array(), "| column 2:", m.col(2).to_array())

# The complement flips every bit; stacking a matrix on its complement is how
# the solver half of a testing scheme is laid out.

print("\ncomplement:")
print(complement(m).to_array())
a = stack(m, complement(m))
print("stacked shape:", a.shape)

# Restriction is entrywise AND: the items of x that fall inside a pool.

x = BitVector([1, 1, 0, 1])
pool = BitVector([1, 0, 1, 1])
print("\nx restricted to pool:", restrict_row(x, pool).to_array())

# Serialization is a one-line ASCII header plus base64 of the packed bits
# (64-bit words, little-endian, LSB first, zero padding).  Round trips are
# exact and re-serialization is byte-identical.

data = serialize_matrix(m, kind="disjunct", params={"d": 2})
print("\nserialized:")
print(data.decode().splitlines()[0])
assert deserialize_matrix(data) == m

rng = np.random.default_rng(0)
big = BitMatrix.random(rng, 1000, 1000, 0.3)
assert deserialize_matrix(serialize_matrix(big)) == big
print("10^6-bit round trip: exact")
