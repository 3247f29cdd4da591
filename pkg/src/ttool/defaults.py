"""Default numerical tolerances, shared across modules.

Every public operation that takes a ``tol`` argument falls back to one
of these when passed None.  Values are relative to the scale named in
the comment.
"""

# block-circulant structure deviation, relative to max entry magnitude
TOL_STRUCT = 1e-12

# transform round-trip residual, relative to the tensor Frobenius norm
TOL_FFT = 1e-11

# SVD rank truncation, relative to the largest singular value in scope
TOL_RANK = 1e-11

# linear solve residuals, relative
TOL_SOLVE = 1e-9

# structure predicates (unitary/hermitian/triangular tests), relative
TOL_PRED = 1e-9

# eigenvalue clustering, relative to the per-block spectral radius.
# Wide enough to absorb the eps^(1/s) eigenvalue spread of a size-s
# Jordan block in double precision (s <= 3 with ~10x margin).
TOL_CLUSTER = 1e-3

# Jordan reconstruction residual, relative
TOL_JORDAN = 1e-7

# nilpotency norm test: ||a^s|| <= TOL_NIL * ||a||^s
TOL_NIL = 1e-10

# decomposition reconstruction residuals, relative
TOL_DEC = 1e-10

# generalized-inverse defining-equation residuals, relative
TOL_GINV = 1e-8

# rank decisions inside the Jordan staircase, relative per power
TOL_STAIRCASE = 1e-7

# default z sequence for resolvent limits
Z_SEQUENCE = (1e-2, 1e-4, 1e-6, 1e-8)
