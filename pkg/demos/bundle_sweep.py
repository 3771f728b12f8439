# Sweep the inverse temperature through a rational spectrum and watch the
# fibers change shape.
#
# The input is an ordered-group datum: a positive matrix over Q with an
# order unit.  For diagonal data the equilibrium fiber at beta is cut out
# of the simplex of normalized positive vectors by exact linear equations,
# so vertex counts and dimensions are integers we can trust.

from fractions import Fraction as F

import numpy as np

from kmslab import (DimensionGroupSpec, beta_spectrum, fiber_simplex,
                    scaling_measure, verify_scaling)

entries = [F(1), F(1, 7), F(1, 7), F(1, 3), F(1, 3), F(1, 3)]
spec = DimensionGroupSpec(
    matrix=tuple(tuple(entries[i] if i == j else F(0) for j in range(6))
                 for i in range(6)),
    order_unit=tuple(F(1) for _ in range(6)))

betas = beta_spectrum(spec)
print("beta spectrum:", betas)
print("            =  0, log 3, log 7 ->", [0.0, np.log(3.0), np.log(7.0)])
print()

for b in betas:
    f = fiber_simplex(spec, b)
    shape = {0: "point", 1: "interval", 2: "triangle"}.get(f.dimension, f"{f.dimension}-dim")
    print(f"beta = {b:10.6f}: {f.vertex_count} vertices, {shape}")
    for v in f.vertices_exact:
        print("    ", tuple(str(x) for x in v))

# off the spectrum the fiber is empty
probe = 0.5
print()
print(f"fiber at beta = {probe} empty:", fiber_simplex(spec, probe).is_empty)

# ---- self-similar measures on the line --------------------------------------

# the same scaling data seen as a measure: mu(lam B) = e^{-beta} mu(B).
# lam = 2, beta = -log 2 is the endpoint alpha = 0 where mu is Lebesgue.
mu = scaling_measure(lam=2.0, beta=-np.log(2.0), kind="density")
print()
print("alpha =", mu.alpha)
print("mu(2,6) / mu(1,3) =", mu.measure_of((2.0, 6.0)) / mu.measure_of((1.0, 3.0)))

mu_atoms = scaling_measure(lam=2.0, beta=-np.log(2.0), kind="atomic", window=10,
                           lam_exact=F(2), base_exact=F(1, 2), x_exact=F(1))
rep = verify_scaling(mu_atoms, [(0.5, 2.0), (1.0, 8.0)])
print("atomic variant: residual", rep.max_residual, " exact:", rep.exact)
# weights double with each dyadic step:
# print([mu_atoms.measure_of(Atom(2.0 ** k)) for k in range(4)])
