"""
Elementary symmetric functions and their cones
==============================================

Small tour of the algebraic layer: sigma_k values, gradients, cone
membership, and the inequalities that make the curvature quotients
well behaved.
"""

import numpy as np

from weingarten import (
    in_gamma_cone,
    newton_maclaurin_holds,
    quotient_monotone_holds,
    sigma,
    sigma_all,
    sigma_gradient,
    sigma_quotient,
)

lam = np.array([1.0, 2.0, 3.0])
print("lambda =", lam)
print("all sigma_k:", sigma_all(lam))
print("sigma_2 =", sigma(lam, 2))
print("grad sigma_2 =", sigma_gradient(lam, 2))
print()

# cone membership: every sigma_j up to k must be strictly positive
for vec in ([1.0, 2.0, 3.0], [2.0, 2.0, -1.0], [5.0, 1.0, -1.0]):
    marks = [in_gamma_cone(vec, k) for k in (1, 2, 3)]
    print(f"lambda = {vec}: in Gamma_1/2/3 = {marks}")
print()

# the Maclaurin-type bound ties consecutive quotients together
rng = np.random.default_rng(0)
count = 0
for _ in range(2000):
    n = int(rng.integers(2, 7))
    trial = rng.normal(0.6, 1.0, size=n)
    if not in_gamma_cone(trial, 2):
        continue
    assert newton_maclaurin_holds(trial, 2, 1)
    count += 1
print(f"Maclaurin bound verified on {count} random Gamma_2 vectors")

# normalized quotients are monotone in the order of the quotient
lam = np.array([0.5, 1.5, 2.5, 4.0])
print("quotient sigma_3/sigma_2 =", sigma_quotient(lam, 3, 2))
print("monotone (k,l,r,s)=(3,2,2,1):", quotient_monotone_holds(lam, 3, 2, 2, 1))
print("monotone (k,l,r,s)=(4,0,2,0):", quotient_monotone_holds(lam, 4, 0, 2, 0))
