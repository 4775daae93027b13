"""
Where the characteristic dissipation diverges.

Gamma_ch is infinite at rational twists pi d/k with k < N. At theta = pi/2
some of these come from a singular K matrix, the rest from a degeneracy of
the interior block h00 that the boundary coupling connects to.
"""

import numpy as np

from spinhelix import classify_numerically, omega_k, omega_lambda, omega_star, omega_star_cardinality
from spinhelix.zeno import characteristic_dissipation

N = 6
print("Omega*_6      :", ", ".join(map(str, omega_star(N))))
print("K-singular    :", ", ".join(map(str, omega_k(N))))
print("Lambda-coupled:", ", ".join(map(str, omega_lambda(N))))

print("\nnumerical check at theta = pi/2")
for a in omega_star(N):
    c = classify_numerically(a.value, np.pi / 2, N)
    print(f"  {str(a):>6}: {c.predicted:<15} min|eig K| = {c.k_min_eig:.1e}, h00 gap = {c.h00_gap:.1e}")

print("\nGamma_ch just beside pi/3:")
for eps in [1e-2, 3e-3, 1e-3]:
    print(f"  eps = {eps:.0e}: Gamma_ch = {characteristic_dissipation(np.pi / 2, np.pi / 3 + eps, 5).Gamma_ch:.1f}")

print("\n|Omega*_N| grows like 3 N^2 / pi^2:")
for n in [10, 100, 300, 1000]:
    print(f"  N = {n:>4}: {omega_star_cardinality(n):>7}  vs {3 * n * n / np.pi**2:9.1f}")
