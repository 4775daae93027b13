"""
Approach to the pure helix as the boundary dissipation grows.

The purity defect of the steady state falls off as (Gamma_ch / Gamma)^2,
where Gamma_ch comes from Zeno-limit perturbation theory alone.
"""

import numpy as np

from spinhelix import ChainSpec, build_liouvillian, gamma_ch, purity_defect, solve_ness

N, theta, Phi, m = 4, np.pi / 2, np.pi / 10, 0
cd = gamma_ch(theta, Phi, m, N)
print(f"N = {N}, varphi = {cd.varphi:.4f}: Gamma_ch = {cd.Gamma_ch:.5f}")
print(f"{'Gamma':>8} {'eps (NESS)':>14} {'(Gamma_ch/Gamma)^2':>20}")
for G in [1e1, 1e2, 1e3, 1e4]:
    spec = ChainSpec.helix(N=N, theta=theta, Phi=Phi, m=m, Gamma=G)
    eps = purity_defect(solve_ness(build_liouvillian(spec), extended=G >= 1e3).rho)
    print(f"{G:8.0e} {eps:14.4e} {(cd.Gamma_ch / G) ** 2:20.4e}")

# near a singular twist the characteristic scale blows up, so far larger
# Gamma is needed for the same purity
for varphi in [np.pi / 2 - 0.2, np.pi / 2 - 0.05, np.pi / 2 - 0.01]:
    g = gamma_ch(theta, 3 * varphi, 0, N).Gamma_ch
    print(f"varphi = pi/2 - {np.pi / 2 - varphi:.2f}: Gamma_ch = {g:.2f}")
