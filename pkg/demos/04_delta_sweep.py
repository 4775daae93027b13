"""
Entropy of the steady state near the critical anisotropies.

At strong dissipation the entropy dips to zero wherever Delta hits one of
the critical values cos((Phi + 2 pi m)/(N - 1)). The dips are narrow, so we
probe each critical value and a few neighbours rather than a uniform grid.
At weak dissipation only the dips with a small characteristic scale survive.
"""

from dataclasses import replace

import numpy as np

from spinhelix import ChainSpec, build_liouvillian, observables, solve_ness
from spinhelix.model import critical_anisotropy
from spinhelix.zeno import gamma_ch

N, Phi = 5, np.pi / 10
offsets = [-0.02, -0.005, 0.0, 0.005, 0.02]

for m in range(N - 1):
    d_cr = critical_anisotropy(m, Phi, N)
    g_ch = gamma_ch(np.pi / 2, Phi, m, N).Gamma_ch
    print(f"\nm = {m}: Delta_cr = {d_cr:+.4f}, Gamma_ch = {g_ch:.3f}")
    for Gamma in (1000.0, 10.0):
        line = []
        for off in offsets:
            spec = replace(ChainSpec.helix(N=N, theta=np.pi / 2, Phi=Phi, m=m, Gamma=Gamma), Delta=d_cr + off)
            rho = solve_ness(build_liouvillian(spec)).rho
            line.append(f"{observables(rho, spec).vne_entropy:6.3f}")
        print(f"  Gamma {Gamma:6g}  S at Delta_cr {offsets} -> " + " ".join(line))
