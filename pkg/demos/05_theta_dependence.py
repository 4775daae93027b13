"""
How the polar angle of the helix changes the characteristic dissipation.

C_N(varphi, theta) = Gamma_ch(theta) / Gamma_ch(pi/2). For three sites it is
exactly sin^2(theta); for longer chains it depends on the twist too.
"""

import numpy as np

from spinhelix.zeno import c_ratio

thetas = np.linspace(0.1, np.pi / 2, 8)
print("theta   " + "  ".join(f"{t:6.3f}" for t in thetas))
print("sin^2   " + "  ".join(f"{np.sin(t) ** 2:6.3f}" for t in thetas))
for label, varphi in [("pi/2+0.01", np.pi / 2 + 0.01), ("2pi/7", 2 * np.pi / 7), ("pi/5", np.pi / 5), ("pi/100", np.pi / 100)]:
    print(f"{label:<8}" + "  ".join(f"{c_ratio(5, varphi, t):6.3f}" for t in thetas))
