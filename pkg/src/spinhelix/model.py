"""
Physical objects of the boundary-driven XXZ chain: Hamiltonian, boundary
polarizers, spin/energy current operators and spin-helix states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .operators import embed, kron_all, local_product, pauli

TWO_PI = 2.0 * np.pi


def _canonical_direction(theta: float, phi: float) -> tuple[float, float]:
    """Map (theta, phi) to theta in [0, pi], phi in [0, 2pi) describing the same direction."""
    theta = float(np.mod(theta, TWO_PI))
    if theta > np.pi:
        theta = TWO_PI - theta
        phi = phi + np.pi
    phi = float(np.mod(phi, TWO_PI))
    if phi >= TWO_PI:  # np.mod can round up to 2pi
        phi = 0.0
    return theta, phi


@dataclass(frozen=True)
class ChainSpec:
    """Full configuration of one boundary-driven chain."""

    N: int
    Delta: float
    Gamma: float = 1.0
    theta_L: float = np.pi / 2
    phi_L: float = 0.0
    theta_R: float = np.pi / 2
    phi_R: float = 0.0
    J: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"chain needs N >= 2 sites, got {self.N}")
        if not self.Gamma > 0:
            raise ValueError(f"Gamma must be positive, got {self.Gamma}")
        for name in ("Delta", "Gamma", "theta_L", "phi_L", "theta_R", "phi_R", "J"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        tl, pl = _canonical_direction(self.theta_L, self.phi_L)
        tr, pr = _canonical_direction(self.theta_R, self.phi_R)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "theta_L", tl)
        object.__setattr__(self, "phi_L", pl)
        object.__setattr__(self, "theta_R", tr)
        object.__setattr__(self, "phi_R", pr)

    @property
    def Phi(self) -> float:
        """Boundary twist phi_R - phi_L in [0, 2pi)."""
        return float(np.mod(self.phi_R - self.phi_L, TWO_PI))

    @classmethod
    def helix(cls, N, theta, Phi, m, Gamma, J=1.0):
        """Spec tuned to the helix with winding ``m``: Delta = cos((Phi + 2 pi m)/(N - 1))."""
        return cls(
            N=N,
            Delta=critical_anisotropy(m, Phi, N),
            Gamma=Gamma,
            theta_L=theta,
            phi_L=0.0,
            theta_R=theta,
            phi_R=Phi,
            J=J,
        )


@dataclass(frozen=True)
class SpinHelixSpec:
    N: int
    theta: float
    Phi: float
    m: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not 0 <= self.m <= self.N - 2:
            raise ValueError(f"winding number must lie in 0..{self.N - 2}, got {self.m}")
        if not 0 <= self.Phi < TWO_PI:
            raise ValueError("Phi must lie in [0, 2pi)")

    @property
    def varphi(self) -> float:
        return (self.Phi + TWO_PI * self.m) / (self.N - 1)


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))


def winding_number(varphi: float, N: int) -> int:
    return int(np.floor((N - 1) * varphi / TWO_PI))


def critical_anisotropy(m: int, Phi: float, N: int) -> float:
    return float(np.cos((Phi + TWO_PI * m) / (N - 1)))


# --- single-site states -------------------------------------------------


def psi(theta: float, alpha: float) -> np.ndarray:
    """Spin coherent state pointing along (sin t cos a, sin t sin a, cos t)."""
    return np.array(
        [np.cos(theta / 2) * np.exp(-0.5j * alpha), np.sin(theta / 2) * np.exp(0.5j * alpha)],
        dtype=np.complex128,
    )


def psi_perp(theta: float, alpha: float) -> np.ndarray:
    return np.array(
        [np.sin(theta / 2) * np.exp(-0.5j * alpha), -np.cos(theta / 2) * np.exp(0.5j * alpha)],
        dtype=np.complex128,
    )


def bloch_vector(theta: float, phi: float) -> BlochVector:
    return BlochVector(np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))


def helix_state(N: int, theta: float, varphi: float) -> np.ndarray:
    """Product state whose site-j spin has azimuth (j - 1) varphi."""
    return kron_all([psi(theta, (j - 1) * varphi) for j in range(1, N + 1)])


def shs_state(spec: SpinHelixSpec) -> np.ndarray:
    return helix_state(spec.N, spec.theta, spec.varphi)


# --- Hamiltonian --------------------------------------------------------


def local_density(Delta: float, J: float = 1.0) -> np.ndarray:
    """Two-site XXZ density J (sx sx + sy sy + Delta (sz sz - 1))."""
    sx, sy, sz = pauli("x"), pauli("y"), pauli("z")
    return J * (np.kron(sx, sx) + np.kron(sy, sy) + Delta * (np.kron(sz, sz) - np.eye(4)))


def chain_hamiltonian(n_sites: int, Delta: float, J: float = 1.0) -> np.ndarray:
    """Open XXZ chain on ``n_sites`` sites; zero operator for a single site."""
    dim = 2**n_sites
    H = np.zeros((dim, dim), dtype=np.complex128)
    h = local_density(Delta, J)
    for j in range(1, n_sites):
        H += embed(h, j, n_sites)
    return H


def xxz_hamiltonian(spec: ChainSpec) -> np.ndarray:
    return chain_hamiltonian(spec.N, spec.Delta, spec.J)


# --- dissipation --------------------------------------------------------


def polarizer(theta: float, phi: float, Gamma: float) -> np.ndarray:
    """Single-site jump operator whose dark state is psi(theta, phi)."""
    return (np.sqrt(Gamma) / 2) * (
        -np.sin(theta) * pauli("z")
        + (1 + np.cos(theta)) * np.exp(-1j * phi) * pauli("plus")
        + (-1 + np.cos(theta)) * np.exp(1j * phi) * pauli("minus")
    )


def lindblad_operator(side: str, spec: ChainSpec) -> np.ndarray:
    if side == "left":
        return embed(polarizer(spec.theta_L, spec.phi_L, spec.Gamma), 1, spec.N)
    if side == "right":
        return embed(polarizer(spec.theta_R, spec.phi_R, spec.Gamma), spec.N, spec.N)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def dark_state(side: str, spec: ChainSpec) -> np.ndarray:
    if side == "left":
        return psi(spec.theta_L, spec.phi_L)
    if side == "right":
        return psi(spec.theta_R, spec.phi_R)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


# --- currents -----------------------------------------------------------


def _current(n: int, m: int, N: int, J: float) -> np.ndarray:
    sx, sy = pauli("x"), pauli("y")
    return J * (local_product({n: sx, m: sy}, N) - local_product({n: sy, m: sx}, N))


def spin_current_operator(n: int, N: int, J: float = 1.0) -> np.ndarray:
    """Magnetization current J (sx_n sy_{n+1} - sy_n sx_{n+1}) across bond (n, n+1)."""
    if not 1 <= n <= N - 1:
        raise IndexError(f"bond {n} outside 1..{N - 1}")
    return _current(n, n + 1, N, J)


def energy_current_operator(n: int, N: int, Delta: float, J: float = 1.0) -> np.ndarray:
    """Energy current at bulk site n, 2 <= n <= N - 1."""
    if not 2 <= n <= N - 1:
        raise IndexError(f"energy current defined only for 2 <= n <= {N - 1}, got {n}")
    sz = pauli("z")
    szn = local_product({n: sz}, N)
    return -szn @ _current(n - 1, n + 1, N, J) + Delta * (
        _current(n - 1, n, N, J) @ local_product({n + 1: sz}, N)
        + local_product({n - 1: sz}, N) @ _current(n, n + 1, N, J)
    )
