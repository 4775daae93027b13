"""
Twisting angles at which the characteristic dissipation diverges.

Angles are exact rational multiples of pi, pi * d / k with gcd(d, k) = 1 and
0 < d/k < 1, so deduplication by ratio is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import gcd

import numpy as np

from .config import TOL
from .zeno import _degenerate_coupling, _eigen_frame, _in_frame, k_matrix, k_scale


@total_ordering
@dataclass(frozen=True)
class RationalAngle:
    d: int
    k: int

    def __post_init__(self):
        if self.d <= 0 or self.k <= 0:
            raise ValueError("numerator and denominator must be positive")
        if gcd(self.d, self.k) != 1:
            raise ValueError(f"{self.d}/{self.k} is not reduced")
        if not self.d < self.k:
            raise ValueError("angle must lie strictly inside (0, pi)")

    @classmethod
    def of(cls, ratio) -> "RationalAngle":
        """From any ratio d/k (Fraction, int pair, ...); reduces automatically."""
        fr = Fraction(ratio)
        return cls(fr.numerator, fr.denominator)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.d, self.k)

    @property
    def value(self) -> float:
        return np.pi * self.d / self.k

    def __lt__(self, other):
        return self.ratio < other.ratio

    def __str__(self):
        num = "pi" if self.d == 1 else f"{self.d}pi"
        return f"{num}/{self.k}"


@dataclass(frozen=True)
class SingularAngleSet:
    angles: tuple
    N: int
    kind: str  # omega_star | omega_K | omega_Lambda

    def __len__(self):
        return len(self.angles)

    def __iter__(self):
        return iter(self.angles)

    def __contains__(self, item):
        if not isinstance(item, RationalAngle):
            item = RationalAngle.of(item)
        return item in set(self.angles)

    @property
    def ratios(self) -> set:
        return {a.ratio for a in self.angles}

    @property
    def values(self) -> np.ndarray:
        return np.array([a.value for a in self.angles])


def _collect(pairs, N, kind) -> SingularAngleSet:
    ratios = {Fraction(d, k) for d, k in pairs}
    ratios = {r for r in ratios if 0 < r < 1}
    return SingularAngleSet(tuple(sorted(RationalAngle.of(r) for r in ratios)), N, kind)


def omega_star(N: int) -> SingularAngleSet:
    """All pi d/k with k = 2..N-1, 0 < d < k, each ratio once."""
    if N < 3:
        raise ValueError("singular set defined for N >= 3")
    return _collect(((d, k) for k in range(2, N) for d in range(1, k)), N, "omega_star")


def omega_k(N: int) -> SingularAngleSet:
    """pi d/(2k), k = 1..floor((N-1)/2), d = 1..2k-1: where K is singular at theta = pi/2."""
    if N < 3:
        raise ValueError("singular set defined for N >= 3")
    pairs = ((d, 2 * k) for k in range(1, (N - 1) // 2 + 1) for d in range(1, 2 * k))
    return _collect(pairs, N, "omega_K")


def omega_lambda(N: int) -> SingularAngleSet:
    star, kset = omega_star(N), set(omega_k(N).angles)
    return SingularAngleSet(tuple(a for a in star.angles if a not in kset), N, "omega_Lambda")


def totients(n: int) -> np.ndarray:
    """Euler phi(0..n) by sieve."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:  # p is prime
            phi[p::p] -= phi[p::p] // p
    return phi


def omega_star_cardinality(N: int) -> int:
    """|Omega*_N|: reduced fractions with denominator 2..N-1, i.e. sum of totients."""
    if N < 3:
        raise ValueError("singular set defined for N >= 3")
    return int(totients(N - 1)[2:].sum())


def omega_star_cardinalities(N_max: int) -> np.ndarray:
    """|Omega*_N| for N = 3..N_max in one sieve pass."""
    phi = totients(N_max - 1)
    cum = np.cumsum(phi)  # cum[j] = sum_{k<=j} phi(k)
    # |Omega*_N| = sum_{k=2}^{N-1} phi(k) = cum[N-1] - phi(0) - phi(1)
    return cum[2:N_max] - 1


def quadratic_coefficient(N_max: int = 2000, N_min: int = 3) -> float:
    """Least-squares a in |Omega*_N| ~ a N^2 over N_min..N_max."""
    Ns = np.arange(3, N_max + 1)
    counts = omega_star_cardinalities(N_max).astype(float)
    sel = Ns >= N_min
    x, y = Ns[sel].astype(float) ** 2, counts[sel]
    return float(x @ y / (x @ x))


def collinear_pairs(N: int, theta: float, varphi: float, tol: float = 1e-9, transverse: bool = True):
    """Site pairs (i, j) whose helix spins are parallel or antiparallel.

    With ``transverse`` only the xy projections are compared, which is the
    theta-independent notion (all sites share the same z component); at
    theta = pi/2 it coincides with collinearity of the full Bloch vectors.
    """
    from .model import bloch_vector

    vecs = [np.array(bloch_vector(theta, (j - 1) * varphi)) for j in range(1, N + 1)]
    if transverse:
        vecs = [v * np.array([1.0, 1.0, 0.0]) for v in vecs]
    out = []
    for i in range(N):
        for j in range(i + 1, N):
            if np.linalg.norm(np.cross(vecs[i], vecs[j])) < tol:
                out.append((i + 1, j + 1))
    return out


# --- numerical classification -------------------------------------------


@dataclass(frozen=True)
class Classification:
    k_min_eig: float
    k_norm: float
    h00_gap: float
    coupling: float
    predicted: str  # regular | K_singular | Lambda_coupled


def classify_numerically(varphi: float, theta: float, N: int, J: float = 1.0, tol=TOL) -> Classification:
    """Locate the source of a Gamma_ch divergence at one twisting angle.

    ``K_singular`` when min |eig K| < classify_rel * ||K|| (the norm taken no
    smaller than the scale of the blocks K is built from), otherwise
    ``Lambda_coupled`` when h00 has a level degenerate with the target that
    h01 couples to, otherwise ``regular``.
    """
    frame = _eigen_frame(theta, varphi, N, J)
    K = k_matrix(frame)
    eig = np.linalg.eigvals(K)
    k_min = float(np.min(np.abs(eig)))
    k_norm = max(float(np.linalg.norm(K, 2)), k_scale(frame))
    gaps = np.abs(frame.spectrum - frame.lambda0)
    h00_gap = float(gaps.min())
    deg, coupling = _degenerate_coupling(frame, tol)
    if k_min < tol.classify_rel * k_norm:
        predicted = "K_singular"
    elif deg.size and coupling >= tol.degeneracy_coupling:
        predicted = "Lambda_coupled"
    else:
        predicted = "regular"
    return Classification(k_min, k_norm, h00_gap, coupling, predicted)


def h00_gap_profile(varphi: float, theta: float, N: int, J: float = 1.0):
    """(gap, |<alpha|h01|0>|) for the h00 level closest to the target level."""
    frame = _eigen_frame(theta, varphi, N, J)
    gaps = np.abs(frame.spectrum - frame.lambda0)
    a = int(np.argmin(gaps))
    elem = _in_frame(frame, 0, 1)[1:, 0]
    return float(gaps[a]), float(abs(elem[a]))
