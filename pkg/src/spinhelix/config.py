"""Numerical tolerances shared by every module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    normalization: float = 1e-12
    trace: float = 1e-12
    positivity: float = 1e-8
    residual: float = 1e-10
    entropy_cutoff: float = 1e-14
    # degeneracy handling in the resolvent of h^{00}
    degeneracy_gap: float = 1e-9
    degeneracy_coupling: float = 1e-10
    # reciprocal condition number below which K counts as singular
    k_rcond: float = 1e-10
    # relative threshold of the numeric singularity classifier
    classify_rel: float = 1e-8
    uniqueness: float = 1e-8
    trace_drift: float = 1e-9
    eigencheck: float = 1e-10
    gamma_sq_imag: float = 1e-8


TOL = Tolerances()

# hard cap on chain length for anything that builds a 4^N superoperator
MAX_LIOUVILLIAN_SITES = 7
