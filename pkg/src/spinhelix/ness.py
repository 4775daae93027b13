"""
Lindblad superoperator, steady-state solvers and steady-state observables.

Vectorization is column-stacking, vec(A rho B) = (B^T kron A) vec(rho), so
``vec(rho) = rho.reshape(-1, order="F")``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .config import MAX_LIOUVILLIAN_SITES, TOL
from .model import (
    BlochVector,
    ChainSpec,
    energy_current_operator,
    lindblad_operator,
    spin_current_operator,
    xxz_hamiltonian,
)
from .operators import dagger, expectation, local_product, pauli

log = logging.getLogger(__name__)


class NessSolverError(RuntimeError):
    pass


class DegenerateKernelError(NessSolverError):
    def __init__(self, message, multiplicity=None):
        super().__init__(message)
        self.multiplicity = multiplicity


class InvalidDensityMatrix(ValueError):
    pass


class TraceDriftError(RuntimeError):
    pass


def vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d, order="F")


@dataclass(frozen=True)
class Liouvillian:
    superoperator: sp.csr_matrix
    spec: ChainSpec
    hamiltonian: np.ndarray = field(repr=False)
    jump_operators: tuple = field(repr=False)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension 2^N."""
        return self.hamiltonian.shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.superoperator @ vec(rho))


def lindblad_rhs(H, jumps, rho):
    """Right-hand side of the master equation evaluated directly on a matrix."""
    out = -1j * (H @ rho - rho @ H)
    for L in jumps:
        LdL = dagger(L) @ L
        out += L @ rho @ dagger(L) - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def build_liouvillian(spec: ChainSpec, max_sites: int = MAX_LIOUVILLIAN_SITES) -> Liouvillian:
    if spec.N > max_sites:
        raise MemoryError(
            f"N={spec.N} exceeds the superoperator cap of {max_sites} sites "
            f"(a {4**spec.N}x{4**spec.N} matrix)"
        )
    H = xxz_hamiltonian(spec)
    jumps = (lindblad_operator("left", spec), lindblad_operator("right", spec))
    d = H.shape[0]
    eye = sp.identity(d, dtype=np.complex128, format="csr")
    Hs = sp.csr_matrix(H)
    L = -1j * (sp.kron(eye, Hs) - sp.kron(Hs.T, eye))
    for Lk in jumps:
        Ls = sp.csr_matrix(Lk)
        LdL = sp.csr_matrix(dagger(Lk) @ Lk)
        L = L + sp.kron(Ls.conj(), Ls) - 0.5 * sp.kron(eye, LdL) - 0.5 * sp.kron(LdL.T, eye)
    L = sp.csr_matrix(L)
    L.eliminate_zeros()
    return Liouvillian(superoperator=L, spec=spec, hamiltonian=H, jump_operators=jumps)


# --- density matrices ---------------------------------------------------


def check_density_matrix(rho: np.ndarray, tol=TOL) -> None:
    herm = np.max(np.abs(rho - dagger(rho)))
    if herm > tol.hermitian:
        raise InvalidDensityMatrix(f"not Hermitian (deviation {herm:.2e})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol.trace:
        raise InvalidDensityMatrix(f"trace {tr} differs from 1")
    lmin = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0]
    if lmin < -tol.positivity:
        raise InvalidDensityMatrix(f"negative eigenvalue {lmin:.2e}")


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + dagger(diff))))))


def _finalize(v: np.ndarray) -> np.ndarray:
    rho = unvec(v)
    rho = 0.5 * (rho + dagger(rho))
    return rho / np.trace(rho).real


# --- steady state -------------------------------------------------------


@dataclass(frozen=True)
class NessResult:
    rho: np.ndarray
    residual: float
    method: str
    iterations: int
    multiplicity: int = 1


def _trace_row(d: int) -> np.ndarray:
    row = np.zeros(d * d, dtype=np.complex128)
    row[:: d + 1] = 1.0
    return row


def _solve_direct(liouv: Liouvillian):
    """Sparse LU on L with its first row replaced by the trace functional."""
    d = liouv.dim
    L = liouv.superoperator.tolil(copy=True)
    L[0, :] = _trace_row(d)
    A = L.tocsc()
    b = np.zeros(d * d, dtype=np.complex128)
    b[0] = 1.0
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:  # exactly singular factor
        raise DegenerateKernelError(
            "trace-constrained Liouvillian is singular; steady state is not unique"
        ) from exc
    x = lu.solve(b)
    # one round of iterative refinement
    x = x + lu.solve(b - A @ x)
    if not np.all(np.isfinite(x)):
        raise DegenerateKernelError("trace-constrained solve produced non-finite values")
    return x, 2, lu


def _to_mp(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx, z in np.ndenumerate(a):
        out[idx] = mpmath.mpc(z.real, z.imag)
    return out


def _extended_refine(liouv: Liouvillian, x: np.ndarray, lu, digits: int = 40, sweeps: int = 6):
    """Mixed-precision iterative refinement of the trace-constrained solve.

    Residuals are evaluated at ``digits`` decimal digits directly from the
    (double) Hamiltonian and jump operators, so the refined state is exact for
    that Lindbladian; the double LU factor only supplies corrections. This is
    what resolves purity defects far below double-precision round-off of the
    ill-conditioned Zeno-regime superoperator.
    """
    d = liouv.dim
    with mpmath.workdps(digits):
        H = _to_mp(liouv.hamiltonian)
        jumps = [(_to_mp(L), _to_mp(dagger(L))) for L in liouv.jump_operators]
        jumps = [(L, Ld, Ld @ L) for L, Ld in jumps]
        rho = _to_mp(unvec(x))
        for sweep in range(1, sweeps + 1):
            R = -1j * (H @ rho - rho @ H)
            for L, Ld, LdL in jumps:
                R = R + L @ rho @ Ld - (LdL @ rho + rho @ LdL) / 2
            r = -R.reshape(-1, order="F")
            r[0] = 1 - np.trace(rho)
            r_d = np.array([complex(z) for z in r])
            if np.linalg.norm(r_d) < 10.0 ** (-digits + 8):
                break
            c = lu.solve(r_d)
            rho = rho + _to_mp(unvec(c))
        # Hermitize and normalize before rounding to double
        rho = (rho + np.conj(rho.T)) / 2
        rho = rho / np.trace(rho)
        return np.array([[complex(z) for z in row] for row in rho]), sweep


def _inverse_iteration(liouv: Liouvillian, start: np.ndarray, shift: float, max_iter=200, tol=1e-13, lu=None):
    d = liouv.dim
    n = d * d
    if lu is None:
        A = (liouv.superoperator - shift * sp.identity(n, format="csr")).tocsc()
        lu = spla.splu(A)
    x = start / np.linalg.norm(start)
    for it in range(1, max_iter + 1):
        y = lu.solve(x)
        y /= np.linalg.norm(y)
        # fix the arbitrary phase through the trace
        tr = _trace_row(d) @ y
        if abs(tr) > 0:
            y *= abs(tr) / tr
        if np.linalg.norm(y - x) < tol:
            return y, it, lu
        x = y
    return x, max_iter, lu


def _start_vectors(d: int):
    """Two fixed, mutually orthogonal Hermitian starts (deterministic)."""
    first = np.eye(d, dtype=np.complex128) / d
    ramp = np.diag(np.linspace(-1.0, 1.0, d)).astype(np.complex128)
    ramp[0, -1] = ramp[-1, 0] = 0.5
    ramp -= np.trace(ramp) / d * np.eye(d)
    second = first + ramp / np.linalg.norm(ramp) / d
    return vec(first), vec(second)


def _shift(liouv: Liouvillian) -> float:
    # Zeno slow modes decay at rates ~ J^2 / Gamma, so the shift must sit well below that
    scale = max(1.0, liouv.spec.Gamma, abs(liouv.spec.J) * (1 + abs(liouv.spec.Delta)))
    return -1e-15 * scale


def uniqueness_check(liouv: Liouvillian, rho: np.ndarray, tol=TOL.uniqueness):
    """Run inverse iteration from two different fixed starts and compare them.

    A unique kernel makes both runs converge to the same state. Returns the
    trace distance between the two; raises DegenerateKernelError if it exceeds
    ``tol``. ``rho`` is only used for logging: in the deep Zeno regime the slow
    Liouvillian modes sit close to round-off and the kernel vector itself is
    then determined to lower accuracy than the uniqueness statement.
    """
    a, b = _start_vectors(liouv.dim)
    shift = _shift(liouv)
    va, _, lu = _inverse_iteration(liouv, a, shift)
    vb, _, _ = _inverse_iteration(liouv, b, shift, lu=lu)
    ra, rb = _finalize(va), _finalize(vb)
    dist = trace_distance(ra, rb)
    log.debug("uniqueness: starts differ by %.2e, direct solution by %.2e", dist, trace_distance(ra, rho))
    if dist > tol:
        raise DegenerateKernelError(
            f"independent inverse-iteration starts disagree (trace distance {dist:.2e}); "
            "the steady state is not unique",
            multiplicity=None,
        )
    return dist


def solve_ness(
    liouv: Liouvillian,
    tol: float = TOL.residual,
    method: str = "direct",
    check_unique: bool = True,
    extended: bool = False,
) -> NessResult:
    """Find the unit-trace steady state.

    ``method`` is one of ``direct`` (sparse LU with a trace row, default),
    ``inverse_iteration`` or ``null_space`` (dense, small chains only; its
    rank cutoff cannot separate the slowest Zeno modes from the kernel once
    Gamma is large, so prefer the sparse methods there).
    ``extended=True`` adds extended-precision refinement to the direct solve;
    use it when purity defects below ~1e-9 matter (Gamma >~ 1e3).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    d = liouv.dim
    lu = None
    if method == "direct":
        try:
            x, iterations, lu = _solve_direct(liouv)
        except DegenerateKernelError:
            log.info("direct solve failed, falling back to inverse iteration")
            method = "inverse_iteration"
    if method == "inverse_iteration":
        start, _ = _start_vectors(d)
        x, iterations, _ = _inverse_iteration(liouv, start, _shift(liouv))
    elif method == "null_space":
        if liouv.spec.N > 4:
            raise ValueError("dense null-space solver is limited to N <= 4")
        kernel = scipy.linalg.null_space(liouv.superoperator.toarray(), rcond=1e-12)
        if kernel.shape[1] != 1:
            raise DegenerateKernelError(
                f"Liouvillian kernel has dimension {kernel.shape[1]}", multiplicity=kernel.shape[1]
            )
        x, iterations = kernel[:, 0], 1
    elif method != "direct":
        raise ValueError(f"unknown method {method!r}")

    if extended and lu is not None:
        rho, sweeps = _extended_refine(liouv, x, lu)
        iterations += sweeps
    else:
        rho = _finalize(x)
    residual = float(np.linalg.norm(liouv.superoperator @ vec(rho)))
    if residual > tol:
        raise NessSolverError(f"steady-state residual {residual:.2e} exceeds tolerance {tol:.2e}")
    try:
        check_density_matrix(rho)
    except InvalidDensityMatrix as exc:
        raise NessSolverError(f"solver returned an invalid state: {exc}") from exc
    if check_unique and method != "null_space":
        uniqueness_check(liouv, rho)
    return NessResult(rho=rho, residual=residual, method=method, iterations=iterations)


def evolve(liouv: Liouvillian, rho0: np.ndarray, t_final: float, step: float, max_drift: float = TOL.trace_drift):
    """Fourth-order Runge-Kutta integration of the master equation.

    Returns (rho(t_final), trace drift). The returned state is renormalized to
    unit trace; a drift above ``max_drift`` raises TraceDriftError.
    """
    if step <= 0 or t_final < 0:
        raise ValueError("need step > 0 and t_final >= 0")
    L = liouv.superoperator
    n_steps = int(np.ceil(t_final / step))
    h = t_final / n_steps if n_steps else 0.0
    x = vec(np.asarray(rho0, dtype=np.complex128)).copy()
    tr0 = np.trace(rho0)
    for _ in range(n_steps):
        k1 = L @ x
        k2 = L @ (x + 0.5 * h * k1)
        k3 = L @ (x + 0.5 * h * k2)
        k4 = L @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    rho = unvec(x)
    drift = float(abs(np.trace(rho) - tr0))
    if drift > max_drift or not np.all(np.isfinite(x)):
        raise TraceDriftError(f"trace drift {drift:.2e} exceeds {max_drift:.1e}; reduce the step")
    rho = 0.5 * (rho + dagger(rho))
    return rho / np.trace(rho).real, drift


# --- observables --------------------------------------------------------


@dataclass(frozen=True)
class NessObservables:
    vne_entropy: float
    purity_defect: float
    spin_current: np.ndarray  # bonds 1..N-1
    energy_current: np.ndarray  # sites 2..N-1
    transverse_profile: np.ndarray  # f_k, sites 1..N-1
    magnetization_profile: tuple  # BlochVector per site


def von_neumann_entropy(rho: np.ndarray, cutoff: float = TOL.entropy_cutoff) -> float:
    """Entropy in bits; eigenvalues in [-positivity tol, 0) are clamped to zero."""
    w = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    if w[0] < -TOL.positivity:
        raise InvalidDensityMatrix(f"negative eigenvalue {w[0]:.2e}")
    w = w[w > cutoff]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def purity_defect(rho: np.ndarray) -> float:
    """1 - tr(rho^2)."""
    return float(1.0 - np.sum(np.abs(rho) ** 2))


def transverse_profile(rho: np.ndarray) -> np.ndarray:
    """f_{k-1} = tr((sx_k + i sy_k) rho) for sites k = 1..N-1."""
    N = rho.shape[0].bit_length() - 1
    s_plus_2 = pauli("x") + 1j * pauli("y")
    return np.array([expectation(local_product({k: s_plus_2}, N), rho) for k in range(1, N)])


def magnetization_profile(rho: np.ndarray) -> tuple:
    N = rho.shape[0].bit_length() - 1
    out = []
    for k in range(1, N + 1):
        comps = [expectation(local_product({k: pauli(a)}, N), rho).real for a in "xyz"]
        out.append(BlochVector(*comps))
    return tuple(out)


def observables(rho: np.ndarray, spec: ChainSpec) -> NessObservables:
    check_density_matrix(rho)
    N = spec.N
    j = np.array([expectation(spin_current_operator(n, N, spec.J), rho).real for n in range(1, N)])
    je = np.array(
        [expectation(energy_current_operator(n, N, spec.Delta, spec.J), rho).real for n in range(2, N)]
    )
    return NessObservables(
        vne_entropy=von_neumann_entropy(rho),
        purity_defect=purity_defect(rho),
        spin_current=j,
        energy_current=je,
        transverse_profile=transverse_profile(rho),
        magnetization_profile=magnetization_profile(rho),
    )
