"""
Strong-dissipation (Zeno) perturbation theory for the helix-targeting chain.

The dissipated subspace is spanned by the boundary sites 1 and N; the rest of
the chain (sites 2..N-1, dimension d1 = 2^(N-2)) is the "interior". The
Hamiltonian is split as H = sum_jk |e^j><e^k| (x) h^{jk} over a four-vector
boundary basis built around the targeted boundary product state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .model import chain_hamiltonian, helix_state, local_density, psi, psi_perp
from .operators import dagger, embed, hermitian_spectrum, kron_all, pauli

TWO_PI = 2.0 * np.pi


class NotAnEigenstateError(ValueError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


# --- boundary basis -----------------------------------------------------


@dataclass(frozen=True)
class ZenoBasis:
    theta: float
    Phi: float
    vectors: np.ndarray  # rows e0..e3 as 4-vectors on (site 1) (x) (site N)

    def __getitem__(self, j):
        return self.vectors[j]

    @property
    def e0(self):
        return self.vectors[0]

    @property
    def e1(self):
        return self.vectors[1]

    @property
    def e2(self):
        return self.vectors[2]

    @property
    def e3(self):
        return self.vectors[3]


def zeno_basis(theta: float, Phi: float, N: int | None = None) -> ZenoBasis:
    """Orthonormal basis of the two dissipated spins.

    e0 is the targeted boundary product state, e1/e2 the antisymmetric and
    symmetric single-flip combinations, e3 the doubly flipped state. ``N`` is
    accepted for symmetry with the other builders and does not change the kets.
    """
    if N is not None and N < 2:
        raise ValueError("N must be >= 2")
    a, ap = psi(theta, 0.0), psi_perp(theta, 0.0)
    b, bp = psi(theta, Phi), psi_perp(theta, Phi)
    s = 1 / np.sqrt(2)
    vectors = np.array(
        [
            np.kron(a, b),
            s * (np.kron(ap, b) - np.kron(a, bp)),
            s * (np.kron(ap, b) + np.kron(a, bp)),
            np.kron(ap, bp),
        ]
    )
    return ZenoBasis(theta=float(theta), Phi=float(Phi), vectors=vectors)


# --- block decomposition ------------------------------------------------


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: np.ndarray  # shape (4, 4, d1, d1); blocks[j, k] = h^{jk}
    N: int

    @property
    def d1(self) -> int:
        return self.blocks.shape[-1]

    def __getitem__(self, jk):
        return self.blocks[jk]


def _boundary_first(H: np.ndarray):
    """View H as a (4, d1, 4, d1) tensor ordered (sites 1 and N) x (sites 2..N-1)."""
    N = H.shape[0].bit_length() - 1
    perm = [0, N - 1] + list(range(1, N - 1))
    t = H.reshape([2] * (2 * N)).transpose(perm + [N + p for p in perm])
    d1 = 2 ** (N - 2)
    return t.reshape(4, d1, 4, d1), N


def project_blocks(H: np.ndarray, basis: ZenoBasis) -> BlockDecomposition:
    """h^{jk} = <e^j| H |e^k>, a partial matrix element over sites 1 and N."""
    N = H.shape[0].bit_length() - 1
    if N < 3:
        raise ValueError("block decomposition needs an interior, N >= 3")
    T, _ = _boundary_first(H)
    E = basis.vectors
    blocks = np.einsum("ja,aibq,kb->jkiq", E.conj(), T, E)
    return BlockDecomposition(blocks=blocks, N=N)


def reconstruct(decomp: BlockDecomposition, basis: ZenoBasis) -> np.ndarray:
    """Inverse of project_blocks, returned in the ordinary site ordering."""
    N, d1 = decomp.N, decomp.d1
    E = basis.vectors
    T = np.einsum("ja,jkiq,kb->aibq", E, decomp.blocks, E.conj())
    # T is indexed (1, N, 2..N-1) on rows and columns; undo the permutation
    t = T.reshape([2] * (2 * N))
    perm = [0, N - 1] + list(range(1, N - 1))
    inv = np.argsort(perm)
    t = t.transpose(list(inv) + [N + p for p in inv])
    return t.reshape(2**N, 2**N)


def _interior_op(op: np.ndarray, m: int, N: int) -> np.ndarray:
    """Single-site operator on chain site m (2 <= m <= N-1), embedded in the interior."""
    return embed(op, m - 1, N - 2)


def interior_hamiltonian(N: int, Delta: float, J: float = 1.0) -> np.ndarray:
    """H' = sum_{j=2}^{N-2} h_{j,j+1}, acting on sites 2..N-1."""
    return chain_hamiltonian(N - 2, Delta, J)


def c_pp(m, theta, phi, Delta, N, J=1.0):
    """<psi(phi)| h_{m-1,m} |psi(phi)> traced over the neighbour, explicit form."""
    sm, sp_, sz = (_interior_op(pauli(a), m, N) for a in ("minus", "plus", "z"))
    eye = np.eye(2 ** (N - 2))
    return J * (
        np.sin(theta) * (np.exp(1j * phi) * sm + np.exp(-1j * phi) * sp_)
        + Delta * np.cos(theta) * sz
        - Delta * eye
    )


def c_mp(m, theta, phi, Delta, N, J=1.0):
    sm, sp_, sz = (_interior_op(pauli(a), m, N) for a in ("minus", "plus", "z"))
    return J * (
        2 * np.sin(theta / 2) ** 2 * np.exp(-1j * phi) * sp_
        - 2 * np.cos(theta / 2) ** 2 * np.exp(1j * phi) * sm
        + Delta * np.sin(theta) * sz
    )


def c_pm(m, theta, phi, Delta, N, J=1.0):
    return dagger(c_mp(m, theta, phi, Delta, N, J))


def c_mm(m, theta, phi, Delta, N, J=1.0):
    sm, sp_, sz = (_interior_op(pauli(a), m, N) for a in ("minus", "plus", "z"))
    eye = np.eye(2 ** (N - 2))
    return J * (
        -np.sin(theta) * (np.exp(1j * phi) * sm + np.exp(-1j * phi) * sp_)
        - Delta * np.cos(theta) * sz
        - Delta * eye
    )


def c_trace_form(kind: str, m, theta, phi, Delta, N, J=1.0):
    """Bond-trace definition of the C blocks: tr_{m-1}((|a><b|)_{m-1} h_{m-1,m}).

    ``kind`` is "++", "-+", "+-" or "--" (first symbol: ket, second: bra,
    "+" meaning psi and "-" meaning psi_perp). Bond (m-1, m) is oriented with
    the traced site first, as on the left boundary; for the right boundary
    (m = N-1) the traced site N sits on the other side of the bond, which the
    symmetric two-site density makes irrelevant.
    """
    states = {"+": psi(theta, phi), "-": psi_perp(theta, phi)}
    ket, bra = states[kind[0]], states[kind[1]]
    h = local_density(Delta, J).reshape(2, 2, 2, 2)  # (a, b, a', b')
    proj = np.outer(ket, bra.conj())
    single = np.einsum("ca,abcd->bd", proj, h)  # tr_a(proj_a h)
    return _interior_op(single, m, N)


def closed_form_blocks(theta, Phi, Delta, N, J=1.0) -> dict:
    """The h^{jk} blocks available in closed form, keyed by (j, k).

    Includes h^{00}, h^{01}, h^{02}, h^{03}, h^{21}, h^{31}, h^{11} and the
    Hermitian conjugates h^{10}, h^{20}, h^{30}, h^{12}, h^{13}.
    """
    if N < 3:
        raise ValueError("closed forms need N >= 3")
    s = 1 / np.sqrt(2)
    L, R = 2, N - 1
    Hp = interior_hamiltonian(N, Delta, J)
    d1 = 2 ** (N - 2)
    args_L = (L, theta, 0.0, Delta, N, J)
    args_R = (R, theta, Phi, Delta, N, J)
    b = {
        (0, 0): Hp + c_pp(*args_L) + c_pp(*args_R),
        (0, 1): s * (c_mp(*args_L) - c_mp(*args_R)),
        (0, 2): s * (c_mp(*args_L) + c_mp(*args_R)),
        (0, 3): np.zeros((d1, d1), dtype=np.complex128),
        (2, 1): 0.5 * (c_pp(*args_R) - c_mm(*args_R) + c_mm(*args_L) - c_pp(*args_L)),
        (3, 1): s * (-c_pm(*args_L) + c_pm(*args_R)),
        (1, 1): Hp - 2 * J * Delta * np.eye(d1),
    }
    for (j, k) in list(b):
        if j != k:
            b[(k, j)] = dagger(b[(j, k)])
    return b


# --- purity criterion ---------------------------------------------------


def interior_target(N: int, theta: float, varphi: float) -> np.ndarray:
    """Helix factors on sites 2..N-1."""
    if N < 3:
        raise ValueError("interior target needs N >= 3")
    return kron_all([psi(theta, (j - 1) * varphi) for j in range(2, N)])


def _with_boundary(boundary4: np.ndarray, interior: np.ndarray, N: int) -> np.ndarray:
    """Ket on the full chain from a (site 1 (x) site N) ket and an interior ket."""
    t = np.kron(boundary4, interior).reshape([2] * N)
    perm = [0, N - 1] + list(range(1, N - 1))
    return t.transpose(np.argsort(perm)).reshape(-1)


@dataclass(frozen=True)
class PurityCondition:
    holds: bool
    lam: float
    kappa: complex
    residual: float
    trivial: bool  # kappa == 0: the helix is an eigenstate of H


def purity_condition(theta, varphi, N, Delta, J=1.0, tol=TOL.eigencheck) -> PurityCondition:
    """Test H|Psi> = lambda|Psi> + kappa |e1>(x)|target> for the helix with twist ``varphi``."""
    Phi = float(np.mod((N - 1) * varphi, TWO_PI))
    basis = zeno_basis(theta, Phi)
    target = interior_target(N, theta, varphi)
    Psi = _with_boundary(basis.e0, target, N)
    flip = _with_boundary(basis.e1, target, N)
    HPsi = chain_hamiltonian(N, Delta, J) @ Psi
    lam = np.vdot(Psi, HPsi)
    kappa = np.vdot(flip, HPsi)
    rest = HPsi - lam * Psi - kappa * flip
    residual = float(np.linalg.norm(rest))
    holds = residual <= tol and abs(lam.imag) <= tol
    return PurityCondition(
        holds=bool(holds),
        lam=float(lam.real),
        kappa=complex(kappa),
        residual=residual,
        trivial=bool(abs(kappa) <= tol),
    )


def eigen_residual(decomp: BlockDecomposition, target: np.ndarray):
    h00 = decomp[0, 0]
    lam = np.vdot(target, h00 @ target) / np.vdot(target, target)
    res = float(np.linalg.norm(h00 @ target - lam * target))
    return float(lam.real), res


def principal_eigencheck(decomp: BlockDecomposition, target: np.ndarray, tol=TOL.eigencheck) -> float:
    """Rayleigh quotient of h^{00} on the interior target; raises if it is not an eigenvector."""
    lam, res = eigen_residual(decomp, target)
    if res > tol:
        raise NotAnEigenstateError(f"target is not an eigenvector of h00 (residual {res:.2e})", res)
    return lam


# --- characteristic dissipation -----------------------------------------


@dataclass(frozen=True)
class CharacteristicDissipation:
    theta: float
    varphi: float
    N: int
    lambda0: float
    kappa: complex
    spectrum: np.ndarray  # lambda_alpha, alpha = 1..d1-1
    K: np.ndarray
    R: np.ndarray
    F: np.ndarray = field(repr=False)
    Gamma_ch_sq: float
    Gamma_ch: float
    divergence_reason: str  # none | K_singular | Lambda_coupled_degeneracy
    k_rcond: float
    degenerate_alphas: tuple = ()

    @property
    def finite(self) -> bool:
        return self.divergence_reason == "none"


@dataclass(frozen=True)
class _EigenFrame:
    decomp: BlockDecomposition
    basis: np.ndarray  # columns: target, then h00 eigenvectors alpha = 1..d1-1
    lambda0: float
    spectrum: np.ndarray
    kappa: complex


def _eigen_frame(theta, varphi, N, J=1.0, Delta=None) -> _EigenFrame:
    if N < 3:
        raise ValueError("characteristic dissipation needs N >= 3")
    if Delta is None:
        Delta = np.cos(varphi)
    Phi = float(np.mod((N - 1) * varphi, TWO_PI))
    basis = zeno_basis(theta, Phi)
    decomp = project_blocks(chain_hamiltonian(N, Delta, J), basis)
    target = interior_target(N, theta, varphi)
    lambda0 = principal_eigencheck(decomp, target)
    kappa = complex(np.vdot(target, decomp[1, 0] @ target))
    # orthonormal complement of the target, then diagonalize h00 on it
    d1 = decomp.d1
    q, _ = np.linalg.qr(np.column_stack([target, np.eye(d1)]))
    comp = q[:, 1:d1]
    h00c = dagger(comp) @ decomp[0, 0] @ comp
    spectrum, vecs = hermitian_spectrum(h00c, tol=1e-9)
    frame = np.column_stack([target, comp @ vecs])
    return _EigenFrame(decomp, frame, lambda0, spectrum, kappa)


def _in_frame(frame: _EigenFrame, j, k):
    B = frame.basis
    return dagger(B) @ frame.decomp[j, k] @ B


def k_matrix(frame: _EigenFrame) -> np.ndarray:
    d1 = frame.basis.shape[0]
    K = np.zeros((d1 - 1, d1 - 1))
    for k in range(1, 4):
        hk0 = _in_frame(frame, k, 0)
        K += np.abs(hk0[1:, 1:]) ** 2
        K -= np.diag(np.real(np.diag(dagger(hk0) @ hk0))[1:])
    return K


def k_scale(frame: _EigenFrame) -> float:
    """Natural magnitude of K: sum_k ||h^{k0}||^2, the size of its building blocks.

    Singularity is judged against this rather than against ||K|| alone so a
    1x1 K (N = 3) that is exactly zero is still recognised.
    """
    return float(sum(np.linalg.norm(frame.decomp[k, 0], 2) ** 2 for k in range(1, 4)))


def _degenerate_coupling(frame: _EigenFrame, tol=TOL):
    """Split near-degenerate directions of h00 into coupled / uncoupled to h01|0>."""
    gaps = frame.spectrum - frame.lambda0
    deg = np.flatnonzero(np.abs(gaps) < tol.degeneracy_gap)
    if deg.size == 0:
        return deg, 0.0
    h01_0 = _in_frame(frame, 0, 1)[1:, 0]
    # basis-independent: norm of the projection onto the degenerate subspace
    coupling = float(np.linalg.norm(h01_0[deg]))
    return deg, coupling


def characteristic_dissipation(theta, varphi, N, J=1.0, tol=TOL) -> CharacteristicDissipation:
    """Gamma_ch for the helix with twist ``varphi`` at the matching anisotropy cos(varphi)."""
    frame = _eigen_frame(theta, varphi, N, J)
    d1 = frame.basis.shape[0]
    K = k_matrix(frame)
    deg, coupling = _degenerate_coupling(frame, tol)

    gaps = frame.spectrum - frame.lambda0
    inv = np.zeros(d1, dtype=np.complex128)
    mask = np.ones(d1 - 1, dtype=bool)
    mask[deg] = False
    inv[1:][mask] = 1.0 / gaps[mask]
    Lam = np.diag(inv)

    h01 = _in_frame(frame, 0, 1)
    F = np.zeros((d1, d1), dtype=np.complex128)
    for k in range(1, 4):
        hk0 = _in_frame(frame, k, 0)
        F += _in_frame(frame, k, 1) + (Lam @ h01) @ hk0 - hk0 @ (Lam @ h01)
    R = np.abs(F[1:, 0]) ** 2

    sv = np.linalg.svd(K, compute_uv=False)
    scale = max(sv[0], k_scale(frame))
    rcond = float(sv[-1] / scale) if scale > 0 else 0.0

    reason = "none"
    if rcond < tol.k_rcond:
        reason = "K_singular"
    elif deg.size and coupling >= tol.degeneracy_coupling:
        reason = "Lambda_coupled_degeneracy"

    if reason == "none":
        s = np.sum(np.linalg.solve(K, R))
        # K generates a leaky Markov process (K^{-1} is entrywise non-positive),
        # so the population sum is -s.
        g2 = -8 * abs(frame.kappa) ** 2 * s
        g2 = float(np.real(g2))
        if g2 < 0:
            # only possible through round-off when Gamma_ch vanishes
            g2 = max(g2, 0.0) if abs(g2) < 1e-12 else g2
        gamma = float(np.sqrt(g2)) if g2 >= 0 else float("nan")
    else:
        g2 = gamma = float("inf")

    return CharacteristicDissipation(
        theta=float(theta),
        varphi=float(varphi),
        N=N,
        lambda0=frame.lambda0,
        kappa=frame.kappa,
        spectrum=frame.spectrum,
        K=K,
        R=R,
        F=F,
        Gamma_ch_sq=g2,
        Gamma_ch=gamma,
        divergence_reason=reason,
        k_rcond=rcond,
        degenerate_alphas=tuple(int(a) + 1 for a in deg),
    )


def gamma_ch(theta, Phi, m, N, J=1.0) -> CharacteristicDissipation:
    """Characteristic dissipation of the helix with winding ``m`` and boundary twist ``Phi``."""
    varphi = (Phi + TWO_PI * m) / (N - 1)
    return characteristic_dissipation(theta, varphi, N, J)


@dataclass(frozen=True)
class NessExpansionProbe:
    M1: np.ndarray  # M^(1)_{alpha 0}, alpha = 1..d1-1
    degenerate_alphas: tuple


def first_order_probe(theta, varphi, N, J=1.0, tol=TOL) -> NessExpansionProbe:
    """First-order coefficients (lambda_a - lambda_0) M_a0 = 2 i kappa <a|h01|0>.

    Degenerate directions get 0 when uncoupled and inf when coupled.
    """
    frame = _eigen_frame(theta, varphi, N, J)
    rhs = 2j * frame.kappa * _in_frame(frame, 0, 1)[1:, 0]
    gaps = frame.spectrum - frame.lambda0
    M1 = np.empty_like(rhs)
    deg = np.abs(gaps) < tol.degeneracy_gap
    M1[~deg] = rhs[~deg] / gaps[~deg]
    M1[deg] = np.where(np.abs(rhs[deg]) >= tol.degeneracy_coupling, np.inf, 0.0)
    return NessExpansionProbe(M1=M1, degenerate_alphas=tuple(int(a) + 1 for a in np.flatnonzero(deg)))


def purity_prediction(gamma_ch: float, Gamma: float) -> float:
    """Leading-order purity defect (Gamma_ch / Gamma)^2."""
    if Gamma <= 0:
        raise ValueError("Gamma must be positive")
    return (gamma_ch / Gamma) ** 2


# --- three-site closed forms --------------------------------------------


def k_n3_closed(theta, varphi):
    return -2 * (2 * np.cos(2 * varphi) * np.sin(theta) ** 2 + np.cos(2 * theta) + 3)


def gamma_ch_n3_closed(theta, varphi):
    """Gamma_ch for N = 3 (J = 1): sqrt(8) sin^2(theta) |sin(varphi) tan(varphi)|."""
    return np.sqrt(8.0) * np.sin(theta) ** 2 * np.abs(np.sin(varphi) * np.tan(varphi))


def c_ratio(N, varphi, theta, J=1.0) -> float:
    """Gamma_ch(N, varphi, theta) / Gamma_ch(N, varphi, pi/2)."""
    num = characteristic_dissipation(theta, varphi, N, J)
    den = characteristic_dissipation(np.pi / 2, varphi, N, J)
    if not (num.finite and den.finite):
        return float("nan")
    return num.Gamma_ch / den.Gamma_ch


def helix_projector(N, theta, varphi):
    v = helix_state(N, theta, varphi)
    return np.outer(v, v.conj())
