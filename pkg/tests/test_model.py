import numpy as np
import pytest

from spinhelix.model import (
    ChainSpec,
    SpinHelixSpec,
    bloch_vector,
    chain_hamiltonian,
    critical_anisotropy,
    dark_state,
    energy_current_operator,
    helix_state,
    lindblad_operator,
    local_density,
    polarizer,
    psi,
    psi_perp,
    shs_state,
    spin_current_operator,
    winding_number,
    xxz_hamiltonian,
)
from spinhelix.operators import embed, expectation, kron_all, local_product, pauli

UP, DOWN = np.array([1, 0]), np.array([0, 1])


def comm(a, b):
    return a @ b - b @ a


# --- specs --------------------------------------------------------------


def test_chain_spec_validation():
    with pytest.raises(ValueError):
        ChainSpec(N=1, Delta=0.0)
    with pytest.raises(ValueError):
        ChainSpec(N=3, Delta=0.0, Gamma=0.0)
    with pytest.raises(ValueError):
        ChainSpec(N=3, Delta=np.nan)


def test_chain_spec_canonical_angles():
    s = ChainSpec(N=3, Delta=0.1, theta_L=-0.3, phi_L=-1.0, theta_R=2 * np.pi + 0.5, phi_R=7.0)
    assert 0 <= s.theta_L <= np.pi and 0 <= s.phi_L < 2 * np.pi
    # a reflected polar angle describes the same Bloch direction
    assert np.allclose(bloch_vector(s.theta_L, s.phi_L), bloch_vector(-0.3, -1.0))
    assert np.allclose(bloch_vector(s.theta_R, s.phi_R), bloch_vector(0.5, 7.0))


def test_helix_spec_validation():
    with pytest.raises(ValueError):
        SpinHelixSpec(N=4, theta=1.0, Phi=0.1, m=3)
    with pytest.raises(ValueError):
        SpinHelixSpec(N=4, theta=1.0, Phi=2 * np.pi)
    assert np.isclose(SpinHelixSpec(N=5, theta=1.0, Phi=0.4, m=2).varphi, (0.4 + 4 * np.pi) / 4)


def test_helix_classmethod_tunes_delta():
    s = ChainSpec.helix(N=5, theta=1.0, Phi=0.3, m=1, Gamma=2.0)
    assert np.isclose(s.Delta, np.cos((0.3 + 2 * np.pi) / 4))
    assert np.isclose(s.Phi, 0.3)


# --- Hamiltonian --------------------------------------------------------


@pytest.mark.parametrize("Delta", [-1.3, 0.0, 0.7])
def test_two_site_hamiltonian_action(Delta):
    H = xxz_hamiltonian(ChainSpec(N=2, Delta=Delta))
    assert np.allclose(H @ np.kron(UP, UP), 0)
    ud, du = np.kron(UP, DOWN), np.kron(DOWN, UP)
    assert np.allclose(H @ ud, 2 * du - 2 * Delta * ud)


def test_hamiltonian_is_hermitian(rng):
    for _ in range(5):
        s = ChainSpec(N=int(rng.integers(2, 6)), Delta=rng.normal(), J=rng.uniform(0.2, 2))
        H = xxz_hamiltonian(s)
        assert np.array_equal(H, H.conj().T)


def test_local_density_basics():
    sx, sy = pauli("x"), pauli("y")
    assert np.allclose(local_density(0.0, 1.3), 1.3 * (np.kron(sx, sx) + np.kron(sy, sy)))
    for D, J in [(0.4, 1.0), (-2.0, 0.5)]:
        assert np.isclose(np.trace(local_density(D, J)), -4 * J * D)


def test_local_density_helix_identity(rng):
    # h(cos phi) |psi(a)>|psi(a+phi)> = -iJ sin(t) sin(phi) (|perp, psi> - |psi, perp>)
    for _ in range(10):
        t, a, ph, J = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0.5, 2)
        lhs = local_density(np.cos(ph), J) @ np.kron(psi(t, a), psi(t, a + ph))
        rhs = (
            -1j
            * J
            * np.sin(t)
            * np.sin(ph)
            * (np.kron(psi_perp(t, a), psi(t, a + ph)) - np.kron(psi(t, a), psi_perp(t, a + ph)))
        )
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_chain_hamiltonian_single_site_is_zero():
    assert np.array_equal(chain_hamiltonian(1, 0.5), np.zeros((2, 2)))


# --- dissipation --------------------------------------------------------


def test_polarizer_special_cases():
    G = 2.5
    assert np.allclose(polarizer(0.0, 0.0, G), np.sqrt(G) * pauli("plus"))
    assert np.allclose(polarizer(np.pi, 0.0, G), -np.sqrt(G) * pauli("minus"))


def test_dark_states(rng):
    for _ in range(10):
        s = ChainSpec(
            N=int(rng.integers(2, 5)),
            Delta=0.2,
            Gamma=rng.uniform(0.1, 10),
            theta_L=rng.uniform(0, np.pi),
            phi_L=rng.uniform(0, 2 * np.pi),
            theta_R=rng.uniform(0, np.pi),
            phi_R=rng.uniform(0, 2 * np.pi),
        )
        assert np.allclose(polarizer(s.theta_L, s.phi_L, s.Gamma) @ dark_state("left", s), 0, atol=1e-12)
        assert np.allclose(polarizer(s.theta_R, s.phi_R, s.Gamma) @ dark_state("right", s), 0, atol=1e-12)
        # embedded: left operator kills any state whose site 1 is the dark state
        rest = np.ones(2 ** (s.N - 1)) / np.sqrt(2 ** (s.N - 1))
        assert np.allclose(lindblad_operator("left", s) @ np.kron(dark_state("left", s), rest), 0, atol=1e-12)
        assert np.allclose(lindblad_operator("right", s) @ np.kron(rest, dark_state("right", s)), 0, atol=1e-12)


def test_lindblad_operator_bad_side():
    with pytest.raises(ValueError):
        lindblad_operator("middle", ChainSpec(N=3, Delta=0.0))


# --- helix states -------------------------------------------------------


def test_shs_uniform_x():
    v = shs_state(SpinHelixSpec(N=4, theta=np.pi / 2, Phi=0.0, m=0))
    plus_x = np.array([1, 1]) / np.sqrt(2)
    assert np.allclose(v, kron_all([plus_x] * 4))


def test_shs_bloch_profile_and_norm(rng):
    N = 5
    for m in range(N - 1):
        spec = SpinHelixSpec(N=N, theta=rng.uniform(0, np.pi), Phi=rng.uniform(0, 2 * np.pi), m=m)
        v = shs_state(spec)
        assert np.isclose(np.vdot(v, v).real, 1, atol=1e-12)
        rho = np.outer(v, v.conj())
        for n in range(1, N + 1):
            got = [expectation(local_product({n: pauli(a)}, N), rho).real for a in "xyz"]
            assert np.allclose(got, bloch_vector(spec.theta, (n - 1) * spec.varphi), atol=1e-12)


def test_bloch_vector_norm():
    assert np.isclose(bloch_vector(0.3, 1.9).norm, 1.0)


def _boundary_flip_states(N, theta, varphi):
    sites = [psi(theta, (j - 1) * varphi) for j in range(1, N + 1)]
    left = kron_all([psi_perp(theta, 0.0)] + sites[1:])
    right = kron_all(sites[:-1] + [psi_perp(theta, (N - 1) * varphi)])
    return left, right


@pytest.mark.parametrize("N", [3, 4, 5])
def test_helix_hamiltonian_action_is_boundary_only(N, rng):
    for m in range(N - 1):
        theta, Phi = rng.uniform(0.1, 3.0), rng.uniform(0, 2 * np.pi)
        spec = SpinHelixSpec(N=N, theta=theta, Phi=Phi, m=m)
        v = shs_state(spec)
        H = chain_hamiltonian(N, np.cos(spec.varphi))
        w = H @ v
        basis = np.column_stack([v, *_boundary_flip_states(N, theta, spec.varphi)])
        q, _ = np.linalg.qr(basis)
        remainder = w - q @ (q.conj().T @ w)
        assert np.linalg.norm(remainder) <= 1e-10
        assert abs(np.vdot(v, w)) <= 1e-12  # lambda = 0


def test_winding_number_recovery():
    for N in (3, 5, 6):
        for Phi in (0.1, 1.0, 3.0, 6.2):
            for m in range(N - 1):
                varphi = (Phi + 2 * np.pi * m) / (N - 1)
                assert winding_number(varphi, N) == m


def test_critical_anisotropy_values():
    assert np.isclose(critical_anisotropy(0, np.pi / 10, 6), np.cos(np.pi / 50))
    assert critical_anisotropy(0, 0.0, 4) == 1.0


def test_critical_anisotropy_ordering_n6():
    # Delta_cr(m) from the closed formula, left to right along the Delta axis.
    # The figure caption lists m = 2,3,4,1,0, but cos(21 pi/50) = 0.249 lies
    # left of cos(81 pi/50) = 0.368, so the formula orders m = 1 before m = 4.
    values = {m: critical_anisotropy(m, np.pi / 10, 6) for m in range(5)}
    assert sorted(values, key=values.get) == [2, 3, 1, 4, 0]
    assert np.isclose(values[1], np.cos(21 * np.pi / 50))
    assert np.isclose(values[4], np.cos(81 * np.pi / 50))


# --- currents -----------------------------------------------------------


def test_spin_current_vanishes_on_z_states():
    N = 3
    for bits in [(UP, UP, DOWN), (DOWN, UP, DOWN)]:
        v = kron_all(list(bits))
        for n in (1, 2):
            assert abs(np.vdot(v, spin_current_operator(n, N) @ v)) < 1e-15


def test_spin_current_antisymmetric_under_swap():
    from spinhelix.model import _current

    assert np.allclose(_current(1, 2, 3, 1.0), -_current(2, 1, 3, 1.0))


def test_spin_current_bond_range():
    with pytest.raises(IndexError):
        spin_current_operator(0, 4)
    with pytest.raises(IndexError):
        spin_current_operator(4, 4)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_shs_spin_current(m, rng):
    N, J = 4, 1.4
    spec = SpinHelixSpec(N=N, theta=np.pi / 2, Phi=rng.uniform(0, 2 * np.pi), m=m)
    v = shs_state(spec)
    for n in range(1, N):
        j = np.vdot(v, spin_current_operator(n, N, J) @ v).real
        assert np.isclose(j, J * np.sin(spec.varphi), atol=1e-12)
    # off the equator the product-state expectation carries sin^2(theta)
    spec = SpinHelixSpec(N=N, theta=0.7, Phi=spec.Phi, m=m)
    v = shs_state(spec)
    j = np.vdot(v, spin_current_operator(2, N, J) @ v).real
    assert np.isclose(j, J * np.sin(0.7) ** 2 * np.sin(spec.varphi), atol=1e-12)


@pytest.mark.parametrize("Delta,J", [(0.3, 1.0), (-1.1, 0.6)])
def test_spin_continuity(Delta, J):
    # i[H, sz_n] = 2 (j_{n-1,n} - j_{n,n+1}) for the current operator as defined
    N = 4
    H = chain_hamiltonian(N, Delta, J)
    for n in (2, 3):
        lhs = 1j * comm(H, local_product({n: pauli("z")}, N))
        rhs = spin_current_operator(n - 1, N, J) - spin_current_operator(n, N, J)
        assert np.allclose(lhs, 2 * rhs, atol=1e-12)


@pytest.mark.parametrize("Delta,J", [(0.3, 1.0), (-0.6, 1.7), (1.2, 0.5)])
def test_energy_continuity(Delta, J):
    # i[H, h_{n,n+1}] = 2J (JE_n - JE_{n+1}); the extra 2J comes from the two
    # commutator legs and the single power of J carried by the current operator
    N = 5
    H = chain_hamiltonian(N, Delta, J)
    for n in (2, 3):
        h = embed(local_density(Delta, J), n, N)
        lhs = 1j * comm(H, h)
        rhs = energy_current_operator(n, N, Delta, J) - energy_current_operator(n + 1, N, Delta, J)
        assert np.allclose(lhs, 2 * J * rhs, atol=1e-12)


def test_energy_current_hermitian_and_range():
    N = 5
    for n in range(2, N):
        E = energy_current_operator(n, N, 0.4)
        assert np.allclose(E, E.conj().T)
    for bad in (1, N):
        with pytest.raises(IndexError):
            energy_current_operator(bad, N, 0.4)


def test_energy_current_zero_on_shs(rng):
    for N in (4, 5):
        for m in range(N - 1):
            spec = SpinHelixSpec(N=N, theta=rng.uniform(0, np.pi), Phi=rng.uniform(0, 2 * np.pi), m=m)
            v = shs_state(spec)
            for n in range(2, N):
                e = np.vdot(v, energy_current_operator(n, N, np.cos(spec.varphi)) @ v)
                assert abs(e) <= 1e-12


def test_energy_current_zero_on_z_polarized():
    N = 4
    v = kron_all([UP, DOWN, DOWN, UP])
    for n in (2, 3):
        assert abs(np.vdot(v, energy_current_operator(n, N, 0.0) @ v)) < 1e-15


def test_helix_state_matches_site_factors():
    N, t, ph = 3, 0.8, 0.5
    v = helix_state(N, t, ph)
    assert np.allclose(v, kron_all([psi(t, 0), psi(t, ph), psi(t, 2 * ph)]))
    f = psi(t, ph)
    assert np.allclose(f, [np.cos(t / 2) * np.exp(-0.5j * ph), np.sin(t / 2) * np.exp(0.5j * ph)])
