import dataclasses

import numpy as np
import pytest

from spinhelix.model import ChainSpec, SpinHelixSpec, shs_state
from spinhelix.ness import (
    DegenerateKernelError,
    InvalidDensityMatrix,
    NessSolverError,
    TraceDriftError,
    build_liouvillian,
    check_density_matrix,
    evolve,
    lindblad_rhs,
    observables,
    purity_defect,
    solve_ness,
    trace_distance,
    unvec,
    vec,
    von_neumann_entropy,
)
from spinhelix.zeno import gamma_ch_n3_closed

from _helpers import random_density


def random_spec(rng, N):
    return ChainSpec(
        N=N,
        Delta=rng.uniform(-1.5, 1.5),
        Gamma=rng.uniform(0.5, 3.0),
        theta_L=rng.uniform(0, np.pi),
        phi_L=rng.uniform(0, 2 * np.pi),
        theta_R=rng.uniform(0, np.pi),
        phi_R=rng.uniform(0, 2 * np.pi),
        J=rng.uniform(0.5, 1.5),
    )


def unitary_part(spec):
    """Liouvillian with the dissipators removed, by linear extrapolation in Gamma."""
    l1 = build_liouvillian(dataclasses.replace(spec, Gamma=1.0))
    l2 = build_liouvillian(dataclasses.replace(spec, Gamma=2.0))
    return dataclasses.replace(l1, superoperator=(2 * l1.superoperator - l2.superoperator).tocsr())


def test_vec_is_column_stacking():
    a = np.arange(4).reshape(2, 2)
    assert np.array_equal(vec(a), [0, 2, 1, 3])
    assert np.array_equal(unvec(vec(a)), a)


def test_liouvillian_matches_dense_rhs(rng):
    spec = random_spec(rng, 3)
    liouv = build_liouvillian(spec)
    assert len(liouv.jump_operators) == 2
    for _ in range(5):
        rho = random_density(rng, 3)
        direct = lindblad_rhs(liouv.hamiltonian, liouv.jump_operators, rho)
        assert np.max(np.abs(liouv.apply(rho) - direct)) <= 1e-10


def test_liouvillian_trace_preserving(rng):
    liouv = build_liouvillian(random_spec(rng, 4))
    vid = vec(np.eye(16))
    assert np.max(np.abs(liouv.superoperator.conj().T @ vid)) <= 1e-10


def test_unitary_part_annihilates_identity(rng):
    lu = unitary_part(random_spec(rng, 3))
    assert np.max(np.abs(lu.superoperator @ vec(np.eye(8) / 8))) <= 1e-12


def test_build_liouvillian_size_cap():
    with pytest.raises(MemoryError):
        build_liouvillian(ChainSpec(N=8, Delta=0.0))


def test_aligned_baths_give_pure_up_state():
    for Delta, Gamma in [(0.3, 1.0), (-2.0, 7.0)]:
        spec = ChainSpec(N=2, Delta=Delta, Gamma=Gamma, theta_L=0, theta_R=0)
        res = solve_ness(build_liouvillian(spec))
        up = np.zeros((4, 4))
        up[0, 0] = 1
        assert np.allclose(res.rho, up, atol=1e-12)


@pytest.mark.parametrize("method", ["direct", "inverse_iteration", "null_space"])
def test_methods_agree(method, rng):
    spec = random_spec(rng, 3)
    ref = solve_ness(build_liouvillian(spec)).rho
    res = solve_ness(build_liouvillian(spec), method=method)
    assert res.method == method
    assert res.residual <= 1e-10
    assert trace_distance(res.rho, ref) <= 1e-9


def test_solve_ness_argument_errors(rng):
    liouv = build_liouvillian(random_spec(rng, 2))
    with pytest.raises(ValueError):
        solve_ness(liouv, tol=0.0)
    with pytest.raises(ValueError):
        solve_ness(liouv, method="magic")
    with pytest.raises(ValueError):
        solve_ness(build_liouvillian(random_spec(rng, 5)), method="null_space")


def test_degenerate_kernel_is_reported(rng):
    # without dissipation every function of H is stationary
    lu = unitary_part(random_spec(rng, 3))
    with pytest.raises(DegenerateKernelError) as info:
        solve_ness(lu, method="null_space")
    assert info.value.multiplicity > 1
    with pytest.raises(NessSolverError):
        solve_ness(lu)


def test_zeno_purity_n3():
    # epsilon ~ Gamma_ch^2 / Gamma^2 with the closed-form N = 3 Gamma_ch
    theta, varphi, Gamma = np.pi / 2, 0.3, 1e3
    spec = ChainSpec.helix(N=3, theta=theta, Phi=2 * varphi, m=0, Gamma=Gamma)
    eps = purity_defect(solve_ness(build_liouvillian(spec), extended=True).rho)
    predicted = gamma_ch_n3_closed(theta, varphi) ** 2 / Gamma**2
    assert abs(eps / predicted - 1) <= 0.2


def _slowest_rate(liouv):
    w = np.linalg.eigvals(liouv.superoperator.toarray())
    re = -w.real
    return re[re > 1e-9].min(), np.abs(w).max()


def test_evolve_converges_to_ness(rng):
    spec = ChainSpec(N=3, Delta=0.4, Gamma=1.5, theta_L=0.3, theta_R=2.0, phi_R=1.0)
    liouv = build_liouvillian(spec)
    gap, wmax = _slowest_rate(liouv)
    rho, drift = evolve(liouv, np.eye(8) / 8, t_final=30 / gap, step=1.0 / wmax)
    assert drift <= 1e-9
    assert trace_distance(rho, solve_ness(liouv).rho) <= 1e-6


def test_evolve_stays_physical(rng):
    N = 3
    liouv = build_liouvillian(random_spec(rng, N))
    rho = random_density(rng, N)
    for _ in range(5):
        rho, _ = evolve(liouv, rho, t_final=0.5, step=0.02)
        check_density_matrix(rho)
        p = 1 - purity_defect(rho)
        assert 2.0**-N - 1e-12 <= p <= 1 + 1e-12


def test_evolve_unitary_keeps_eigenprojector(rng):
    lu = unitary_part(random_spec(rng, 3))
    w, V = np.linalg.eigh(lu.hamiltonian)
    P = np.outer(V[:, 2], V[:, 2].conj())
    rho, _ = evolve(lu, P, t_final=2.0, step=0.01)
    assert np.allclose(rho, P, atol=1e-10)


def test_evolve_rejects_large_step(rng):
    liouv = build_liouvillian(ChainSpec(N=3, Delta=0.5, Gamma=50.0))
    with pytest.raises(TraceDriftError):
        evolve(liouv, np.eye(8) / 8, t_final=5.0, step=1.0)
    with pytest.raises(ValueError):
        evolve(liouv, np.eye(8) / 8, t_final=1.0, step=0.0)


def test_observables_shs():
    for N, m in [(4, 1), (5, 3)]:
        spec = SpinHelixSpec(N=N, theta=1.1, Phi=0.4, m=m)
        v = shs_state(spec)
        rho = np.outer(v, v.conj())
        chain = ChainSpec.helix(N=N, theta=1.1, Phi=0.4, m=m, Gamma=1.0)
        obs = observables(rho, chain)
        assert obs.vne_entropy <= 1e-10
        assert abs(obs.purity_defect) <= 1e-12
        assert np.all(np.abs(obs.energy_current) <= 1e-10)
        assert obs.transverse_profile.shape == (N - 1,)
        assert len(obs.magnetization_profile) == N


def test_observables_maximally_mixed():
    obs = observables(np.eye(4) / 4, ChainSpec(N=2, Delta=0.0))
    assert np.isclose(obs.vne_entropy, 2.0)
    assert np.isclose(obs.purity_defect, 0.75)
    assert obs.energy_current.size == 0


def test_ness_current_uniform(rng):
    for _ in range(3):
        spec = random_spec(rng, 4)
        obs = observables(solve_ness(build_liouvillian(spec)).rho, spec)
        assert np.ptp(obs.spin_current) <= 1e-8
        assert 0 <= obs.purity_defect <= 1 - 2.0**-4
        assert obs.vne_entropy >= 0


def test_invalid_density_matrices():
    with pytest.raises(InvalidDensityMatrix):
        check_density_matrix(np.diag([1.0, 0.5]))
    with pytest.raises(InvalidDensityMatrix):
        check_density_matrix(np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(InvalidDensityMatrix):
        check_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidDensityMatrix):
        von_neumann_entropy(np.diag([1.5, -0.5]))


def test_entropy_clamps_tiny_negative():
    assert von_neumann_entropy(np.diag([1.0 + 1e-10, -1e-10])) == 0.0
