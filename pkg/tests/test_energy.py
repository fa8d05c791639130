import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import rand_F
from photomech import energy, kinematics
from photomech.energy import LoadData, MaterialParams
from photomech.errors import NonPositiveJacobian

seeds = st.integers(0, 2**32 - 1)
I = kinematics.build_kinematics(np.eye(3))


def params(rng, **kw):
    base = dict(eps0=rng.uniform(0.5, 2), omega0=rng.uniform(0.1, 2, 2), gamma0=rng.uniform(0, 2),
                rho_tron=rng.uniform(0.1, 2), rho_mech=rng.uniform(0.1, 2), mu=rng.uniform(0.1, 2),
                lam=rng.uniform(0.1, 2), a=rng.uniform(0, 2, 2), beta=rng.uniform(0, 2, 2),
                kappa=rng.uniform(0, 2, 2))
    base.update(kw)
    return MaterialParams(**base)


def test_e_m_examples():
    p = MaterialParams()
    assert energy.e_m(np.zeros(3), I, p) == 0.0
    assert energy.e_m([1.0, 0, 0], I, p) == -0.5


def test_c_m_examples():
    p = MaterialParams(omega0=(1.0, 0.0))
    assert energy.c_m(np.zeros((2, 3)), [1.0, 2, 3], I, p) == 0.0
    ys = np.array([[1.0, 0, 0], [5.0, 5, 5]])
    assert energy.c_m(ys, [2.0, 0, 0], I, p) == -2.0


@given(seeds)
def test_electric_densities_against_spatial_forms(seed):
    rng = np.random.default_rng(seed)
    p = params(rng)
    kin = kinematics.build_kinematics(rand_F(rng))
    E = rng.standard_normal(3)
    ys = rng.standard_normal((2, 3))
    f = np.linalg.inv(kin.F)
    e = E @ f
    em = energy.e_m(E, kin, p)
    assert em == pytest.approx(-0.5 * kin.J * p.eps0 * e @ e, rel=1e-12)
    assert em == pytest.approx(-0.5 * p.eps0 * E @ f @ (kin.J * f.T) @ E, rel=1e-12)
    assert em <= 0.0
    cm = energy.c_m(ys, E, kin, p)
    assert cm == pytest.approx(-kin.J * sum(p.omega0[s] * ys[s] @ e for s in range(2)), rel=1e-10,
                               abs=1e-12)
    # material = J * spatial density
    e_s = -0.5 * p.eps0 * e @ e
    assert em == pytest.approx(kin.J * e_s, rel=1e-12)


def test_w_m_examples():
    p0 = MaterialParams(mu=0.0, lam=0.0, a=(0, 0), beta=(0, 0), kappa=(0, 0))
    assert energy.w_m(np.zeros((2, 3)), np.zeros((2, 3, 3)), I, MaterialParams()) == 0.0
    p = MaterialParams(mu=1.0, lam=0.0, a=(0, 0), beta=(0, 0), kappa=(0, 0))
    kin = kinematics.build_kinematics(np.diag([2.0, 1.0, 1.0]))
    w = energy.w_m(np.zeros((2, 3)), np.zeros((2, 3, 3)), kin, p)
    assert w == pytest.approx(0.5 * (6 - 3 - 2 * np.log(2)), rel=1e-14)
    pk = MaterialParams(mu=0.0, lam=0.0, a=(0, 0), beta=(0, 0), kappa=(2.0, 0.0))
    Fs = np.zeros((2, 3, 3))
    Fs[0] = np.outer([1.0, 0, 0], [1.0, 0, 0])
    assert energy.w_gradient(Fs, pk) == 1.0
    assert energy.w_m(np.zeros((2, 3)), Fs, I, pk) == 1.0
    assert energy.w_m(np.zeros((2, 3)), Fs, I, p0) == 0.0


def test_w_m_rejects_inverted():
    kin = kinematics.Kinematics(F=np.diag([-1.0, 1, 1]), J=-1.0, K=np.eye(3), f=np.eye(3),
                                k=np.eye(3), j=-1.0)
    with pytest.raises(NonPositiveJacobian):
        energy.w_m(np.zeros((2, 3)), np.zeros((2, 3, 3)), kin, MaterialParams())


@given(seeds)
def test_w_local_explicit_formula(seed):
    rng = np.random.default_rng(seed)
    p = params(rng)
    F = rand_F(rng)
    kin = kinematics.build_kinematics(F)
    ys = rng.standard_normal((2, 3))
    J = np.linalg.det(F)
    ref = (p.mu / 2 * (np.trace(F.T @ F) - 3 - 2 * np.log(J)) + p.lam / 2 * np.log(J) ** 2
           + sum(p.a[s] / 2 * ys[s] @ ys[s] + p.beta[s] / 2 * (F @ ys[s]) @ (F @ ys[s])
                 for s in range(2)))
    assert energy.w_local(ys, kin, p) == pytest.approx(ref, rel=1e-12)


@given(seeds)
def test_w_local_frame_invariance(seed):
    # the chosen coupling depends on |F ys| only, so F -> Q F leaves w unchanged for every beta
    rng = np.random.default_rng(seed)
    p = params(rng)
    F = rand_F(rng)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    ys = rng.standard_normal((2, 3))
    w1 = energy.w_local(ys, kinematics.build_kinematics(F), p)
    w2 = energy.w_local(ys, kinematics.build_kinematics(Q @ F), p)
    assert w1 == pytest.approx(w2, rel=1e-12)


def test_external_potentials():
    zero = LoadData()
    assert energy.external_potentials(1.0, np.ones((2, 3)), np.ones(3), zero) == (0.0, 0.0)
    v, _ = energy.external_potentials(3.0, np.zeros((2, 3)), np.zeros(3), LoadData(q_f=2.0))
    assert v == 6.0
    v, _ = energy.external_potentials(0.0, np.zeros((2, 3)), np.array([2.0, 0, 0]),
                                      LoadData(b_mech=np.array([1.0, 0, 0])))
    assert v == -2.0
    bt = np.array([[1.0, 0, 0], [0, 2.0, 0]])
    _, vh = energy.external_potentials(0.5, np.ones((2, 3)), np.zeros(3),
                                       LoadData(q_hat=4.0, t_tron=bt))
    assert vh == pytest.approx(2.0 - 3.0)


@given(seeds)
def test_external_potentials_linear(seed):
    rng = np.random.default_rng(seed)
    loads = LoadData(q_f=rng.normal(), q_hat=rng.normal(), b_tron=rng.normal(size=(2, 3)),
                     t_tron=rng.normal(size=(2, 3)), b_mech=rng.normal(size=3),
                     t_mech=rng.normal(size=3))
    a = (rng.normal(), rng.normal(size=(2, 3)), rng.normal(size=3))
    b = (rng.normal(), rng.normal(size=(2, 3)), rng.normal(size=3))
    s = rng.normal()
    va = np.array(energy.external_potentials(*a, loads))
    vb = np.array(energy.external_potentials(*b, loads))
    vs = np.array(energy.external_potentials(*(x + s * y for x, y in zip(a, b)), loads))
    np.testing.assert_allclose(vs, va + s * vb, atol=1e-12)


def test_kinetic_densities():
    p = MaterialParams(rho_tron=2.0, rho_mech=3.0)
    assert energy.kinetic_densities(np.zeros((2, 3)), np.zeros(3), p) == (0.0, 0.0)
    vs = np.array([[1.0, 0, 0], [0, 0, 0]])
    assert energy.kinetic_densities(vs, np.zeros(3), p)[0] == 1.0
    v = np.array([0.3, -0.2, 0.5])
    k1 = energy.kinetic_densities(vs, v, p)[1]
    k2 = energy.kinetic_densities(vs, 2 * v, p)[1]
    assert k2 == pytest.approx(4 * k1, rel=1e-15)


def test_dissipation_potential():
    p = MaterialParams(gamma0=3.0)
    assert energy.dissipation_potential(np.zeros((2, 3)), I, p) == 0.0
    vs = np.array([[1.0, 0, 0], [0, 0, 0]])
    assert energy.dissipation_potential(vs, I, p) == 1.5
    kin2 = kinematics.build_kinematics(np.diag([2.0, 1.0, 1.0]))
    assert energy.dissipation_potential(vs, kin2, p) == 3.0


@given(seeds)
def test_sign_properties(seed):
    rng = np.random.default_rng(seed)
    p = params(rng)
    kin = kinematics.build_kinematics(rand_F(rng))
    vs, v = rng.normal(size=(2, 3)), rng.normal(size=3)
    assert energy.e_m(rng.normal(size=3), kin, p) <= 0
    assert energy.dissipation_potential(vs, kin, p) >= 0
    kt, km = energy.kinetic_densities(vs, v, p)
    assert kt >= 0 and km >= 0
    # spatial densities per current volume
    assert energy.dissipation_potential(vs, kin, p) == pytest.approx(
        kin.J * 0.5 * p.gamma0 * np.sum(vs * vs), rel=1e-12)


def test_free_space_energy():
    p = MaterialParams(eta=1e-6)
    assert energy.free_space_energy(np.zeros(3), I, p) == 0.0
    rng = np.random.default_rng(3)
    kin = kinematics.build_kinematics(rand_F(rng))
    E = rng.normal(size=3)
    p0 = MaterialParams(eta=0.0)
    assert energy.free_space_energy(E, kin, p0) == energy.e_m(E, kin, p0)
    diff = energy.free_space_energy(E, kin, p) - energy.e_m(E, kin, p)
    assert diff == pytest.approx(1e-6 * energy.neo_hookean(kin, p.mu, p.lam), rel=1e-9)
    assert diff >= 0


@pytest.mark.parametrize("kw", [dict(eps0=0.0), dict(gamma0=-1.0), dict(rho_mech=0.0),
                                dict(mu=-1.0), dict(a=(-1.0, 1.0)), dict(eta=1.5)])
def test_material_params_validation(kw):
    with pytest.raises(ValueError):
        MaterialParams(**kw)
