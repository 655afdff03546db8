import math

import numpy as np
import pytest

from charur.algebra import RepSpec, fock_quadratures, su11_generators, su11_ladder, su2_generators
from charur.moments import expectation
from charur.states import (
    AlgebraicCSParams,
    NonNormalizableError,
    TruncationError,
    UnsupportedBranchError,
    algebraic_cs_eigensolve,
    algebraic_cs_series,
    algebraic_residual,
    bg_cs,
    bloch_cs,
    even_odd_cs,
    make_state,
    mixed_state,
    squeezed_thermal_state,
    squeezed_vacuum,
    su11_cs,
    su11_lowest,
    thermal_state,
    vacuum,
)


def overlap(a, b):
    return abs(np.vdot(a.vector, b.vector))


def test_su11_cs_zero_is_lowest():
    np.testing.assert_allclose(su11_cs(0, 0.5, 16).vector, su11_lowest(0.5, 16).vector)


@pytest.mark.parametrize("zeta, k", [(0.5, 0.25), (0.3 + 0.4j, 1.0), (-0.7, 0.75)])
def test_su11_cs_coefficient_ratio(zeta, k):
    c = su11_cs(zeta, k, 128).vector
    n = np.arange(10)
    np.testing.assert_allclose(c[1:11] / c[:10], zeta * np.sqrt((2 * k + n) / (n + 1)), rtol=1e-12)


def test_su11_cs_mean_k3():
    dim = 256
    K3 = su11_generators(0.25, dim)["K3"]
    assert expectation(K3, su11_cs(0.5, 0.25, dim)) == pytest.approx(5 / 12, rel=1e-12)


def test_su11_cs_errors():
    with pytest.raises(NonNormalizableError):
        su11_cs(1.0, 0.5, 64)
    with pytest.raises(TruncationError):
        su11_cs(0.9, 0.5, 16)


def test_bloch_cs():
    j = 1.0
    np.testing.assert_allclose(bloch_cs(0, j).vector, [0, 0, 1])
    obs = su2_generators(j)
    state = bloch_cs(0.3, j)
    # brute force: exp(tau J+)|j,-j> has components (tau^2, sqrt(2) tau, 1)
    c = np.array([0.09, math.sqrt(2) * 0.3, 1.0])
    c /= np.linalg.norm(c)
    assert expectation(obs["J3"], state) == pytest.approx(c @ np.diag([1, 0, -1]) @ c)


def test_bloch_spin_half_covers_sphere():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    # |psi> = a|up> + b|down> = N exp(tau J+)|down> with tau = a/b
    tau = psi[0] / psi[1]
    assert overlap(bloch_cs(tau, 0.5), type(bloch_cs(0, 0.5))("pure", psi)) == pytest.approx(1)


def test_bg_cs():
    np.testing.assert_allclose(bg_cs(0, 0.5, 16).vector, su11_lowest(0.5, 16).vector)
    z, k = 1 + 0.5j, 0.5
    state = bg_cs(z, k, 48)
    c = state.vector
    assert c[2] / c[0] == pytest.approx(z**2 / math.sqrt(2 * 2 * k * (2 * k + 1)))
    Kp, Km, K3 = su11_ladder(k, 48)
    r = Km @ c - z * c
    assert np.linalg.norm(r[:-2]) < 1e-9


def test_algebraic_series_reduces_to_bg():
    z, k, dim = 0.8 - 0.3j, 0.75, 64
    series = algebraic_cs_series(AlgebraicCSParams(z, 1, 0, 0, k), dim)
    assert overlap(series, bg_cs(z, k, dim)) > 1 - 1e-10


@pytest.mark.parametrize("zeta, k", [(0.5, 0.25), (0.5, 0.5), (0.3, 1.0), (0.7, 0.75)])
def test_algebraic_series_reproduces_group_cs(zeta, k):
    # exp(-zeta K+)|k,0> solves (K- + K+ + w K3) psi = z psi with
    # w = 1/zeta + zeta and z = k (1/zeta - zeta)
    w = 1 / zeta + zeta
    z = k * (1 / zeta - zeta)
    dim = 256
    series = algebraic_cs_series(AlgebraicCSParams(z, 1, 1, w, k), dim)
    assert overlap(series, su11_cs(-zeta, k, dim)) > 1 - 1e-10


def test_algebraic_series_continuous_near_degenerate_l():
    # approach w^2 = 4uv along w -> 2 (u = v = 1 / 1.01)
    k, z, dim = 0.5, 0.3, 384
    states = []
    for eps in (1e-3, 1e-6, 0.0):
        u = 1.0
        v = 1.0 / (1.0 + 0.5) ** 2 * (1 - eps)
        w = 2 * math.sqrt(u * v) / math.sqrt(1 - eps) * (1 - eps)
        states.append(algebraic_cs_series(AlgebraicCSParams(z, u, v, w, k), dim))
    assert overlap(states[1], states[2]) > 1 - 1e-8
    assert overlap(states[0], states[2]) > 1 - 1e-3


def test_algebraic_series_errors():
    with pytest.raises(UnsupportedBranchError):
        algebraic_cs_series(AlgebraicCSParams(1, 0, 1, 1, 0.5), 64)
    with pytest.raises(NonNormalizableError):
        algebraic_cs_series(AlgebraicCSParams(0.1, 1, 4, 0, 0.5), 64)


def test_eigensolve_hermitian_gives_real_z():
    state, z = algebraic_cs_eigensolve(0.3 + 0.2j, 0.3 - 0.2j, 1.5, 0.5, 64)
    assert abs(z.imag) < 1e-10
    assert state.tail_mass < 1e-12


def test_eigensolve_matches_bg():
    z = 0.7 + 0.2j
    state, zz = algebraic_cs_eigensolve(1, 0, 0, 0.5, 64, target=z)
    assert zz == pytest.approx(z, abs=1e-9)
    assert overlap(state, bg_cs(z, 0.5, 64)) > 1 - 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_series_and_eigensolve_agree(seed):
    rng = np.random.default_rng(seed)
    roots = 0.6 * rng.uniform(0.1, 1, 2) * np.exp(2j * np.pi * rng.uniform(size=2))
    u = 1.0 + 0.2j
    params = AlgebraicCSParams(complex(rng.normal(), rng.normal()), u,
                               u * roots[0] * roots[1], -u * roots.sum(), 0.75)
    series = algebraic_cs_series(params, 128)
    eig, _ = algebraic_cs_eigensolve(params.u, params.v, params.w, params.k, 128, target=params.z)
    assert overlap(series, eig) > 1 - 1e-8
    assert algebraic_residual(series, params) < 1e-8


def test_squeezed_vacuum():
    np.testing.assert_allclose(squeezed_vacuum(0, 32).vector, vacuum(32).vector)
    dim = 128
    q, p = fock_quadratures(1, dim).matrices
    state = squeezed_vacuum(0.5, dim)
    assert expectation(q @ q, state) == pytest.approx(math.exp(-1) / 2, rel=1e-12)
    assert expectation(p @ p, state) == pytest.approx(math.exp(1) / 2, rel=1e-12)


def test_even_odd_cs_limits():
    np.testing.assert_allclose(even_odd_cs(0, "even", 16).vector, vacuum(16).vector)
    odd = even_odd_cs(0, "odd", 16).vector
    assert odd[1] == 1 and np.count_nonzero(odd) == 1
    with pytest.raises(ValueError):
        even_odd_cs(1.0, "other", 16)
    assert np.all(even_odd_cs(1.2, "even", 64).vector[1::2] == 0)


def test_thermal_and_squeezed_thermal():
    th = thermal_state(0.5, 96)
    assert np.trace(th.data).real == pytest.approx(1)
    n = np.arange(96)
    assert np.diag(th.data).real @ n == pytest.approx(0.5, rel=1e-12)
    sq = squeezed_thermal_state(0.0, 0.0, 0.5, 96)
    np.testing.assert_allclose(sq.data, th.data, atol=1e-12)
    with pytest.raises(TruncationError):
        squeezed_thermal_state(1.5, 0.0, 1.0, 16)


def test_mixed_state_normalizes():
    rho = mixed_state(np.diag([2.0, 2.0]))
    np.testing.assert_allclose(rho.data, np.eye(2) / 2)
    assert not rho.is_pure


@pytest.mark.parametrize(
    "family, params, rep",
    [
        ("su11_cs", {"zeta": 0.4}, RepSpec("su11", 0.5, 64)),
        ("bg_cs", {"z": 1.0}, RepSpec("su11", 0.5, 64)),
        ("algebraic_cs", {"z": 0.5, "u": 1, "v": 0.1, "w": 0.3}, RepSpec("su11", 0.5, 96)),
        ("bloch", {"tau": 0.5j}, RepSpec("su2", 1.5, 4)),
        ("spin", {"m": -0.5}, RepSpec("su2", 1.5, 4)),
        ("vacuum", {}, RepSpec("fock", None, 8)),
        ("fock", {"n": [1, 2]}, RepSpec("fock", None, 8, 2)),
        ("squeezed_vacuum", {"r": 0.3}, RepSpec("fock", None, 64)),
        ("coherent", {"alpha": 1 + 1j}, RepSpec("fock", None, 64)),
        ("thermal", {"nbar": 0.2}, RepSpec("fock", None, 64)),
    ],
)
def test_make_state_families_are_normalized(family, params, rep):
    state = make_state(family, params, rep)
    assert np.trace(state.density()).real == pytest.approx(1, abs=1e-12)
    assert state.tail_mass < 1e-12


def test_make_state_rejects_wrong_rep():
    with pytest.raises(ValueError):
        make_state("bloch", {}, RepSpec("su11", 0.5, 32))
    with pytest.raises(ValueError):
        make_state("unknown", {}, RepSpec("su11", 0.5, 32))
