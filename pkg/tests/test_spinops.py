import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mqfactor.errors import DimensionMismatch, NotCoprime, PreconditionError, TooLarge, UnsupportedNi
from mqfactor.modarith import Modulus, orbit_decompose
from mqfactor.spinops import (
    SpinGeometry,
    StructuredState,
    antisymmetric_part,
    assemble,
    build_propagator,
    evolve,
    initial_state_general,
    initial_state_uniform,
    joint_propagator,
    load_matrix,
    save_matrix,
    shift_diagonal,
)

from oracles import dense_rho, dense_rho_y, joint_unitary, perm_matrix, uniform_rho0

coprime_case = st.sampled_from([15, 21, 33]).flatmap(
    lambda N: st.tuples(st.just(N), st.sampled_from([y for y in range(1, N) if math.gcd(y, N) == 1]))
)


def test_propagator_examples():
    pi = build_propagator(2, 1, 15)
    assert pi(1) == 2 and pi(8) == 1 and pi(15) == 15
    assert list(build_propagator(2, 4, 15).perm[:15]) == list(range(15))
    assert build_propagator(2, -1, 15)(2) == 1


def test_propagator_rejects_non_coprime():
    with pytest.raises(NotCoprime):
        build_propagator(6, 1, 15)


@given(coprime_case, st.integers(-12, 12))
def test_propagator_matrix_matches_arithmetic(case, m):
    N, y = case
    L = Modulus(N).L
    P = build_propagator(y, m, N).matrix()
    np.testing.assert_array_equal(P, perm_matrix(y, m, N, L))
    np.testing.assert_array_equal(P @ build_propagator(y, m, N).inverse().matrix(), np.eye(L))


def test_uniform_state_examples():
    geo = SpinGeometry(1, 15)
    state = initial_state_uniform(geo)
    assert len(state.terms) == 1
    label, M = state.terms[0]
    assert label == ("Ix",)
    np.testing.assert_array_equal(M, np.eye(16))

    assert initial_state_uniform(SpinGeometry(1, 15, eps_i=0.0)).is_zero()

    two = initial_state_uniform(SpinGeometry(2, 3))
    assert [l for l, _ in two.terms] == [("Ix", "E"), ("E", "Ix")]
    assert all(np.array_equal(M, np.eye(4)) for _, M in two.terms)


def test_assemble_uniform_pattern():
    rho = assemble(initial_state_uniform(SpinGeometry(1, 3)))
    assert rho.shape == (8, 8)
    np.testing.assert_array_equal(rho, uniform_rho0(1, 4))
    assert not assemble(StructuredState.zero(SpinGeometry(1, 3))).any()


def test_evolve_by_period_is_identity():
    state = initial_state_uniform(SpinGeometry(1, 15))
    out = evolve(state, 2, 4)
    np.testing.assert_array_equal(assemble(out), assemble(state))


def test_evolve_zero_state():
    zero = StructuredState.zero(SpinGeometry(1, 21))
    assert evolve(zero, 2, 5).is_zero()


def test_evolve_one_step_blocks():
    # |x y^(k+1)><x y^k| blocks appear in the off-diagonal I corner
    rho = assemble(evolve(initial_state_uniform(SpinGeometry(1, 15)), 2, 1))
    corner = rho[:16, 16:]  # <0| rho |1> on I
    for x in range(15):
        assert corner[x, 2 * x % 15] == pytest.approx(0.5)
    assert corner[15, 15] == pytest.approx(0.5)


@settings(max_examples=40, deadline=None)
@given(coprime_case, st.integers(-10, 10), st.sampled_from([1, 2]))
def test_evolve_matches_dense_conjugation(case, m, n_i):
    N, y = case
    geo = SpinGeometry(n_i, N)
    got = assemble(evolve(initial_state_uniform(geo), y, m))
    np.testing.assert_allclose(got, dense_rho(n_i, y, m, N, geo.L), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(coprime_case, st.integers(-6, 6), st.integers(-6, 6))
def test_evolution_composes(case, m1, m2):
    N, y = case
    state = initial_state_uniform(SpinGeometry(1, N))
    a = assemble(evolve(evolve(state, y, m1), y, m2))
    b = assemble(evolve(state, y, m1 + m2))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_evolve_general_state_matches_dense():
    geo = SpinGeometry(2, 15)
    rng = np.random.default_rng(3)
    state = initial_state_uniform(geo) + StructuredState(geo, ((("Iy", "E10"), rng.normal(size=(16, 16))),))
    U = joint_propagator(geo, 7, 3)
    np.testing.assert_array_equal(U, joint_unitary(2, 7, 3, 15, 16))
    np.testing.assert_allclose(assemble(evolve(state, 7, 3)), U @ assemble(state) @ U.T, atol=1e-12)


def test_antisymmetric_examples():
    state0 = initial_state_uniform(SpinGeometry(1, 15))
    assert antisymmetric_part(2, 0, state0).is_zero()
    assert antisymmetric_part(2, 2, state0).is_zero()
    rho_y = assemble(antisymmetric_part(2, 1, state0))
    assert np.any(rho_y)
    np.testing.assert_allclose(rho_y, dense_rho_y(1, 2, 1, 15, 16), atol=1e-12)
    for a in range(2):
        for b in range(2):
            block = rho_y[a * 16:(a + 1) * 16, b * 16:(b + 1) * 16]
            assert np.all(np.diag(block) == 0)


@settings(max_examples=30, deadline=None)
@given(coprime_case, st.integers(-12, 12))
def test_antisymmetric_is_odd_in_m(case, m):
    N, y = case
    state0 = initial_state_uniform(SpinGeometry(1, N))
    plus = assemble(antisymmetric_part(y, m, state0))
    minus = assemble(antisymmetric_part(y, -m, state0))
    np.testing.assert_allclose(plus, -minus, atol=1e-12)


def test_state_algebra():
    geo = SpinGeometry(1, 15)
    s = initial_state_uniform(geo)
    np.testing.assert_array_equal(assemble(s + s), assemble(2 * s))
    assert (s - s).is_zero()
    np.testing.assert_array_equal(assemble(s.elementary()), assemble(s))
    with pytest.raises(PreconditionError):
        s + initial_state_uniform(SpinGeometry(1, 21))


def test_state_validation():
    geo = SpinGeometry(1, 15)
    with pytest.raises(DimensionMismatch):
        StructuredState(geo, ((("Ix",), np.eye(4)),))
    with pytest.raises(PreconditionError):
        StructuredState(geo, ((("Iz",), np.eye(16)),))
    with pytest.raises(UnsupportedNi):
        SpinGeometry(3, 15)
    with pytest.raises(TooLarge):
        assemble(initial_state_uniform(SpinGeometry(2, 4099)))


def test_state_matrices_are_read_only():
    state = initial_state_uniform(SpinGeometry(1, 15))
    with pytest.raises(ValueError):
        state.terms[0][1][0, 0] = 5


def test_general_state_reduces_to_uniform():
    geo = SpinGeometry(2, Modulus(15, 3, 5))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        general = initial_state_general(geo, [np.ones(16), np.ones(16)])
    np.testing.assert_array_equal(assemble(general), assemble(initial_state_uniform(geo)))


def test_general_state_single_basis():
    geo = SpinGeometry(1, 15)
    d = np.zeros(16)
    d[1] = 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        state = initial_state_general(geo, [d])
    _, M = state.terms[0]
    assert M[1, 1] == 1 and np.count_nonzero(M) == 1


def test_general_state_ramp_warns():
    geo = SpinGeometry(1, Modulus(15, 3, 5))
    ramp = np.arange(16) / 16
    with pytest.warns(UserWarning):
        state = initial_state_general(geo, [ramp])
    cond = state.diagnostics["conditions"][0]
    assert cond["sum_below_N"] == pytest.approx(1015 / 256)
    assert cond["dominant"] is False


def test_general_state_dimension_checks():
    geo = SpinGeometry(1, 15)
    with pytest.raises(DimensionMismatch):
        initial_state_general(geo, [np.ones(8)])
    with pytest.raises(DimensionMismatch):
        initial_state_general(geo, [np.ones(16), np.ones(16)])


def test_shift_diagonal_follows_evolution():
    # a diagonal preparation evolved by U^m on the I=|1> block permutes within orbits
    table = orbit_decompose(2, 15)
    d = np.arange(16, dtype=float)
    P = perm_matrix(2, 1, 15, 16)
    np.testing.assert_array_equal(np.diag(P @ np.diag(d) @ P.T), shift_diagonal(d, table, 1))


@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_matrix_round_trip(tmp_path, fmt):
    M = np.random.default_rng(0).normal(size=(8, 8)) + 1j * np.random.default_rng(1).normal(size=(8, 8))
    path = tmp_path / f"m.{fmt}"
    save_matrix(M, path, fmt)
    np.testing.assert_array_equal(load_matrix(path, fmt), M)
