import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homwalk import CoinParams, DoubledField, Grid, SpinorField, coin_matrix, doubled_step, flat_step, prob_norm, shift_apply
from homwalk.lattice import IDENTITY, SIGMA_X
from homwalk.walk import momentum_step_matrix

from conftest import random_field


def test_coin_matrix_values():
    assert np.allclose(coin_matrix(CoinParams(eps=0.0, theta=5.0)), IDENTITY)
    assert np.allclose(coin_matrix(CoinParams(eps=0.7, theta=0.0)), IDENTITY)
    assert np.allclose(coin_matrix(CoinParams(eps=1.0, theta=np.pi / 2)), 1j * SIGMA_X, atol=1e-15)


@given(eps=st.floats(0, 1), theta=st.floats(-50, 50))
def test_coin_matrix_unitary(eps, theta):
    q = coin_matrix(CoinParams(eps=eps, theta=theta))
    assert np.max(np.abs(q @ q.conj().T - IDENTITY)) <= 1e-14


def test_shift_directions():
    g = Grid(n_sites=16, dx=0.25)
    up = np.zeros(16, dtype=complex)
    up[5] = 1.0
    moved = shift_apply(SpinorField(g, up, np.zeros(16, dtype=complex)))
    assert moved.up[4] == 1.0 and np.sum(np.abs(moved.up)) == 1.0
    down = np.zeros(16, dtype=complex)
    down[5] = 1.0
    moved = shift_apply(SpinorField(g, np.zeros(16, dtype=complex), down))
    assert moved.down[6] == 1.0 and np.sum(np.abs(moved.down)) == 1.0


def test_shift_preserves_norm_exactly(rng):
    g = Grid(n_sites=32, dx=0.25)
    f = random_field(rng, g)
    assert prob_norm(shift_apply(f)) == prob_norm(f)


def test_massless_step_is_shift(rng):
    g = Grid(n_sites=32, dx=0.25)
    f = random_field(rng, g)
    stepped = flat_step(f, CoinParams(eps=g.dx, theta=0.0))
    shifted = shift_apply(f)
    assert np.array_equal(stepped.up, shifted.up)
    assert np.array_equal(stepped.down, shifted.down)


def test_massless_walk_translates_excitation():
    # iterate the shift convention by hand: up moves one site down per step
    g = Grid(n_sites=16, dx=0.125)
    up = np.zeros(16, dtype=complex)
    k = 9
    up[k] = 1.0
    f = SpinorField(g, up, np.zeros(16, dtype=complex))
    coin = CoinParams(eps=g.dx, theta=0.0)
    for n in (1, 5, 12, 30):
        walked = f
        for _ in range(n):
            walked = flat_step(walked, coin)
        expected = (k - n) % g.n_sites
        assert walked.up[expected] == 1.0
        assert prob_norm(walked) == 1.0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), eps=st.floats(0.001, 1), theta=st.floats(-5, 5))
def test_flat_step_unitary(seed, eps, theta):
    g = Grid(n_sites=32, dx=0.25)
    f = random_field(np.random.default_rng(seed), g)
    stepped = flat_step(f, CoinParams(eps=eps, theta=theta))
    assert prob_norm(stepped) == pytest.approx(prob_norm(f), abs=1e-12)


def test_norm_drift_over_thousand_steps(rng):
    g = Grid(n_sites=64, dx=1 / 64)
    f = random_field(rng, g)
    f = f.scaled(1.0 / np.sqrt(prob_norm(f)))
    coin = CoinParams(eps=g.dx, theta=1.3)
    walked = f
    for _ in range(1000):
        walked = flat_step(walked, coin)
    assert abs(prob_norm(walked) - 1.0) <= 1e-12


def test_momentum_mode_block_structure(rng):
    # a flat step acts on the plane wave e^{ikx} s as a k-dependent 2x2 unitary
    g = Grid(n_sites=64, dx=0.125)
    coin = CoinParams(eps=g.dx, theta=0.8)
    for m in rng.choice(g.n_sites, size=8, replace=False):
        k = 2 * np.pi * m / (g.n_sites * g.dx)
        spin = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        wave = np.exp(1j * k * g.x)
        f = SpinorField(g, spin[0] * wave, spin[1] * wave)
        stepped = flat_step(f, coin)
        block = momentum_step_matrix(k, coin, g.dx)
        expected_spin = block @ spin
        assert np.max(np.abs(stepped.up - expected_spin[0] * wave)) <= 1e-12
        assert np.max(np.abs(stepped.down - expected_spin[1] * wave)) <= 1e-12
        assert np.max(np.abs(block @ block.conj().T - IDENTITY)) <= 1e-14


def test_doubled_step_block_diagonal(rng):
    g = Grid(n_sites=32, dx=0.25)
    psi = random_field(rng, g)
    coin = CoinParams(eps=g.dx, theta=0.4)
    state = DoubledField(psi, SpinorField.zero(g))
    out = doubled_step(state, coin)
    ref = flat_step(psi, coin)
    assert np.array_equal(out.psi.up, ref.up)
    assert np.array_equal(out.psi.down, ref.down)
    assert prob_norm(out.phi) == 0.0


def test_doubled_step_total_norm_and_symmetry(rng):
    g = Grid(n_sites=32, dx=0.25)
    psi = random_field(rng, g)
    state = DoubledField(psi, SpinorField(g, psi.up.copy(), psi.down.copy()))
    coin = CoinParams(eps=g.dx, theta=0.9)
    for _ in range(50):
        state = doubled_step(state, coin, coin)
    assert np.array_equal(state.psi.up, state.phi.up)
    assert np.array_equal(state.psi.down, state.phi.down)
    assert state.total_norm() == pytest.approx(2 * prob_norm(psi), rel=1e-13)


def test_doubled_step_distinct_coins(rng):
    g = Grid(n_sites=32, dx=0.25)
    psi = random_field(rng, g)
    phi = random_field(rng, g)
    out = doubled_step(DoubledField(psi, phi), CoinParams(eps=0.25, theta=0.3), CoinParams(eps=0.25, theta=1.1))
    assert np.array_equal(out.psi.up, flat_step(psi, CoinParams(eps=0.25, theta=0.3)).up)
    assert np.array_equal(out.phi.up, flat_step(phi, CoinParams(eps=0.25, theta=1.1)).up)
