import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homwalk import (
    DoubledField,
    EncoderParams,
    Grid,
    PreconditionError,
    SpinorField,
    build_encoder,
    conditions_residual,
    decode,
    encode,
    l2_distance,
)

from conftest import random_field


def _random_state(rng, grid):
    return DoubledField(random_field(rng, grid), random_field(rng, grid))


def test_encoder_params_validation():
    with pytest.raises(ValueError):
        EncoderParams(eps=0.0, eta=1.0)
    with pytest.raises(ValueError):
        EncoderParams(eps=1.5, eta=1.0)
    with pytest.raises(ValueError):
        EncoderParams(eps=0.5, eta=0.0)
    assert EncoderParams(eps=0.5, eta=2.0).leak == 0.25


def test_build_encoder_uniform_weight():
    # omega = 1 everywhere collapses to the global rotation with
    # a = d = sqrt(1-q), b = c = sqrt(q)
    g = Grid(n_sites=8, dx=0.125)
    params = EncoderParams(eps=0.04, eta=1.0)
    op = build_encoder(np.ones(8), params, g)
    q = params.leak
    assert np.allclose(op.a, np.sqrt(1 - q))
    assert np.allclose(op.d, np.sqrt(1 - q))
    assert np.allclose(op.b, np.sqrt(q))
    assert np.allclose(op.c, np.sqrt(q))
    assert max(conditions_residual(op)) <= 1e-15


def test_build_encoder_full_leak_is_swap():
    g = Grid(n_sites=8, dx=0.125)
    op = build_encoder(np.full(8, 0.7), EncoderParams(eps=1.0, eta=1.0), g)
    assert np.allclose(op.a, 0.0)
    assert np.allclose(op.d, 0.0)
    assert np.allclose(op.b, 1.0)
    assert np.allclose(op.c, 1.0)
    block = op.block(0)
    expected = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    assert np.allclose(block, expected)


def test_build_encoder_rejects_bad_weights():
    g = Grid(n_sites=4, dx=0.25)
    params = EncoderParams(eps=0.25, eta=1.0)
    with pytest.raises(PreconditionError):
        build_encoder(np.array([0.5, 1.0, 0.0, 0.5]), params, g)
    with pytest.raises(PreconditionError):
        build_encoder(np.array([0.5, 1.0, 1.2, 0.5]), params, g)


def test_per_site_block_unitary(rng):
    g = Grid(n_sites=32, dx=0.125)
    omega = rng.uniform(0.05, 1.0, size=32)
    op = build_encoder(omega, EncoderParams(eps=0.1, eta=0.5), g)
    for j in (0, 7, 31):
        u = op.block(j)
        assert np.max(np.abs(u @ u.conj().T - np.eye(4))) <= 1e-14


def test_block_is_rotation_by_arccos(rng):
    # coefficient/angle consistency of the rotation form
    g = Grid(n_sites=16, dx=0.125)
    omega = rng.uniform(0.05, 1.0, size=16)
    params = EncoderParams(eps=0.3, eta=1.0)
    op = build_encoder(omega, params, g)
    alpha = np.arccos(np.sqrt(1 - params.leak) * omega)
    assert np.max(np.abs(op.a - np.cos(alpha))) <= 1e-12
    assert np.max(np.abs(op.b - np.sin(alpha))) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    eps=st.floats(1e-3, 1.0),
    eta=st.sampled_from([0.5, 1.0, 2.0]),
)
def test_conditions_hold_for_random_draws(seed, eps, eta):
    rng = np.random.default_rng(seed)
    g = Grid(n_sites=16, dx=0.125)
    omega = rng.uniform(0.05, 1.0, size=16)
    op = build_encoder(omega, EncoderParams(eps=eps, eta=eta), g)
    assert max(conditions_residual(op)) <= 1e-12


def test_literal_scalar_choice_breaks_third_condition():
    # regression: fixing N = omega and H = sqrt(1-omega^2) and solving the two
    # weighted conditions for T and V leaves the cross condition badly violated
    omega, q = 0.8, 0.01
    n_blk = omega
    h_blk = np.sqrt(1 - omega**2)
    t_blk = np.sqrt((1 - (1 - q) * omega**2) / q)
    v_blk = np.sqrt((1 - q * (1 - omega**2)) / (1 - q))
    res1 = abs((1 - q) * n_blk**2 + q * t_blk**2 - 1)
    res2 = abs((1 - q) * v_blk**2 + q * h_blk**2 - 1)
    res3 = abs(n_blk * h_blk - t_blk * v_blk)
    assert res1 <= 1e-14 and res2 <= 1e-14
    # |0.8*0.6 - sqrt(36.64)*sqrt(0.9964/0.99)| = 5.5927, nowhere near zero
    assert res3 == pytest.approx(5.5927, abs=1e-3)


def test_encode_uniform_weight_splits_amplitude(rng):
    g = Grid(n_sites=16, dx=0.125)
    params = EncoderParams(eps=0.2, eta=1.0)
    op = build_encoder(np.ones(16), params, g)
    psi = random_field(rng, g)
    out = encode(DoubledField(psi, SpinorField.zero(g)), op)
    q = params.leak
    assert np.allclose(out.psi.up, np.sqrt(1 - q) * psi.up)
    assert np.allclose(out.phi.up, np.sqrt(q) * psi.up)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), eps=st.floats(0.01, 1.0))
def test_decode_inverts_encode(seed, eps):
    rng = np.random.default_rng(seed)
    g = Grid(n_sites=16, dx=0.125)
    omega = rng.uniform(0.05, 1.0, size=16)
    op = build_encoder(omega, EncoderParams(eps=eps, eta=1.0), g)
    state = _random_state(rng, g)
    back = decode(encode(state, op), op)
    assert l2_distance(back.psi, state.psi) <= 1e-14 * np.sqrt(state.total_norm() + 1)
    assert l2_distance(back.phi, state.phi) <= 1e-14 * np.sqrt(state.total_norm() + 1)


def test_encode_preserves_total_norm(rng):
    g = Grid(n_sites=64, dx=0.125)
    omega = rng.uniform(0.1, 1.0, size=64)
    op = build_encoder(omega, EncoderParams(eps=0.07, eta=2.0), g)
    state = _random_state(rng, g)
    out = encode(state, op)
    assert out.total_norm() == pytest.approx(state.total_norm(), rel=1e-13)


def test_zero_input_zero_output():
    g = Grid(n_sites=8, dx=0.125)
    op = build_encoder(np.full(8, 0.5), EncoderParams(eps=0.1, eta=1.0), g)
    out = decode(DoubledField(SpinorField.zero(g), SpinorField.zero(g)), op)
    assert out.total_norm() == 0.0


def test_grid_mismatch_rejected(rng):
    g1 = Grid(n_sites=8, dx=0.125)
    g2 = Grid(n_sites=8, dx=0.25)
    op = build_encoder(np.full(8, 0.5), EncoderParams(eps=0.1, eta=1.0), g1)
    state = DoubledField(SpinorField.zero(g2), SpinorField.zero(g2))
    with pytest.raises(ValueError):
        encode(state, op)
