import numpy as np
import pytest

from homwalk import ConformalField, Grid, PreconditionError, christoffel, omega_field, ricci_conformal_general, ricci_scalar
from homwalk.metric import make_random_smooth_metric, make_step_metric


def test_constant_factor():
    cf = ConformalField.constant(4.0)
    g = Grid(n_sites=16, dx=0.5)
    omega, scale = omega_field(cf, 0.0, g)
    assert np.all(omega == 1.0)
    assert scale == 4.0
    rep = christoffel(cf, 0.3, 0.7)
    assert rep.christoffel_time_class == 0.0
    assert rep.christoffel_space_class == 0.0
    assert rep.ricci == 0.0


def test_constant_rescaling_invariance():
    g = Grid(n_sites=32, dx=0.25)
    base = ConformalField.gaussian_bump(0.4, 1.0)
    omega_b, scale_b = omega_field(base, 0.0, g)
    # scaling the factor by a positive constant leaves omega unchanged
    scaled = ConformalField.tabulated(
        np.array([0.0]), g.x, 7.0 * np.asarray(base.omega2(0.0, g.x))[None, :]
    )
    omega_s, scale_s = omega_field(scaled, 0.0, g)
    assert np.max(np.abs(omega_s - omega_b)) <= 1e-12
    assert scale_s == pytest.approx(7.0 * scale_b, rel=1e-12)


def test_nonpositive_rejected():
    with pytest.raises(PreconditionError):
        ConformalField.constant(-2.0)
    with pytest.raises(PreconditionError):
        ConformalField.constant(0.0)
    with pytest.raises(PreconditionError):
        ConformalField.tabulated(np.array([0.0]), np.array([0.0, 1.0]), np.array([[1.0, -0.5]]))


def test_gaussian_bump_omega_extremes():
    # omega peaks at 1 over the bump and tends to sqrt(1/(1+A)) at the edges
    amp = 0.5
    g = Grid(n_sites=512, dx=1 / 32)  # extent +-8 with s=1: edge value is exact to ~e^{-32}
    cf = ConformalField.gaussian_bump(amp, 1.0)
    omega, scale = omega_field(cf, 0.0, g)
    assert scale == pytest.approx(1.0 + amp, rel=1e-12)
    assert np.max(omega) == 1.0
    assert omega[0] == pytest.approx(np.sqrt(1.0 / (1.0 + amp)), abs=1e-10)
    assert np.min(omega) > 0.0


def test_christoffel_exponential():
    cf = ConformalField.exponential(2.0)  # factor e^{2t}
    rep = christoffel(cf, 0.4, 1.0)
    assert rep.christoffel_time_class == pytest.approx(2.0, rel=1e-12)
    assert rep.christoffel_space_class == 0.0
    # time class 2 and acceleration class 4 cancel in the curvature
    assert ricci_scalar(cf, 0.4, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_christoffel_bump_formula():
    amp, s = 0.3, 0.7
    cf = ConformalField.gaussian_bump(amp, s)
    for x in (-1.2, 0.0, 0.4, 2.0):
        w = 1.0 + amp * np.exp(-(x**2) / (2 * s**2))
        expected = -amp * x / s**2 * np.exp(-(x**2) / (2 * s**2)) / w
        rep = christoffel(cf, 0.0, x)
        assert rep.christoffel_time_class == 0.0
        assert rep.christoffel_space_class == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_ricci_power_law():
    cf = ConformalField.power(2.0, window=(1.0, 2.0))
    for t in np.linspace(1.0, 2.0, 9):
        assert ricci_scalar(cf, float(t), 0.0) == pytest.approx(4.0 / t**6, rel=1e-10)


def test_finite_difference_matches_analytic_at_h_halving():
    # relative FD error must fall ~4x per halving for every analytic kind
    cases = [
        (ConformalField.gaussian_bump(0.4, 0.9), "d_x", "d_x_fd", 0.0, 0.6),
        (ConformalField.gaussian_bump(0.4, 0.9), "d_xx", "d_xx_fd", 0.0, 0.6),
        (ConformalField.exponential(0.8), "d_t", "d_t_fd", 0.5, 0.0),
        (ConformalField.exponential(0.8), "d_tt", "d_tt_fd", 0.5, 0.0),
        (ConformalField.power(3.7), "d_t", "d_t_fd", 1.5, 0.0),
        (ConformalField.power(3.7), "d_tt", "d_tt_fd", 1.5, 0.0),
    ]
    for cf, exact_name, fd_name, t, x in cases:
        exact = np.asarray(getattr(cf, exact_name)(t, x))
        errs = []
        for h in (0.04, 0.02, 0.01):
            fd = np.asarray(getattr(cf, fd_name)(t, x, h))
            errs.append(float(np.max(np.abs(fd - exact))))
        for e_coarse, e_fine in zip(errs, errs[1:]):
            assert 3.5 <= e_coarse / e_fine <= 4.5, (exact_name, errs)


def test_ricci_conformal_general_agrees_for_time_only():
    # for purely time-dependent factors the two diagnostics coincide up to
    # the overall convention: both vanish for e^{2t}
    cf = ConformalField.exponential(2.0)
    assert ricci_conformal_general(cf, 0.2, 0.0) == pytest.approx(0.0, abs=1e-12)
    # and for a static bump only the general one is nonzero
    bump = ConformalField.gaussian_bump(0.3, 1.0)
    assert ricci_scalar(bump, 0.0, 0.5) == 0.0
    assert ricci_conformal_general(bump, 0.0, 0.5) != 0.0


def test_tabulated_roundtrip_and_interpolation(tmp_path):
    t = np.array([0.0, 1.0])
    x = np.array([-1.0, 0.0, 1.0])
    vals = np.array([[1.0, 2.0, 1.0], [2.0, 4.0, 2.0]])
    lines = ["t,x,omega2"]
    for i, tv in enumerate(t):
        for j, xv in enumerate(x):
            lines.append(f"{tv},{xv},{vals[i, j]}")
    path = tmp_path / "metric.csv"
    path.write_text("\n".join(lines) + "\n")
    cf = ConformalField.from_csv(path)
    # exact at nodes
    assert cf.omega2(0.0, 0.0) == 2.0
    assert cf.omega2(1.0, -1.0) == 2.0
    # linear in between
    assert cf.omega2(0.5, 0.0) == pytest.approx(3.0)
    assert cf.omega2(0.0, 0.5) == pytest.approx(1.5)


def test_tabulated_rejects_bad_tables(tmp_path):
    p = tmp_path / "bad_header.csv"
    p.write_text("a,b,c\n0,0,1\n")
    with pytest.raises(PreconditionError):
        ConformalField.from_csv(p)
    p2 = tmp_path / "nonpositive.csv"
    p2.write_text("t,x,omega2\n0,0,1\n0,1,-1\n")
    with pytest.raises(PreconditionError):
        ConformalField.from_csv(p2)
    p3 = tmp_path / "ragged.csv"
    p3.write_text("t,x,omega2\n0,0,1\n0,1,1\n1,0,1\n")
    with pytest.raises(PreconditionError):
        ConformalField.from_csv(p3)


def test_omega_field_window_guard():
    cf = ConformalField.exponential(1.0).with_window(0.0, 1.0)
    g = Grid(n_sites=8, dx=0.25)
    omega, _ = omega_field(cf, 1.0, g)
    assert np.max(omega) <= 1.0
    with pytest.raises(PreconditionError):
        omega_field(cf, 5.0, g)  # far outside the normalized window


def test_random_smooth_metric_positive_and_periodic(rng):
    g = Grid(n_sites=64, dx=1 / 32)
    cf = make_random_smooth_metric(rng, g, 0.0, 1.0, 32)
    vals = cf.params["values"]
    assert np.all(vals > 0.0)
    omega, _ = omega_field(cf.with_window(0.0, 1.0), 0.5, g)
    assert np.all((omega > 0) & (omega <= 1.0))


def test_step_metric_is_discontinuous():
    g = Grid(n_sites=64, dx=1 / 32)
    cf = make_step_metric(g, 0.25, 1.0)
    w = np.asarray(cf.omega2(0.0, g.x))
    jumps = np.abs(np.diff(w))
    assert np.max(jumps) == pytest.approx(0.75)
