import numpy as np
import pytest

ACCEPTANCE_LINES = []


def record_acceptance(name: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    line = f"[{status}] {name}"
    if detail:
        line += f": {detail}"
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

from drgp import (
    GelbrichBall,
    JointGaussian,
    build_dirichlet_basis_1d,
    design_points,
    joint_ball,
    make_operator,
    matern_coefficients,
    nominal_covariance,
    observation_map,
    roughness_weights,
)


@pytest.fixture
def scalar_problem():
    """N=1, m=1, identity operator, unit prior and noise, H = [1].

    The design point 1/4 makes sqrt(2) sin(pi/4) = 1, so conditioning is the
    textbook scalar case.
    """
    basis = build_dirichlet_basis_1d(1)
    op = make_operator("identity", basis)
    design = design_points("custom", xs=[0.25])
    obs_map = observation_map(basis, op, design)
    sigma0 = JointGaussian(np.eye(2))
    ball = GelbrichBall(np.eye(2), np.ones(2), 0.5)
    return basis, op, obs_map, sigma0, ball


def small_instance(n_modes=6, m=3, alpha=2.0, beta=0.51, sigma=0.1, delta_sq=0.1,
                   operator="identity", target="regression", heat_time=None):
    basis = build_dirichlet_basis_1d(n_modes)
    prior = matern_coefficients(basis, alpha)
    weights = roughness_weights(basis, beta)
    op = make_operator(operator, basis, heat_time=heat_time)
    design = design_points("whole", m=m)
    obs_map = observation_map(basis, op, design, target=target)
    sigma0 = nominal_covariance(prior, sigma, m)
    ball = joint_ball(sigma0, weights, m, np.sqrt(delta_sq))
    return basis, obs_map, sigma0, ball


def random_joint_psd(rng, n, m, noise_floor=0.05):
    """Random PSD joint covariance with a healthy noise block."""
    d = n + m
    g = rng.standard_normal((d, d + 2))
    cov = g @ g.T / (d + 2)
    cov[n:, n:] += noise_floor * np.eye(m)
    return 0.5 * (cov + cov.T)
