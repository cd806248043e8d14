import math

import numpy as np
import pytest

from polarity_fp import (
    asymmetric_profile,
    boundary_traces,
    critical_mass,
    enumerate_states,
    mass,
    mass_of_alpha,
    solve_alpha,
    symmetric_state,
)
from polarity_fp.errors import RootFindError
from polarity_fp.grid import build_grid

from conftest import (
    G1_CENTER_ORACLE,
    M0_DIR_ORACLE,
    M0_EX_ORACLE,
    Z0_ORACLE,
    midpoint_integral,
)


def test_direct_symmetric_center_value(grid1000):
    st = symmetric_state(1.0, "direct", grid1000)
    assert st.field.values[500] == pytest.approx(G1_CENTER_ORACLE, abs=1e-5)
    assert st.kind == "symmetric" and st.alpha == 0.0


def test_symmetric_state_scales_linearly(grid1000):
    one = symmetric_state(1.0, "direct", grid1000).field.values
    two = symmetric_state(2.0, "direct", grid1000).field.values
    assert np.array_equal(two, 2.0 * one)


def test_symmetric_state_mass_is_exact(grid1000):
    for m in (0.5, 1.0, 2.7):
        st = symmetric_state(m, "direct", grid1000)
        assert mass(st.field) == pytest.approx(m, abs=1e-13)


def test_exchange_symmetric_reserves_boundary_mass(grid1000):
    m0ex = critical_mass("exchange")
    st = symmetric_state(m0ex, "exchange", grid1000)
    l, r = boundary_traces(st.field)
    total = mass(st.field) + l + r
    assert total == pytest.approx(m0ex, abs=1e-12)
    # interior value at x=0 is e^{1/2} times the common normalizer c(+-1)
    assert st.field.values[500] == pytest.approx(math.exp(0.5) * l, rel=1e-12)
    # against the closed form with the oracle integral
    normalizer = m0ex / (2.0 + math.exp(0.5) * Z0_ORACLE)
    assert l == pytest.approx(normalizer, rel=1e-5)


def test_symmetric_state_rejects_nonpositive_mass(grid1000):
    with pytest.raises(ValueError):
        symmetric_state(0.0, "direct", grid1000)
    with pytest.raises(ValueError):
        symmetric_state(1.0, "made_up", grid1000)


def test_asymmetric_profile_alpha_one_traces(grid1000):
    f = asymmetric_profile(1.0, grid1000)
    left, right = boundary_traces(f)
    assert left == pytest.approx(1.0 / (1.0 - math.exp(-2.0)), rel=1e-14)
    assert right == pytest.approx(math.exp(-2.0) / (1.0 - math.exp(-2.0)), rel=1e-14)
    assert left - right == pytest.approx(1.0, abs=1e-12)


def test_asymmetric_profile_reflection(grid1000):
    plus = asymmetric_profile(1.7, grid1000)
    minus = asymmetric_profile(-1.7, grid1000)
    assert np.array_equal(minus.values, plus.values[::-1])


def test_asymmetric_profile_positive(grid1000):
    f = asymmetric_profile(2.0, grid1000)
    assert np.all(f.values > 0.0)


@pytest.mark.parametrize("alpha", [0.05, 0.5, 1.0, 4.0, 20.0, -3.0])
def test_trace_identity_exact(grid1000, alpha):
    f = asymmetric_profile(alpha, grid1000)
    left, right = boundary_traces(f)
    assert left - right == pytest.approx(alpha, abs=1e-12)


def test_asymmetric_profile_rejects_zero(grid1000):
    with pytest.raises(ValueError):
        asymmetric_profile(0.0, grid1000)


def test_critical_masses_against_oracle():
    assert critical_mass("direct") == pytest.approx(M0_DIR_ORACLE, abs=1e-9)
    assert critical_mass("exchange") == pytest.approx(M0_EX_ORACLE, abs=1e-9)


def test_mass_of_alpha_small_alpha_limits():
    assert mass_of_alpha(1e-6, "direct") == pytest.approx(M0_DIR_ORACLE, abs=1e-4)
    assert mass_of_alpha(1e-6, "exchange") == pytest.approx(M0_EX_ORACLE, abs=1e-4)


def test_mass_of_alpha_against_midpoint_oracle():
    for alpha in (0.5, 2.0):
        oracle = midpoint_integral(
            lambda x: alpha / (1 - np.exp(-2 * alpha))
            * np.exp(-alpha * (x + 1) - (x * x - 1) / 2)
        )
        assert mass_of_alpha(alpha, "direct") == pytest.approx(oracle, abs=1e-9)


def test_mass_of_alpha_exchange_linear_tail():
    # M_alpha grows like alpha for the exchange model
    assert mass_of_alpha(50.0, "exchange") / 50.0 == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("alpha", [0.1, 1.0, 5.0, 20.0])
@pytest.mark.parametrize("model", ["direct", "exchange"])
def test_mass_of_alpha_even(alpha, model):
    assert abs(mass_of_alpha(alpha, model) - mass_of_alpha(-alpha, model)) <= 1e-10


def test_mass_of_alpha_exceeds_one_direct():
    for alpha in np.geomspace(1e-3, 100, 25):
        assert mass_of_alpha(float(alpha), "direct") > 1.0


def test_mass_of_alpha_rejects_zero():
    with pytest.raises(ValueError):
        mass_of_alpha(0.0, "direct")


def test_solve_alpha_direct():
    assert solve_alpha(0.8, "direct") is None
    assert solve_alpha(2.0, "direct") is None
    root = solve_alpha(1.2, "direct")
    assert root is not None
    assert mass_of_alpha(root, "direct") == pytest.approx(1.2, abs=1e-9)


def test_solve_alpha_exchange():
    assert solve_alpha(2.0, "exchange") is None
    root = solve_alpha(3.0, "exchange")
    assert root is not None
    assert mass_of_alpha(root, "exchange") == pytest.approx(3.0, abs=1e-9)


def test_solve_alpha_beyond_scan_is_explicit_failure():
    with pytest.raises(RootFindError):
        solve_alpha(5e3, "exchange")


def test_enumerate_states_counts(grid400):
    assert len(enumerate_states(0.8, "direct", grid400)) == 1
    assert len(enumerate_states(1.2, "direct", grid400)) == 3
    assert len(enumerate_states(2.0, "direct", grid400)) == 1
    assert len(enumerate_states(2.0, "exchange", grid400)) == 1
    assert len(enumerate_states(3.0, "exchange", grid400)) == 3


def test_enumerate_states_contents(grid400):
    states = enumerate_states(1.2, "direct", grid400)
    kinds = [s.kind for s in states]
    assert kinds == ["symmetric", "asymmetric", "asymmetric"]
    alphas = sorted(s.alpha for s in states)
    assert alphas[0] == -alphas[2] and alphas[1] == 0.0
    for s in states:
        assert s.mass_total == pytest.approx(1.2, abs=1e-4)


def test_exchange_asymmetric_total_mass(grid1000):
    states = enumerate_states(3.0, "exchange", grid1000)
    for s in states[1:]:
        assert s.mass_total == pytest.approx(3.0, abs=1e-5)
