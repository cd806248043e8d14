import math

import numpy as np
import pytest

from polarity_fp import (
    Field,
    boundary_traces,
    build_grid,
    first_moment,
    l1_distance,
    mass,
    shifted_moment,
    symmetric_state,
)
from polarity_fp.grid import read_field_csv, reflect, write_field_csv

from conftest import G1_TRACE_ORACLE


def test_build_grid_spacing():
    g = build_grid(1000)
    assert g.dx == 2e-3
    assert g.nodes[0] == -1.0 and g.nodes[-1] == 1.0
    assert g.nodes[500] == 0.0


def test_build_grid_small():
    g = build_grid(4)
    assert np.array_equal(g.nodes, [-1.0, -0.5, 0.0, 0.5, 1.0])
    assert g.weights[0] == g.weights[-1] == 0.25
    assert g.weights[1] == 0.5


@pytest.mark.parametrize("n", [3, 2, 0, -4, 5, 999])
def test_build_grid_rejects_bad_n(n):
    with pytest.raises(ValueError):
        build_grid(n)


def test_build_grid_rejects_non_integer():
    with pytest.raises(TypeError):
        build_grid(10.0)


def test_weights_sum_to_interval_length():
    for n in (4, 100, 1000, 2024):
        g = build_grid(n)
        assert abs(math.fsum(g.weights) - 2.0) <= 4 * math.ulp(2.0)


def test_grid_is_exactly_symmetric():
    g = build_grid(1000)
    assert np.array_equal(g.nodes, -g.nodes[::-1])


def test_mass_constant_field(grid1000):
    assert mass(Field(np.full(1001, 0.5), grid1000)) == pytest.approx(1.0, abs=1e-14)


def test_mass_zero_field(grid1000):
    assert mass(Field(np.zeros(1001), grid1000)) == 0.0


def test_mass_of_sampled_gaussian(grid1000):
    # trapezoid error is O(dx^2) against the closed-form normalization
    f = Field(np.exp(-grid1000.nodes**2 / 2.0) / 1.7112487837845003, grid1000)
    assert mass(f) == pytest.approx(1.0, abs=1e-6)


def test_quadrature_exact_on_affine_fields():
    rng = np.random.default_rng(11)
    for n in (4, 100, 1000):
        g = build_grid(n)
        for _ in range(50):
            a, b = rng.uniform(-5, 5, 2)
            f = Field(a + b * g.nodes, g)
            exact = 2.0 * a
            assert abs(mass(f) - exact) <= 4 * math.ulp(max(abs(exact), 1.0))


def test_first_moment_even_field(grid1000):
    f = Field(np.cosh(grid1000.nodes), grid1000)
    assert abs(first_moment(f)) < 1e-14


def test_first_moment_linear(grid1000):
    f = Field((grid1000.nodes + 1.0) / 2.0, grid1000)
    assert first_moment(f) == pytest.approx(1.0 / 3.0, abs=1e-6)
    assert first_moment(Field(np.zeros(1001), grid1000)) == 0.0


def test_shifted_moment_is_bitwise_composition(grid1000):
    rng = np.random.default_rng(3)
    for _ in range(20):
        f = Field(rng.uniform(0, 2, 1001), grid1000)
        assert shifted_moment(f) == first_moment(f) + mass(f)


def test_shifted_moment_examples(grid1000):
    g_m = symmetric_state(0.7, "direct", grid1000).field
    assert shifted_moment(g_m) == pytest.approx(0.7, abs=1e-13)
    assert shifted_moment(Field(np.zeros(1001), grid1000)) == 0.0
    lin = Field((grid1000.nodes + 1.0) / 2.0, grid1000)
    assert shifted_moment(lin) == pytest.approx(4.0 / 3.0, abs=1e-6)


def test_boundary_traces_stored_directly(grid1000):
    f = Field(grid1000.nodes + 1.0, grid1000)
    assert boundary_traces(f) == (0.0, 2.0)
    k = Field(np.full(1001, 3.25), grid1000)
    assert boundary_traces(k) == (3.25, 3.25)


def test_boundary_traces_of_sampled_g1(grid1000):
    f = symmetric_state(1.0, "direct", grid1000).field
    left, right = boundary_traces(f)
    assert left == pytest.approx(G1_TRACE_ORACLE, abs=1e-5)
    assert right == pytest.approx(G1_TRACE_ORACLE, abs=1e-5)


def test_traces_of_even_field_equal_exactly(grid1000):
    vals = np.exp(-np.abs(grid1000.nodes))
    f = Field(vals, grid1000)
    l, r = boundary_traces(f)
    assert l == r


def test_l1_distance(grid1000):
    one = Field(np.ones(1001), grid1000)
    zero = Field(np.zeros(1001), grid1000)
    assert l1_distance(one, one) == 0.0
    assert l1_distance(one, zero) == pytest.approx(2.0, abs=1e-13)
    ramp = Field(1.0 + grid1000.nodes, grid1000)
    assert l1_distance(one, ramp) == pytest.approx(1.0, abs=1e-6)


def test_l1_distance_grid_mismatch(grid1000):
    other = build_grid(500)
    with pytest.raises(ValueError, match="grid mismatch"):
        l1_distance(Field(np.ones(1001), grid1000), Field(np.ones(501), other))


def test_field_length_check(grid1000):
    with pytest.raises(ValueError):
        Field(np.ones(10), grid1000)


def test_reflect_is_involution(grid1000):
    rng = np.random.default_rng(5)
    f = Field(rng.uniform(0, 1, 1001), grid1000)
    assert np.array_equal(reflect(reflect(f)).values, f.values)


def test_field_csv_roundtrip(tmp_path, grid1000):
    f = symmetric_state(1.3, "direct", grid1000).field
    path = tmp_path / "snap.csv"
    write_field_csv(f, path)
    xs, cs = read_field_csv(path)
    assert np.array_equal(xs, grid1000.nodes)
    assert np.array_equal(cs, f.values)


def test_field_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        read_field_csv(path)
