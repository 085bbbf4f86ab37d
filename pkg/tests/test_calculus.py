import numpy as np
import pytest

from ultracalc import (
    Grid,
    InvalidArgumentError,
    PreconditionError,
    Space,
    Ultrafunction,
    delta,
    derivative_operator,
    ftc_piecewise_defect,
    ibp_c1_defect,
    ibp_defect,
    ibp_piecewise_defect,
    integrate,
    naive_ibp_defect,
)


@pytest.fixture
def space():
    return Space(Grid.uniform(1.0, 8), 2)


def random_member(space, rng):
    return Ultrafunction(space, rng.standard_normal((space.n_cells, space.block_size)))


# ----------------------------------------------------------------------
# operator construction
# ----------------------------------------------------------------------


def test_derivative_of_constant_vanishes(space):
    d = derivative_operator(space, "D")
    assert np.max(np.abs(d.apply(space.constant(1.0)).blocks)) <= 1e-12


def test_derivative_of_x_is_one(space):
    d = derivative_operator(space, "D")
    dx = d.apply(space.from_polynomial([0.0, 1.0]))
    assert np.max(np.abs(dx.blocks - space.constant(1.0).blocks)) <= 1e-12


def test_derivative_of_indicator_is_delta_difference(space):
    d = derivative_operator(space, "D")
    a, b = -0.5, 0.75
    expected = delta(space, a) - delta(space, b)
    got = d.apply(space.indicator(a, b))
    assert np.max(np.abs(got.blocks - expected.blocks)) <= 1e-12


def test_derivative_of_indicator_endpoint_variants(space):
    d = derivative_operator(space, "D")
    b = 0.25
    left = d.apply(space.indicator(-1.0, b))
    assert np.max(np.abs(left.blocks - (-delta(space, b)).blocks)) <= 1e-12
    a = -0.25
    right = d.apply(space.indicator(a, 1.0))
    assert np.max(np.abs(right.blocks - delta(space, a).blocks)) <= 1e-12


def test_windowed_polynomial_product_rule(space):
    # D(w * chi_[a,b]) = w' * chi_[a,b] + w(a) delta_a - w(b) delta_b
    d = derivative_operator(space, "D")
    w_coeffs = [0.3, -1.2, 0.8]
    w = space.from_polynomial(w_coeffs)
    a, b = -0.75, 0.5
    got = d.apply(w.restrict(a, b))
    wprime = space.from_polynomial([-1.2, 1.6]).restrict(a, b)
    w_at = lambda x: float(np.polynomial.polynomial.polyval(x, w_coeffs))
    expected = wprime + w_at(a) * delta(space, a) - w_at(b) * delta(space, b)
    assert np.max(np.abs(got.blocks - expected.blocks)) <= 1e-10


def test_classical_derivative_of_global_polynomials(space):
    d = derivative_operator(space, "D")
    got = d.apply(space.from_polynomial([0.1, 2.0, -0.7]))
    expected = space.from_polynomial([2.0, -1.4])
    assert np.max(np.abs(got.blocks - expected.blocks)) <= 1e-12


def test_operator_linearity(space):
    rng = np.random.default_rng(0)
    d = derivative_operator(space, "D")
    for _ in range(10):
        u, v = random_member(space, rng), random_member(space, rng)
        al, be = rng.uniform(-2, 2, size=2)
        lhs = d.apply(al * u + be * v)
        rhs = al * d.apply(u) + be * d.apply(v)
        assert np.max(np.abs(lhs.blocks - rhs.blocks)) <= 1e-12


def test_apply_to_zero(space):
    d = derivative_operator(space, "D")
    assert np.all(d.apply(space.zero()).blocks == 0.0)


def test_d2_annihilates_grid_functions(space):
    rng = np.random.default_rng(1)
    d2 = derivative_operator(space, "D2")
    for _ in range(20):
        g = space.grid_function(rng.standard_normal(space.n_cells))
        assert np.max(np.abs(d2.apply(g).blocks)) == 0.0


def test_d_equals_d2_on_continuous_members(space):
    d = derivative_operator(space, "D")
    d2 = derivative_operator(space, "D2")
    u = space.from_polynomial([1.0, -0.5, 0.3])
    assert np.max(np.abs(d.apply(u).blocks - d2.apply(u).blocks)) <= 1e-12


def test_d2_of_x(space):
    d2 = derivative_operator(space, "D2")
    dx = d2.apply(space.from_polynomial([0.0, 1.0]))
    assert np.max(np.abs(dx.blocks - space.constant(1.0).blocks)) <= 1e-12


def test_d_decomposes_exactly_into_d2_plus_jumps(space):
    d = derivative_operator(space, "D")
    d2 = derivative_operator(space, "D2")
    assert np.array_equal(d.matrix, d2.matrix + d.jump_matrix)
    assert len(d.jumps) == space.n_cells - 1


def test_unknown_kind_rejected(space):
    with pytest.raises(InvalidArgumentError):
        derivative_operator(space, "D3")


# ----------------------------------------------------------------------
# definite integrals
# ----------------------------------------------------------------------


def test_integral_of_delta_is_one(space):
    for q in (-0.8, 0.1, 0.62):
        assert integrate(delta(space, q), -1.0, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_integral_of_constant(space):
    u = space.constant(1.0)
    assert integrate(u, -0.5, 0.75) == pytest.approx(1.25, abs=1e-13)


def test_integrate_rejects_non_nodes(space):
    u = space.constant(1.0)
    with pytest.raises(InvalidArgumentError):
        integrate(u, -0.3, 0.5)
    with pytest.raises(InvalidArgumentError):
        integrate(u, 0.5, -0.5)


def test_fundamental_theorem(space):
    rng = np.random.default_rng(2)
    d = derivative_operator(space, "D")
    nodes = space.grid.nodes
    for _ in range(50):
        u = random_member(space, rng)
        n, m = sorted(rng.integers(0, nodes.size, size=2))
        a, b = float(nodes[n]), float(nodes[m])
        lhs = integrate(d.apply(u), a, b)
        assert abs(lhs - (u(b) - u(a))) <= 1e-10 * (1.0 + u.norm())


# ----------------------------------------------------------------------
# integration by parts
# ----------------------------------------------------------------------


def test_full_support_ibp(space):
    rng = np.random.default_rng(3)
    for _ in range(50):
        u, v = random_member(space, rng), random_member(space, rng)
        assert ibp_defect(u, v) <= 1e-10 * (1.0 + u.norm() * v.norm())


def test_full_support_ibp_constants(space):
    one = space.constant(1.0)
    assert ibp_defect(one, one) <= 1e-13


def test_full_support_ibp_with_indicator(space):
    rng = np.random.default_rng(4)
    chi = space.indicator(-0.5, 0.5)
    for _ in range(10):
        v = random_member(space, rng)
        assert ibp_defect(chi, v) <= 1e-10 * (1.0 + chi.norm() * v.norm())


def test_two_point_ibp_for_continuous_members(space):
    rng = np.random.default_rng(5)
    for _ in range(20):
        u = space.from_polynomial(rng.uniform(-1, 1, size=3))
        v = space.from_polynomial(rng.uniform(-1, 1, size=3))
        n, m = sorted(rng.integers(0, space.n_cells + 1, size=2))
        defect = ibp_c1_defect(u, v, int(n), int(m))
        assert defect <= 1e-10 * (1.0 + u.norm() * v.norm())


def test_two_point_ibp_rejects_discontinuous_members(space):
    step = space.indicator(0.0, 1.0)
    v = space.constant(1.0)
    with pytest.raises(PreconditionError):
        ibp_c1_defect(step, v, 0, space.n_cells)


def test_two_point_ibp_empty_range(space):
    u = space.from_polynomial([1.0, 1.0])
    assert ibp_c1_defect(u, u, 3, 3) == 0.0


def test_piecewise_ibp_for_discontinuous_members(space):
    rng = np.random.default_rng(6)
    for _ in range(50):
        u, v = random_member(space, rng), random_member(space, rng)
        n, m = sorted(rng.integers(0, space.n_cells + 1, size=2))
        defect = ibp_piecewise_defect(u, v, int(n), int(m))
        assert defect <= 1e-10 * (1.0 + u.norm() * v.norm())


def test_piecewise_ibp_reduces_to_two_point_for_continuous(space):
    u = space.from_polynomial([0.2, 1.0, -0.3])
    v = space.from_polynomial([-1.0, 0.0, 0.5])
    n, m = 1, 6
    boundary_two_point = u.side_value(m, "minus") * v.side_value(m, "minus") - (
        u.side_value(n, "plus") * v.side_value(n, "plus")
    )
    telescoped = sum(
        u.side_value(i + 1, "minus") * v.side_value(i + 1, "minus")
        - u.side_value(i, "plus") * v.side_value(i, "plus")
        for i in range(n, m)
    )
    assert telescoped == pytest.approx(boundary_two_point, abs=1e-12)
    assert ibp_piecewise_defect(u, v, n, m) <= 1e-11


def test_piecewise_ibp_zero_member(space):
    z = space.zero()
    v = space.constant(2.0)
    assert ibp_piecewise_defect(z, v, 0, space.n_cells) == 0.0


def test_piecewise_ftc(space):
    rng = np.random.default_rng(7)
    for _ in range(50):
        u = random_member(space, rng)
        n, m = sorted(rng.integers(0, space.n_cells + 1, size=2))
        assert ftc_piecewise_defect(u, int(n), int(m)) <= 1e-10 * (1.0 + u.norm())


def test_piecewise_ftc_continuous_telescopes(space):
    u = space.from_polynomial([0.0, 0.0, 1.0])
    n, m = 0, space.n_cells
    d2 = derivative_operator(space, "D2")
    lhs = integrate(d2.apply(u), -1.0, 1.0)
    assert lhs == pytest.approx(u(1.0) - u(-1.0), abs=1e-12)


def test_piecewise_ftc_constant(space):
    assert ftc_piecewise_defect(space.constant(5.0), 0, space.n_cells) <= 1e-12


def test_naive_two_point_formula_fails(space):
    # jump at the lower limit makes the node-average boundary product wrong
    # by a quarter of the jump product
    n = space.n_cells // 2
    step = space.constant(1.0).restrict(float(space.grid.nodes[n]), 1.0)
    defect = naive_ibp_defect(step, step, n, space.n_cells)
    assert defect > 1e-3
    assert defect == pytest.approx(0.25, abs=1e-10)


def test_naive_formula_fine_without_endpoint_jumps(space):
    u = space.from_polynomial([0.0, 1.0])
    v = space.from_polynomial([1.0, 0.5])
    assert naive_ibp_defect(u, v, 1, 7) <= 1e-11


def test_single_cell_space_identities():
    sp = Space(Grid.uniform(2.0, 1), 3)
    d = derivative_operator(sp, "D")
    assert len(d.jumps) == 0
    rng = np.random.default_rng(0)
    u = random_member(sp, rng)
    v = random_member(sp, rng)
    assert ibp_defect(u, v) <= 1e-12 * (1.0 + u.norm() * v.norm())
    lhs = integrate(d.apply(u), -2.0, 2.0)
    assert abs(lhs - (u(2.0) - u(-2.0))) <= 1e-12 * (1.0 + u.norm())


def test_degree_zero_derivative_is_pure_jumps():
    sp = Space(Grid.uniform(1.0, 6), 0)
    d = derivative_operator(sp, "D")
    assert np.all(d.matrix == d.jump_matrix)
    rng = np.random.default_rng(1)
    g = sp.grid_function(rng.standard_normal(6))
    nodes = sp.grid.nodes
    for n, m in [(0, 6), (1, 4), (2, 2), (0, 3)]:
        a, b = float(nodes[n]), float(nodes[m])
        lhs = integrate(d.apply(g), a, b)
        assert abs(lhs - (g(b) - g(a))) <= 1e-12
    h = sp.grid_function(rng.standard_normal(6))
    assert ibp_defect(g, h) <= 1e-12 * (1.0 + g.norm() * h.norm())


def test_identities_hold_on_non_uniform_grid():
    sp = Space(Grid.with_tags(1.0, [-0.45, 0.1, 0.3], 0.5), 2)
    d = derivative_operator(sp, "D")
    rng = np.random.default_rng(8)
    nodes = sp.grid.nodes
    for _ in range(30):
        u = random_member(sp, rng)
        v = random_member(sp, rng)
        assert ibp_defect(u, v) <= 1e-10 * (1.0 + u.norm() * v.norm())
        n, m = sorted(rng.integers(0, nodes.size, size=2))
        a, b = float(nodes[n]), float(nodes[m])
        lhs = integrate(d.apply(u), a, b)
        assert abs(lhs - (u(b) - u(a))) <= 1e-10 * (1.0 + u.norm())
        assert ibp_piecewise_defect(u, v, int(n), int(m)) <= 1e-10 * (
            1.0 + u.norm() * v.norm()
        )
