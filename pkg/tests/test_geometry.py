import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adq.errors import DomainError
from adq.geometry import (
    OBSERVABLE_FUNCTIONS,
    GroupElement,
    ads_coords,
    cartan_decompose,
    check_disk,
    coadjoint_transform,
    compose,
    h_matrix,
    hyperboloid_to_disk,
    inverse,
    l_matrix,
    measure_density,
    mobius_act,
    observables,
    p_matrix,
    poisson_bracket,
    pz_composition,
    s_matrix,
)

radius = st.floats(0.0, 0.9)
angle = st.floats(0.0, 2 * math.pi)
disk_points = st.builds(lambda r, a: r * cmath.exp(1j * a), radius, angle)
elements = st.builds(lambda z, t: p_matrix(z) @ h_matrix(t), disk_points, st.floats(0.0, 4 * math.pi))


class TestGroup:
    def test_determinant_checked(self):
        with pytest.raises(DomainError):
            GroupElement(1.0, 0.5)

    def test_matrix_round_trip(self):
        g = p_matrix(0.3 - 0.4j) @ h_matrix(1.2)
        assert GroupElement.from_matrix(g.matrix) == g

    @given(elements, elements)
    def test_compose_is_matrix_product(self, g1, g2):
        assert np.allclose(compose(g1, g2).matrix, g1.matrix @ g2.matrix, atol=1e-9 * np.abs(g1.matrix).max() * np.abs(g2.matrix).max())

    @given(elements)
    def test_inverse(self, g):
        e = g @ inverse(g)
        assert abs(e.alpha - 1) < 1e-9 and abs(e.beta) < 1e-9

    def test_one_parameter_subgroups(self):
        assert np.allclose((s_matrix(0.3) @ s_matrix(0.5)).matrix, s_matrix(0.8).matrix)
        assert np.allclose((l_matrix(0.3) @ l_matrix(-0.5)).matrix, l_matrix(-0.2).matrix)
        assert np.allclose((h_matrix(1.0) @ h_matrix(2.0)).matrix, h_matrix(3.0).matrix)


class TestAction:
    @given(elements, elements, disk_points)
    def test_is_an_action(self, g1, g2, z):
        lhs = mobius_act(g1 @ g2, z)
        rhs = mobius_act(g1, mobius_act(g2, z))
        assert abs(lhs - rhs) < 1e-8

    @given(disk_points, angle)
    def test_boost_and_rotation(self, z, t):
        assert abs(mobius_act(p_matrix(z), 0.0) - z) < 1e-14
        assert abs(mobius_act(h_matrix(t), z) - cmath.exp(1j * t) * z) < 1e-13

    @given(elements, disk_points)
    def test_stays_in_disk(self, g, z):
        assert abs(mobius_act(g, z)) < 1

    def test_vectorised(self):
        zs = np.array([0.1, -0.2j, 0.5 + 0.1j])
        g = p_matrix(0.3)
        assert np.allclose(mobius_act(g, zs), [mobius_act(g, z) for z in zs])

    @given(elements, disk_points)
    def test_measure_invariant(self, g, z):
        w = mobius_act(g, z)
        jac = abs(1.0 / (g.beta.conjugate() * z + g.alpha.conjugate()) ** 2) ** 2
        assert measure_density(w) * jac == pytest.approx(measure_density(z), rel=1e-9)

    @given(elements)
    def test_cartan_round_trip(self, g):
        z, theta = cartan_decompose(g)
        assert 0 <= theta < 4 * math.pi
        assert np.allclose((p_matrix(z) @ h_matrix(theta)).matrix, g.matrix, atol=1e-9 * abs(g.alpha))

    @given(disk_points, disk_points)
    def test_boost_composition(self, z, zp):
        t, theta = pz_composition(z, zp)
        assert abs(t - mobius_act(p_matrix(-z), zp)) < 1e-8

    def test_check_disk(self):
        assert check_disk(0.5j) == 0.5j
        for bad in (1.0, 1j, complex("nan")):
            with pytest.raises(DomainError):
                check_disk(bad)


class TestObservables:
    @given(disk_points)
    def test_on_hyperboloid(self, z):
        assert observables(z).shell_residual() < 1e-8 * observables(z).k0 ** 2

    def test_values(self):
        obs = observables(0.5)
        assert obs.k0 == pytest.approx(5 / 3)
        assert obs.k2 == pytest.approx(4 / 3)
        assert obs.k1 == pytest.approx(0.0)
        assert obs.kplus == pytest.approx(obs.k2 - 1j * obs.k1)
        assert obs.kminus == pytest.approx(obs.k2 + 1j * obs.k1)

    @given(disk_points)
    def test_projection_round_trip(self, z):
        o = observables(z)
        assert abs(hyperboloid_to_disk(o.k0, o.k1, o.k2) - z) < 1e-9

    def test_projection_rejects_off_shell(self):
        with pytest.raises(DomainError):
            hyperboloid_to_disk(2.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            hyperboloid_to_disk(-1.0, 0.0, 0.0)

    @given(elements, disk_points)
    def test_coadjoint_matches_pullback(self, g, z):
        moved = coadjoint_transform(g, observables(z)).as_tuple()
        direct = observables(mobius_act(inverse(g), z)).as_tuple()
        scale = max(1.0, abs(direct[0]))
        assert np.allclose(moved, direct, atol=1e-8 * scale)

    @pytest.mark.parametrize("z", [0.0, 0.3 - 0.2j, -0.5j, 0.7])
    def test_poisson_relations(self, z):
        k = OBSERVABLE_FUNCTIONS
        assert poisson_bracket(k["k0"], k["k1"], z) == pytest.approx(k["k2"](z), abs=1e-7)
        assert poisson_bracket(k["k0"], k["k2"], z) == pytest.approx(-k["k1"](z), abs=1e-7)
        assert poisson_bracket(k["k1"], k["k2"], z) == pytest.approx(-k["k0"](z), abs=1e-7)

    def test_ads_coordinates_on_hyperboloid(self):
        y2, y0, y1 = ads_coords(0.7, 1.3, kappa=2.0)
        assert y2**2 + y0**2 - y1**2 == pytest.approx(1 / 4)
