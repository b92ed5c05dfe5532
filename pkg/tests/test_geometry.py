import numpy as np
import pytest

from elastopoly import (
    Ellipsoid,
    Sphere,
    StarShaped,
    classify_symmetry,
    make_quadrature,
    radial_function,
    tangential_rotation_fields,
)
from elastopoly.polyalg import Poly3

BUMPY = StarShaped(coeffs=((0, 1, 1.0), (2, 2, 0.15), (3, 4, 0.1)))
BUMPY_AXI = StarShaped(coeffs=((0, 1, 1.0), (2, 1, 0.2)), axis=(0.0, 0.0, 1.0))


# -- quadrature -------------------------------------------------------------------


def test_unit_sphere_total_weight(sphere_quad):
    assert abs(sphere_quad.area - 4.0 * np.pi) <= 1e-10


def test_closed_surface_normal_integral_vanishes(sphere_quad, triaxial_quad):
    for quad in (sphere_quad, triaxial_quad):
        closure = np.linalg.norm(quad.weights @ quad.normals)
        assert closure <= 1e-10 * quad.area


def test_degenerate_ellipsoid_equals_sphere(sphere_quad):
    quad = make_quadrature(Ellipsoid(semi_axes=(1.0, 1.0, 1.0)), 32, 64)
    assert np.allclose(quad.points, sphere_quad.points, atol=1e-14)
    assert np.allclose(quad.normals, sphere_quad.normals, atol=1e-13)
    assert np.allclose(quad.weights, sphere_quad.weights, rtol=1e-12)


def test_star_shaped_sphere_recovers_area():
    quad = make_quadrature(StarShaped(coeffs=((0, 1, 2.0),)), 16, 32)
    assert abs(quad.area - 4.0 * np.pi * 4.0) <= 1e-9


@pytest.mark.parametrize("spec", [Sphere(), Ellipsoid(semi_axes=(1.0, 1.3, 1.7)), BUMPY])
def test_quadrature_spectral_convergence_on_degree4_trace(spec):
    # fixed degree-4 polynomial integrand against an n = 96 reference
    f = Poly3({(4, 0, 0): 0.3, (2, 2, 0): -1.0, (0, 1, 3): 0.7, (1, 1, 1): 0.4, (0, 0, 0): 0.2})
    coarse = make_quadrature(spec, 32, 64)
    fine = make_quadrature(spec, 96, 192)
    val32 = coarse.integrate(f.eval(coarse.points))
    val96 = fine.integrate(f.eval(fine.points))
    assert abs(val32 - val96) <= 1e-10 * abs(val96) + 1e-14


def test_normals_are_outward_and_unit(triaxial_quad):
    norms = np.linalg.norm(triaxial_quad.normals, axis=1)
    assert np.max(np.abs(norms - 1.0)) <= 1e-13
    rel = triaxial_quad.points - np.zeros(3)
    assert np.min(np.einsum("ni,ni->n", rel, triaxial_quad.normals)) > 0.0


def test_star_quadrature_area_convergence():
    coarse = make_quadrature(BUMPY, 32, 64)
    fine = make_quadrature(BUMPY, 96, 192)
    assert abs(coarse.area - fine.area) <= 1e-10 * fine.area


def test_resolution_validation():
    with pytest.raises(ValueError):
        make_quadrature(Sphere(), 3, 64)
    with pytest.raises(ValueError):
        make_quadrature(Sphere(), 32, 7)


def test_nonpositive_radial_rejected():
    spec = StarShaped(coeffs=((0, 1, 0.1), (1, 1, 1.0)))  # goes negative
    with pytest.raises(ValueError):
        make_quadrature(spec, 16, 32)


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        Sphere(radius=0.0)
    with pytest.raises(ValueError):
        Ellipsoid(semi_axes=(1.0, -1.0, 1.0))
    with pytest.raises(ValueError):
        StarShaped(coeffs=((1, 4, 1.0),))  # s out of 1..2k+1


def test_radial_function_of_ellipsoid():
    spec = Ellipsoid(semi_axes=(1.0, 1.3, 1.7))
    assert radial_function(spec, np.array([[1.0, 0.0, 0.0]]))[0] == pytest.approx(1.0)
    assert radial_function(spec, np.array([[0.0, 0.0, 1.0]]))[0] == pytest.approx(1.7)


def test_quadrature_csv_schema(sphere_quad):
    text = sphere_quad.to_csv()
    lines = text.splitlines()
    assert lines[0] == "x,y,z,nx,ny,nz,w"
    assert len(lines) == sphere_quad.n_samples + 1
    assert len(lines[1].split(",")) == 7


# -- symmetry classification -------------------------------------------------------


def test_classify_sphere():
    sym = classify_symmetry(Sphere(center=(0.0, 1.0, 0.0), radius=2.0))
    assert sym.tag == "sphere" and sym.center == (0.0, 1.0, 0.0)
    assert sym.n_rotation_fields == 3


def test_classify_spheroid_axis_of_distinct_semi_axis():
    assert classify_symmetry(Ellipsoid(semi_axes=(1.0, 1.0, 1.5))).axis == (0.0, 0.0, 1.0)
    assert classify_symmetry(Ellipsoid(semi_axes=(1.0, 1.5, 1.0))).axis == (0.0, 1.0, 0.0)
    assert classify_symmetry(Ellipsoid(semi_axes=(1.5, 1.0, 1.0))).axis == (1.0, 0.0, 0.0)


def test_classify_triaxial_is_generic():
    sym = classify_symmetry(Ellipsoid(semi_axes=(1.0, 1.3, 1.7)))
    assert sym.tag == "generic" and sym.n_rotation_fields == 0


def test_classify_equal_axes_ellipsoid_is_sphere():
    assert classify_symmetry(Ellipsoid(semi_axes=(2.0, 2.0, 2.0))).tag == "sphere"


def test_classify_star_by_declared_metadata():
    assert classify_symmetry(BUMPY).tag == "generic"
    sym = classify_symmetry(BUMPY_AXI)
    assert sym.tag == "axisymmetric"
    assert np.allclose(sym.axis, (0.0, 0.0, 1.0))


# -- tangential rotation fields ------------------------------------------------------


def test_rotation_field_counts(sphere_quad, spheroid_quad, triaxial_quad):
    assert len(tangential_rotation_fields(classify_symmetry(sphere_quad.spec), sphere_quad)) == 3
    assert len(tangential_rotation_fields(classify_symmetry(spheroid_quad.spec), spheroid_quad)) == 1
    assert tangential_rotation_fields(classify_symmetry(triaxial_quad.spec), triaxial_quad) == []


def test_rotation_fields_tangent_and_orthonormal(sphere_quad, spheroid_quad):
    for quad in (sphere_quad, spheroid_quad):
        gammas = tangential_rotation_fields(classify_symmetry(quad.spec), quad)
        for g in gammas:
            assert np.max(np.abs(np.einsum("ni,ni->n", g, quad.normals))) <= 1e-12
        gram = np.array([[quad.inner(a, b) for b in gammas] for a in gammas])
        assert np.max(np.abs(gram - np.eye(len(gammas)))) <= 1e-10


def test_rotation_field_direction_on_sphere(sphere_quad):
    # the b = e3 generator at x = (1, 0, 0) points along +y before normalization
    gammas = tangential_rotation_fields(classify_symmetry(sphere_quad.spec), sphere_quad)
    idx = np.argmin(np.linalg.norm(sphere_quad.points - np.array([1.0, 0.0, 0.0]), axis=1))
    g3 = gammas[2][idx]
    assert abs(g3[0]) < 0.15 and g3[1] > 0.2 and abs(g3[2]) < 0.15


def test_axisymmetric_star_rotation_field(spheroid_quad):
    quad = make_quadrature(BUMPY_AXI, 16, 32)
    gammas = tangential_rotation_fields(classify_symmetry(BUMPY_AXI), quad)
    assert len(gammas) == 1
    assert np.max(np.abs(np.einsum("ni,ni->n", gammas[0], quad.normals))) <= 1e-12
