import numpy as np
import pytest

from elastopoly import Material, elastic_basis, lambda_coeff, solid_harmonics
from elastopoly.operators import lame_apply
from elastopoly.polyalg import Poly3, X, Y, Z, R2, laplacian

rng = np.random.default_rng(42)


# -- material admissibility ------------------------------------------------------


def test_material_accepts_admissible():
    Material(1.0, 1.0)
    Material(2.5, 0.7)
    Material(-0.5, 1.0)  # negative lambda is fine while 3 lam + 2 mu > 0


@pytest.mark.parametrize("lam,mu", [(1.0, 0.0), (1.0, -1.0), (-1.0, 1.0), (-0.7, 1.0)])
def test_material_rejects_inadmissible(lam, mu):
    with pytest.raises(ValueError):
        Material(lam, mu)


# -- solid harmonics -------------------------------------------------------------


def test_degree_zero_is_constant():
    (h,) = solid_harmonics(0)
    assert h == Poly3.constant(1.0)


def test_degree_one_spans_coordinates():
    hs = solid_harmonics(1)
    assert len(hs) == 3
    # each is a single coordinate up to normalization
    mat = np.zeros((3, 3))
    for r, h in enumerate(hs):
        for (i, j, k), c in h.terms.items():
            mat[r] += c * np.array([i, j, k])
    assert np.linalg.matrix_rank(mat) == 3


def test_degree_two_matches_known_span():
    hs = solid_harmonics(2)
    assert len(hs) == 5
    known = [X * Y, X * Z, Y * Z, X * X - Y * Y, 2.0 * (Z * Z) - X * X - Y * Y]
    monos = sorted({m for p in hs + tuple(known) for m in p.terms})
    def coeff_rows(polys):
        rows = np.zeros((len(polys), len(monos)))
        for r, p in enumerate(polys):
            for mono, c in p.terms.items():
                rows[r, monos.index(mono)] = c
        return rows
    ours, theirs = coeff_rows(list(hs)), coeff_rows(known)
    assert np.linalg.matrix_rank(ours) == 5
    assert np.linalg.matrix_rank(np.vstack([ours, theirs])) == 5  # same span


@pytest.mark.parametrize("k", range(0, 9))
def test_solid_harmonics_count_homogeneity_harmonicity(k):
    hs = solid_harmonics(k)
    assert len(hs) == 2 * k + 1
    for h in hs:
        assert {i + j + kk for (i, j, kk) in h.terms} == {k}
        assert laplacian(h).max_abs_coeff() <= 1e-12  # symbolic oracle
        assert h.max_abs_coeff() == pytest.approx(1.0)


def test_solid_harmonics_linearly_independent():
    for k in (3, 6, 8):
        hs = solid_harmonics(k)
        monos = sorted({m for p in hs for m in p.terms})
        mat = np.zeros((len(hs), len(monos)))
        for r, p in enumerate(hs):
            for mono, c in p.terms.items():
                mat[r, monos.index(mono)] = c
        assert np.linalg.matrix_rank(mat) == 2 * k + 1


# -- degree coefficient ----------------------------------------------------------


def test_lambda_coeff_printed_values():
    m = Material(1.0, 1.0)
    assert lambda_coeff(m, 1) == pytest.approx(-1.0)
    assert lambda_coeff(m, 2) == pytest.approx(-0.2)
    assert lambda_coeff(m, 0) == pytest.approx(1.0 / 3.0)


def test_lambda_coeff_denominator_sign():
    # negative denominator only at k = 0; positive for k >= 1
    for lam, mu in [(1.0, 1.0), (2.5, 0.7), (-0.5, 1.0), (10.0, 0.01)]:
        m = Material(lam, mu)
        assert lam * (-1) + mu * (-2) < 0
        for k in range(1, 12):
            assert m.lam * (k - 1) + m.mu * (3 * k - 2) > 0
            lambda_coeff(m, k)  # must not blow up


def test_lambda_coeff_rejects_negative_degree():
    with pytest.raises(ValueError):
        lambda_coeff(Material(1.0, 1.0), -1)


# -- elastic basis ---------------------------------------------------------------


def test_degree_zero_elements_are_constant_fields():
    basis = elastic_basis(Material(1.0, 1.0), 0)
    assert len(basis) == 3
    for row, el in enumerate(basis, start=1):
        assert el.degree == 0 and el.row == row
        vals = el.field.eval(rng.uniform(-1, 1, size=(5, 3)))
        expected = np.zeros(3)
        expected[row - 1] = 1.0
        assert np.allclose(vals, expected)


def test_element_count_is_3_kp1_squared():
    m = Material(2.5, 0.7)
    for K in (0, 1, 2, 4):
        assert len(elastic_basis(m, K)) == 3 * (K + 1) ** 2
    assert len(elastic_basis(m, 4)) == 75


def test_row_formula_for_xy_harmonic():
    # degree 2, omega = xy, row 1 -> (xy, -0.2 |x|^2, 0) at lam = mu = 1
    m = Material(1.0, 1.0)
    basis = elastic_basis(m, 2)
    target = None
    for el in basis:
        if el.degree == 2 and el.row == 1 and el.field[0] == X * Y:
            target = el
    assert target is not None
    assert target.field[1] == -0.2 * R2
    assert target.field[2].is_zero
    assert lame_apply(m, target.field).max_abs_coeff() <= 1e-12


@pytest.mark.parametrize("lam,mu", [(1.0, 1.0), (2.5, 0.7), (-0.5, 1.0)])
def test_lame_operator_annihilates_basis(lam, mu):
    m = Material(lam, mu)
    basis = elastic_basis(m, 5)
    for el in basis:
        residual = lame_apply(m, el.field.normalized())
        assert residual.max_abs_coeff() <= 1e-12


def test_elements_homogeneous_of_tagged_degree():
    basis = elastic_basis(Material(1.0, 1.0), 5)
    for el in basis:
        assert el.field.homogeneous_degree() == el.degree


def test_ordering_degree_then_index_then_row():
    basis = elastic_basis(Material(1.0, 1.0), 3)
    keys = [(el.degree, el.harmonic_index, el.row) for el in basis]
    assert keys == sorted(keys)
    for el in basis:
        assert 1 <= el.harmonic_index <= 2 * el.degree + 1
        assert el.row in (1, 2, 3)


def test_basis_coefficient_rank_is_full():
    basis = elastic_basis(Material(1.0, 1.0), 3)
    monos = sorted({m for el in basis for c in el.field.components for m in c.terms})
    mat = np.zeros((len(basis), 3 * len(monos)))
    for r, el in enumerate(basis):
        for ci, comp in enumerate(el.field.components):
            for mono, c in comp.terms.items():
                mat[r, ci * len(monos) + monos.index(mono)] = c
    assert np.linalg.matrix_rank(mat) == len(basis)


def test_degree_one_subbasis_contains_rigid_rotations():
    basis = elastic_basis(Material(1.0, 1.0), 1)
    deg1 = [el.field for el in basis if el.degree == 1]
    assert len(deg1) == 9
    pts = rng.uniform(-1, 1, size=(12, 3))
    columns = np.stack([f.eval(pts).reshape(-1) for f in deg1], axis=1)
    for b in np.eye(3):
        target = np.cross(b, pts).reshape(-1)
        coef, res, *_ = np.linalg.lstsq(columns, target, rcond=None)
        assert np.linalg.norm(columns @ coef - target) <= 1e-10
