"""Unit tests for matrix groups, adjoint operators, validation and random surface representations
"""
import numpy as np
import pytest

from conftest import I2, I_SIGMA_1, klein
from errors import InvalidRepresentationError
from presentation import FreeWord, GroupRingElement, Presentation, fox_derivative
from rep import (
    Cocycle, GroupSpec, SIGMA_1, SIGMA_2, SIGMA_3, adjoint_operator, adjoint_word, cocycle_value,
    evaluate_group_ring, evaluate_word, lie_algebra, lie_basis, random_surface_representation,
    require_valid, validate_representation,
)
from surfaces import SurfaceKind


class TestGroupSpec:

    @pytest.mark.parametrize(
        "text, kind, n, lie_dim",
        [
            ("SL(2,C)", 'SL', 2, 3),
            ("PSL(2, C)", 'PSL', 2, 3),
            ("GL(3,C)", 'GL', 3, 9),
            ("SL(3)", 'SL', 3, 8),
        ],
    )
    def test_parse(self, text, kind, n, lie_dim):
        spec = GroupSpec.parse(text)
        assert (spec.kind, spec.n, spec.lie_dim) == (kind, n, lie_dim)

    def test_parse_rejects(self):
        with pytest.raises(ValueError):
            GroupSpec.parse("SO(3,C)")

    def test_center(self):
        assert GroupSpec('GL', 2).center_dim == 1
        assert GroupSpec('SL', 2).center_order == 2
        assert GroupSpec('PSL', 2).center_order == 1
        assert GroupSpec('GL', 2).center_order is None


class TestLieAlgebra:

    def test_sl2_basis_is_pauli(self):
        basis = lie_basis(GroupSpec('SL', 2))
        for e, sigma in zip(basis, (SIGMA_1, SIGMA_2, SIGMA_3)):
            assert np.allclose(e, sigma)

    def test_gl_basis_starts_with_identity(self):
        basis = lie_basis(GroupSpec('GL', 2))
        assert len(basis) == 4
        assert np.allclose(basis[0], np.eye(2))

    def test_sl3_basis_traceless(self):
        basis = lie_basis(GroupSpec('SL', 3))
        assert len(basis) == 8
        assert all(abs(np.trace(e)) == 0 for e in basis)

    def test_coordinates_round_trip(self):
        algebra = lie_algebra(GroupSpec('SL', 3))
        rng = np.random.default_rng(1)
        vector = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert np.allclose(algebra.coordinates(algebra.matrix(vector)), vector)

    def test_trace_form(self):
        algebra = lie_algebra(GroupSpec('SL', 2))
        assert algebra.trace_form([1, 0, 0], [1, 0, 0]) == pytest.approx(2)
        assert algebra.trace_form([1, 0, 0], [0, 1, 0]) == pytest.approx(0)


class TestAdjoint:

    def test_adjoint_of_i_sigma_1(self):
        op = adjoint_operator(I_SIGMA_1, GroupSpec('SL', 2))
        assert np.allclose(op.matrix, np.diag([1, -1, -1]))

    def test_adjoint_is_homomorphism(self):
        spec = GroupSpec('SL', 3)
        rng = np.random.default_rng(4)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        ab = adjoint_operator(a @ b, spec)
        assert ab.allclose(adjoint_operator(a, spec) @ adjoint_operator(b, spec), atol=1e-8)

    def test_singular_matrix_rejected(self):
        with pytest.raises(InvalidRepresentationError):
            adjoint_operator(np.zeros((2, 2)), GroupSpec('SL', 2))

    def test_gl_center_fixed(self):
        spec = GroupSpec('GL', 2)
        op = adjoint_operator(np.array([[2, 1], [0, 3]], dtype=complex), spec)
        assert np.allclose(op.matrix[:, 0], [1, 0, 0, 0])


class TestEvaluation:

    def test_evaluate_word(self, klein_simple):
        assert np.allclose(evaluate_word(klein_simple, FreeWord.generator(0, 2)), -I2)
        assert np.allclose(evaluate_word(klein_simple, klein_simple.presentation.relators[0]), I2)

    def test_adjoint_word_matches_adjoint_of_image(self, klein_simple):
        word = FreeWord(((0, 1), (1, -2), (0, 1)))
        expected = adjoint_operator(evaluate_word(klein_simple, word), klein_simple.spec)
        assert adjoint_word(klein_simple, word).allclose(expected)

    def test_trivial_rep_group_ring_is_augmentation(self):
        rep = klein([I2, I2])
        d = fox_derivative(rep.presentation.relators[0], 1, 2)
        assert np.allclose(evaluate_group_ring(rep, d).matrix, 2 * np.eye(3))

    def test_zero_element(self, klein_simple):
        assert np.allclose(evaluate_group_ring(klein_simple, GroupRingElement.zero()).matrix, 0)


class TestValidation:

    def test_golden_accepted(self, klein_simple, klein_h2, quaternion_genus2):
        for rep in (klein_simple, klein_h2, quaternion_genus2):
            report = validate_representation(rep)
            assert report.accepted
            assert report.worst.residual < 1e-12

    def test_invalid_klein_rejected(self):
        rep = klein([I2, I_SIGMA_1])
        report = validate_representation(rep)
        assert not report.accepted
        with pytest.raises(InvalidRepresentationError) as excinfo:
            require_valid(rep)
        assert excinfo.value.relator_index == 0
        assert excinfo.value.residual == pytest.approx(np.linalg.norm(-2 * I2))

    def test_determinant_checked_for_sl(self):
        rep = klein([2 * I2, 0.5 * I2])
        report = validate_representation(rep)
        assert not report.accepted
        assert 'determinant' in report.notes[0]

    def test_gl_accepts_any_determinant(self):
        rep = klein([2 * I2, 0.5 * I2], kind='GL')
        assert validate_representation(rep).accepted

    def test_psl_center(self):
        # in PSL the relator may map to -I
        rep = klein([I2, I_SIGMA_1], kind='PSL')
        report = validate_representation(rep)
        assert report.accepted
        assert report.residuals[0].center_element == pytest.approx(-1)
        assert any('center' in note for note in report.notes)

    @pytest.mark.parametrize("kind", ['SL', 'PSL', 'GL'])
    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_non_finite_images_rejected(self, kind, bad):
        image = np.array([[bad, 0], [0, 1]], dtype=complex)
        rep = klein([image, I2], kind=kind)
        report = validate_representation(rep)
        assert not report.accepted
        assert 'non-finite' in report.notes[0]
        with pytest.raises(InvalidRepresentationError, match='non-finite'):
            require_valid(rep)

    def test_adjoint_of_non_finite_matrix(self):
        with pytest.raises(InvalidRepresentationError):
            adjoint_operator(np.full((2, 2), np.nan), GroupSpec('SL', 2))

    def test_shape_mismatch(self):
        p = Presentation(('x',))
        with pytest.raises(ValueError):
            from rep import Representation
            Representation(p, GroupSpec('SL', 2), (np.eye(3),))


class TestCocycleValue:

    def test_square(self, klein_simple):
        # gamma(x^2) = gamma(x) + Ad_x gamma(x)
        values = np.array([[0.3, 1.0, -2.0], [0.0, 0.5, 1.0]], dtype=complex)
        gamma = Cocycle(values)
        ad = klein_simple.adjoint_images[0].matrix
        expected = values[0] + ad @ values[0]
        assert np.allclose(cocycle_value(klein_simple, gamma, FreeWord.generator(0, 2)), expected)

    def test_inverse_letter(self, klein_simple):
        gamma = Cocycle(np.array([[1, 2, 3], [4, 5, 6]], dtype=complex))
        ad_inv = klein_simple.adjoint_inverse_images[1].matrix
        expected = -ad_inv @ gamma.values[1]
        assert np.allclose(cocycle_value(klein_simple, gamma, FreeWord.generator(1, -1)), expected)

    def test_coboundary(self, klein_simple):
        xi = np.array([0.5, -1.0, 2.0], dtype=complex)
        gamma = Cocycle.coboundary(klein_simple, xi)
        word = FreeWord(((0, 1), (1, -1), (0, 3)))
        ad = adjoint_word(klein_simple, word).matrix
        assert np.allclose(cocycle_value(klein_simple, gamma, word), xi - ad @ xi)


class TestRandomSurfaceRepresentation:

    @pytest.mark.parametrize("kind", ['SL', 'GL'])
    @pytest.mark.parametrize("surface", [SurfaceKind(True, 2), SurfaceKind(True, 3),
                                         SurfaceKind(False, 3), SurfaceKind(False, 4)])
    def test_validates(self, kind, surface):
        for seed in range(5):
            rep = random_surface_representation(GroupSpec(kind, 2), surface, seed)
            assert validate_representation(rep).accepted

    def test_deterministic(self):
        a = random_surface_representation(GroupSpec('SL', 2), SurfaceKind(False, 3), 42)
        b = random_surface_representation(GroupSpec('SL', 2), SurfaceKind(False, 3), 42)
        assert all(np.array_equal(x, y) for x, y in zip(a.images, b.images))

    def test_torus(self):
        rep = random_surface_representation(GroupSpec('SL', 2), SurfaceKind(True, 1), 0)
        assert validate_representation(rep).accepted

    def test_unsupported_group(self):
        with pytest.raises(ValueError):
            random_surface_representation(GroupSpec('SL', 3), SurfaceKind(True, 2), 0)
