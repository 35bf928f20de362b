"""Unit tests for free words, the group ring, Fox derivatives and index-2 rewriting
"""
import numpy as np
import pytest

from errors import ParityError, PresentationShapeError
from presentation import (
    FreeWord, GroupRingElement, Presentation, augmentation, fox_derivative, fox_jacobian,
    index2_subgroup, word_invert, word_multiply,
)


def w(*syllables):
    return FreeWord(tuple(syllables))


def random_word(rng, d, max_len=20):
    length = int(rng.integers(0, max_len + 1))
    letters = [(int(rng.integers(0, d)), int(rng.choice([-1, 1]))) for _ in range(length)]
    return FreeWord.from_letters(letters)


def fox_identity_residual(word, d):
    """w - 1 - sum_i (d_i w)(x_i - 1), which must vanish"""
    total = GroupRingElement.from_word(word) - GroupRingElement.one()
    for i in range(d):
        xi_minus_1 = GroupRingElement.from_word(FreeWord.generator(i)) - GroupRingElement.one()
        total = total - fox_derivative(word, i, d) * xi_minus_1
    return total


class TestFreeWord:

    def test_reduction_merges_and_cancels(self):
        assert w((0, 1), (0, 2)).syllables == ((0, 3),)
        assert w((0, 1), (1, 1), (1, -1), (0, -1)).is_identity()

    def test_adjacent_syllables_distinct(self):
        word = w((0, 1), (1, 2), (1, -2), (0, 3), (2, 1))
        gens = [g for g, _ in word.syllables]
        assert all(a != b for a, b in zip(gens, gens[1:]))
        assert word.syllables == ((0, 4), (2, 1))

    def test_multiply_with_inverse_is_identity(self):
        x1 = FreeWord.generator(0)
        assert word_multiply(x1, word_invert(x1)).is_identity()

    def test_multiply_one_cancellation(self):
        assert word_multiply(w((0, 2)), w((0, -1), (1, 1))) == w((0, 1), (1, 1))

    def test_invert_is_anti_homomorphism(self):
        assert word_invert(w((0, 1), (1, 2))) == w((1, -2), (0, -1))

    def test_letters_and_length(self):
        word = w((0, 2), (1, -1))
        assert list(word.letters()) == [(0, 1), (0, 1), (1, -1)]
        assert len(word) == 3

    def test_power(self):
        word = w((0, 1), (1, 1))
        assert word ** 2 == w((0, 1), (1, 1), (0, 1), (1, 1))
        assert word ** -1 == ~word
        assert (word ** 0).is_identity()

    def test_format(self):
        assert w((0, 2), (1, -1)).format(['a', 'b']) == 'a^2 b^-1'
        assert FreeWord.identity().format() == '1'

    def test_reduction_idempotent_and_associative(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            u, v, x = (random_word(rng, 3) for _ in range(3))
            assert FreeWord(u.syllables) == u
            assert (u * v) * x == u * (v * x)
            assert (u * ~u).is_identity()


class TestGroupRing:

    def test_zero_coefficients_dropped(self):
        x = FreeWord.generator(0)
        element = GroupRingElement({x: 2}) - GroupRingElement({x: 2})
        assert element.is_zero()
        assert element.terms == {}

    def test_augmentation(self):
        assert augmentation(GroupRingElement.one()) == 1
        element = GroupRingElement({FreeWord.generator(0): 1, FreeWord.generator(1, -1): 2})
        assert augmentation(element) == 3

    def test_augmentation_is_multiplicative(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = GroupRingElement({random_word(rng, 2, 5): int(rng.integers(-3, 4)) for _ in range(3)})
            b = GroupRingElement({random_word(rng, 2, 5): int(rng.integers(-3, 4)) for _ in range(3)})
            assert augmentation(a * b) == augmentation(a) * augmentation(b)
            assert augmentation(a + b) == augmentation(a) + augmentation(b)

    def test_distributive(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            a, b, c = (GroupRingElement({random_word(rng, 2, 4): 1, random_word(rng, 2, 4): -2})
                       for _ in range(3))
            assert a * (b + c) == a * b + a * c


class TestFoxDerivative:

    def test_base_cases(self):
        x1 = FreeWord.generator(0)
        assert fox_derivative(x1, 0) == GroupRingElement.one()
        assert fox_derivative(x1, 1).is_zero()
        assert fox_derivative(FreeWord.generator(0, -1), 0) == GroupRingElement.from_word(
            FreeWord.generator(0, -1), -1)

    def test_cube(self):
        d = fox_derivative(w((0, 3)), 0)
        expected = GroupRingElement({FreeWord.identity(): 1, w((0, 1)): 1, w((0, 2)): 1})
        assert d == expected
        assert augmentation(d) == 3

    def test_negative_power_closed_form(self):
        d = fox_derivative(w((0, -2)), 0)
        expected = GroupRingElement({w((0, -1)): -1, w((0, -2)): -1})
        assert d == expected

    def test_product_of_squares(self):
        # d_k (x1^2 ... xh^2) = (x1^2 ... x(k-1)^2)(x_k + 1)
        h = 4
        relator = FreeWord(tuple((i, 2) for i in range(h)))
        for k in range(h):
            prefix = FreeWord(tuple((i, 2) for i in range(k)))
            expected = GroupRingElement({prefix * FreeWord.generator(k): 1, prefix: 1})
            assert fox_derivative(relator, k, h) == expected

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            fox_derivative(w((0, 1)), 2, 2)
        with pytest.raises(IndexError):
            fox_derivative(w((0, 1)), -1)

    def test_augmentation_is_exponent_sum(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            word = random_word(rng, 3)
            for i in range(3):
                assert augmentation(fox_derivative(word, i, 3)) == word.exponent_sum(i)

    def test_fundamental_identity(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            word = random_word(rng, 3)
            assert fox_identity_residual(word, 3).is_zero()

    def test_jacobian_shape(self):
        p = Presentation(('a', 'b', 'c'), (w((0, 1), (1, 1)), w((2, 3))))
        jacobian = fox_jacobian(p)
        assert len(jacobian) == 2
        assert all(len(row) == 3 for row in jacobian)


class TestPresentation:

    def test_relator_index_checked(self):
        with pytest.raises(ValueError):
            Presentation(('x',), (w((1, 1)),))

    def test_names_distinct(self):
        with pytest.raises(ValueError):
            Presentation(('x', 'x'))

    def test_free_group(self):
        p = Presentation(('x', 'y'))
        assert p.relator_count == 0
        assert p.format() == 'gens x y'


class TestIndex2Subgroup:

    def test_free_group_rank(self):
        sub = index2_subgroup(Presentation(('x1', 'x2')), (1, 1))
        assert len(sub.schreier_generators) == 3
        assert sub.relators == ()

    def test_klein_bottle(self):
        p = Presentation(('x1', 'x2'), (w((0, 2), (1, 2)),))
        sub = index2_subgroup(p, (1, 1))
        assert len(sub.schreier_generators) == 3
        assert len(sub.relators) == 2
        assert sub.coset_generator == 0

    def test_four_crosscaps(self):
        p = Presentation(('x1', 'x2', 'x3', 'x4'), (FreeWord(tuple((i, 2) for i in range(4))),))
        sub = index2_subgroup(p, (1, 1, 1, 1))
        assert len(sub.schreier_generators) == 7
        assert len(sub.relators) == 2

    def test_coset_generator_is_first_odd(self):
        p = Presentation(('a', 'b', 'c'))
        sub = index2_subgroup(p, (0, 1, 1))
        assert sub.coset_generator == 1
        assert sub.coset_representatives[1] == FreeWord.generator(1)

    def test_table_is_total(self):
        p = Presentation(('a', 'b', 'c'))
        sub = index2_subgroup(p, (1, 0, 1))
        assert set(sub.rewriting_table) == {(c, g) for c in (0, 1) for g in range(3)}

    def test_errors(self):
        p = Presentation(('x1', 'x2'), (w((0, 1), (1, 2)),))
        with pytest.raises(ParityError):
            index2_subgroup(p, (1, 0))
        with pytest.raises(ParityError):
            index2_subgroup(p, (0, 0))
        with pytest.raises(PresentationShapeError):
            index2_subgroup(p, (1,))

    def test_schreier_generators_even(self):
        p = Presentation(('a', 'b', 'c'))
        parity = (1, 1, 0)
        sub = index2_subgroup(p, parity)
        assert len(sub.schreier_generators) == 5
        assert all(s.parity(parity) == 0 for s in sub.schreier_generators)

    def test_rewrite_then_expand_round_trip(self):
        rng = np.random.default_rng(7)
        p = Presentation(('a', 'b', 'c'))
        parity = (1, 0, 1)
        sub = index2_subgroup(p, parity)
        checked = 0
        while checked < 300:
            word = random_word(rng, 3)
            if word.parity(parity):
                continue
            assert sub.expand(sub.rewrite(word)) == word
            checked += 1

    def test_rewritten_relators_are_conjugates(self):
        p = Presentation(('x1', 'x2', 'x3'), (FreeWord(((0, 2), (1, 2), (2, 2))),))
        sub = index2_subgroup(p, (1, 1, 1))
        relator = p.relators[0]
        c = FreeWord.generator(sub.coset_generator)
        assert sub.expand(sub.relators[0]) == relator
        assert sub.expand(sub.relators[1]) == c * relator * ~c
