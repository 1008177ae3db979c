from fractions import Fraction

import pytest

from pointspectra.errors import MixedFieldError, NotASquareError, ScalarDivisionError
from pointspectra.geometry.scalar import QuadScalar, is_square_free, parse_scalar, rational_sqrt


def test_arithmetic_in_sqrt2():
    x = QuadScalar(1, 1, 2)
    y = QuadScalar(3, -2, 2)
    assert x + y == QuadScalar(4, -1, 2)
    assert x * y == QuadScalar(3 - 4, 3 - 2, 2)
    assert (x * y) / y == x
    assert x - x == 0


def test_rational_field_folds_sqrt_part():
    assert QuadScalar(2, 3, 1) == 5
    assert QuadScalar(2, 3, 1).is_rational()


def test_sign_and_ordering():
    # 1 - sqrt(2) < 0 < sqrt(2) - 1
    assert QuadScalar(1, -1, 2).sign() == -1
    assert QuadScalar(-1, 1, 2).sign() == 1
    assert QuadScalar(3, -2, 2).sign() == 1  # 3 > 2*sqrt(2)
    values = [QuadScalar(0, 1, 2), QuadScalar(1, 0, 2), QuadScalar(3, -2, 2)]
    assert sorted(values) == [QuadScalar(3, -2, 2), QuadScalar(1, 0, 2), QuadScalar(0, 1, 2)]


def test_sqrt_inside_field():
    assert QuadScalar(9, 0, 1).sqrt() == 3
    assert QuadScalar(8, 0, 2).sqrt() == QuadScalar(0, 2, 2)
    # (1 + sqrt 2)^2 = 3 + 2 sqrt 2
    assert QuadScalar(3, 2, 2).sqrt() == QuadScalar(1, 1, 2)
    # 3 - 2 sqrt 2 = (sqrt 2 - 1)^2, the non-negative root
    assert QuadScalar(3, -2, 2).sqrt() == QuadScalar(-1, 1, 2)


def test_sqrt_failures():
    with pytest.raises(NotASquareError):
        QuadScalar(2, 0, 1).sqrt()
    with pytest.raises(NotASquareError):
        QuadScalar(-4, 0, 1).sqrt()


def test_division_by_zero():
    with pytest.raises(ScalarDivisionError):
        QuadScalar(1, 1, 2) / QuadScalar.zero(2)


def test_mixed_fields_rejected():
    with pytest.raises(MixedFieldError):
        QuadScalar(0, 1, 2) + QuadScalar(0, 1, 3)
    # rationals lift into any field
    assert QuadScalar(0, 1, 2) + QuadScalar(1, 0, 3) == QuadScalar(1, 1, 2)


def test_parse_and_format():
    for text in ["7", "-3/4", "sqrt(2)", "6*sqrt(2)", "1-sqrt(2)", "1/2+3/2*sqrt(2)", "-sqrt(2)"]:
        value = parse_scalar(text, 2)
        assert str(value) == text
    assert parse_scalar(" 1/2*sqrt(3) ", 3) == QuadScalar(0, Fraction(1, 2), 3)


def test_parse_errors():
    with pytest.raises(MixedFieldError):
        parse_scalar("sqrt(3)", 2)
    with pytest.raises(ValueError):
        parse_scalar("1/0x", 1)
    with pytest.raises(ValueError):
        parse_scalar("", 1)


def test_hash_consistent_with_equality():
    assert hash(QuadScalar(5, 0, 2)) == hash(QuadScalar(5, 0, 1))
    assert len({QuadScalar(1, 1, 2), QuadScalar(1, 1, 2), QuadScalar(1, 0, 2)}) == 2


def test_helpers():
    assert is_square_free(6) and not is_square_free(12)
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2)) is None
    assert float(QuadScalar(0, 1, 2)) == pytest.approx(2 ** 0.5)


def _random_scalar(rng, d):
    a, b = (Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(2))
    return QuadScalar(a, b, d)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_field_laws_hold_for_random_elements(rng, d):
    for _ in range(100):
        x, y, z = (_random_scalar(rng, d) for _ in range(3))
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        if not x.is_zero():
            assert x * (1 / x) == 1


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_ordering_agrees_with_the_real_embedding(rng, d):
    for _ in range(200):
        x, y = _random_scalar(rng, d), _random_scalar(rng, d)
        gap = float(x) - float(y)
        if abs(gap) > 1e-6:
            assert x.compare(y) == (1 if gap > 0 else -1)
        assert x * x >= 0


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_square_roots_of_random_elements(rng, d):
    for _ in range(200):
        y = _random_scalar(rng, d)
        assert (y * y).sqrt() == abs(y)
        x = _random_scalar(rng, d)
        try:
            root = x.sqrt()
        except NotASquareError:
            continue
        assert root**2 == x
        assert root >= 0
