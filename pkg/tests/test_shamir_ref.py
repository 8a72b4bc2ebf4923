import itertools

import pytest

from Models.OpCounter import OpCounter
from Models.ShamirShare import ShamirShare
from ShamirRef.Errors import BadParams, ConstraintViolated, DuplicatePoint, InsufficientShares
from ShamirRef.ShamirRef import (bgw_product, eval_poly, shamir_reconstruct, shamir_refresh, shamir_split,
                                 shamir_zero_sharing)

PRIME = 2 ** 61 - 1


def test_eval_poly():
    # 3 + 2x + x^2 at x = 4
    assert eval_poly([3, 2, 1], 4, 101) == 27


def test_split_and_reconstruct_any_coalition(rng):
    dealing = shamir_split(123456789, 3, 5, PRIME, rng)
    assert dealing.threshold == 3
    for subset in itertools.combinations(dealing.shares, 3):
        assert shamir_reconstruct(list(subset), PRIME) == 123456789


def test_forced_coefficients():
    dealing = shamir_split(5, 2, 3, 13, None, coefficients=[5, 3])
    assert [share.y for share in dealing.shares] == [8, 11, 1]


def points(*pairs, prime=13):
    return [ShamirShare(x=x, y=y, field_prime=prime) for x, y in pairs]


def test_reconstruct_small_field():
    assert shamir_reconstruct(points((1, 8), (2, 11)), 13) == 5
    assert shamir_reconstruct(points((2, 11), (3, 1)), 13) == 5
    with pytest.raises(DuplicatePoint):
        shamir_reconstruct(points((1, 8), (1, 8)), 13)


def test_constant_polynomial_gives_zero_shares():
    dealing = shamir_split(0, 2, 3, 13, None, coefficients=[0])
    assert [share.y for share in dealing.shares] == [0, 0, 0]


def test_random_round_trips(rng):
    for _ in range(500):
        n = rng.randint(1, 6)
        t = rng.randint(1, n)
        secret = rng.randrange(PRIME)
        dealing = shamir_split(secret, t, n, PRIME, rng)
        for subset in itertools.combinations(dealing.shares, t):
            assert shamir_reconstruct(list(subset), PRIME) == secret


@pytest.mark.parametrize("x, y", [(0, 1), (13, 1), (1, 13), (1, -1)])
def test_share_outside_field_rejected(x, y):
    with pytest.raises(ValueError):
        ShamirShare(x=x, y=y, field_prime=13)


def test_split_rejects_bad_params(rng):
    with pytest.raises(BadParams):
        shamir_split(1, 4, 3, PRIME, rng)
    with pytest.raises(BadParams):
        shamir_split(1, 2, 3, 15, rng)
    with pytest.raises(BadParams):
        shamir_split(17, 2, 3, 17, rng)
    with pytest.raises(BadParams):
        shamir_split(5, 2, 3, 17, rng, coefficients=[4, 1])


def test_duplicate_points_rejected():
    shares = [ShamirShare(x=1, y=2, field_prime=17), ShamirShare(x=1, y=3, field_prime=17)]
    with pytest.raises(DuplicatePoint):
        shamir_reconstruct(shares, 17)


def test_naive_lagrange_costs_two_t_squared(rng):
    for t in (2, 4, 8):
        dealing = shamir_split(42, t, t, PRIME, rng)
        counter = OpCounter()
        assert shamir_reconstruct(list(dealing.shares), PRIME, counter) == 42
        assert counter.multiplications == 2 * t * t


def test_zero_sharing(rng):
    dealing = shamir_zero_sharing(2, 5, PRIME, rng)
    assert shamir_reconstruct(list(dealing.shares[:3]), PRIME) == 0


def test_refresh_keeps_secret_and_moves_shares(rng):
    dealing = shamir_split(99, 3, 5, PRIME, rng)
    refresh = [shamir_zero_sharing(2, 5, PRIME, rng) for _ in range(5)]
    refreshed = shamir_refresh(refresh, list(dealing.shares))
    assert shamir_reconstruct(refreshed[1:4], PRIME) == 99
    assert [s.y for s in refreshed] != [s.y for s in dealing.shares]


def test_refresh_requires_zero_sum(rng):
    dealing = shamir_split(99, 3, 5, PRIME, rng)
    refresh = [shamir_split(1, 3, 5, PRIME, rng)]
    with pytest.raises(ConstraintViolated):
        shamir_refresh(refresh, list(dealing.shares))


def test_bgw_product(rng):
    for _ in range(50):
        a, b = rng.randrange(PRIME), rng.randrange(PRIME)
        deal_a = shamir_split(a, 2, 5, PRIME, rng)
        deal_b = shamir_split(b, 2, 5, PRIME, rng)
        deal_c = shamir_zero_sharing(2, 5, PRIME, rng)
        assert bgw_product(deal_a, deal_b, deal_c, [1, 2, 3, 4, 5]) == a * b % PRIME


def test_bgw_product_needs_two_t_minus_one_parties(rng):
    deal_a = shamir_split(2, 3, 5, PRIME, rng)
    deal_b = shamir_split(3, 3, 5, PRIME, rng)
    deal_c = shamir_zero_sharing(4, 5, PRIME, rng)
    with pytest.raises(InsufficientShares):
        bgw_product(deal_a, deal_b, deal_c, [1, 2, 3, 4])
    assert bgw_product(deal_a, deal_b, deal_c, [1, 2, 3, 4, 5]) == 6


def test_refresh_small_field(rng):
    dealing = shamir_split(5, 2, 3, 13, None, coefficients=[5, 3])
    refresh = [shamir_split(w, 2, 3, 13, rng) for w in (4, 9, 0)]
    refreshed = shamir_refresh(refresh, list(dealing.shares))
    for pair in itertools.combinations(refreshed, 2):
        assert shamir_reconstruct(list(pair), 13) == 5

    with pytest.raises(ConstraintViolated):
        shamir_refresh([shamir_split(1, 2, 3, 13, rng) for _ in range(3)], list(dealing.shares))


def test_bgw_product_exhaustive_small_field(rng):
    for a, b in itertools.product(range(13), repeat=2):
        deal_a = shamir_split(a, 2, 3, 13, rng)
        deal_b = shamir_split(b, 2, 3, 13, rng)
        deal_c = shamir_zero_sharing(2, 3, 13, rng)
        assert bgw_product(deal_a, deal_b, deal_c, [1, 2, 3]) == a * b % 13


def test_bgw_product_small_field_example(rng):
    deal_c = shamir_zero_sharing(2, 3, 13, rng)
    assert bgw_product(shamir_split(3, 2, 3, 13, rng), shamir_split(4, 2, 3, 13, rng), deal_c, [1, 2, 3]) == 12
    with pytest.raises(InsufficientShares):
        bgw_product(shamir_split(3, 2, 3, 13, rng), shamir_split(4, 2, 3, 13, rng), deal_c, [1, 2])


def test_bgw_product_checks_its_dealings(rng):
    deal_a = shamir_split(3, 2, 5, PRIME, rng)
    deal_b = shamir_split(4, 2, 5, PRIME, rng)
    zero = shamir_zero_sharing(2, 5, PRIME, rng)

    with pytest.raises(ConstraintViolated):
        bgw_product(deal_a, deal_b, shamir_split(1, 3, 5, PRIME, rng), [1, 2, 3])
    with pytest.raises(BadParams):
        bgw_product(deal_a, deal_b, shamir_zero_sharing(3, 5, PRIME, rng), [1, 2, 3])
    with pytest.raises(BadParams):
        bgw_product(deal_a, shamir_split(4, 3, 5, PRIME, rng), zero, [1, 2, 3])
    with pytest.raises(BadParams):
        bgw_product(deal_a, deal_b, shamir_zero_sharing(2, 5, 13, rng), [1, 2, 3])
    assert bgw_product(deal_a, deal_b, zero, [1, 2, 3]) == 12
