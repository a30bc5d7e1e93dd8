from fractions import Fraction

import pytest

from app.models.quatalg import QuatMatrix, build_Bp
from app.processors.fixture_processor import FixtureProcessor
from app.services.embedding_service import (
    EmbeddingService,
    EmbeddingSolution,
    _conjugations,
    all_end_rings,
    candidate_primes,
    count_with_full_automorphisms,
    direct_search,
    embedding_count,
    find_solutions,
    remove_conjugates,
    rosati,
    twist_end_ring,
    verify_conditions,
)
from tests.conftest import LIGHT_ROWS

GOLDEN_COUNTS = [
    (f.key, p, int(e))
    for f in FixtureProcessor.load_fixtures()
    if f.key in LIGHT_ROWS
    for p, e in sorted(f.embed_tally.items())
]


def test_no_candidate_primes_for_q_zeta5(build_field):
    assert candidate_primes(build_field("dt5"), 150) == []


def test_candidate_primes_dt29(build_field):
    assert candidate_primes(build_field("dt29"), 150) == [5]


def test_end_ring_triples():
    (R,) = all_end_rings(5)
    assert R.coincident and R.norm == 1
    rings = all_end_rings(11)
    assert len(rings) == 4
    assert sum(R.coincident for R in rings) >= 2


def test_dt29_at_five(build_field):
    K = build_field("dt29")
    assert embedding_count(K, 5) == 2
    for R in all_end_rings(5):
        for sol in find_solutions(K, R):
            assert verify_conditions(K, sol, R.norm)


def test_service_summary_adds_up(build_field):
    K = build_field("dt29")
    result = EmbeddingService(show_progress=False).count(K, 5)
    assert sum(r.weight for r in result.end_rings) == result.count
    assert all(r.reduced <= r.solutions for r in result.end_rings)
    assert result.full_aut_count is None


def test_tally_skips_primes_with_no_embeddings(build_field):
    result = EmbeddingService(max_prime=30, show_progress=False).tally(build_field("dt29"))
    assert result.tally.render() == "5^2"
    assert [r.p for r in result.per_prime] == [5]


@pytest.mark.slow
def test_pruned_search_matches_direct_search(build_field):
    K = build_field("dt29")
    for R in all_end_rings(5):
        pruned = sorted(find_solutions(K, R), key=lambda s: s.sort_key())
        direct = sorted(direct_search(K, R), key=lambda s: s.sort_key())
        assert pruned == direct


@pytest.mark.slow
def test_count_is_independent_of_ideal_representative(build_field):
    K = build_field("dt5x169")
    R = all_end_rings(11)[0]
    gamma = R.order.algebra.element(1, 1, 0, 0)
    twisted = twist_end_ring(R, gamma)
    assert twisted.coincident
    before = remove_conjugates(find_solutions(K, R), R)
    after = remove_conjugates(find_solutions(K, twisted), twisted)
    assert len(before) == len(after)


@pytest.mark.slow
def test_full_automorphism_orbits_merge_conjugate_pairs(build_field):
    K = build_field("dt29")
    full = count_with_full_automorphisms(K, 5)
    assert 0 < full <= embedding_count(K, 5)
    verbose = EmbeddingService(show_progress=False, verbose_orbits=True).count(K, 5)
    assert verbose.full_aut_count == full
    assert len(verbose.representatives) == verbose.count


@pytest.mark.slow
@pytest.mark.parametrize("key, p, expected", GOLDEN_COUNTS)
def test_embedding_counts_match_printed_table(build_field, key, p, expected):
    assert embedding_count(build_field(key), p) == expected


def _random_matrix(rng, B) -> QuatMatrix:
    def entry():
        return B.element(*(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(4)))

    return QuatMatrix(entry(), entry(), entry(), entry())


def test_rosati_examples():
    B = build_Bp(5)
    one, i, j, k = B.standard_basis()
    zero = B.scalar(0)
    NI = Fraction(3)
    identity = QuatMatrix.scalar(B, 1)
    assert rosati(identity, NI) == identity
    assert rosati(QuatMatrix.diagonal(i, one + j), NI) == QuatMatrix.diagonal(-i, one - j)
    assert rosati(QuatMatrix(zero, k, zero, zero), NI) == QuatMatrix(zero, zero, -k / NI, zero)


def test_rosati_is_an_involutive_anti_homomorphism(rng):
    B = build_Bp(7)
    for _ in range(200):
        NI = Fraction(rng.randint(1, 12))
        M, N = _random_matrix(rng, B), _random_matrix(rng, B)
        assert rosati(rosati(M, NI), NI) == M
        assert rosati(M * N, NI) == rosati(N, NI) * rosati(M, NI)


def test_remove_conjugates_of_nothing():
    (R,) = all_end_rings(2)
    assert remove_conjugates([], R) == []


def test_q_zeta5_has_no_solutions(build_field):
    K = build_field("dt5")
    assert embedding_count(K, 7) == 0
    assert embedding_count(K, 11) == 0
    assert EmbeddingService(max_prime=47, show_progress=False).tally(K).tally.is_empty()


def test_reduced_solutions_are_orbit_representatives(build_field):
    K = build_field("dt29")
    (R,) = all_end_rings(5)
    solutions = find_solutions(K, R)
    reduced = remove_conjugates(solutions, R)
    assert 0 < len(reduced) <= len(solutions)
    assert remove_conjugates(list(reversed(solutions)), R) == reduced
    for U, U_inv in list(_conjugations(R))[:4]:
        image = EmbeddingSolution(U * reduced[0].lambda1 * U_inv, U * reduced[0].lambda2 * U_inv)
        assert image in solutions


@pytest.mark.slow
def test_count_is_independent_of_ideal_representative_at_five(build_field):
    K = build_field("dt29")
    (R,) = all_end_rings(5)
    gamma = R.order.algebra.element(1, 1, 1, 0)
    twisted = twist_end_ring(R, gamma)
    before = remove_conjugates(find_solutions(K, R), R)
    after = remove_conjugates(find_solutions(K, twisted), twisted)
    assert len(before) == len(after) == 2


@pytest.mark.slow
def test_direct_search_agrees_at_eleven(build_field):
    K = build_field("dt64x5")
    for R in all_end_rings(11):
        assert len(find_solutions(K, R)) == len(direct_search(K, R))
