import random
from fractions import Fraction as F

import pytest

from conftest import corpus, random_plmap, random_rational
from intervaldyn.exactset import IntervalSet, contains, intersect, interval
from intervaldyn.hull import (
    check_indecomposable,
    check_strong_indecomposable,
    check_transitive_on,
    check_transitivity,
    core_levels,
    cycle_decomposition,
    extract_core,
    find_shrinking_family,
    forward_hull,
)
from intervaldyn.mapmodel import image_set, iterate_pl, restrict
from intervaldyn.verdict import Budget, PreconditionError, Status

E31 = IntervalSet.of((0, F(1, 3)), (F(2, 3), 1))


def hull(m, *pairs, budget=Budget()):
    return forward_hull(m, IntervalSet.of(*pairs), budget)




class TestForwardHull:
    def test_example_31(self, ex31):
        h = hull(ex31, (F(1, 3), F(4, 9)))
        assert h.converged
        assert h.hull == IntervalSet.of((0, F(4, 9)), (F(2, 3), 1))

    def test_staircase(self, ex32):
        h = hull(ex32, (F(1, 2), F(3, 4)))
        assert h.converged and h.hull == IntervalSet.of((F(1, 2), 1))

    def test_staircase_lower_seed(self, ex32):
        # f([1/4,3/8]) = [1/2,3/4], whose hull is [1/2,1]
        h = hull(ex32, (F(1, 4), F(3, 8)))
        assert h.hull == IntervalSet.of((F(1, 4), F(3, 8)), (F(1, 2), 1))

    @pytest.mark.parametrize("m", corpus(), ids=lambda m: m.name)
    def test_fixed_point(self, m):
        for c in (m.domain.lo, m.domain.hi, F(1, 2), F(2, 3)):
            if m.evaluate(c) == c:
                h = hull(m, (c, c))
                assert h.converged and h.hull == IntervalSet.of((c, c))

    def test_constant_keeps_point(self, const_half):
        h = hull(const_half, (0, F(1, 8)))
        assert h.hull == IntervalSet.of((0, F(1, 8)), (F(1, 2), F(1, 2)))

    def test_component_overflow_unconverged(self):
        from intervaldyn.mapmodel import make_plmap

        m = make_plmap(interval(0, 1), [(0, F(1, 4)), (1, F(3, 4))])
        h = hull(m, (0, F(1, 8)), budget=Budget(components=16))
        assert not h.converged
        assert contains(h.hull, IntervalSet.of((0, F(1, 8))))

    def test_seed_outside(self, tent):
        with pytest.raises(ValueError):
            hull(tent, (F(1, 2), 2))

    def test_empty_seed(self, tent):
        with pytest.raises(ValueError):
            forward_hull(tent, IntervalSet.empty())


def nested_pairs(m, rng, count):
    for _ in range(count):
        a, b = sorted(random_rational(rng, m.domain.lo, m.domain.hi, den=64) for _ in range(2))
        c, d = sorted(random_rational(rng, a, b, den=64 * 64) for _ in range(2))
        yield IntervalSet.of((c, d)), IntervalSet.of((a, b))


@pytest.mark.parametrize("m", corpus(), ids=lambda m: m.name)
def test_hull_laws_on_corpus(m):
    rng = random.Random(hash(m.name) % 1000)
    budget = Budget(hull_iterations=64)
    for small, big in nested_pairs(m, rng, 200):
        hs, hb = forward_hull(m, small, budget), forward_hull(m, big, budget)
        assert contains(hs.hull, small) and contains(hb.hull, big)
        for h in (hs, hb):
            if h.converged:
                assert contains(h.hull, image_set(m, h.hull))
                assert forward_hull(m, h.hull, budget).hull == h.hull
        if hs.converged and hb.converged:
            assert contains(hb.hull, hs.hull)


def test_staircase_pairwise_spot_check(ex32):
    rng = random.Random(8)
    for _ in range(40):
        I, J = (sorted(random_rational(rng, den=128) for _ in range(2)) for _ in range(2))
        if I[0] == I[1] or J[0] == J[1]:
            continue
        A = hull(ex32, tuple(I)).hull
        B = hull(ex32, tuple(J)).hull
        short = min(I[1] - I[0], J[1] - J[0])
        assert contains(intersect(A, B), IntervalSet.of((1 - short / 4, 1)))


class TestTransitivity:
    def test_example_31(self, ex31):
        v = check_transitivity(ex31, 6)
        assert v.fails and v.certified
        assert v.witness["seed"] == IntervalSet.of((F(1, 3), F(4, 9)))
        assert v.witness["hull"] == IntervalSet.of((0, F(4, 9)), (F(2, 3), 1))
        assert v.witness["missing"] == IntervalSet.of((F(4, 9), F(2, 3)))

    def test_tent(self, tent):
        v = check_transitivity(tent, 6)
        assert v.holds and not v.certified and v.resolution == 6

    def test_identity(self, identity):
        v = check_transitivity(identity, 1)
        assert v.fails and v.witness["hull"] == IntervalSet.of((0, F(1, 2)))

    def test_bad_resolution(self, tent):
        with pytest.raises(ValueError):
            check_transitivity(tent, 0)

    def test_unknown_when_budget_short(self):
        from intervaldyn.mapmodel import make_plmap

        m = make_plmap(interval(0, 1), [(0, F(1, 4)), (1, F(3, 4))])
        v = check_transitivity(m, 2, Budget(hull_iterations=8))
        assert v.status in (Status.UNKNOWN, Status.FAILS)


class TestTransitiveOn:
    def test_example_31_core(self, ex31):
        assert check_transitive_on(ex31, E31, 6).holds

    def test_staircase(self, ex32):
        v = check_transitive_on(ex32, IntervalSet.of((0, 1)), 3)
        assert v.fails
        assert v.witness["hull"] == IntervalSet.of((F(1, 8), 1))
        assert v.witness["missing"] == IntervalSet.of((0, F(1, 8)))
        h = hull(ex32, (F(1, 4), F(3, 8)))
        assert h.hull == IntervalSet.of((F(1, 4), F(3, 8)), (F(1, 2), 1))

    def test_identity(self, identity):
        assert check_transitive_on(identity, IntervalSet.of((0, 1)), 3).fails

    def test_not_invariant(self, ex31):
        with pytest.raises(PreconditionError):
            check_transitive_on(ex31, IntervalSet.of((0, F(1, 3))), 3)


class TestIndecomposable:
    def test_staircase(self, ex32):
        assert check_indecomposable(ex32, 6).holds
        A = hull(ex32, (F(1, 2), F(3, 4))).hull
        B = hull(ex32, (F(1, 4), F(3, 8))).hull
        assert contains(intersect(A, B), IntervalSet.of((F(15, 16), 1)))

    def test_identity(self, identity):
        v = check_indecomposable(identity, 2)
        assert v.fails and v.certified
        assert v.witness["hulls"] == [IntervalSet.of((0, F(1, 4))), IntervalSet.of((F(1, 2), F(3, 4)))]

    def test_constant(self, const_half):
        v = check_indecomposable(const_half, 3)
        assert v.fails and v.certified
        assert v.witness["intersection"] == IntervalSet.of((F(1, 2), F(1, 2)))

    def test_constant_listed_pair(self, const_half):
        # the pair [0,1/8] and [5/8,3/4] is an equally valid certificate
        A = hull(const_half, (0, F(1, 8)))
        B = hull(const_half, (F(5, 8), F(3, 4)))
        assert A.hull == IntervalSet.of((0, F(1, 8)), (F(1, 2), F(1, 2)))
        assert B.hull == IntervalSet.of((F(1, 2), F(1, 2)), (F(5, 8), F(3, 4)))
        for h in (A, B):
            assert contains(h.hull, image_set(const_half, h.hull))
        assert intersect(A.hull, B.hull) == IntervalSet.of((F(1, 2), F(1, 2)))

    def test_tent(self, tent):
        assert check_indecomposable(tent, 5).holds


class TestStrong:
    def test_example_31(self, ex31):
        v, core = check_strong_indecomposable(ex31, 8)
        assert v.holds and core.E == E31

    def test_staircase_family(self, ex32):
        v, core = check_strong_indecomposable(ex32, 10)
        assert v.fails and v.certified and core is None
        fam = v.witness["family"]
        assert len(fam) == 20
        for t, A in enumerate(fam, start=1):
            assert A == IntervalSet.of((1 - F(1, 2**t), 1))
            assert contains(A, image_set(ex32, A))
        assert v.witness["description"] == "J_t = [1 - 1/2^t, 1]"

    def test_tent(self, tent):
        v, core = check_strong_indecomposable(tent, 8)
        assert v.holds and core.E == IntervalSet.of((0, 1))

    def test_no_family_for_tent(self, tent):
        assert find_shrinking_family(tent, 6) is None

    def test_identity_family(self, identity):
        v, _ = check_strong_indecomposable(identity, 4)
        assert v.fails

    def test_core_levels_shrink(self, ex31):
        levels = core_levels(ex31, 5, Budget())
        for (_, a, _), (_, b, _) in zip(levels, levels[1:]):
            assert contains(a, b)


@pytest.mark.parametrize("m", corpus(), ids=lambda m: m.name)
def test_implication_chain(m):
    k = 5
    t = check_transitivity(m, k)
    s, _ = check_strong_indecomposable(m, k)
    i = check_indecomposable(m, k)
    if t.holds:
        assert s.holds
    if s.holds:
        assert i.holds


def test_implication_chain_random_maps():
    rng = random.Random(21)
    budget = Budget(hull_iterations=64)
    for _ in range(15):
        m = random_plmap(rng, max_pieces=4, den=6)
        s, _ = check_strong_indecomposable(m, 4, budget)
        if s.holds:
            assert not check_indecomposable(m, 4, budget).fails
        if check_transitivity(m, 4, budget).holds:
            assert not s.fails


class TestCore:
    def test_extract(self, ex31, tent):
        assert extract_core(ex31).E == E31
        assert extract_core(tent).E == IntervalSet.of((0, 1))

    def test_extract_restricted_square(self, ex31):
        g = restrict(iterate_pl(ex31, 2), interval(0, "1/3"))
        assert extract_core(g, 6).E == IntervalSet.of((0, F(1, 3)))

    def test_extract_precondition(self, ex32):
        with pytest.raises(PreconditionError):
            extract_core(ex32, 6)

    def test_decompose_example_31(self, ex31):
        v, dec = cycle_decomposition(ex31, 8)
        assert v.holds and v.certified
        assert dec.n == 2
        assert dec.intervals == (interval(0, "1/3"), interval("2/3", 1))
        assert ex31.image_interval(dec.intervals[0]) == dec.intervals[1]
        assert ex31.image_interval(dec.intervals[1]) == dec.intervals[0]

    def test_decompose_tent(self, tent):
        _, dec = cycle_decomposition(tent, 6)
        assert dec.n == 1 and dec.intervals == (interval(0, 1),)

    def test_decompose_restricted(self, ex31):
        g = restrict(iterate_pl(ex31, 2), interval(0, "1/3"))
        _, dec = cycle_decomposition(g, 6)
        assert dec.n == 1 and dec.intervals == (interval(0, "1/3"),)

    def test_decompose_unknown(self, ex32):
        v, dec = cycle_decomposition(ex32, 6)
        assert v.status is Status.UNKNOWN and dec is None
