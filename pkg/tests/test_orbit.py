from fractions import Fraction as F

import pytest

from conftest import corpus
from intervaldyn.exactset import IntervalSet, cell_index, dyadic_cells
from intervaldyn.mapmodel import make_plmap
from intervaldyn.orbit import (
    cells_cover,
    covers_agree,
    grid_seeds,
    omega_estimate,
    orbit,
    weak_indecomposability_check,
)
from intervaldyn.verdict import Status

TOP = IntervalSet.of((1 - F(1, 2**10), 1))


class TestOrbit:
    def test_fixed_point(self, ex31):
        assert orbit(ex31, "1/2", 5).points == (F(1, 2),) * 6

    def test_staircase(self, ex32):
        assert orbit(ex32, "1/2", 2).points == (F(1, 2), F(1), F(1))

    def test_identity(self, identity):
        assert orbit(identity, "1/3", 3).points == (F(1, 3),) * 4

    def test_tent_cycle(self, tent):
        assert orbit(tent, "2/5", 4).points == (F(2, 5), F(4, 5), F(2, 5), F(4, 5), F(2, 5))

    def test_bit_budget_truncates(self, tent):
        # slope 3/2 doubles the denominator every step
        m = make_plmap(tent.domain, [(0, 0), (F(2, 3), 1), (1, F(1, 2))])
        rec = orbit(m, F(1, 3), 400, max_bits=64)
        assert rec.truncated
        assert len(rec.points) < 401
        assert not orbit(tent, "1/3", 10).truncated

    def test_deterministic(self, ex32):
        assert orbit(ex32, "1/3", 30) == orbit(ex32, "1/3", 30)


class TestOmega:
    def test_staircase_top_cell(self, ex32):
        est = omega_estimate(ex32, "1/3", 64, 64, 10)
        assert est.cover == TOP

    def test_constant(self, const_half):
        est = omega_estimate(const_half, "1/7", 4, 8, 6)
        cells = dyadic_cells(const_half.domain, 6)
        assert est.cover == IntervalSet((cells[cell_index(const_half.domain, 6, F(1, 2))],))
        assert len(est.cover) == 1

    def test_tent_fixed(self, tent):
        est = omega_estimate(tent, "2/3", 10, 10, 8)
        assert est.cover == IntervalSet.of((F(170, 256), F(171, 256)))

    def test_monotone_in_burn_in(self, ex32):
        # the staircase orbit increases, so later tails cover no more cells
        prev = None
        for b in (1, 2, 4, 8):
            cover = omega_estimate(ex32, "1/3", b, 16, 10).cover
            if prev is not None:
                assert prev >= cover
            prev = cover

    def test_cells_cover_merges(self, tent):
        cover = cells_cover(tent.domain, 2, [F(0), F(1, 8), F(3, 8)])
        assert cover == IntervalSet.of((0, F(1, 2)))


class TestWeak:
    def test_grid_seeds(self, tent):
        assert grid_seeds(tent.domain, 4) == [F(1, 8), F(3, 8), F(5, 8), F(7, 8)]

    def test_staircase_all_top(self, ex32):
        v = weak_indecomposability_check(ex32, 64, 10, 64, 64)
        assert v.status is Status.HOLDS and not v.certified
        assert "empirical" in v.notes
        assert v.witness["common_cover"] == TOP
        for s in grid_seeds(ex32.domain, 64):
            assert omega_estimate(ex32, s, 64, 64, 10).cover == TOP

    def test_identity_fails(self, identity):
        v = weak_indecomposability_check(identity, 64)
        assert v.status is Status.FAILS and not v.certified
        a, b = v.witness["seeds"]
        assert a != b
        ca, cb = v.witness["covers"]
        assert not (ca & cb)

    def test_constant_holds(self, const_half):
        assert weak_indecomposability_check(const_half).status is Status.HOLDS

    def test_covers_agree_slack(self, tent):
        a = IntervalSet.of((0, F(1, 4)))
        b = IntervalSet.of((0, F(5, 16)))
        assert covers_agree(a, b, F(1, 16), tent.domain)
        assert not covers_agree(a, b, F(1, 32), tent.domain)

    def test_sample_count(self, tent):
        with pytest.raises(ValueError):
            weak_indecomposability_check(tent, 1)

    @pytest.mark.parametrize("m", corpus(), ids=lambda m: m.name)
    def test_deterministic(self, m):
        assert weak_indecomposability_check(m, 16, 8, 16, 16) == weak_indecomposability_check(m, 16, 8, 16, 16)
