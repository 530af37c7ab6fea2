import math

import numpy as np
import pytest

from am2atlas.equilibria import OperatingPoint, Status, steady_states
from am2atlas.regions import (
    Boundary,
    Gamma,
    GridSpec,
    Region,
    classify,
    cut_ds1,
    cut_s1s2,
    gamma_value,
    h_case,
    read_boundaries_csv,
    read_raster_csv,
    thresholds,
    write_boundaries_csv,
    write_raster_csv,
    write_svg,
)
from conftest import REGION_TABLE

# independently computed landscape of the scaled upper threshold, case B;
# the fold value is the closed-form limit (peak_s + r*s1_star(d2)) / r
PHI_MIN = (0.7216587555405742, 12.573609504832437)
PHI_MAX = (0.8131753461001024, 13.371589542458253)
PHI_AT_FOLD = 13.107092920706602


class TestClassify:
    def test_case_a_examples(self, case_a):
        assert classify(case_a, OperatingPoint(0.7, 60, 120)) is Region.I8
        # past the fold only washout and methanogen-washout regions remain
        assert classify(case_a, OperatingPoint(0.82, 2.0, 50)) is Region.I0
        assert classify(case_a, OperatingPoint(0.82, 20.0, 50)) is Region.I3
        assert classify(case_a, OperatingPoint(1.25, 30.0, 50)) is Region.I0

    def test_case_b_feed_line(self, case_b):
        assert classify(case_b, OperatingPoint(0.55, 14, 0)) is Region.I4
        assert classify(case_b, OperatingPoint(0.6, 14, 0)) is Region.I5
        assert classify(case_b, OperatingPoint(0.7, 14, 0)) is Region.I5

    def test_fold_is_a_boundary(self, case_a):
        d2 = thresholds(case_a, 0.5).d2
        result = classify(case_a, OperatingPoint(d2, 10, 10))
        assert isinstance(result, Boundary)
        assert Gamma.G6 in result.gammas

    def test_boundary_band_overrides_region(self, case_b):
        s1_star = thresholds(case_b, 0.6).s1_star
        result = classify(case_b, OperatingPoint(0.6, s1_star, 50.0))
        assert isinstance(result, Boundary)
        assert Gamma.G1 in result.gammas

    def test_raster_mode_always_returns_region(self, case_b):
        s1_star = thresholds(case_b, 0.6).s1_star
        result = classify(case_b, OperatingPoint(0.6, s1_star, 50.0), boundary_tol=0.0)
        assert isinstance(result, Region)


class TestGammaValue:
    def test_fold_residual_zero_on_fold(self, case_a):
        d2 = thresholds(case_a, 0.5).d2
        assert gamma_value(case_a, Gamma.G6, OperatingPoint(d2, 1, 1)) == 0.0

    def test_persistence_residual(self, case_b):
        # closed form 0.3 * 2.1 / 0.2 = 3.15 at D = 0.6
        val = gamma_value(case_b, Gamma.G1, OperatingPoint(0.6, 3.15, 0))
        assert val == pytest.approx(0.0, abs=1e-12)

    def test_upper_threshold_residual(self, case_b):
        pt = OperatingPoint(0.72, 12.573880556410504, 0.0)
        val = gamma_value(case_b, Gamma.G5, pt)
        assert val == pytest.approx(0.0, abs=1e-8)

    def test_out_of_domain(self, case_b):
        # the oblique surfaces require the acidogens to persist
        assert gamma_value(case_b, Gamma.G4, OperatingPoint(0.6, 1.0, 0)) is None
        # above d1 the persistence surface is gone
        assert gamma_value(case_b, Gamma.G1, OperatingPoint(1.5, 10, 0)) is None


class TestHCase:
    def test_case_a_decreasing(self, case_a):
        rep = h_case(case_a)
        assert rep.case == "A"
        assert rep.d1 == 1.2 and rep.minima == () and rep.maxima == ()

    def test_case_b_interior_extrema(self, case_b):
        rep = h_case(case_b)
        assert rep.case == "B"
        assert len(rep.minima) == 1 and len(rep.maxima) == 1
        d_min, h_min = rep.minima[0]
        d_max, h_max = rep.maxima[0]
        r = case_b.feed_ratio
        assert d_min == pytest.approx(PHI_MIN[0], abs=1e-6)
        assert h_min / r == pytest.approx(PHI_MIN[1], abs=1e-8)
        assert d_max == pytest.approx(PHI_MAX[0], abs=1e-6)
        assert h_max / r == pytest.approx(PHI_MAX[1], abs=1e-8)
        assert rep.h2_right_limit / r == pytest.approx(PHI_AT_FOLD, rel=1e-9)

    def test_case_c(self, case_c):
        rep = h_case(case_c)
        assert rep.case == "C"
        assert rep.d1 == pytest.approx(0.8) and rep.d1 < rep.d2

    def test_lower_threshold_monotone(self, case_a, case_b):
        for params in (case_a, case_b):
            d2 = thresholds(params, 0.5).d2
            ds = np.linspace(0.01, d2 - 1e-6, 200)
            h1s = [thresholds(params, float(d)).h1 for d in ds]
            assert all(b > a for a, b in zip(h1s, h1s[1:]))
            h2s = [thresholds(params, float(d)).h2 for d in ds]
            assert all(h2 > h1 for h1, h2 in zip(h1s, h2s))


class TestTableConsistency:
    def test_statuses_match_region_row(self, case_a, case_b, case_c):
        rng = np.random.default_rng(3)
        for params in (case_a, case_b, case_c):
            n = 0
            while n < 400:
                pt = OperatingPoint(
                    rng.uniform(0.05, 1.45),
                    rng.uniform(0.0, 40.0),
                    rng.uniform(0.0, 120.0),
                )
                region = classify(params, pt, boundary_tol=1e-7)
                if isinstance(region, Boundary):
                    continue
                states = steady_states(params, pt)
                if any(s.status is Status.NON_HYPERBOLIC for s in states):
                    continue
                n += 1
                expected = REGION_TABLE[region]
                for s in states:
                    want = expected.get(s.label, Status.ABSENT)
                    assert s.status is want, (pt, region, s.label)

    def test_region_state_counts(self, case_a):
        counts = {r: len(row) for r, row in REGION_TABLE.items()}
        assert [counts[r] for r in Region] == [1, 2, 3, 2, 3, 4, 4, 5, 6]

    def test_commensalism_no_methanogen_only_regions_without_feed(
        self, case_a, case_b, case_c
    ):
        rng = np.random.default_rng(5)
        banned = {Region.I1, Region.I2, Region.I6, Region.I7, Region.I8}
        for params in (case_a, case_b, case_c):
            for _ in range(400):
                pt = OperatingPoint(rng.uniform(0.05, 1.45), rng.uniform(0.0, 40.0), 0.0)
                region = classify(params, pt, boundary_tol=0.0)
                assert region not in banned

    def test_case_b_anomaly_bistability_lost_by_speeding_up(self, case_b):
        # along s1in = 13 the region flips from bistable back to globally
        # stable as the dilution rate increases
        d, d_prime = 0.7, 0.79
        assert d < d_prime
        assert classify(case_b, OperatingPoint(d, 13, 0)) is Region.I5
        assert classify(case_b, OperatingPoint(d_prime, 13, 0)) is Region.I4


GRID_S1S2 = GridSpec(160, 160, 0.0, 60.0, 0.0, 120.0)
GRID_DS1 = GridSpec(160, 160, 0.0, 1.3, 0.0, 30.0)
GRID_DS1_C = GridSpec(160, 160, 0.0, 1.0, 0.0, 30.0)


class TestCuts:
    def test_case_a_s1s2_inventories(self, case_a):
        assert cut_s1s2(case_a, 0.7, GRID_S1S2).regions_present() == set(Region)
        assert cut_s1s2(case_a, 0.82, GRID_S1S2).regions_present() == {
            Region.I0,
            Region.I3,
        }
        assert cut_s1s2(case_a, 1.25, GRID_S1S2).regions_present() == {Region.I0}

    def test_case_a_ds1_inventories(self, case_a):
        assert cut_ds1(case_a, 0.0, GRID_DS1).regions_present() == {
            Region.I0,
            Region.I3,
            Region.I4,
            Region.I5,
        }
        assert cut_ds1(case_a, 15.0, GRID_DS1).regions_present() == {
            Region.I0,
            Region.I1,
            Region.I3,
            Region.I4,
            Region.I5,
            Region.I6,
            Region.I7,
        }
        assert cut_ds1(case_a, 100.0, GRID_DS1).regions_present() == {
            Region.I0,
            Region.I1,
            Region.I2,
            Region.I3,
            Region.I6,
            Region.I7,
            Region.I8,
        }

    def test_case_c_ds1_inventories(self, case_c):
        assert cut_ds1(case_c, 0.0, GRID_DS1_C).regions_present() == {
            Region.I0,
            Region.I3,
            Region.I4,
            Region.I5,
        }
        assert cut_ds1(case_c, 7.0, GRID_DS1_C).regions_present() == {
            Region.I0,
            Region.I1,
            Region.I3,
            Region.I4,
            Region.I5,
            Region.I6,
            Region.I7,
        }
        assert cut_ds1(case_c, 100.0, GRID_DS1_C).regions_present() == {
            Region.I0,
            Region.I1,
            Region.I2,
            Region.I6,
            Region.I7,
            Region.I8,
        }

    def test_raster_agrees_with_pointwise_classify(self, case_b):
        # the vectorized raster and the scalar classifier are two code
        # paths; they must agree cell by cell
        grid = GridSpec(24, 24, 0.0, 30.0, 0.0, 80.0)
        cut = cut_s1s2(case_b, 0.62, grid)
        for j, y in enumerate(grid.ys):
            for i, x in enumerate(grid.xs):
                want = classify(case_b, OperatingPoint(0.62, float(x), float(y)), 0.0)
                assert Region(f"I{int(cut.raster[j, i])}") is want
        cut2 = cut_ds1(case_b, 15.0, GridSpec(24, 24, 0.0, 1.2, 0.0, 30.0))
        for j, y in enumerate(cut2.grid.ys):
            for i, x in enumerate(cut2.grid.xs):
                want = classify(case_b, OperatingPoint(float(x), float(y), 15.0), 0.0)
                assert Region(f"I{int(cut2.raster[j, i])}") is want

    def test_polylines_sit_on_their_surface(self, case_b):
        cut = cut_ds1(case_b, 15.0, GridSpec(100, 100, 0.0, 1.2, 0.0, 30.0))
        assert cut.boundaries, "expected boundary polylines"
        for gamma, line in cut.boundaries:
            if gamma in (Gamma.G2, Gamma.G3, Gamma.G6):
                continue  # vertical lines are exact by construction
            step = max(1, line.shape[0] // 8)
            for x, y in line[::step]:
                val = gamma_value(case_b, gamma, OperatingPoint(float(x), float(y), 15.0))
                assert val is not None
                scale = max(1.0, abs(y))
                assert abs(val) < 1e-6 * scale, (gamma, x, y, val)

    def test_oblique_lines_in_s1s2_plane(self, case_a):
        cut = cut_s1s2(case_a, 0.7, GRID_S1S2)
        gammas = {g for g, _ in cut.boundaries}
        assert gammas == {Gamma.G1, Gamma.G2, Gamma.G3, Gamma.G4, Gamma.G5}
        for gamma, line in cut.boundaries:
            if gamma in (Gamma.G4, Gamma.G5):
                dx = line[-1, 0] - line[0, 0]
                dy = line[-1, 1] - line[0, 1]
                assert dy / dx == pytest.approx(-case_a.feed_ratio, rel=1e-9)


class TestSerialization:
    def test_csv_round_trip(self, case_a, tmp_path):
        grid = GridSpec(20, 20, 0.0, 40.0, 0.0, 100.0)
        cut = cut_s1s2(case_a, 0.7, grid)
        path = tmp_path / "raster.csv"
        write_raster_csv(cut, path)
        rows = read_raster_csv(path)
        assert len(rows) == 400
        names = {Region(f"I{int(c)}") for c in np.unique(cut.raster)}
        assert {r for _, _, _, r in rows} == names
        k = 20 * 7 + 3  # row 7, column 3
        d, s1, s2, reg = rows[k]
        assert d == 0.7
        assert s1 == pytest.approx(grid.xs[3])
        assert s2 == pytest.approx(grid.ys[7])
        assert reg is Region(f"I{int(cut.raster[7, 3])}")

        bpath = tmp_path / "bounds.csv"
        write_boundaries_csv(cut, bpath)
        back = read_boundaries_csv(bpath)
        assert [g for g, _ in back] == [g for g, _ in cut.boundaries]
        for (_, a), (_, b) in zip(back, cut.boundaries):
            assert a == pytest.approx(b, rel=1e-8)

    def test_svg_deterministic(self, case_a, tmp_path):
        grid = GridSpec(40, 40, 0.0, 40.0, 0.0, 100.0)
        cut = cut_s1s2(case_a, 0.7, grid)
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        write_svg(cut, p1)
        write_svg(cut, p2)
        b1, b2 = p1.read_bytes(), p2.read_bytes()
        assert b1 == b2
        assert b1.startswith(b"<svg")
        for color in ("red", "yellow", "green", "pink"):
            assert color.encode() in b1
