import numpy as np
import pytest

from am2atlas.bifurcations import (
    Kind,
    classify_crossing,
    critical_dilutions,
    read_branches_csv,
    read_events_csv,
    scan_dilution,
    write_branches_csv,
    write_diagram_svg,
    write_events_csv,
)
from am2atlas.equilibria import (
    Label,
    OperatingPoint,
    Status,
    jacobian,
    stability_oracle,
    steady_states,
)
from am2atlas.regions import Gamma, Region, classify, gamma_value

# Expected events along three case-B feed lines at s2in = 0, frozen from
# an independent dense-grid + bisection computation on the closed forms.
LINE_14 = [
    (0.5916739283408983, Kind.TRANSCRITICAL, (Label.E20, Label.E22), Gamma.G5, Region.I4, Region.I5),
    (0.8185574669962346, Kind.SADDLE_NODE, (Label.E21, Label.E22), Gamma.G6, Region.I5, Region.I3),
    (0.8695652173913043, Kind.TRANSCRITICAL, (Label.E10, Label.E20), Gamma.G1, Region.I3, Region.I0),
]
LINE_13 = [
    (0.6526033958889794, Kind.TRANSCRITICAL, (Label.E20, Label.E22), Gamma.G5, Region.I4, Region.I5),
    (0.7844351979532027, Kind.TRANSCRITICAL, (Label.E20, Label.E22), Gamma.G5, Region.I5, Region.I4),
    (0.8183891493268729, Kind.TRANSCRITICAL, (Label.E20, Label.E21), Gamma.G4, Region.I4, Region.I3),
    (0.8609271523178809, Kind.TRANSCRITICAL, (Label.E10, Label.E20), Gamma.G1, Region.I3, Region.I0),
]
LINE_13_3 = [
    (0.6304241833419546, Kind.TRANSCRITICAL, (Label.E20, Label.E22), Gamma.G5, Region.I4, Region.I5),
    (0.804980651691962, Kind.TRANSCRITICAL, (Label.E20, Label.E22), Gamma.G5, Region.I5, Region.I4),
    (0.8173857099431048, Kind.TRANSCRITICAL, (Label.E20, Label.E22), Gamma.G5, Region.I4, Region.I5),
    (0.8185574669962346, Kind.SADDLE_NODE, (Label.E21, Label.E22), Gamma.G6, Region.I5, Region.I3),
    (0.8636363636363636, Kind.TRANSCRITICAL, (Label.E10, Label.E20), Gamma.G1, Region.I3, Region.I0),
]


@pytest.fixture(scope="module")
def scans(case_b):
    return {
        s1in: scan_dilution(case_b, s1in, 0.0, (0.3, 1.0), n=2048)
        for s1in in (14.0, 13.0, 13.3)
    }


class TestCriticalDilutions:
    def test_line_14(self, case_b):
        cd = critical_dilutions(case_b, 14.0, 0.0)
        assert cd.washout == pytest.approx(0.8695652173913043, rel=1e-12)
        assert cd.fold == pytest.approx(0.8185574669962346, rel=1e-12)
        assert cd.lower_threshold == ()
        assert len(cd.upper_threshold) == 1
        assert cd.upper_threshold[0] == pytest.approx(0.5916739283408983, abs=1e-8)

    def test_line_13(self, case_b):
        cd = critical_dilutions(case_b, 13.0, 0.0)
        assert cd.washout == pytest.approx(0.8609271523178809, rel=1e-12)
        assert len(cd.lower_threshold) == 1
        assert cd.lower_threshold[0] == pytest.approx(0.8183891493268729, abs=1e-8)
        assert [pytest.approx(v, abs=1e-8) for v in cd.upper_threshold] == [
            0.6526033958889794,
            0.7844351979532027,
        ]

    def test_line_13_3(self, case_b):
        cd = critical_dilutions(case_b, 13.3, 0.0)
        assert cd.lower_threshold == ()
        assert [pytest.approx(v, abs=1e-8) for v in cd.upper_threshold] == [
            0.6304241833419546,
            0.804980651691962,
            0.8173857099431048,
        ]

    def test_root_count_tracks_threshold_landscape(self, case_b):
        # below the interior minimum: no roots; between minimum and fold
        # value: two; between fold value and maximum: three; above: one
        for s1in, count in ((12.0, 0), (13.0, 2), (13.3, 3), (14.0, 1)):
            cd = critical_dilutions(case_b, s1in, 0.0)
            assert len(cd.upper_threshold) == count, s1in

    def test_combined_feed_generalization(self, case_b):
        # shifting feed from s1in to s2in by the yield ratio preserves
        # the threshold crossings (not the washout value)
        base = critical_dilutions(case_b, 13.0, 0.0)
        moved = critical_dilutions(case_b, 12.0, 10.0)  # same combined feed
        assert moved.upper_threshold == pytest.approx(base.upper_threshold, abs=1e-9)
        assert moved.lower_threshold == pytest.approx(base.lower_threshold, abs=1e-9)


class TestScan:
    @pytest.mark.parametrize("s1in", [14.0, 13.0, 13.3])
    def test_expected_events(self, scans, s1in):
        expected = {14.0: LINE_14, 13.0: LINE_13, 13.3: LINE_13_3}[s1in]
        events = scans[s1in].events
        assert len(events) == len(expected)
        for ev, (d, kind, pair, gamma, before, after) in zip(events, expected):
            assert ev.D == pytest.approx(d, abs=5e-9)
            assert ev.kind is kind
            assert ev.pair == pair
            assert ev.gamma is gamma
            assert ev.region_before is before
            assert ev.region_after is after

    def test_no_codim_two_on_these_lines(self, scans):
        for res in scans.values():
            assert res.codim_two == []

    def test_events_sit_on_exactly_one_surface(self, case_b, scans):
        for s1in, res in scans.items():
            for ev in res.events:
                pt = OperatingPoint(ev.D, s1in, 0.0)
                own = gamma_value(case_b, ev.gamma, pt)
                assert own is not None and abs(own) < 1e-8
                for gamma in Gamma:
                    if gamma is ev.gamma:
                        continue
                    other = gamma_value(case_b, gamma, pt)
                    if other is not None:
                        assert abs(other) > 1e-4, (s1in, ev, gamma)

    def test_colliding_pair_components_coincide(self, case_b, scans):
        for s1in, res in scans.items():
            for ev in res.events:
                by = {
                    s.label: s
                    for s in steady_states(case_b, OperatingPoint(ev.D, s1in, 0.0))
                }
                a, b = by[ev.pair[0]], by[ev.pair[1]]
                assert a.exists and b.exists
                scale = np.maximum(1.0, np.abs(a.components))
                assert np.max(np.abs(a.components - b.components) / scale) < 1e-6

    def test_saddle_node_has_zero_eigenvalue(self, case_b, scans):
        for s1in, res in scans.items():
            for ev in res.events:
                if ev.kind is not Kind.SADDLE_NODE:
                    continue
                by = {
                    s.label: s
                    for s in steady_states(case_b, OperatingPoint(ev.D, s1in, 0.0))
                }
                x = by[ev.pair[0]].components
                eigs = np.linalg.eigvals(jacobian(case_b, x, OperatingPoint(ev.D, s1in, 0.0)))
                assert np.min(np.abs(eigs.real)) < 1e-6

    def test_exchange_of_stability(self, case_b, scans):
        # the pair member existing on both sides of a transcritical event
        # swaps its stability verdict there
        for s1in, res in scans.items():
            for ev in res.events:
                if ev.kind is not Kind.TRANSCRITICAL:
                    continue
                before = dict(stability_oracle(case_b, OperatingPoint(ev.D - 1e-4, s1in, 0.0)))
                after = dict(stability_oracle(case_b, OperatingPoint(ev.D + 1e-4, s1in, 0.0)))
                swapped = [
                    lab
                    for lab in ev.pair
                    if lab in before and lab in after and before[lab] is not after[lab]
                ]
                assert swapped, (s1in, ev)

    def test_branch_statuses_match_region_row(self, case_b, scans):
        from conftest import REGION_TABLE

        for s1in, res in scans.items():
            br = res.branches[Label.E20]
            for k in range(0, br.d.size, 97):
                d = float(br.d[k])
                region = classify(case_b, OperatingPoint(d, s1in, 0.0), boundary_tol=0.0)
                expected = REGION_TABLE[region].get(Label.E20, Status.ABSENT)
                if br.status[k] is Status.NON_HYPERBOLIC:
                    continue  # grid point fell inside an event band
                assert br.status[k] is expected, (s1in, d)

    def test_branch_status_changes_only_at_events(self, scans):
        for s1in, res in scans.items():
            event_ds = [ev.D for ev in res.events]
            for label, br in res.branches.items():
                for k in range(br.d.size - 1):
                    a, b = br.status[k], br.status[k + 1]
                    if a is b or Status.NON_HYPERBOLIC in (a, b):
                        continue
                    gap = float(br.d[k + 1] - br.d[k])
                    assert any(
                        br.d[k] - gap <= d <= br.d[k + 1] + gap for d in event_ds
                    ), (s1in, label, br.d[k])

    def test_branch_gaps_where_absent(self, case_b, scans):
        # e22 only exists between the first threshold crossing and the fold
        res = scans[14.0]
        br = res.branches[Label.E22]
        assert br.d.size > 0
        assert br.d.min() >= 0.5916739283408983 - 1e-3
        assert br.d.max() <= 0.8185574669962346 + 1e-3


class TestClassifyCrossing:
    def test_lower_branch_crossing_anywhere(self, case_b):
        events = classify_crossing(case_b, OperatingPoint(0.5, 1.0, 12.3586), Gamma.G2)
        assert [e.pair for e in events] == [(Label.E10, Label.E11)]
        assert events[0].kind is Kind.TRANSCRITICAL

    def test_persistence_crossing_with_no_feed(self, case_b):
        pt = OperatingPoint(0.8609271523178809, 13.0, 0.0)
        events = classify_crossing(case_b, pt, Gamma.G1)
        assert [e.pair for e in events] == [(Label.E10, Label.E20)]

    def test_persistence_crossing_with_rich_feed(self, case_a):
        # above both methanogenic thresholds all three pairs collide
        pt = OperatingPoint(0.7, 2.94, 100.0)
        events = classify_crossing(case_a, pt, Gamma.G1)
        assert [e.pair for e in events] == [
            (Label.E10, Label.E20),
            (Label.E11, Label.E21),
            (Label.E12, Label.E22),
        ]

    def test_fold_with_rich_feed_hits_both_pairs(self, case_a):
        d2 = critical_dilutions(case_a, 1.0, 0.0).fold
        pt = OperatingPoint(d2, 20.0, 100.0)  # s1in above s1_star(d2) = 4.5065
        events = classify_crossing(case_a, pt, Gamma.G6)
        assert {e.pair for e in events} == {
            (Label.E11, Label.E12),
            (Label.E21, Label.E22),
        }
        assert all(e.kind is Kind.SADDLE_NODE for e in events)

    def test_fold_below_threshold_is_not_a_bifurcation(self, case_b):
        d2 = critical_dilutions(case_b, 1.0, 0.0).fold
        # s1in = 13 is below the fold-value threshold 13.107: nothing collides
        assert classify_crossing(case_b, OperatingPoint(d2, 13.0, 0.0), Gamma.G6) == []

    def test_subset_corner_reports_codimension_two(self, case_b):
        d2 = critical_dilutions(case_b, 1.0, 0.0).fold
        peak_s = 36.3318042491699
        out = classify_crossing(case_b, OperatingPoint(d2, 13.0, peak_s), Gamma.G6)
        assert out is None


class TestSerialization:
    def test_events_and_branches_round_trip(self, case_b, scans, tmp_path):
        res = scans[13.3]
        epath = tmp_path / "events.csv"
        write_events_csv(res.events, epath)
        back = read_events_csv(epath)
        assert len(back) == len(res.events)
        for (d, kind, pair, gamma), ev in zip(back, res.events):
            assert d == pytest.approx(ev.D, rel=1e-8)
            assert kind is ev.kind and pair == ev.pair and gamma is ev.gamma

        bpath = tmp_path / "branches.csv"
        write_branches_csv(res.branches, bpath)
        branches = read_branches_csv(bpath)
        for label, br in branches.items():
            orig = res.branches[label]
            assert br.d == pytest.approx(orig.d, rel=1e-8)
            assert br.status == orig.status
            assert br.states == pytest.approx(orig.states, rel=1e-6, abs=1e-9)

    def test_svg_deterministic_and_styled(self, scans, tmp_path):
        res = scans[14.0]
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        write_diagram_svg(res.branches, res.events, p1, "X1")
        write_diagram_svg(res.branches, res.events, p2, "X1")
        data = p1.read_bytes()
        assert data == p2.read_bytes()
        # stable runs drawn solid, unstable dotted, conventional colors
        assert b"stroke-dasharray" in data
        for color in (b"black", b"green", b"red", b"blue"):
            assert color in data


def test_scan_validates_range(case_b):
    with pytest.raises(ValueError):
        scan_dilution(case_b, 14.0, 0.0, (0.5, 0.4))
    with pytest.raises(ValueError):
        scan_dilution(case_b, 14.0, 0.0, (0.3, 1.0), n=10)
