import math

import pytest

from conftest import CV, P1, P2, R, V1, V2
from thermoforms.errors import DomainError, InconsistentKind, ParseError, ValidationError
from thermoforms.experiment import (
    ExperimentRecord,
    GasSpec,
    PathSegment,
    entropy,
    group_records,
    make_path,
    read_records,
    run_experiment,
    write_records,
)


class TestEntropy:
    def test_isochoric_step(self, gas):
        assert entropy(gas, P2, V1) - entropy(gas, P1, V1) == pytest.approx(8.644758, abs=1e-5)

    def test_isobaric_step(self, gas):
        assert entropy(gas, P2, V2) - entropy(gas, P2, V1) == pytest.approx(14.407931, abs=1e-5)

    def test_identity(self, gas):
        assert entropy(gas, 1.3e4, 0.031) - entropy(gas, 1.3e4, 0.031) == 0.0

    def test_one_mole_formula(self, gas):
        p, V = 1.7e4, 0.029
        assert entropy(gas, p, V) == pytest.approx(CV * math.log(p * V / R) + R * math.log(V), rel=1e-14)

    @pytest.mark.parametrize("p, V", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_domain(self, gas, p, V):
        with pytest.raises(DomainError):
            entropy(gas, p, V)

    def test_doubling_moles_doubles_delta(self, abc_path):
        one = GasSpec(1.0, R, CV)
        two = GasSpec(2.0, R, CV)
        for traj_pts in [(P1, V1, P2, V2), (1.1e4, 0.02, 3e4, 0.05)]:
            a, b, c, d = traj_pts
            d1 = entropy(one, c, d) - entropy(one, a, b)
            d2 = entropy(two, c, d) - entropy(two, a, b)
            assert d2 == pytest.approx(2 * d1, rel=1e-12)

    def test_gas_validation(self):
        with pytest.raises(DomainError):
            GasSpec(n_moles=0)
        with pytest.raises(DomainError):
            GasSpec(R=-1)


class TestMakePath:
    def test_isochoric_samples_keep_volume(self):
        traj = make_path([(P1, V1), (P2, V1)], ["isochoric"], 11)
        assert all(V == V1 for _, _, V in traj.samples())

    def test_identical_points(self):
        for kind in ("isochoric", "isobaric", "linear", "isothermal"):
            traj = make_path([(P1, V1), (P1, V1)], [kind], 5)
            assert {(p, V) for _, p, V in traj.samples()} == {(P1, V1)}

    def test_inconsistent_kind(self):
        with pytest.raises(InconsistentKind):
            make_path([(P1, V1), (P2, V2)], ["isochoric"])
        with pytest.raises(InconsistentKind):
            make_path([(P1, V1), (P1, V2)], ["isothermal"])
        with pytest.raises(InconsistentKind):
            make_path([(P1, V1), (P2, V1)], ["isobaric", "isobaric"])

    def test_nonpositive_point(self):
        with pytest.raises(DomainError):
            make_path([(P1, V1), (-P1, V1)], ["isochoric"])

    def test_isothermal_keeps_pv(self):
        traj = make_path([(P2, V1), (P1, V2)], ["isothermal"], 21)
        for _, p, V in traj.samples():
            assert p * V == pytest.approx(P2 * V1, rel=1e-14)

    def test_time_layout(self, abc_path):
        ts = [t for t, _, _ in abc_path.samples()]
        assert ts[0] == 0.0 and ts[-1] == 2.0
        assert len(ts) == 201
        assert all(a < b for a, b in zip(ts, ts[1:]))

    def test_exact_endpoints(self, abc_path):
        rows = abc_path.samples()
        assert (rows[0][1], rows[0][2]) == (P1, V1)
        assert (rows[100][1], rows[100][2]) == (P2, V1)
        assert (rows[-1][1], rows[-1][2]) == (P2, V2)

    def test_velocity_matches_finite_difference(self):
        for seg in (
            PathSegment("isochoric", (P1, V1), (P2, V1)),
            PathSegment("isobaric", (P2, V1), (P2, V2)),
            PathSegment("linear", (P1, V1), (P2, V2)),
            PathSegment("isothermal", (P2, V1), (P1, V2)),
        ):
            for s in (0.1, 0.5, 0.9):
                h = 1e-6
                (pa, Va), (pb, Vb) = seg.point(s - h), seg.point(s + h)
                dp, dV = seg.velocity(s)
                assert dp == pytest.approx((pb - pa) / (2 * h), rel=1e-6, abs=1e-9)
                assert dV == pytest.approx((Vb - Va) / (2 * h), rel=1e-6, abs=1e-15)


class TestRunExperiment:
    def test_abc_endpoints(self, gas):
        traj = make_path([(P1, V1), (P2, V1), (P2, V2)], ["isochoric", "isobaric"], 2)
        recs = run_experiment(gas, traj)
        assert len(recs) == 3
        assert recs[1].S - recs[0].S == pytest.approx(8.644758, abs=1e-5)
        assert recs[2].S - recs[1].S == pytest.approx(14.407931, abs=1e-5)

    def test_constant_trajectory(self, gas):
        recs = run_experiment(gas, make_path([(P1, V1), (P1, V1)], ["linear"], 7))
        assert len({r.S for r in recs}) == 1

    def test_closed_loop_returns_to_start(self, gas):
        loop = make_path(
            [(P1, V1), (P2, V1), (P2, V2), (P1, V2), (P1, V1)],
            ["isochoric", "isobaric", "isochoric", "isobaric"],
            33,
        )
        recs = run_experiment(gas, loop)
        assert math.isclose(recs[-1].S, recs[0].S, rel_tol=1e-9)

    def test_same_endpoints_same_delta(self, gas):
        a = run_experiment(gas, make_path([(P1, V1), (P2, V1), (P2, V2)], ["isochoric", "isobaric"], 9))
        b = run_experiment(gas, make_path([(P1, V1), (P1, V2), (P2, V2)], ["isobaric", "isochoric"], 9))
        c = run_experiment(gas, make_path([(P1, V1), (P2, V2)], ["linear"], 9))
        deltas = {r[-1].S - r[0].S for r in (a, b, c)}
        assert len(deltas) == 1

    def test_refinement_keeps_endpoints(self, gas):
        coarse = run_experiment(gas, make_path([(P1, V1), (P2, V1), (P2, V2)], ["isochoric", "isobaric"], 6))
        fine = run_experiment(gas, make_path([(P1, V1), (P2, V1), (P2, V2)], ["isochoric", "isobaric"], 12))
        by_t = {r.t: r for r in fine}
        for t in (0.0, 1.0, 2.0):
            assert by_t[t] == next(r for r in coarse if r.t == t)


class TestGrouping:
    def test_junctions_shared(self, gas, abc_path):
        groups = group_records(run_experiment(gas, abc_path))
        assert [len(g) for g in groups] == [101, 101]
        assert groups[0][-1] is groups[1][0]

    def test_single_segment(self, gas):
        recs = run_experiment(gas, make_path([(P1, V1), (P2, V1)], ["isochoric"], 4))
        assert len(group_records(recs)) == 1


class TestRecordsIO:
    def test_round_trip(self, tmp_path, gas, abc_path):
        recs = run_experiment(gas, abc_path)
        f = tmp_path / "r.csv"
        write_records(f, recs)
        assert read_records(f) == recs
        assert f.read_text().splitlines()[0] == "t,p,V,S"

    def test_header_only(self, tmp_path):
        f = tmp_path / "r.csv"
        write_records(f, [])
        assert read_records(f) == []

    def test_negative_volume(self, tmp_path):
        f = tmp_path / "r.csv"
        f.write_text("t,p,V,S\n0,1e4,0.02,1\n1,1e4,-0.02,1\n")
        with pytest.raises(ValidationError) as exc:
            read_records(f)
        assert exc.value.line == 3

    def test_non_monotone_time(self, tmp_path):
        f = tmp_path / "r.csv"
        f.write_text("t,p,V,S\n1,1e4,0.02,1\n0,1e4,0.02,1\n")
        with pytest.raises(ValidationError):
            read_records(f)

    def test_parse_errors_carry_line(self, tmp_path):
        f = tmp_path / "r.csv"
        f.write_text("t,p,V,S\n0,1e4,0.02,1\n0.5,abc,0.02,1\n")
        with pytest.raises(ParseError) as exc:
            read_records(f)
        assert exc.value.line == 3
        f.write_text("time,p,V,S\n")
        with pytest.raises(ParseError):
            read_records(f)
        f.write_text("t,p,V,S\n0,1,2\n")
        with pytest.raises(ParseError):
            read_records(f)

    def test_full_precision(self, tmp_path):
        rec = [ExperimentRecord(0.1, 10000.000000000002, 0.022400000000000003, 1 / 3)]
        f = tmp_path / "r.csv"
        write_records(f, rec)
        assert read_records(f) == rec
