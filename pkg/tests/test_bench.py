from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sweep_oracle
from dstrust.bench import (
    SCHEMES,
    Attack,
    SweepConfig,
    config_record,
    crossing_index,
    read_curves,
    run_sweep,
    write_curves,
)


def curves_by_scheme(cfg):
    return {c.scheme: c for c in run_sweep(cfg)}


class TestSweepConfig:
    def test_badmouth_defaults(self):
        cfg = SweepConfig()
        assert (cfg.lie_value, cfg.direct_trust_of_target, cfg.honest_value) == (0.1, 0.89, None)

    def test_ballot_defaults(self):
        cfg = SweepConfig(attack="ballot_stuff")
        assert cfg.attack is Attack.BALLOT_STUFF
        assert (cfg.lie_value, cfg.direct_trust_of_target) == (0.9, 0.1)

    def test_recommendations_liars_first(self):
        cfg = SweepConfig(n_recommenders=4, honest_value=0.9)
        assert cfg.recommendations(1) == [0.1, 0.9, 0.9, 0.9]
        assert SweepConfig(n_recommenders=4).recommendations(2) == [0.1, 0.1]

    @pytest.mark.parametrize(
        "kwargs", [{"schemes": ("ds_trust", "magic")}, {"gamma": 1.5}, {"n_recommenders": -1}, {"attack": "x"}]
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            SweepConfig(**kwargs)

    def test_config_record_names_wiring(self):
        record = config_record(SweepConfig(schemes=("ds_trust",)))
        assert record["attack"] == "badmouth"
        assert set(record["wiring"]) == {"ds_trust"}


class TestCrossingIndex:
    def test_badmouth_strict(self):
        assert crossing_index([(0, 0.9), (1, 0.5), (2, 0.49)], 0.5, "badmouth") == 2

    def test_ballot_inclusive(self):
        assert crossing_index([(0, 0.1), (1, 0.5)], 0.5, "ballot_stuff") == 1

    def test_never(self):
        assert crossing_index([(0, 0.9)], 0.5, Attack.BADMOUTH) is None


class TestSweep:
    def test_shape(self):
        curves = run_sweep(SweepConfig())
        assert [c.scheme for c in curves] == list(SCHEMES)
        assert all([k for k, _ in c.points] == list(range(21)) for c in curves)

    def test_first_point_is_direct_trust_for_ds(self):
        assert curves_by_scheme(SweepConfig())["ds_trust"].points[0] == (0, 0.89)

    def test_default_crossings(self):
        bad = curves_by_scheme(SweepConfig())
        assert {s: c.crossing for s, c in bad.items()} == {
            "ds_trust": 10,
            "linear_pool": 1,
            "subjective_logic": 3,
            "entropy_model": 1,
        }
        ballot = curves_by_scheme(SweepConfig(attack="ballot_stuff"))
        assert ballot["ds_trust"].crossing == 11

    def test_linear_pool_reported_values(self):
        assert curves_by_scheme(SweepConfig())["linear_pool"].points[1][1] == pytest.approx(0.495)
        ballot = curves_by_scheme(SweepConfig(attack="ballot_stuff"))
        assert ballot["linear_pool"].points[1][1] == pytest.approx(0.5)

    def test_monotone_in_attackers(self):
        for attack in Attack:
            for curve in run_sweep(SweepConfig(attack=attack)):
                values = [v for _, v in curve.points]
                pairs = zip(values, values[1:])
                if attack is Attack.BADMOUTH:
                    assert all(b <= a + 1e-12 for a, b in pairs), curve.scheme
                else:
                    assert all(b >= a - 1e-12 for a, b in pairs), curve.scheme

    def test_mixed_population_pins_ds_at_one(self):
        # honest reports equal to the direct trust have zero dissimilarity,
        # i.e. they are certain, and Dempster's rule cannot move off m(T) = 1
        cfg = SweepConfig(direct_trust_of_target=0.9, honest_value=0.9)
        ds = curves_by_scheme(cfg)["ds_trust"]
        assert all(v == pytest.approx(1.0) for _, v in ds.points[:20])
        assert ds.crossing == 20

    def test_deterministic(self):
        assert run_sweep(SweepConfig()) == run_sweep(SweepConfig())


class TestCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "curves.csv"
        curves = run_sweep(SweepConfig())
        write_curves(curves, path)
        assert path.read_text().splitlines()[0] == "scheme,attack,attackers,trust"
        back = read_curves(path)
        assert [c.scheme for c in back] == [c.scheme for c in curves]
        for a, b in zip(curves, back):
            assert [k for k, _ in a.points] == [k for k, _ in b.points]
            assert [v for _, v in b.points] == pytest.approx([v for _, v in a.points], abs=5e-7)

    def test_files_identical(self, tmp_path):
        write_curves(run_sweep(SweepConfig()), tmp_path / "a.csv")
        write_curves(run_sweep(SweepConfig()), tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestAgainstOracle:
    @pytest.mark.parametrize("attack", ["badmouth", "ballot_stuff"])
    def test_default_curves(self, attack):
        cfg = SweepConfig(attack=attack)
        for curve in run_sweep(cfg):
            expected = sweep_oracle.curve(
                curve.scheme, cfg.direct_trust_of_target, cfg.lie_value, None, 20, cfg.recommender_trust
            )
            assert [v for _, v in curve.points] == pytest.approx(expected, abs=1e-9)
            assert curve.crossing == sweep_oracle.crossing(expected, 0.5, attack == "badmouth")

    @settings(max_examples=60, deadline=None)
    @given(
        direct=st.floats(0.05, 0.95),
        lie=st.floats(0.0, 1.0),
        honest=st.none() | st.floats(0.0, 1.0),
        w=st.floats(0.05, 1.0),
        n=st.integers(0, 12),
    )
    def test_random_configs(self, direct, lie, honest, w, n):
        cfg = SweepConfig(
            n_recommenders=n, lie_value=lie, honest_value=honest, direct_trust_of_target=direct, recommender_trust=w
        )
        for curve in run_sweep(cfg):
            expected = sweep_oracle.curve(curve.scheme, direct, lie, honest, n, w)
            assert [v for _, v in curve.points] == pytest.approx(expected, abs=1e-9)
