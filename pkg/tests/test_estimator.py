import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fprisk.estimator import (
    CANONICAL_SUBPOPULATIONS,
    DegenerateOdds,
    DiseaseRate,
    DomainError,
    MissingRate,
    MixedDiseases,
    SubpopulationProfile,
    ZeroDenominator,
    estimate_profile,
    lifetime_disease_risk,
    lifetime_total_risk,
    odds_ratio,
    pool_rate,
    resolve_schedule,
    schedule_group,
)
from fprisk.ingest import ScheduleConfig, ScheduleEntry, StudyRecord


def _study(disease, fp, tn, tp=0, fn=0, sid="s"):
    return StudyRecord(sid, disease, tp, fn, tn, fp)


class TestPoolRate:
    def test_two_study_pool(self):
        rate = pool_rate(
            [_study("breast_cancer", 3, 97, sid="a"), _study("breast_cancer", 1, 99, sid="b")]
        )
        assert rate.rate == 4 / 200 == 0.02
        assert (rate.pooled_fp, rate.pooled_n) == (4, 200)

    def test_zero_false_positives(self):
        assert pool_rate([_study("hiv", 0, 100)]).rate == 0.0

    def test_mixed_diseases(self):
        with pytest.raises(MixedDiseases):
            pool_rate([_study("hiv", 1, 9, sid="a"), _study("syphilis", 1, 9, sid="b")])

    def test_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            pool_rate([_study("hiv", 0, 0, tp=5, fn=5)])

    def test_empty(self):
        with pytest.raises(ZeroDenominator):
            pool_rate([])

    def test_bundled_breast_pool_matches_published(self, rates):
        assert abs(rates["breast_cancer"].rate - 0.049) <= 0.0005


class TestResolveSchedule:
    FEMALE = SubpopulationProfile(sex="female")

    def test_inclusive_biennial_range(self):
        entry = ScheduleEntry("baseline_female", "breast_cancer",
                              start_age=50, end_age=74, interval_years=2)
        assert resolve_schedule(entry, self.FEMALE) == 13

    def test_single_eligible_age(self):
        entry = ScheduleEntry("baseline_female", "breast_cancer",
                              start_age=55, end_age=55, interval_years=5)
        assert resolve_schedule(entry, self.FEMALE) == 1

    def test_per_pregnancy_extras(self):
        entry = ScheduleEntry("baseline_female", "hiv",
                              occasions=2, per_pregnancy_occasions=1)
        two = SubpopulationProfile(sex="female", pregnancies=2)
        assert resolve_schedule(entry, two) == 4
        assert resolve_schedule(entry, self.FEMALE) == 2


class TestLifetimeDiseaseRisk:
    def test_monte_carlo_anchor(self):
        # Frozen from the lifetime simulator at 10^7 lifetimes.
        assert lifetime_disease_risk(0.049, 13) == pytest.approx(0.4796, abs=5e-5)

    def test_zero_occasions(self):
        assert lifetime_disease_risk(0.73, 0) == 0.0

    def test_certain_event(self):
        assert lifetime_disease_risk(1.0, 1) == 1.0

    @pytest.mark.parametrize("rate,occasions", [(-0.1, 1), (1.1, 1), (0.5, -1)])
    def test_domain_errors(self, rate, occasions):
        with pytest.raises(DomainError):
            lifetime_disease_risk(rate, occasions)

    @given(
        rate=st.floats(min_value=0.0, max_value=1.0),
        occasions=st.integers(min_value=0, max_value=80),
    )
    @settings(max_examples=120)
    def test_bounds_and_monotonicity_in_occasions(self, rate, occasions):
        p0 = lifetime_disease_risk(rate, occasions)
        p1 = lifetime_disease_risk(rate, occasions + 1)
        assert 0.0 <= p0 <= 1.0
        assert p1 >= p0

    @given(
        rate=st.floats(min_value=0.0, max_value=0.999),
        bump=st.floats(min_value=1e-9, max_value=1e-3),
        occasions=st.integers(min_value=0, max_value=80),
    )
    @settings(max_examples=120)
    def test_monotonicity_in_rate(self, rate, bump, occasions):
        assume(rate + bump <= 1.0)
        assert lifetime_disease_risk(rate + bump, occasions) >= lifetime_disease_risk(
            rate, occasions
        )


class TestLifetimeTotalRisk:
    def test_two_fair_coins(self):
        assert lifetime_total_risk([(0.5, 1), (0.5, 1)]) == 0.75

    def test_empty_is_zero(self):
        assert lifetime_total_risk([]) == 0.0

    @given(
        rate=st.floats(min_value=0.0, max_value=1.0),
        occasions=st.integers(min_value=0, max_value=60),
    )
    @settings(max_examples=100)
    def test_singleton_reduces_exactly(self, rate, occasions):
        assert lifetime_total_risk([(rate, occasions)]) == lifetime_disease_risk(
            rate, occasions
        )

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0.0, max_value=0.3),
                st.integers(min_value=0, max_value=40),
            ),
            min_size=0,
            max_size=6,
        )
    )
    @settings(max_examples=150)
    def test_total_dominates_components(self, components):
        total = lifetime_total_risk(components)
        assert 0.0 <= total <= 1.0
        for rate, occasions in components:
            assert total >= lifetime_disease_risk(rate, occasions)


def _toy_setup(rate_by_disease, occasions_by_disease, per_preg=()):
    entries = []
    for d, t in occasions_by_disease.items():
        entries.append(
            ScheduleEntry(
                "baseline_female", d, occasions=t,
                per_pregnancy_occasions=1 if d in per_preg else 0,
            )
        )
    schedule = ScheduleConfig(
        version_label="toy",
        subpopulations=("baseline_female",),
        entries=tuple(entries),
    )
    rates = {
        d: DiseaseRate(d, r, int(r * 1000), 1000) for d, r in rate_by_disease.items()
    }
    return rates, schedule


class TestEstimateProfile:
    def test_unscreened_profile_is_zero(self):
        rates, schedule = _toy_setup({"hiv": 0.1}, {"hiv": 0})
        est = estimate_profile(SubpopulationProfile(sex="female"), rates, schedule)
        assert est.total == 0.0
        assert est.disease_set == ()

    def test_missing_rate(self):
        _rates, schedule = _toy_setup({"hiv": 0.1}, {"hiv": 1, "syphilis": 2})
        with pytest.raises(MissingRate, match="syphilis"):
            estimate_profile(SubpopulationProfile(sex="female"), {"hiv": DiseaseRate("hiv", 0.1, 100, 1000)}, schedule)

    def test_complement_identity_on_canonical(self, rates, schedule):
        for canonical in CANONICAL_SUBPOPULATIONS:
            est = estimate_profile(canonical.profile, rates, schedule)
            product = 1.0
            for r in est.per_disease:
                product *= 1.0 - r.estimate
            assert abs((1.0 - est.total) - product) <= 4 * math.ulp(product)
            assert est.total >= max(r.estimate for r in est.per_disease)

    def test_monotone_in_occasions(self, rates, schedule):
        base_rates, toy_schedule = _toy_setup({"hiv": 0.03}, {"hiv": 4})
        more_rates, toy_more = _toy_setup({"hiv": 0.03}, {"hiv": 5})
        profile = SubpopulationProfile(sex="female")
        low = estimate_profile(profile, base_rates, toy_schedule).total
        high = estimate_profile(profile, more_rates, toy_more).total
        assert high >= low

    @given(
        data=st.lists(
            st.tuples(
                st.sampled_from(["hiv", "syphilis", "chlamydia", "gonorrhea"]),
                st.floats(min_value=0.0, max_value=0.25),
                st.integers(min_value=1, max_value=30),
            ),
            min_size=1,
            max_size=4,
            unique_by=lambda x: x[0],
        )
    )
    @settings(max_examples=120)
    def test_complement_identity_property(self, data):
        rates, schedule = _toy_setup(
            {d: r for d, r, _t in data}, {d: t for d, _r, t in data}
        )
        est = estimate_profile(SubpopulationProfile(sex="female"), rates, schedule)
        assume(est.total <= 0.9)
        product = 1.0
        for r in est.per_disease:
            product *= 1.0 - r.estimate
        assert abs((1.0 - est.total) - product) <= 4 * math.ulp(product)


class TestOddsRatio:
    def test_equal_probabilities(self):
        assert odds_ratio(0.3, 0.3) == 1.0

    @pytest.mark.parametrize("bad", [0.0, 1.0])
    def test_degenerate(self, bad):
        with pytest.raises(DegenerateOdds):
            odds_ratio(bad, 0.5)
        with pytest.raises(DegenerateOdds):
            odds_ratio(0.5, bad)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            odds_ratio(1.5, 0.5)

    @given(
        a=st.floats(min_value=1e-6, max_value=1.0 - 1e-6),
        b=st.floats(min_value=1e-6, max_value=1.0 - 1e-6),
    )
    @settings(max_examples=120)
    def test_antisymmetry(self, a, b):
        product = odds_ratio(a, b) * odds_ratio(b, a)
        assert abs(product - 1.0) <= 4 * math.ulp(1.0)


class TestProfiles:
    def test_fourteen_canonical(self):
        assert len(CANONICAL_SUBPOPULATIONS) == 14
        assert len({c.label for c in CANONICAL_SUBPOPULATIONS}) == 14
        # females first, then males, as reported
        sexes = [c.profile.sex for c in CANONICAL_SUBPOPULATIONS]
        assert sexes == ["female"] * 6 + ["male"] * 8

    def test_profile_consistency_rules(self):
        with pytest.raises(ValueError):
            SubpopulationProfile(sex="male", pregnancies=1)
        with pytest.raises(ValueError):
            SubpopulationProfile(sex="female", msm=True)
        with pytest.raises(ValueError):
            SubpopulationProfile(sex="female", prostate_screening=True)
        with pytest.raises(ValueError):
            SubpopulationProfile(sex="other")

    def test_schedule_groups_cover_bundle(self, schedule):
        groups = {schedule_group(c.profile) for c in CANONICAL_SUBPOPULATIONS}
        assert groups == set(schedule.subpopulations)
