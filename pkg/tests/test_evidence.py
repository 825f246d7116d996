from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dstrust.evidence import (
    Focal,
    FusionInput,
    MassFunction,
    TotalConflictError,
    belief,
    combine,
    conflict,
    direct_bpa,
    dissimilarity,
    fuse,
    fuse_mass,
    indirect_bpa,
    pignistic,
    plausibility,
)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def masses(draw):
    a = draw(unit)
    b = draw(st.floats(min_value=0.0, max_value=1.0 - a, allow_nan=False))
    return MassFunction(m_T=a, m_notT=b, m_uncertain=max(0.0, 1.0 - a - b))


class TestMassFunction:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            MassFunction(0.5, 0.5, 0.5)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            MassFunction(1.2, -0.2, 0.0)

    def test_focal_access(self):
        m = MassFunction(0.6, 0.1, 0.3)
        assert m[Focal.TRUSTED] == 0.6
        assert m[Focal.UNTRUSTED] == 0.1
        assert m[Focal.EITHER] == 0.3
        assert m.as_tuple() == (0.6, 0.1, 0.3)


class TestDissimilarity:
    def test_example(self):
        assert dissimilarity(0.9, 0.1) == pytest.approx(0.8)

    def test_both_zero(self):
        assert dissimilarity(0.0, 0.0) == 0.0

    @given(unit, unit)
    def test_range_and_symmetry(self, a, b):
        d = dissimilarity(a, b)
        assert 0.0 <= d <= 1.0
        assert d == dissimilarity(b, a)


class TestBpa:
    def test_direct_trusted(self):
        assert direct_bpa(0.9, 0.5).as_tuple() == (0.9, 0.0, pytest.approx(0.1))

    def test_direct_untrusted(self):
        m = direct_bpa(0.2, 0.5)
        assert m.m_T == 0.0
        assert m.m_notT == pytest.approx(0.8)

    def test_indirect_low_recommendation(self):
        # IDT 0.1 against direct 0.9
        m = indirect_bpa(0.1, dissimilarity(0.9, 0.1), 0.5)
        assert m.m_notT == pytest.approx(0.2)
        assert m.m_uncertain == pytest.approx(0.8)

    def test_threshold_is_trusted(self):
        assert indirect_bpa(0.5, 0.0, 0.5).m_T == 1.0
        assert direct_bpa(0.5, 0.5).m_T == 0.5


class TestCombine:
    def test_table_one(self):
        m1 = MassFunction(m_T=0.9, m_uncertain=0.1)
        m2 = MassFunction(m_notT=0.2, m_uncertain=0.8)
        assert conflict(m1, m2) == pytest.approx(0.18, abs=1e-15)
        fused = combine(m1, m2)
        # 30-digit values: 36/41, 1/41, 4/41
        assert fused.m_T == pytest.approx(0.878048780487804878, abs=1e-15)
        assert fused.m_notT == pytest.approx(0.024390243902439024, abs=1e-15)
        assert fused.m_uncertain == pytest.approx(0.097560975609756098, abs=1e-15)

    def test_total_conflict(self):
        with pytest.raises(TotalConflictError):
            combine(MassFunction(m_T=1.0), MassFunction(m_notT=1.0))

    @given(masses())
    def test_vacuous_identity(self, m):
        assert combine(m, MassFunction.vacuous()) == m
        assert combine(MassFunction.vacuous(), m) == m

    @given(masses(), masses())
    def test_commutative(self, m1, m2):
        try:
            a = combine(m1, m2)
        except TotalConflictError:
            return
        b = combine(m2, m1)
        assert a.as_tuple() == pytest.approx(b.as_tuple(), abs=1e-12)


class TestBeliefFunctions:
    def test_belief_and_plausibility(self):
        m = MassFunction(0.6, 0.1, 0.3)
        assert belief(m, Focal.TRUSTED) == 0.6
        assert plausibility(m, Focal.TRUSTED) == pytest.approx(0.9)
        assert belief(m, {"T", "notT"}) == pytest.approx(1.0)
        assert plausibility(m, Focal.UNTRUSTED) == pytest.approx(0.4)

    def test_unknown_hypothesis(self):
        with pytest.raises(ValueError):
            belief(MassFunction.vacuous(), {"maybe"})

    @given(masses())
    def test_belief_below_plausibility(self, m):
        for f in Focal:
            assert belief(m, f) <= plausibility(m, f) + 1e-12

    def test_pignistic(self):
        assert pignistic(MassFunction(0.6, 0.1, 0.3)) == pytest.approx(0.75)


class TestFuse:
    def test_no_recommendations(self):
        assert fuse(FusionInput(0.9)) == 0.9
        assert fuse(FusionInput(0.2)) == 0.0

    def test_table_one_pipeline(self):
        assert fuse(FusionInput(0.9, ((7, 0.1),))) == pytest.approx(36 / 41, abs=1e-12)

    def test_pignistic_mode(self):
        assert fuse(FusionInput(0.9, ((7, 0.1),)), mode="pignistic") == pytest.approx(38 / 41, abs=1e-12)
        with pytest.raises(ValueError):
            fuse(FusionInput(0.9), mode="other")

    def test_order_of_folding(self):
        a = fuse_mass(0.7, [0.2, 0.9, 0.4], 0.5)
        b = fuse_mass(0.7, [0.4, 0.9, 0.2], 0.5)
        assert a.as_tuple() == pytest.approx(b.as_tuple(), abs=1e-12)

    def test_rejects_bad_idt(self):
        with pytest.raises(ValueError):
            FusionInput(0.9, ((1, 1.5),))

    @given(unit, st.lists(unit, max_size=25))
    def test_pipeline_never_totally_conflicts(self, direct, idts):
        m = fuse_mass(direct, idts, 0.5)
        assert sum(m.as_tuple()) == pytest.approx(1.0, abs=1e-9)
