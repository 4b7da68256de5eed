"""Split-bundle section counts: both conventions, geometry, the closed
form, and the worked example's certificates."""

import random
from fractions import Fraction
from itertools import product
from math import comb

import pytest

from fanobound.hilbert import PValue, fit_ab, p_affine
from fanobound.bundle import (
    EXAMPLE_TWISTS,
    ChiApproximationWarning,
    SplitBundle,
    UnsupportedConventionError,
    anticanonical_data,
    consistency_audit,
    example1_bound,
    h0_anti,
    h0_p1,
    k5_geometric,
    oracle_source,
    paper_closed_form,
    rank_printed,
    standard_total_rank,
    sym_power_twists,
)
from fanobound.certs import verify


def brute_force_twists(twists, k):
    """Exhaustive multi-index enumeration of S^k(O(e1) + ... + O(e5))."""
    out = {}
    for alpha in product(range(k + 1), repeat=5):
        if sum(alpha) != k:
            continue
        d = sum(a * e for a, e in zip(alpha, twists))
        out[d] = out.get(d, 0) + 1
    return out


def brute_force_h0(twists, m):
    shift = m * (2 - sum(twists))
    mults = brute_force_twists(twists, 5 * m)
    return sum(c * h0_p1(d + shift) for d, c in mults.items())


class TestBasics:
    def test_bundle_needs_five_twists(self):
        with pytest.raises(ValueError):
            SplitBundle((0, 0, 0, 1))

    def test_h0_p1(self):
        assert h0_p1(3) == 4
        assert h0_p1(-1) == 0
        assert h0_p1(-5) == 0
        assert h0_p1(1) == 2  # degree m + i at m = 1, i = 0

    def test_anticanonical_data(self):
        assert anticanonical_data(SplitBundle(EXAMPLE_TWISTS)) == (5, 1)
        assert anticanonical_data(SplitBundle((0, 0, 0, 0, 0))) == (5, 2)
        assert anticanonical_data(SplitBundle((1, 1, 1, 1, 1))) == (5, -3)

    def test_k5_geometric(self):
        # (5L + H)^5 with H^2 = 0: 3125 L^5 + 5 * 625 H.L^4 = 3125 + 3125
        assert k5_geometric(SplitBundle(EXAMPLE_TWISTS)) == 6250
        assert k5_geometric(SplitBundle((0, 0, 0, 0, 0))) == 6250

    def test_parse(self):
        assert SplitBundle.parse("0,0,0,0,1").twists == (0, 0, 0, 0, 1)


class TestSymPowerTwists:
    def test_example_standard_multiplicities(self):
        got = sym_power_twists(SplitBundle(EXAMPLE_TWISTS), 5, "standard")
        # brute force over all C(9,4) = 126 multi-indices
        assert got == brute_force_twists(EXAMPLE_TWISTS, 5)
        assert [got[d] for d in range(6)] == [56, 35, 20, 10, 4, 1]

    def test_example_printed_multiplicities(self):
        got = sym_power_twists(SplitBundle(EXAMPLE_TWISTS), 5, "paper")
        # printed rank (k-1)k(k+1)/6 at k = 5..0
        assert [got.get(d, 0) for d in range(6)] == [20, 10, 4, 1, 0, 0]

    def test_trivial_bundle(self):
        got = sym_power_twists(SplitBundle((0, 0, 0, 0, 0)), 2, "standard")
        assert got == {0: comb(6, 4)}

    def test_dp_equals_brute_force_random_twists(self):
        rng = random.Random(20240501)
        for _ in range(40):
            twists = tuple(rng.randint(-2, 3) for _ in range(5))
            k = rng.randint(0, 8)
            assert sym_power_twists(SplitBundle(twists), k) == brute_force_twists(
                twists, k
            )

    def test_total_rank(self):
        rng = random.Random(20240502)
        for _ in range(20):
            twists = tuple(rng.randint(-2, 3) for _ in range(5))
            k = rng.randint(0, 10)
            mults = sym_power_twists(SplitBundle(twists), k)
            assert sum(mults.values()) == standard_total_rank(k) == comb(k + 4, 4)

    def test_printed_convention_needs_special_shape(self):
        with pytest.raises(UnsupportedConventionError):
            sym_power_twists(SplitBundle((1, 1, 0, 0, 0)), 5, "paper")
        # any order of four zeros and one e is accepted
        assert sym_power_twists(SplitBundle((0, 2, 0, 0, 0)), 3, "paper") == {
            0: rank_printed(3),
            2: rank_printed(2),
            4: rank_printed(1),
            6: rank_printed(0),
        }


class TestH0Anti:
    def test_printed_convention_headline_values(self):
        b = SplitBundle(EXAMPLE_TWISTS)
        assert h0_anti(b, 1, "paper") == 91
        assert h0_anti(b, 4, "paper") == 62909
        assert h0_anti(b, 5, "paper") == 186030

    def test_standard_convention_value(self):
        b = SplitBundle(EXAMPLE_TWISTS)
        # by brute force: sum of C(8-i,3)*(i+2) over i = 0..5
        assert h0_anti(b, 1, "standard") == brute_force_h0(EXAMPLE_TWISTS, 1) == 378

    def test_trivial_bundle_value(self):
        # P^4 x P^1: h0(-K) = C(9,4) * 3
        assert h0_anti(SplitBundle((0, 0, 0, 0, 0)), 1) == brute_force_h0(
            (0, 0, 0, 0, 0), 1
        ) == 126 * 3

    def test_m_must_be_positive(self):
        with pytest.raises(ValueError):
            h0_anti(SplitBundle(EXAMPLE_TWISTS), 0)

    def test_chi_guard_warns_on_deep_negative_twists(self):
        b = SplitBundle((-2, 0, 0, 0, 1))
        with pytest.warns(ChiApproximationWarning):
            value = h0_anti(b, 1)
        assert value == brute_force_h0((-2, 0, 0, 0, 1), 1)

    def test_no_warning_on_the_example(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error", ChiApproximationWarning)
            h0_anti(SplitBundle(EXAMPLE_TWISTS), 2)


class TestPaperClosedForm:
    def test_published_values(self):
        assert paper_closed_form(1) == 91
        assert paper_closed_form(4) == 62909
        assert paper_closed_form(5) == 186030

    def test_identity_with_summation_up_to_fifty(self):
        b = SplitBundle(EXAMPLE_TWISTS)
        for m in range(1, 51):
            assert h0_anti(b, m, "paper") == paper_closed_form(m)


class TestHilbertFit:
    def test_standard_values_fit_one_ab(self):
        b = SplitBundle(EXAMPLE_TWISTS)
        values = [h0_anti(b, m) for m in range(1, 11)]
        a, bb = fit_ab(PValue(1, values[0]), PValue(2, values[1]))
        for m in range(1, 11):
            assert p_affine(m).evaluate(a, bb) == values[m - 1]
        assert p_affine(0).evaluate(a, bb) == 1  # P(0) = 1 extrapolates
        assert 720 * a == 6250

    def test_fit_matches_geometry_for_twist_family(self):
        for e in (0, 1, 2):
            twists = (0, 0, 0, 0, e)
            b = SplitBundle(twists)
            v1, v2 = h0_anti(b, 1), h0_anti(b, 2)
            a, _ = fit_ab(PValue(1, v1), PValue(2, v2))
            assert 720 * a == k5_geometric(b)

    def test_printed_values_fit_nothing(self):
        b = SplitBundle(EXAMPLE_TWISTS)
        a, bb = fit_ab(
            PValue(1, h0_anti(b, 1, "paper")), PValue(2, h0_anti(b, 2, "paper"))
        )
        # the pair (91, 2277) inverts to a = 229/45, but m = 3 breaks
        assert a == Fraction(229, 45)
        assert p_affine(3).evaluate(a, bb) != h0_anti(b, 3, "paper")


class TestConsistencyAudit:
    def test_example_entries(self):
        entries = consistency_audit(SplitBundle(EXAMPLE_TWISTS), m_max=10)
        by_status = {}
        for e in entries:
            by_status.setdefault(e.status, []).append(e.check)
        assert any("closed form" in c for c in by_status["confirmed"])
        assert any("intersection-theoretic" in c for c in by_status["confirmed"])
        assert any(
            "printed-convention" in c for c in by_status["discrepancy"]
        )

    def test_direct_summation_cross_check(self):
        # the standard count at m = 3 against an independent brute force
        assert h0_anti(SplitBundle(EXAMPLE_TWISTS), 3) == brute_force_h0(
            EXAMPLE_TWISTS, 3
        ) == 27132


class TestExample1Bound:
    def test_printed_certificate(self):
        ex = example1_bound()
        assert ex.printed.bound == 15
        assert ex.printed.r0 == 3 and ex.printed.r == [3, 4, 5]
        assert verify(ex.printed).ok

    def test_standard_certificate_is_no_worse(self):
        ex = example1_bound()
        assert ex.standard.bound <= 15
        assert all(s <= p for s, p in zip(ex.standard.r, ex.printed.r))
        assert verify(ex.standard).ok

    def test_oracle_source_adapter(self):
        src = oracle_source(SplitBundle(EXAMPLE_TWISTS), "paper")
        assert src.d5 == 6250
        assert src.h0(1) == 91
        with pytest.raises(ValueError):
            oracle_source(SplitBundle(EXAMPLE_TWISTS), "bogus")
