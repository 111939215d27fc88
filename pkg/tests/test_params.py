import math

import pytest

from brl.errors import InadmissibleParameters
from brl.params import (
    Beta34Branch,
    Parameters,
    TheoremBranch,
    admissible,
    alpha_of,
    classify_beta_branch,
    classify_theorem_regime,
    derive_constants,
    hbar,
    L_of,
    p3_of,
    p_c_of,
)


def bisect_sign(f, lo, hi, tol=1e-12):
    flo = f(lo)
    assert flo * f(hi) < 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) * flo > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestAdmissible:
    def test_inside_n3_interval(self):
        assert admissible(Parameters(3, 2.0))

    def test_outside_n3_interval(self):
        assert not admissible(Parameters(3, 3.5))

    def test_large_p_high_dimension(self):
        assert admissible(Parameters(7, 100.0))

    def test_margin_rejects_endpoint(self):
        assert not admissible(Parameters(3, 2.9999999))
        assert not admissible(Parameters(5, 1.0000001))

    def test_n_below_3(self):
        assert not admissible(Parameters(2, 2.0))


class TestDerivedConstants:
    def test_alpha_and_L_n5_p3(self):
        dc = derive_constants(Parameters(5, 3.0))
        assert dc.alpha == 1.0
        assert dc.L == pytest.approx(8.0 ** -0.25, rel=1e-14)

    def test_alpha_and_L_n4_p3(self):
        dc = derive_constants(Parameters(4, 3.0))
        assert dc.alpha == 1.0
        assert dc.L == pytest.approx(3.0 ** -0.25, rel=1e-14)

    def test_p3_values(self):
        p1, p2, p3, p4 = p3_of()
        assert p1 == pytest.approx(1.1085060, abs=1e-6)
        assert p2 == pytest.approx(2.6267291, abs=1e-6)
        assert p3 < p4 < 1 < p1 < p2 < 3

    def test_p_c_n10(self):
        assert p_c_of(10) == pytest.approx(3.8572, abs=5e-5)

    def test_p_star_n4(self):
        assert derive_constants(Parameters(4, 7.0)).p_star == 7.0

    def test_p_star_n5_unbounded(self):
        assert math.isinf(derive_constants(Parameters(5, 2.0)).p_star)

    def test_optional_fields_absent_for_high_dimension(self):
        dc = derive_constants(Parameters(13, 2.0))
        assert dc.p_star is None
        assert dc.p_c is None
        assert dc.p3 is None

    def test_inadmissible_raises(self):
        with pytest.raises(InadmissibleParameters):
            derive_constants(Parameters(3, 3.5))

    @pytest.mark.parametrize("N", range(3, 16))
    def test_L_identity_sweep(self, N):
        ps = [1.2, 1.5, 2.0, 2.5, 2.9] if N == 3 else \
            [1.2, 2.0, 3.0, 5.0, 10.0]
        for p in ps:
            a = alpha_of(p)
            L = L_of(N, p)
            prod = a * (2 - a) * (N - 2 + a) * (N - 4 + a)
            assert L ** (-(p + 1.0)) == pytest.approx(prod, rel=1e-12)
            assert 0.0 < a < 2.0
            if N == 3:
                assert 1.0 < a < 2.0


class TestTheoremRegime:
    def test_high_dimension_main(self):
        assert classify_theorem_regime(Parameters(6, 5.0)) \
            == TheoremBranch.Thm1_main

    def test_n4_p7_special(self):
        assert classify_theorem_regime(Parameters(4, 7.0)) \
            == TheoremBranch.Thm2_eps_condition

    def test_n3_p2_little_o(self):
        assert classify_theorem_regime(Parameters(3, 2.0)) \
            == TheoremBranch.Thm3_little_o_condition

    def test_n4_interval_split(self):
        assert classify_theorem_regime(Parameters(4, 3.0)) \
            == TheoremBranch.Thm1_main
        assert classify_theorem_regime(Parameters(4, 8.0)) \
            == TheoremBranch.Thm1_main
        assert classify_theorem_regime(Parameters(4, 5.0)) \
            == TheoremBranch.Thm3_little_o_condition

    def test_n5_threshold(self):
        assert classify_theorem_regime(Parameters(5, 7.0)) \
            == TheoremBranch.Thm1_main
        assert classify_theorem_regime(Parameters(5, 7.5)) \
            == TheoremBranch.Thm3_little_o_condition


class TestBetaBranch:
    def test_n5_p3_complex(self):
        regime = classify_beta_branch(Parameters(5, 3.0))
        assert regime.beta34_branch == Beta34Branch.ComplexPair
        assert regime.ell == pytest.approx(-1.5, abs=1e-14)

    def test_n13_p2_real(self):
        regime = classify_beta_branch(Parameters(13, 2.0))
        assert regime.beta34_branch == Beta34Branch.RealAtMostMinus1

    def test_n4_p2_complex(self):
        regime = classify_beta_branch(Parameters(4, 2.0))
        assert regime.beta34_branch == Beta34Branch.ComplexPair

    @pytest.mark.parametrize("N", range(5, 13))
    def test_branch_flips_at_p_c(self, N):
        # The real/complex crossover recovered by bisecting the sign of the
        # discriminant-like function must agree with the closed form.
        pc = p_c_of(N)
        recovered = bisect_sign(lambda p: hbar(p, N), 1.01, 30.0, tol=1e-12)
        assert recovered == pytest.approx(pc, abs=1e-8)

    def test_n3_branch_structure(self):
        p1, p2, _, _ = p3_of()
        r1 = bisect_sign(lambda p: hbar(p, 3), 1.01, 2.0, tol=1e-12)
        r2 = bisect_sign(lambda p: hbar(p, 3), 2.0, 2.99, tol=1e-12)
        assert r1 == pytest.approx(p1, abs=1e-8)
        assert r2 == pytest.approx(p2, abs=1e-8)
        assert classify_beta_branch(Parameters(3, p1 - 0.05)).beta34_branch \
            != Beta34Branch.ComplexPair
        assert classify_beta_branch(Parameters(3, 2.0)).beta34_branch \
            == Beta34Branch.ComplexPair
        assert classify_beta_branch(Parameters(3, p2 + 0.05)).beta34_branch \
            != Beta34Branch.ComplexPair
