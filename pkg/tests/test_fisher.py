import numpy as np
import pytest
from hypothesis import given

from conftest import noncritical
from reference import fi_probs, m_ref, partial, qfi_eig, rho2_ref, drho2_ref
from xyqfi import (
    INFINITE,
    BoundViolation,
    ChainParams,
    DegenerateOutcome,
    InvalidParameters,
    NonConvergence,
    ParameterTag,
    PureStateDegeneracy,
    ZeroQfi,
    distance_ratios,
    fi_pair_magnetization,
    fi_single,
    fisher_scalars,
    qfi_pair,
    qfi_single,
    saturation,
)
from xyqfi.fisher import qfi_pair_closed_form, qfi_pair_spectral

T = ParameterTag
P05 = ChainParams(0.5, 1.0, 0.0)


class TestSingle:
    def test_gamma_tag_vanishes_toward_gamma_zero(self):
        vals = [qfi_single(ChainParams(1.5, g, 0.0), T.GAMMA) for g in (0.2, 0.1, 0.05, 0.02)]
        assert all(a > b for a, b in zip(vals, vals[1:])) and vals[-1] < 2e-3

    def test_gamma_zero_is_reported(self):
        # |J| < 1: fully polarized state; |J| > 1: gapless line, integrals do not converge
        with pytest.raises(PureStateDegeneracy):
            qfi_single(ChainParams(0.6, 0.0, 0.0), T.GAMMA)
        with pytest.raises(NonConvergence):
            qfi_single(ChainParams(1.5, 0.0, 0.0), T.GAMMA)

    @pytest.mark.parametrize("J", [0.3, 0.7, 1.3])
    def test_even(self, J):
        assert qfi_single(ChainParams(J, 1, 0), T.J) == pytest.approx(qfi_single(ChainParams(-J, 1, 0), T.J), rel=1e-9)

    def test_grows_toward_transition(self):
        assert qfi_single(ChainParams(0.95, 1, 0), T.J) > 3 * qfi_single(ChainParams(0.5, 1, 0), T.J)

    def test_fi_equals_qfi(self):
        p = ChainParams(0.8, 0.4, 0.2)
        for tag in T:
            assert fi_single(p, tag) == qfi_single(p, tag)

    def test_fi_single_value(self, tight):
        # outcome probabilities (1 +- m)/2 differentiated by Richardson differences
        assert fi_single(ChainParams(1.5, 0.25, 0.1), T.J, tight) == pytest.approx(0.17208468131533153, rel=1e-8)

    def test_j_zero_refused(self):
        with pytest.raises(InvalidParameters):
            qfi_single(ChainParams(0.0, 1, 0), T.J)

    def test_pure_state(self):
        with pytest.raises(PureStateDegeneracy):
            qfi_single(ChainParams(1e-8, 1, 0), T.J)


class TestPair:
    def test_closed_form_value(self, tight):
        # spectral QFI on the reference state with a finite-difference derivative
        assert qfi_pair_closed_form(P05, 1, T.J, tight) == pytest.approx(1.0154602701168685, rel=1e-8)

    def test_fi_value(self, tight):
        assert fi_pair_magnetization(P05, 1, T.J, tight) == pytest.approx(0.9741401154400857, rel=1e-8)

    def test_spectral_diagonal_reduction(self):
        p = ChainParams(0.7, 0.6, 0.1)
        st_inf = qfi_pair_spectral(p, INFINITE, T.D)
        assert st_inf == pytest.approx(fi_pair_magnetization(p, INFINITE, T.D), rel=1e-12)

    @given(noncritical)
    def test_infinite_identities(self, p):
        for tag in T:
            h = qfi_pair(p, INFINITE, tag)
            assert h == pytest.approx(2 * qfi_single(p, tag), rel=1e-10, abs=1e-300)
            assert qfi_pair_spectral(p, INFINITE, tag) == pytest.approx(h, rel=1e-10, abs=1e-300)
            assert fi_pair_magnetization(p, INFINITE, tag) == pytest.approx(h, rel=1e-10, abs=1e-300)

    @given(noncritical)
    def test_closed_vs_spectral(self, p):
        for r in (1, 3, 6):
            for tag in T:
                a, b = qfi_pair_closed_form(p, r, tag), qfi_pair_spectral(p, r, tag)
                assert a == pytest.approx(b, rel=1e-8, abs=1e-14)

    @given(noncritical)
    def test_fi_below_qfi(self, p):
        for r in (1, 2, 5):
            for tag in T:
                assert fi_pair_magnetization(p, r, tag) <= qfi_pair(p, r, tag) + 1e-9

    @given(noncritical)
    def test_against_reference(self, p):
        for tag in T:
            q = qfi_eig(rho2_ref(p.J, p.gamma, p.D, 2), drho2_ref(p.J, p.gamma, p.D, 2, tag.index))
            assert qfi_pair(p, 2, tag) == pytest.approx(q, rel=1e-6, abs=1e-9)
            assert fi_pair_magnetization(p, 2, tag) == pytest.approx(fi_probs(p.J, p.gamma, p.D, 2, tag.index), rel=1e-6, abs=1e-9)

    def test_method_dispatch(self):
        assert qfi_pair(P05, 2, T.J, method="spectral") == pytest.approx(qfi_pair(P05, 2, T.J), rel=1e-10)
        with pytest.raises(ValueError):
            qfi_pair(P05, 2, T.J, method="nope")

    def test_degenerate_outcome(self):
        with pytest.raises((DegenerateOutcome, PureStateDegeneracy)):
            fi_pair_magnetization(ChainParams(1e-8, 1, 0), 1, T.J)

    def test_separation_checked(self):
        with pytest.raises(InvalidParameters):
            qfi_pair(P05, 7, T.J)


class TestRatios:
    def test_saturation_infinite(self):
        assert saturation(ChainParams(0.6, 1, 0.2), INFINITE, T.J) == pytest.approx(1.0, abs=1e-9)

    def test_distance_ratios_infinite(self):
        assert distance_ratios(ChainParams(1.3, 0.5, 0.1), INFINITE, T.GAMMA) == pytest.approx((1.0, 1.0))

    def test_ratio_guards(self):
        from xyqfi.fisher import _ratio
        with pytest.raises(ZeroQfi):
            _ratio(0.0, 0.0)
        with pytest.raises(BoundViolation):
            _ratio(1.1, 1.0)
        assert _ratio(1.0 + 5e-10, 1.0) == pytest.approx(1.0)

    @given(noncritical)
    def test_saturation_range(self, p):
        s = fisher_scalars(p, 3, T.J)
        assert 0.0 <= s.saturation <= 1.0 + 1e-9
        assert s.fi <= s.qfi + 1e-9

    def test_scalars_flags(self):
        s = fisher_scalars(ChainParams(0.9995, 1, 0), 1, "J")
        assert s.near_critical and s.tag is T.J
