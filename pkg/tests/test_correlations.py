import math

import pytest
from hypothesis import given

from conftest import noncritical
from reference import correlators_ref, partial
from xyqfi import (
    INFINITE,
    ChainParams,
    DegenerateFit,
    InvalidParameters,
    ParameterTag,
    asymptotic_decay_check,
    correlation_partials,
    correlation_set,
    g_coefficient,
    magnetization,
)
from xyqfi.correlations import check_separation, format_separation, parse_separation, s_z, toeplitz_sx, toeplitz_sy

T = ParameterTag
P05 = ChainParams(0.5, 1.0, 0.0)


class TestSeparation:
    @pytest.mark.parametrize("r", [0, 7, -1, 2.5])
    def test_rejected(self, r):
        with pytest.raises(InvalidParameters):
            check_separation(r)

    def test_r_max_override(self):
        assert check_separation(9, r_max=10) == 9
        assert check_separation(40, r_max=None) == 40

    @pytest.mark.parametrize("text,val", [("inf", INFINITE), ("3", 3), ("Infinity", INFINITE)])
    def test_parse(self, text, val):
        assert parse_separation(text) == val

    def test_format(self):
        assert format_separation(INFINITE) == "inf" and format_separation(None) == ""


class TestToeplitz:
    def test_sx_r1(self):
        assert toeplitz_sx(P05, 1) == pytest.approx(g_coefficient(P05, -1), abs=1e-15)

    def test_sy_r1(self):
        assert toeplitz_sy(P05, 1) == pytest.approx(g_coefficient(P05, 1), abs=1e-15)

    @pytest.mark.parametrize("r", [1, 2, 3, 6])
    def test_j_zero(self, r):
        p = ChainParams(0.0, 1.0, 0.2)
        assert toeplitz_sx(p, r) == pytest.approx(0.0, abs=1e-12)
        assert toeplitz_sy(p, r) == pytest.approx(0.0, abs=1e-12)
        assert s_z(p, r) == pytest.approx(1.0, abs=1e-12)

    def test_sx_value(self):
        # reference Toeplitz determinant; chain N=12 gives -0.041542
        assert toeplitz_sx(P05, 3) == pytest.approx(-0.04115985936224149, rel=1e-9)
        assert toeplitz_sx(P05, 3) == pytest.approx(-0.04154190166377191, abs=1e-3)

    def test_sy_value_with_dm(self):
        assert toeplitz_sy(ChainParams(0.5, 1.0, 0.3), 2) == pytest.approx(-0.020152158725420442, rel=1e-9)

    def test_sz_value(self):
        # chain N=12: 0.930957
        assert s_z(P05, 1) == pytest.approx(0.9310046217178993, rel=1e-10)
        assert s_z(P05, 1) == pytest.approx(0.9309570, abs=1e-4)

    def test_sz_approaches_m2(self):
        p = ChainParams(0.7, 0.5, 0.1)
        m2 = magnetization(p) ** 2
        devs = [abs(s_z(p, r, r_max=None) - m2) for r in (8, 16, 32)]
        assert devs[0] > devs[1] > devs[2]


class TestCorrelationSet:
    def test_infinite(self):
        p = ChainParams(0.8, 0.4, 0.2)
        cs = correlation_set(p, INFINITE)
        assert (cs.sxx, cs.syy) == (0.0, 0.0) and cs.szz == cs.m ** 2

    def test_j_zero(self):
        cs = correlation_set(ChainParams(0.0, 1.0, 0.0), 2)
        assert (cs.sxx, cs.syy, cs.szz, cs.m) == pytest.approx((0, 0, 1, 1), abs=1e-12)

    def test_ordered_phase_value(self):
        cs = correlation_set(ChainParams(1.2, 1.0, 0.0), 4)
        ref = (0.4685328207369354, 0.7473354893556523, -0.0008246805863977697, 0.22134372080075204)
        assert (cs.m, cs.sxx, cs.syy, cs.szz) == pytest.approx(ref, rel=1e-9, abs=1e-14)
        # exact diagonalization, N=14 (slow finite-size convergence in the ordered phase)
        chain = (0.4759125066956618, 0.7348976007825521, -0.003093866230357567, 0.23048307572032645)
        for lib, ed in zip((cs.m, cs.sxx, cs.syy, cs.szz), chain):
            assert abs(lib - ed) <= max(0.05 * abs(ed), 0.02)

    @given(noncritical)
    def test_bounded_and_reference(self, p):
        for r in (1, 3, 6):
            cs = correlation_set(p, r)
            assert max(abs(cs.m), abs(cs.sxx), abs(cs.syy), abs(cs.szz)) <= 1.0
            ref = correlators_ref(p.J, p.gamma, p.D, r)
            assert (cs.m, cs.sxx, cs.syy, cs.szz) == pytest.approx(ref, abs=1e-9)


class TestCorrelationPartials:
    def test_infinite_chain_rule(self):
        p = ChainParams(0.6, 0.5, 0.1)
        d = correlation_partials(p, INFINITE, T.D)
        assert d.dsxx == 0 and d.dsyy == 0
        assert d.dszz == pytest.approx(2 * magnetization(p) * d.dm, rel=1e-14)

    def test_value(self, tight):
        d = correlation_partials(P05, 2, T.J, tight)
        ref = (-0.2779330989623648, 0.41282433820135034, -0.09176276095483778, -0.49760519213580084)
        assert (d.dm, d.dsxx, d.dsyy, d.dszz) == pytest.approx(ref, rel=1e-9)

    def test_gamma_zero(self, tight):
        d = correlation_partials(ChainParams(0.5, 0.0, 0.0), 2, T.GAMMA, tight)
        assert d.dsyy == pytest.approx(-0.07179676972454847, rel=1e-9)
        assert d.dsxx == pytest.approx(0.07179676972454847, rel=1e-9)
        assert d.dm == pytest.approx(0.0, abs=1e-14)

    @given(noncritical)
    def test_against_fd(self, p):
        for tag in T:
            d = correlation_partials(p, 3, tag)
            for i, got in enumerate((d.dm, d.dsxx, d.dsyy, d.dszz)):
                fd = partial(lambda *q: correlators_ref(*q, 3)[i], (p.J, p.gamma, p.D), tag.index)
                assert got == pytest.approx(fd, rel=1e-6, abs=1e-8)


class TestDecay:
    def test_j_zero_degenerate(self):
        with pytest.raises(DegenerateFit):
            asymptotic_decay_check(ChainParams(0.0, 1.0, 0.0), [8, 16, 32, 64])

    @pytest.mark.parametrize("rs", [[8, 16, 32], [4, 8, 16, 32], [8, 8, 16, 32]])
    def test_bad_r_list(self, rs):
        with pytest.raises(InvalidParameters):
            asymptotic_decay_check(ChainParams(1.5, 0.25, 0.1), rs)

    def test_fit_runs(self):
        fit = asymptotic_decay_check(ChainParams(1.5, 0.25, 0.1), [8, 16, 32, 64])
        assert math.isfinite(fit.slope) and fit.slope < 0
