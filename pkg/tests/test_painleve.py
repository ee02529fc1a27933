import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from tritronquee.errors import PoleFitFailed
from tritronquee.painleve import (laurent_coefficients, seed_asymptotic,
                                  track, tritronquee_series_coefficients)

from oracles import hermite_quintic_residual

#: first real pole and its quartic coefficient (this module is the oracle;
#: the values are cross-validated by chart-parameter halving below)
FIRST_POLE_A = -2.3841687695685
FIRST_POLE_B = -0.0621357388


def _series_eval(table, a, b, z):
    c = table.numeric(a, b)
    t = z - a
    y = sum(cj * t ** (j - 2) for j, cj in enumerate(c))
    yp = sum(cj * (j - 2) * t ** (j - 3) for j, cj in enumerate(c))
    ypp = sum(cj * (j - 2) * (j - 3) * t ** (j - 4) for j, cj in enumerate(c))
    return y, yp, ypp


class TestLaurentCoefficients:
    def test_leading_coefficient_is_one(self):
        table = laurent_coefficients(8)
        assert table.coeffs[0] == {(0, 0): Fraction(1)}
        assert table.coeffs[1] == {}

    def test_resonance_at_quartic_order(self):
        """The free coefficient enters exactly at the quartic power: below
        it nothing depends on b, and the b-derivative there is one."""
        table = laurent_coefficients(8)
        for j in range(6):
            assert all(jb == 0 for (_, jb) in table.coeffs[j])
        assert table.coeffs[6] == {(0, 1): Fraction(1)}
        # the linear system degenerates exactly at the resonance power
        assert (6 - 2) * (6 - 3) - 12 == 0

    def test_known_higher_coefficients(self):
        table = laurent_coefficients(10)
        assert table.coeffs[8] == {(2, 0): Fraction(1, 300)}
        assert table.coeffs[10] == {(1, 1): Fraction(3, 110),
                                    (0, 0): Fraction(1, 264)}

    def test_order_validation(self):
        with pytest.raises(ValueError):
            laurent_coefficients(3)

    def test_truncated_series_residual_order(self):
        """Substituting the order-8 table into the equation leaves a
        residual O((z-a)^7): halving the distance divides it by ~2^7."""
        table = laurent_coefficients(8)
        a, b = -2.1 + 0.3j, -0.05 - 0.02j
        res = []
        for t in (0.2, 0.1):
            z = a + t
            y, yp, ypp = _series_eval(table, a, b, z)
            res.append(abs(ypp - 6.0 * y * y + z))
        ratio = res[0] / res[1]
        assert 60.0 < ratio < 260.0


class TestAsymptoticSeries:
    def test_first_correction_coefficient(self):
        c = tritronquee_series_coefficients(4)
        assert c[0] == 1.0
        assert abs(c[1] - 1.0 / (8.0 * math.sqrt(6.0))) < 1e-15

    def test_leading_value(self):
        st = seed_asymptotic(40.0)
        lead = -math.sqrt(40.0 / 6.0)
        assert abs(st.y - lead) < 1e-3 * abs(lead)
        # correction is O(|z|^{-5/2}) relative
        assert abs(st.y - lead) > 1e-7 * abs(lead)

    def test_two_radius_certification(self):
        # seed_asymptotic raises unless the 2*z0 -> z0 integration matches
        st = seed_asymptotic(40.0)
        st2 = seed_asymptotic(80.0)
        assert st.chart == "regular" and st2.chart == "regular"

    def test_rejects_small_radius_and_bad_sector(self):
        with pytest.raises(ValueError):
            seed_asymptotic(5.0)
        with pytest.raises(ValueError):
            seed_asymptotic(40.0 * cmath.exp(1j * 0.9 * math.pi))


class TestTrack:
    def test_first_real_pole(self):
        st = seed_asymptotic(40.0)
        _, poles = track(st, [40.0, -3.5])
        assert len(poles) == 1
        assert abs(poles[0].a - FIRST_POLE_A) < 1e-6
        assert abs(poles[0].b - FIRST_POLE_B) < 1e-6
        assert abs(poles[0].a.imag) < 1e-10

    def test_chart_parameter_invariance(self):
        st = seed_asymptotic(40.0)
        _, p_ref = track(st, [40.0, -3.5])
        _, p_half_radius = track(st, [40.0, -3.5], fit_radius=0.125)
        _, p_half_blowup = track(st, [40.0, -3.5], blowup_threshold=5e3)
        assert abs(p_half_radius[0].a - p_ref[0].a) < 1e-8
        assert abs(p_half_blowup[0].a - p_ref[0].a) < 1e-8

    def test_real_pole_ladder(self):
        st = seed_asymptotic(40.0)
        _, poles = track(st, [40.0, -12.0])
        assert len(poles) == 4
        assert all(abs(p.a.imag) < 1e-9 for p in poles)
        assert all(p.fit_residual < 1e-6 for p in poles)
        gaps = np.diff([p.a.real for p in poles])
        assert all(g < 0 for g in gaps)

    def test_dense_ode_residual(self):
        st = seed_asymptotic(40.0)
        records = []
        track(st, [40.0, 5.0], record_to=records)
        assert len(records) > 100
        assert hermite_quintic_residual(records) < 1e-10

    def test_laurent_round_trip(self):
        st = seed_asymptotic(40.0)
        final, poles = track(st, [40.0, -3.5])
        assert len(poles) == 1
        back, back_poles = track(final, [final.z, 40.0])
        assert len(back_poles) == 1
        assert abs(back.y - st.y) < 1e-8
        assert abs(back.yp - st.yp) < 1e-8

    def test_path_independence(self):
        st = seed_asymptotic(40.0)
        _, pA = track(st, [40.0, -3.5])
        _, pB = track(st, [40.0, 6.0, 5.5 + 0.5j, -0.5 + 0.5j, -1.0, -3.5])
        assert abs(pA[0].a - pB[0].a) < 1e-8

    def test_conjugate_path_gives_conjugate_poles(self):
        st = seed_asymptotic(40.0)
        path = [40.0, 6.0, 5.5 + 0.5j, -0.5 + 0.5j, -1.0, -3.5]
        _, p_up = track(st, path)
        _, p_dn = track(st, [z.conjugate() if isinstance(z, complex) else z
                             for z in path])
        assert len(p_up) == len(p_dn) == 1
        assert abs(p_up[0].a - p_dn[0].a.conjugate()) < 1e-10
        assert abs(p_up[0].b - p_dn[0].b.conjugate()) < 1e-10

    def test_path_must_start_at_state(self):
        st = seed_asymptotic(40.0)
        with pytest.raises(ValueError):
            track(st, [30.0, -3.5])

    def test_fit_disagreement_raises(self):
        # a coarse integration makes the two-radius fits genuinely disagree
        st = seed_asymptotic(40.0)
        with pytest.raises(PoleFitFailed):
            track(st, [40.0, -3.5], tol_fit=1e-14, rtol=1e-7)

    def test_final_state_inside_pole_region_is_laurent(self):
        st = seed_asymptotic(40.0)
        final, poles = track(st, [40.0, FIRST_POLE_A + 0.05])
        assert len(poles) == 1
        assert final.chart == "laurent"
        assert abs(final.laurent_center - poles[0].a) < 1e-9
