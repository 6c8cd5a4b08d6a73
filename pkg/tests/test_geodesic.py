import math

import pytest

from hyplyap.geodesic import (
    LEVY_MEAN_ROOF,
    GaussState,
    digit_stream,
    gauss_kuzmin,
    gauss_step,
)


def state_with_x(x, **kwargs):
    state = GaussState.from_seed(0, **kwargs)
    state.x = x
    state.started = True
    return state


class TestGaussStep:
    def test_silver_ratio_fixed_point(self):
        # 1/(sqrt(2) - 1) = sqrt(2) + 1, so the digit is 2 and x returns
        x = math.sqrt(2.0) - 1.0
        ev = gauss_step(state_with_x(x))
        assert ev.digit == 2
        assert ev.roof_time == pytest.approx(2.0 * math.log(1.0 + math.sqrt(2.0)), abs=1e-12)
        assert ev.roof_time == pytest.approx(1.76275, abs=1e-5)

    def test_golden_ratio_fixed_point(self):
        x = (math.sqrt(5.0) - 1.0) / 2.0
        state = state_with_x(x)
        ev = gauss_step(state)
        assert ev.digit == 1
        assert ev.roof_time == pytest.approx(0.96242, abs=1e-5)
        assert state.x == pytest.approx(x, abs=1e-12)

    def test_simple_rational_step(self):
        state = state_with_x(0.3)
        ev = gauss_step(state)
        assert ev.digit == 3
        assert state.x == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert ev.roof_time == pytest.approx(2.0 * math.log(10.0 / 3.0), abs=1e-12)
        assert ev.roof_time == pytest.approx(2.40795, abs=1e-5)

    def test_letters_alternate_and_reset(self):
        events = list(digit_stream(11, 500, refresh_period=16))
        phase = None
        for ev in events:
            if ev.refreshed:
                assert ev.letter == "L"
                phase = "L"
            else:
                phase = "R" if phase == "L" else "L"
                assert ev.letter == phase

    def test_refresh_period_respected(self):
        events = list(digit_stream(3, 400, refresh_period=8))
        gaps = [i for i, ev in enumerate(events) if ev.refreshed]
        assert gaps[0] == 0
        assert max(b - a for a, b in zip(gaps, gaps[1:])) <= 8


class TestDigitStream:
    def test_deterministic(self):
        a = list(digit_stream(42, 10))
        b = list(digit_stream(42, 10))
        assert a == b

    def test_distinct_seeds_differ(self):
        assert list(digit_stream(1, 50)) != list(digit_stream(2, 50))

    def test_count_validation(self):
        with pytest.raises(ValueError):
            list(digit_stream(0, 0))

    def test_roof_time_brackets_digit(self):
        for ev in digit_stream(7, 20000):
            assert 2.0 * math.log(ev.digit) <= ev.roof_time
            assert ev.roof_time < 2.0 * math.log(ev.digit + 1)

    def test_orbit_relation_between_refreshes(self):
        # x_before = 1/(digit + x_after) to within 4 ulp when no refresh fires
        state = GaussState.from_seed(5)
        gauss_step(state)
        checked = 0
        for _ in range(2000):
            x_before = state.x
            ev = gauss_step(state)
            if not ev.refreshed and state.x > 0.0:
                recon = 1.0 / (ev.digit + state.x)
                assert abs(recon - x_before) <= 4 * math.ulp(x_before)
                checked += 1
        assert checked > 1500

    def test_digit_one_frequency(self):
        hits = 0
        total = 1000000
        for ev in digit_stream(101, total):
            hits += ev.digit == 1
        freq = hits / total
        assert 0.413 <= freq <= 0.418
        assert gauss_kuzmin(1) == pytest.approx(math.log2(4.0 / 3.0))

    def test_mean_roof_time(self):
        total = 1000000
        acc = 0.0
        for ev in digit_stream(202, total):
            acc += ev.roof_time
        assert 2.34 <= acc / total <= 2.41
        assert LEVY_MEAN_ROOF == pytest.approx(math.pi ** 2 / (6 * math.log(2)))
