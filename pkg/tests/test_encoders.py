import json
import random
from pathlib import Path

import pytest

from pulsenav.encoders import (
    Channel,
    CompassConfig,
    DirectionConfig,
    DistanceConfig,
    GuidanceEvent,
    MalformedTrainError,
    Meaning,
    Pulse,
    PulseTrain,
    compass_interval,
    completion_signal,
    decode_direction_A,
    distance_interval,
    encode_direction_A,
    encode_direction_B,
    success_signal,
    voice_instruction,
)
from pulsenav.geometry import Side, TurnClassification

GOLDEN = json.loads((Path(__file__).parent / "golden_voice.json").read_text())


class TestCompassInterval:
    def test_aligned_is_silent(self):
        assert compass_interval(0.0) is None

    def test_dead_zone_edge_is_silent(self):
        assert compass_interval(10.0) is None
        assert compass_interval(-10.0) is None

    def test_max_deviation_hits_minimum_interval(self):
        assert compass_interval(180.0) == pytest.approx(150.0)

    def test_hand_computed_midpoint(self):
        # 1000 - 850 * (95 - 10) / 170 = 575
        assert compass_interval(95.0) == pytest.approx(575.0)
        assert compass_interval(-95.0) == pytest.approx(575.0)

    def test_out_of_range_rejected(self):
        for bad in (181.0, -180.0, -200.0, float("nan")):
            with pytest.raises(ValueError):
                compass_interval(bad)

    def test_strictly_decreasing_and_symmetric(self):
        rng = random.Random(21)
        cfg = CompassConfig()
        samples = sorted(
            rng.uniform(cfg.dead_zone_deg + 1e-6, 180.0) for _ in range(10_000)
        )
        prev_mag, prev_val = None, None
        for mag in samples:
            val = compass_interval(mag, cfg)
            assert val is not None
            assert val == compass_interval(-mag + 360.0 if mag == 180.0 else -mag, cfg)
            if prev_val is not None and mag > prev_mag:
                assert val < prev_val
            prev_mag, prev_val = mag, val

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CompassConfig(dead_zone_deg=180.0)
        with pytest.raises(ValueError):
            CompassConfig(interval_min_ms=1000.0, interval_max_ms=150.0)


class TestDistanceInterval:
    def test_silent_above_trigger(self):
        assert distance_interval(12.0) is None

    def test_hand_computed_midpoint(self):
        assert distance_interval(5.0) == pytest.approx(750.0)

    def test_clamped_at_minimum_when_there(self):
        assert distance_interval(0.0) == pytest.approx(250.0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            distance_interval(-0.5)

    def test_monotone_below_trigger(self):
        rng = random.Random(22)
        cfg = DistanceConfig()
        samples = sorted(rng.uniform(0.0, cfg.trigger_distance_m) for _ in range(10_000))
        prev = None
        for r in samples:
            val = distance_interval(r, cfg)
            assert cfg.interval_min_ms <= val <= cfg.interval_max_ms
            if prev is not None:
                assert val >= prev
            prev = val


class TestDirectionEncoding:
    def test_right_90_is_three_long(self):
        train = encode_direction_A(TurnClassification(3, Side.RIGHT, 90.0))
        assert train.meaning is Meaning.DIRECTION
        assert [p.length_ms for p in train.pulses] == [450.0] * 3

    def test_left_90_is_three_short(self):
        train = encode_direction_A(TurnClassification(3, Side.LEFT, -90.0))
        assert [p.length_ms for p in train.pulses] == [120.0] * 3

    def test_half_turn_is_six_long(self):
        train = encode_direction_A(TurnClassification(6, Side.RIGHT, 180.0))
        assert [p.length_ms for p in train.pulses] == [450.0] * 6

    def test_straight_has_no_signal(self):
        with pytest.raises(ValueError):
            encode_direction_A(TurnClassification(0, Side.NONE, 3.0))

    def test_gaps_between_pulses_only(self):
        train = encode_direction_A(TurnClassification(3, Side.RIGHT, 90.0))
        assert [p.gap_after_ms for p in train.pulses] == [250.0, 250.0, 0.0]

    def test_option_b_single_ping(self):
        train = encode_direction_B()
        assert train.meaning is Meaning.PING
        assert len(train.pulses) == 1
        assert train.pulses[0].length_ms == 120.0

    def test_option_b_parameter_passthrough(self):
        cfg = DirectionConfig(short_pulse_ms=200.0)
        train = encode_direction_B(cfg)
        assert train.pulses[0].length_ms == 200.0

    def test_round_trip_all_cases(self):
        from pulsenav.geometry import normalize_angle

        for hour in range(1, 7):
            for side in (Side.LEFT, Side.RIGHT):
                angle = normalize_angle(hour * 30.0 * (1 if side is Side.RIGHT else -1))
                turn = TurnClassification(hour, side, angle)
                back = decode_direction_A(encode_direction_A(turn))
                assert (back.clock_hour, back.side) == (hour, side)

    def test_decode_single_short_is_one_left(self):
        train = PulseTrain((Pulse(120.0),), Meaning.DIRECTION)
        got = decode_direction_A(train)
        assert (got.clock_hour, got.side) == (1, Side.LEFT)

    def test_decode_rejects_seven_pulses(self):
        train = PulseTrain(tuple(Pulse(450.0) for _ in range(7)), Meaning.DIRECTION)
        with pytest.raises(MalformedTrainError):
            decode_direction_A(train)

    def test_decode_rejects_mixed_lengths(self):
        train = PulseTrain((Pulse(450.0), Pulse(120.0)), Meaning.DIRECTION)
        with pytest.raises(MalformedTrainError):
            decode_direction_A(train)

    def test_decode_rejects_wrong_meaning(self):
        with pytest.raises(MalformedTrainError):
            decode_direction_A(encode_direction_B())


class TestMilestoneSignals:
    def test_success_shape(self):
        train = success_signal()
        assert train.meaning is Meaning.SUCCESS
        assert len(train.pulses) == 1
        assert train.pulses[0].length_ms == 900.0
        assert train.pulses[0].gap_after_ms == 600.0

    def test_completion_shares_shape(self):
        train = completion_signal()
        assert train.meaning is Meaning.COMPLETION
        assert train.pulses[0].length_ms == 900.0

    def test_success_must_outlast_long_pulse(self):
        with pytest.raises(ValueError):
            DirectionConfig(long_pulse_ms=450.0, success_pulse_ms=450.0)

    def test_success_longer_than_any_direction_pulse(self):
        cfg = DirectionConfig()
        assert cfg.success_pulse_ms > cfg.long_pulse_ms > cfg.short_pulse_ms


class TestPulseTrainInvariants:
    def test_empty_train_rejected(self):
        with pytest.raises(ValueError):
            PulseTrain((), Meaning.DIRECTION)

    def test_mixed_channels_rejected(self):
        with pytest.raises(ValueError):
            PulseTrain(
                (Pulse(100.0, channel=Channel.HAPTIC), Pulse(100.0, channel=Channel.AUDIO)),
                Meaning.DIRECTION,
            )

    def test_duration_sums_lengths_and_gaps(self):
        train = encode_direction_A(TurnClassification(2, Side.RIGHT, 60.0))
        assert train.duration_ms == pytest.approx(450 + 250 + 450)


class TestVoiceInstruction:
    def test_golden_phrases(self):
        cases = {
            "depart": (GuidanceEvent.DEPART, None, None),
            "at_turn 1 right": (GuidanceEvent.AT_TURN, TurnClassification(1, Side.RIGHT, 20.0), None),
            "at_turn 2 right": (GuidanceEvent.AT_TURN, TurnClassification(2, Side.RIGHT, 60.0), None),
            "at_turn 3 left": (GuidanceEvent.AT_TURN, TurnClassification(3, Side.LEFT, -90.0), None),
            "at_turn 4 left": (GuidanceEvent.AT_TURN, TurnClassification(4, Side.LEFT, -120.0), None),
            "at_turn 6 right": (GuidanceEvent.AT_TURN, TurnClassification(6, Side.RIGHT, 180.0), None),
            "at_turn straight": (GuidanceEvent.AT_TURN, TurnClassification(0, Side.NONE, 5.0), None),
            "approach_turn 3 left 5m": (GuidanceEvent.APPROACH_TURN, TurnClassification(3, Side.LEFT, -90.0), 5.0),
            "approach_turn 1 right 1m": (GuidanceEvent.APPROACH_TURN, TurnClassification(1, Side.RIGHT, 20.0), 1.2),
            "adjust 2 left": (GuidanceEvent.ADJUST, TurnClassification(2, Side.LEFT, -60.0), None),
            "aligned": (GuidanceEvent.ALIGNED, None, None),
            "door": (GuidanceEvent.DOOR, None, None),
            "floor_change": (GuidanceEvent.FLOOR_CHANGE, None, None),
            "arrived": (GuidanceEvent.ARRIVED, None, None),
            "off_course plain": (GuidanceEvent.OFF_COURSE, None, None),
            "off_course 3 right": (GuidanceEvent.OFF_COURSE, TurnClassification(3, Side.RIGHT, 95.0), None),
        }
        assert set(cases) == set(GOLDEN)
        for key, (event, turn, dist) in cases.items():
            assert voice_instruction(event, turn, dist) == GOLDEN[key], key

    def test_deterministic(self):
        a = voice_instruction(GuidanceEvent.AT_TURN, TurnClassification(1, Side.RIGHT, 20.0))
        b = voice_instruction(GuidanceEvent.AT_TURN, TurnClassification(1, Side.RIGHT, 20.0))
        assert a == b == "turn slightly right"

    def test_turn_events_require_turn(self):
        for event in (GuidanceEvent.AT_TURN, GuidanceEvent.ADJUST, GuidanceEvent.APPROACH_TURN):
            with pytest.raises(ValueError):
                voice_instruction(event)

    def test_approach_requires_distance(self):
        with pytest.raises(ValueError):
            voice_instruction(
                GuidanceEvent.APPROACH_TURN, TurnClassification(3, Side.LEFT, -90.0)
            )
