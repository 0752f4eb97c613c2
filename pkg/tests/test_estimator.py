"""Feature extraction from videos and score fields."""

import numpy as np
import pytest

from nsgvd import synth
from nsgvd.errors import FeatureExtractionError, ShapeMismatchError
from nsgvd.estimator import (
    BACKWARD_DIFFERENCE,
    DROP_LAST,
    ArrayScoreProvider,
    NsgConfig,
    NsgFeature,
    OracleScoreProvider,
    frame_displacement,
    frame_displacements,
    nsg_feature,
    stack_features,
    temporal_denominator,
)
from nsgvd.rng import substream
from nsgvd.synth import GaussianProcessSpec, SigmaSchedule, TranslatingDensitySpec


class TestFrameDisplacement:
    def test_static_video(self):
        video = np.ones((4, 3))
        for t in range(4):
            assert (frame_displacement(video, t) == 0.0).all()

    def test_hand_values(self):
        video = np.array([[0.0], [1.0], [3.0]])
        assert frame_displacement(video, 0) == pytest.approx([1.0])
        assert frame_displacement(video, 1) == pytest.approx([2.0])

    def test_last_frame_rules(self):
        video = np.array([[0.0], [1.0], [3.0]])
        assert frame_displacement(video, 2, BACKWARD_DIFFERENCE) == pytest.approx([2.0])
        assert frame_displacement(video, 2, DROP_LAST) is None
        assert frame_displacements(video, DROP_LAST).shape == (2, 1)
        assert frame_displacements(video, BACKWARD_DIFFERENCE).shape == (3, 1)


class TestTemporalDenominator:
    def test_static_frame_gives_lambda(self):
        assert temporal_denominator(np.array([3.0, -1.0]), np.zeros(2), 1.0, 0.25) == 0.25

    def test_inner_product_arithmetic(self):
        val = temporal_denominator(np.array([-1.0, 2.0]), np.array([1.0, 1.0]), 1.0, 0.5)
        assert val == pytest.approx(1.5)

    def test_translating_gaussian_exact(self):
        # d=1, c=1, sigma=1, x=2 at t=1: score -1, dx = 1, lam 0
        spec = TranslatingDensitySpec(1, 3, 1.0, np.array([1.0]))
        x = np.array([2.0])
        s = spec.score(x, 1)
        den = temporal_denominator(s, np.array([1.0]), 1.0, 0.0)
        assert den == pytest.approx(-1.0)
        assert den == pytest.approx(-spec.log_density_dt(x, 1))

    def test_scale_covariance(self):
        rng = substream(8, "scale")
        s = rng.standard_normal(6)
        dx = rng.standard_normal(6)
        a = temporal_denominator(s, dx, 0.7, 0.1)
        b = temporal_denominator(s, 2.0 * dx, 1.4, 0.1)
        assert a == pytest.approx(b, rel=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            temporal_denominator(np.zeros(3), np.zeros(2), 1.0, 0.1)


class TestNsgFeature:
    def test_zero_scores_give_zero_feature(self):
        rng = substream(1, "zeros")
        video = rng.standard_normal((5, 3))
        feat = nsg_feature(video, ArrayScoreProvider(np.zeros((5, 3))), NsgConfig(lambda_nsg=0.2))
        assert (feat.values == 0.0).all()
        assert feat.denominators == pytest.approx([0.2] * 5)
        assert not feat.flags.any()

    def test_matches_closed_form_with_exact_displacements(self):
        # walk the video so every forward displacement reproduces the analytic
        # temporal derivative, then drop the last frame (its own time constants
        # differ from the displacement that was built for its predecessor)
        sched = SigmaSchedule("linear", 1.0, 0.25)
        spec = GaussianProcessSpec.real(16, 2, sched)
        cfg = NsgConfig(lambda_nsg=0.5, last_frame_rule=DROP_LAST)
        rng = substream(12, "oracle-consistency")
        for _ in range(50):
            x1 = sched.sigma(1) * rng.standard_normal(16)
            video = np.vstack([x1, x1 + synth.displacement_matching_derivative(x1, spec, 1)])
            feat = nsg_feature(video, OracleScoreProvider(spec), cfg)
            expected = synth.closed_form_nsg(x1, spec, 1, 0.5)
            np.testing.assert_allclose(feat.values[0], expected, rtol=1e-6)

    def test_translating_denominators_exact_at_interior_frames(self):
        spec = TranslatingDensitySpec(3, 8, 1.5, np.array([0.5, -1.0, 0.25]), seed=4)
        video, dlogp = synth.translating_sequence(spec)
        scores = np.stack([spec.score(video[i], i + 1) for i in range(8)])
        cfg = NsgConfig(lambda_nsg=0.3)
        feat = nsg_feature(video, ArrayScoreProvider(scores), cfg)
        interior = slice(0, 7)
        np.testing.assert_allclose(
            feat.denominators[interior] - 0.3, -dlogp[interior], rtol=1e-6
        )

    def test_all_degenerate_raises(self):
        video = np.ones((3, 2))  # static: every denominator equals lambda
        cfg = NsgConfig(lambda_nsg=1e-9, denominator_floor=1e-6)
        with pytest.raises(FeatureExtractionError):
            nsg_feature(video, ArrayScoreProvider(np.ones((3, 2))), cfg)

    def test_flagged_frames_are_kept(self):
        video = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
        scores = np.array([[1e-9, 0.0], [0.0, 1e-9], [1.0, 1.0]])
        cfg = NsgConfig(lambda_nsg=1e-8, denominator_floor=1e-6)
        feat = nsg_feature(video, ArrayScoreProvider(scores), cfg)
        assert feat.flags[:2].all() and not feat.flags[2]
        assert np.isfinite(feat.values).all()

    def test_provider_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            nsg_feature(
                np.zeros((4, 3)), ArrayScoreProvider(np.zeros((4, 2))), NsgConfig()
            )

    def test_near_lambda_rate_below_one_percent(self):
        # stability analogue: the share of frames whose motion term nearly
        # vanishes stays under 1% on the default synthetic geometry
        spec = GaussianProcessSpec.real(16, 8, seed=33)
        provider = OracleScoreProvider(spec)
        cfg = NsgConfig()
        hits = total = 0
        for i in range(200):
            video = synth.sample_video(spec, substream(33, "stability", i))
            feat = nsg_feature(video, provider, cfg)
            hits += int((np.abs(feat.denominators - cfg.lambda_nsg) < 0.1).sum())
            total += feat.denominators.size
        assert hits / total < 0.01


def test_stack_features_mixes_wrappers_and_arrays():
    feat = NsgFeature.from_values(np.ones((2, 3)))
    stacked = stack_features([feat, np.zeros((2, 3))])
    assert stacked.shape == (2, 6)
    assert (stacked[0] == 1.0).all() and (stacked[1] == 0.0).all()
