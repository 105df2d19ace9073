"""Fusion arithmetic and the recommendation ordering against exhaustive oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emorelay.emotions import EMOTIONS, EmotionDistribution
from emorelay.fusion import (
    DEFAULT_W_SPEECH,
    DEFAULT_W_TEXT,
    FusionWeights,
    Recommendation,
    fuse,
    fuse_speech_only,
    recommend,
)


def random_distribution(rng) -> EmotionDistribution:
    raw = rng.uniform(0, 1, 6)
    return EmotionDistribution.from_values(raw / raw.sum())


def oracle_top_two(probs):
    """Brute-force scan over all index pairs under the tie-break total order."""

    def ranks_before(a, b):
        return probs[a] > probs[b] or (probs[a] == probs[b] and a < b)

    for i in range(6):
        for j in range(6):
            if i == j:
                continue
            others = [k for k in range(6) if k not in (i, j)]
            if ranks_before(i, j) and all(ranks_before(j, k) for k in others):
                return (i, j)
    raise AssertionError("no pair satisfied the ordering")


distributions = st.builds(
    lambda seed: random_distribution(np.random.default_rng(seed)),
    st.integers(min_value=0, max_value=2**32 - 1),
)


class TestFusionWeights:
    def test_default_ratio_is_one_to_two(self):
        weights = FusionWeights()
        assert weights.w_speech == DEFAULT_W_SPEECH == 1.0
        assert weights.w_text == DEFAULT_W_TEXT == 2.0
        assert weights.normalized() == (pytest.approx(1 / 3), pytest.approx(2 / 3))

    def test_rejects_negative_or_all_zero(self):
        with pytest.raises(ValueError):
            FusionWeights(w_speech=-1.0, w_text=2.0)
        with pytest.raises(ValueError):
            FusionWeights(w_speech=0.0, w_text=0.0)

    def test_speech_only_collapse_is_legal(self):
        assert FusionWeights(w_speech=1.0, w_text=0.0).normalized() == (1.0, 0.0)


class TestFuse:
    def test_uniform_pair_stays_uniform(self):
        uniform = EmotionDistribution.uniform()
        assert fuse(uniform, uniform).probs == pytest.approx(uniform.probs)

    def test_one_hot_pair_with_default_weights(self):
        p_s = EmotionDistribution(probs=(1, 0, 0, 0, 0, 0))
        p_t = EmotionDistribution(probs=(0, 1, 0, 0, 0, 0))
        fused = fuse(p_s, p_t)
        assert fused.probs == pytest.approx((1 / 3, 2 / 3, 0, 0, 0, 0))

    def test_randomized_recomputation_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(1000):
            p_s, p_t = random_distribution(rng), random_distribution(rng)
            w = FusionWeights(w_speech=rng.uniform(0, 5), w_text=rng.uniform(0.01, 5))
            fused = fuse(p_s, p_t, w)
            total = w.w_speech + w.w_text
            expected = [
                (w.w_speech * a + w.w_text * b) / total for a, b in zip(p_s.probs, p_t.probs)
            ]
            assert fused.probs == pytest.approx(expected, abs=1e-12)
            assert sum(fused.probs) == pytest.approx(1.0, abs=1e-9)

    def test_weight_scaling_invariance(self):
        rng = np.random.default_rng(31)
        p_s, p_t = random_distribution(rng), random_distribution(rng)
        a = fuse(p_s, p_t, FusionWeights(1.0, 2.0))
        b = fuse(p_s, p_t, FusionWeights(10.0, 20.0))
        assert a.probs == pytest.approx(b.probs, abs=1e-12)

    def test_symmetry_under_modality_swap(self):
        rng = np.random.default_rng(37)
        p_s, p_t = random_distribution(rng), random_distribution(rng)
        a = fuse(p_s, p_t, FusionWeights(1.0, 2.0))
        b = fuse(p_t, p_s, FusionWeights(2.0, 1.0))
        assert a.probs == pytest.approx(b.probs, abs=1e-15)

    def test_speech_only_is_identity(self):
        uniform = EmotionDistribution.uniform()
        assert fuse_speech_only(uniform) == uniform
        one_hot = EmotionDistribution(probs=(0, 0, 0, 0, 0, 1))
        assert fuse_speech_only(one_hot) == one_hot


class TestRecommend:
    def test_worked_example(self):
        fused = EmotionDistribution(probs=(0.05, 0.10, 0.40, 0.25, 0.15, 0.05))
        rec = recommend(fused)
        assert rec.order == (2, 3, 0, 1, 4, 5)
        assert rec.top_two == (2, 3)
        assert (EMOTIONS[rec.top_two[0]], EMOTIONS[rec.top_two[1]]) == ("surprise", "calmness")

    def test_uniform_tie_breaks_canonically(self):
        rec = recommend(EmotionDistribution.uniform())
        assert rec.order == (0, 1, 2, 3, 4, 5)
        assert rec.top_two == (0, 1)

    def test_pairwise_tie_breaks_by_lower_index(self):
        fused = EmotionDistribution(probs=(0.1, 0.3, 0.1, 0.3, 0.1, 0.1))
        assert recommend(fused).top_two == (1, 3)

    def test_randomized_against_exhaustive_pair_scan(self):
        rng = np.random.default_rng(41)
        for _ in range(1000):
            fused = random_distribution(rng)
            rec = recommend(fused)
            assert rec.top_two == oracle_top_two(fused.probs)
            assert rec.order[2:] == tuple(sorted(rec.order[2:]))

    def test_stability_under_small_perturbation(self):
        probs = (0.30, 0.25, 0.20, 0.15, 0.07, 0.03)
        base = recommend(EmotionDistribution(probs=probs))
        gap = 0.02  # half the minimum nonzero gap of 0.04
        rng = np.random.default_rng(43)
        for _ in range(100):
            noise = rng.uniform(-gap / 2, gap / 2, 6)
            noise -= noise.mean()  # keep it a distribution
            perturbed = EmotionDistribution.from_values(np.array(probs) + noise)
            assert recommend(perturbed).order == base.order

    @settings(max_examples=100, deadline=None)
    @given(distributions)
    def test_deterministic_and_valid(self, fused):
        a = recommend(fused)
        b = recommend(fused)
        assert a.order == b.order
        assert sorted(a.order) == [0, 1, 2, 3, 4, 5]

    def test_invariant_enforcement(self):
        fused = EmotionDistribution(probs=(0.4, 0.3, 0.1, 0.1, 0.05, 0.05))
        with pytest.raises(ValueError):
            Recommendation(fused=fused, order=(2, 3, 0, 1, 4, 5))
        with pytest.raises(ValueError):
            Recommendation(fused=fused, order=(0, 1, 5, 4, 3, 2))
        with pytest.raises(ValueError):
            Recommendation(fused=fused, order=(0, 0, 1, 2, 3, 4))
