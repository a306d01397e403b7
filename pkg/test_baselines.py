"""Testy pasywnych polityk porównawczych."""
import math

import numpy as np
import pytest

from bandit_core import make_rng, top_l
from base_bandits import MultiplePlayTS
from baselines import DiscountedUCB, SlidingWindowTS, RExp3, BASELINE_CLASSES
from exceptions import DomainError
from models import Selection, RoundOutcome


def bernoulli_trajectory(policy, means, horizon, seed):
    generator = make_rng(seed)
    means = np.asarray(means)
    selections = []
    for t in range(1, horizon + 1):
        selection = policy.select(t, generator)
        rewards = generator.random(len(selection)) < means[list(selection.arms)]
        policy.update(t, RoundOutcome.full(selection, rewards))
        selections.append(selection)
    return selections


class PlainUCB:
    """UCB z tym samym indeksem co D-UCB, ale na surowych licznościach."""

    def __init__(self, n_arms, n_plays):
        self.n_plays = n_plays
        self.pulls = np.zeros(n_arms)
        self.sums = np.zeros(n_arms)

    def select(self, t, rng):
        total = self.pulls.sum()
        log_total = max(math.log(total), 0.0) if total > 0 else 0.0
        safe = np.where(self.pulls > 0, self.pulls, 1.0)
        index = self.sums / safe + 2.0 * np.sqrt(0.5 * log_total / safe)
        return top_l(np.where(self.pulls > 0, index, np.inf), self.n_plays)

    def update(self, t, outcome):
        for arm, reward in zip(outcome.arms, outcome.rewards):
            self.pulls[arm] += 1
            self.sums[arm] += reward


class TestDiscountedUCB:
    """D-UCB."""

    def test_rejects_invalid_gamma(self) -> None:
        with pytest.raises(DomainError):
            DiscountedUCB(3, 1, gamma=0.0)
        with pytest.raises(DomainError):
            DiscountedUCB(3, 1, gamma=1.5)

    def test_first_round_lowest_index(self, rng) -> None:
        assert DiscountedUCB(4, 1).select(1, rng).arms == (0,)
        assert DiscountedUCB(4, 2).select(1, rng).arms == (0, 1)

    def test_discount_recursion(self) -> None:
        policy = DiscountedUCB(2, 1, gamma=0.9)
        policy.update(1, RoundOutcome.full(Selection((0,)), [1.0]))
        policy.update(2, RoundOutcome.full(Selection((0,)), [0.0]))
        assert policy.discounted_pulls[0] == pytest.approx(1.9, abs=1e-12)
        assert policy.discounted_sums[0] == pytest.approx(0.9, abs=1e-12)

    def test_no_decay_keeps_raw_counts(self) -> None:
        policy = DiscountedUCB(3, 1, gamma=1.0)
        generator = make_rng(2)
        raw = np.zeros(3)
        for t in range(1, 301):
            selection = policy.select(t, generator)
            policy.update(t, RoundOutcome.full(selection, [float(generator.random() < 0.5)]))
            raw[selection.arms[0]] += 1
            assert np.array_equal(policy.discounted_pulls, raw)

    def test_no_decay_equals_plain_ucb(self) -> None:
        means = [0.3, 0.6, 0.5, 0.1]
        discounted = bernoulli_trajectory(DiscountedUCB(4, 2, gamma=1.0), means, 500, seed=6)
        plain = bernoulli_trajectory(PlainUCB(4, 2), means, 500, seed=6)
        assert discounted == plain


class TestSlidingWindowTS:
    """SW-TS."""

    def test_equals_mp_ts_before_window_binds(self) -> None:
        means = [0.2, 0.7, 0.4]
        sliding = bernoulli_trajectory(SlidingWindowTS(3, 1, window=1000), means, 400, seed=1)
        plain = bernoulli_trajectory(MultiplePlayTS(3, 1), means, 400, seed=1)
        assert sliding == plain

    def test_window_of_one(self) -> None:
        policy = SlidingWindowTS(2, 1, window=1)
        policy.update(1, RoundOutcome.full(Selection((0,)), [1.0]))
        assert policy.pulls.tolist() == [1, 0]
        assert policy.successes.tolist() == [1.0, 0.0]
        policy.update(2, RoundOutcome.full(Selection((1,)), [0.0]))
        assert policy.pulls.tolist() == [0, 1]
        assert policy.successes.tolist() == [0.0, 0.0]

    def test_full_eviction(self) -> None:
        policy = SlidingWindowTS(2, 1, window=5)
        for t in range(1, 6):
            policy.update(t, RoundOutcome.full(Selection((0,)), [1.0]))
        for t in range(6, 11):
            policy.update(t, RoundOutcome.full(Selection((1,)), [0.0]))
        assert policy.pulls.tolist() == [0, 5]
        assert policy.successes[0] == 0.0
        assert len(policy.buffer) == 5

    def test_rejects_invalid_window(self) -> None:
        with pytest.raises(DomainError):
            SlidingWindowTS(2, 1, window=0)


class TestRExp3:
    """RExp3."""

    def test_exploration_rate(self) -> None:
        expected = math.sqrt(10 * math.log(10) / ((math.e - 1) * 1000))
        assert RExp3(10, 1, batch=1000).exploration == pytest.approx(expected)
        assert RExp3(100, 1, batch=10).exploration == 1.0
        assert RExp3(1, 1, batch=10).exploration == 1.0

    def test_uniform_at_batch_start(self, rng) -> None:
        policy = RExp3(4, 1, batch=50)
        assert policy.probabilities() == pytest.approx([0.25] * 4, abs=1e-15)

    def test_documented_probabilities(self) -> None:
        policy = RExp3(2, 1, batch=100)
        policy.exploration = 0.1
        policy.log_weights = np.log(np.array([1.0, 3.0]))
        assert policy.probabilities() == pytest.approx([0.275, 0.725], abs=1e-12)

    def test_probabilities_on_simplex(self) -> None:
        policy = RExp3(6, 2, batch=200)
        generator = make_rng(4)
        means = np.array([0.9, 0.1, 0.5, 0.3, 0.8, 0.2])
        for t in range(1, 1001):
            selection = policy.select(t, generator)
            assert abs(policy.probabilities().sum() - 1.0) <= 1e-12
            assert len(set(selection.arms)) == 2
            policy.update(t, RoundOutcome.full(selection, generator.random(2) < means[list(selection.arms)]))

    def test_restart_every_batch(self) -> None:
        policy = RExp3(3, 1, batch=20)
        generator = make_rng(0)
        for t in range(1, 21):
            selection = policy.select(t, generator)
            policy.update(t, RoundOutcome.full(selection, [1.0]))
        assert not np.allclose(policy.probabilities(), 1 / 3)
        policy.select(21, generator)
        assert policy.probabilities() == pytest.approx([1 / 3] * 3, abs=1e-15)
        assert policy.restarts == 1
        policy.reset()
        assert policy.restarts == 0

    def test_importance_weighted_update(self) -> None:
        policy = RExp3(2, 1, batch=100)
        policy.select(1, make_rng(0))
        p = policy.probabilities()[1]
        policy.update(1, RoundOutcome.full(Selection((1,)), [1.0]))
        assert policy.log_weights[1] == pytest.approx(policy.exploration * (1.0 / p) / 2)
        assert policy.log_weights[0] == 0.0


def test_registry_names() -> None:
    for name, cls in BASELINE_CLASSES.items():
        assert cls(3, 1).name == name
