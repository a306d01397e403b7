"""Testy stacjonarnych polityk bazowych."""
import math

import numpy as np
import pytest

from bandit_core import make_rng, beta_samples, top_l, regret_step
from base_bandits import (MultiplePlayTS, MultiplePlayKLUCB, EliminationUCB,
                          create_base_policy, BASE_POLICY_CLASSES)
from exceptions import UsageError, DomainError
from models import Selection, RoundOutcome


def play_bernoulli(policy, means, horizon, seed):
    """Przebieg polityki w stacjonarnym środowisku Bernoulliego; zwraca skumulowany regret."""
    generator = make_rng(seed)
    means = np.asarray(means, dtype=np.float64)
    cumulative = np.zeros(horizon)
    total = 0.0
    for t in range(1, horizon + 1):
        selection = policy.select(t, generator)
        draws = generator.random(len(selection))
        rewards = (draws < means[list(selection.arms)]).astype(float)
        policy.update(t, RoundOutcome.full(selection, rewards))
        total += regret_step(means, selection)
        cumulative[t - 1] = total
    return cumulative


def play_deterministic(policy, rewards, horizon, seed=0):
    """Przebieg z nagrodami stałymi per ramię; zwraca listę wyborów."""
    generator = make_rng(seed)
    selections = []
    for t in range(1, horizon + 1):
        selection = policy.select(t, generator)
        policy.update(t, RoundOutcome.full(selection, [rewards[arm] for arm in selection.arms]))
        selections.append(selection)
    return selections


def elimination_oracle(horizon, rewards):
    """
    Krokowy wzorzec eliminacji dla L = 1 i nagród deterministycznych.

    Returns:
        Słownik ramię -> runda eliminacji
    """
    n_arms = len(rewards)
    log_term = 4 * math.log(horizon)
    candidates = set(range(n_arms))
    pulls, sums = [0] * n_arms, [0.0] * n_arms
    monitor_pulls, monitor_sums = [0] * n_arms, [0.0] * n_arms
    eliminated = {}

    def radius(n):
        return math.sqrt(log_term / (2 * n))

    for t in range(1, horizon + 1):
        k = t % n_arms
        if k in candidates:
            chosen = k
        else:
            scores = [sums[i] / pulls[i] + radius(pulls[i]) if pulls[i] else math.inf for i in range(n_arms)]
            chosen = max(range(n_arms), key=lambda i: (scores[i], -i))
        pulls[chosen] += 1
        sums[chosen] += rewards[chosen]
        if chosen == k:
            monitor_pulls[k] += 1
            monitor_sums[k] += rewards[k]
        if k in candidates and len(candidates) >= 2:
            upper_k = (monitor_sums[k] / monitor_pulls[k] + radius(monitor_pulls[k])
                       if monitor_pulls[k] else math.inf)
            for i in range(n_arms):
                if i != k and monitor_pulls[i] and monitor_sums[i] / monitor_pulls[i] - radius(monitor_pulls[i]) > upper_k:
                    candidates.discard(k)
                    eliminated[k] = t
                    break
    return eliminated


class TestPolicyContract:
    """Wspólny kontrakt polityk."""

    def test_play_count_must_fit_arm_count(self) -> None:
        with pytest.raises(UsageError):
            MultiplePlayTS(2, 3)
        with pytest.raises(UsageError):
            MultiplePlayKLUCB(0, 1)

    def test_factory(self) -> None:
        for name, cls in BASE_POLICY_CLASSES.items():
            policy = create_base_policy(name, 4, 2, 100)
            assert isinstance(policy, cls)
            assert policy.name == name
        assert create_base_policy("eucb", 4, 1, 321).horizon == 321
        with pytest.raises(UsageError):
            create_base_policy("ucb1", 4, 1, 10)

    def test_selection_is_valid_every_round(self, rng) -> None:
        for name in BASE_POLICY_CLASSES:
            policy = create_base_policy(name, 6, 3, 300)
            for t in range(1, 301):
                selection = policy.select(t, rng)
                selection.validate(6, 3)
                policy.update(t, RoundOutcome.full(selection, rng.random(3) < 0.5))

    @pytest.mark.parametrize("name", ["ts", "klucb", "eucb"])
    def test_reset_restores_fresh_state(self, name, rng) -> None:
        policy = create_base_policy(name, 3, 1, 50)
        play_deterministic(policy, [1.0, 0.0, 0.0], 50)
        policy.reset()
        fresh = create_base_policy(name, 3, 1, 50)
        assert policy.state_dict() == fresh.state_dict()
        policy.reset()
        assert policy.state_dict() == fresh.state_dict()
        assert policy.select(1, make_rng(9)) == fresh.select(1, make_rng(9))


class TestMultiplePlayTS:
    """MP-TS."""

    def test_flat_prior(self) -> None:
        policy = MultiplePlayTS(4, 2)
        expected = top_l(beta_samples(make_rng(1), np.ones(4), np.ones(4)), 2)
        assert policy.select(1, make_rng(1)) == expected

    def test_posterior_parameters(self) -> None:
        policy = MultiplePlayTS(2, 1)
        policy.stats.pulls[:] = [10, 2]
        policy.stats.successes[:] = [3.0, 2.0]
        alpha = np.array([4.0, 3.0])
        beta = np.array([8.0, 1.0])
        for seed in range(20):
            expected = top_l(beta_samples(make_rng(seed), alpha, beta), 1)
            assert policy.select(1, make_rng(seed)) == expected

    def test_prefers_rewarding_arm(self) -> None:
        """Ramię A (zawsze 1) wybierane w >= 99% ostatnich 100 rund."""
        hits = 0
        for seed in range(100):
            selections = play_deterministic(MultiplePlayTS(2, 1), [1.0, 0.0], 500, seed)
            hits += sum(1 for s in selections[-100:] if s.arms == (0,))
        assert hits >= 0.99 * 100 * 100

    def test_same_seed_same_trajectory(self) -> None:
        first = play_bernoulli(MultiplePlayTS(5, 2), [0.1, 0.4, 0.5, 0.7, 0.2], 300, seed=4)
        second = play_bernoulli(MultiplePlayTS(5, 2), [0.1, 0.4, 0.5, 0.7, 0.2], 300, seed=4)
        assert np.array_equal(first, second)


class TestMultiplePlayKLUCB:
    """MP-KL-UCB."""

    def test_first_round_takes_lowest_indices(self, rng) -> None:
        assert MultiplePlayKLUCB(5, 3).select(1, rng).arms == (0, 1, 2)

    def test_documented_indices(self, rng) -> None:
        policy = MultiplePlayKLUCB(2, 1)
        policy.stats.pulls[:] = [10, 10]
        indices = policy.indices(100)
        assert indices == pytest.approx([0.205672, 0.205672], abs=1e-6)
        assert policy.select(100, rng).arms == (0,)

    def test_zero_budget_index_is_mean(self) -> None:
        policy = MultiplePlayKLUCB(2, 1)
        policy.stats.pulls[:] = [20, 5]
        policy.stats.successes[:] = [8.0, 1.0]
        assert policy.indices(20)[0] == pytest.approx(0.4, abs=1e-12)


class TestEliminationUCB:
    """Elimination-UCB."""

    def test_rejects_invalid_horizon(self) -> None:
        with pytest.raises(DomainError):
            EliminationUCB(2, 1, horizon=0)

    def test_documented_elimination_round(self) -> None:
        policy = EliminationUCB(2, 1, horizon=100)
        play_deterministic(policy, [1.0, 0.0], 100)
        assert policy.eliminations == [75]
        assert policy.candidates.tolist() == [True, False]
        assert policy.stats.monitor_pulls.tolist() == [50, 38]

    @pytest.mark.parametrize("horizon", [50, 120, 200, 333, 500])
    def test_matches_step_through_oracle(self, horizon) -> None:
        expected = elimination_oracle(horizon, [1.0, 0.0])
        policy = EliminationUCB(2, 1, horizon=horizon)
        play_deterministic(policy, [1.0, 0.0], horizon)
        assert policy.eliminations == sorted(expected.values())

    def test_three_arms_match_oracle(self) -> None:
        expected = elimination_oracle(400, [0.0, 1.0, 0.0])
        policy = EliminationUCB(3, 1, horizon=400)
        play_deterministic(policy, [0.0, 1.0, 0.0], 400)
        assert policy.eliminations == sorted(expected.values())
        assert np.flatnonzero(policy.candidates).tolist() == [1]

    def test_single_arm_never_eliminated(self) -> None:
        policy = EliminationUCB(1, 1, horizon=200)
        selections = play_deterministic(policy, [0.0], 200)
        assert policy.candidates.tolist() == [True]
        assert all(s.arms == (0,) for s in selections)

    def test_unplayed_arm_enters_selection(self, rng) -> None:
        policy = EliminationUCB(3, 2, horizon=100)
        policy.stats.pulls[:] = [4, 6, 0]
        policy.stats.successes[:] = [4.0, 6.0, 0.0]
        assert policy.upper_bounds()[2] == math.inf
        assert policy.select(3, rng).arms == (0, 2)

    def test_eliminated_monitor_arm_falls_back_to_top_l(self, rng) -> None:
        policy = EliminationUCB(2, 1, horizon=100)
        policy.candidates[:] = [True, False]
        policy.stats.pulls[:] = [5, 5]
        policy.stats.successes[:] = [1.0, 4.0]
        assert policy.select(1, rng).arms == (1,)

    def test_monitoring_consistency(self, rng) -> None:
        """W każdych K kolejnych rundach wybrane jest jakieś ramię-kandydat."""
        n_arms = 5
        policy = EliminationUCB(n_arms, 1, horizon=3000)
        means = np.array([0.9, 0.2, 0.3, 0.1, 0.4])
        hits = []
        for t in range(1, 3001):
            selection = policy.select(t, rng)
            hits.append(any(policy.candidates[arm] for arm in selection.arms))
            policy.update(t, RoundOutcome.full(selection, rng.random(1) < means[list(selection.arms)]))
        for start in range(len(hits) - n_arms + 1):
            assert any(hits[start:start + n_arms])
        assert policy.candidates.any()

    def test_candidate_set_shrinks_monotonically(self, rng) -> None:
        policy = EliminationUCB(4, 2, horizon=2000)
        means = np.array([0.9, 0.1, 0.5, 0.2])
        previous = policy.candidates.copy()
        for t in range(1, 2001):
            selection = policy.select(t, rng)
            policy.update(t, RoundOutcome.full(selection, rng.random(2) < means[list(selection.arms)]))
            assert not np.any(policy.candidates & ~previous)
            assert policy.candidates.any()
            previous = policy.candidates.copy()

    def test_rebuild_recomputes_monitor_statistics(self) -> None:
        policy = EliminationUCB(2, 1, horizon=100)
        policy.candidates[:] = [True, False]
        policy.rebuild([np.array([2, 3, 4]), np.array([1, 5])],
                       [np.array([1.0, 0.0, 1.0]), np.array([0.0, 1.0])])
        assert policy.stats.pulls.tolist() == [3, 2]
        assert policy.stats.successes.tolist() == [2.0, 1.0]
        assert policy.stats.monitor_pulls.tolist() == [2, 2]
        assert policy.stats.monitor_successes.tolist() == [2.0, 1.0]
        assert policy.candidates.tolist() == [True, True]

    @pytest.mark.slow
    def test_best_arm_survives(self) -> None:
        means = [0.9, 0.8, 0.7, 0.6, 0.5]
        lost = 0
        for seed in range(100):
            policy = EliminationUCB(5, 1, horizon=20_000)
            play_bernoulli(policy, means, 20_000, seed)
            if not policy.candidates[0]:
                lost += 1
        assert lost <= 1


@pytest.mark.slow
@pytest.mark.parametrize("cls", [MultiplePlayTS, MultiplePlayKLUCB])
def test_regret_grows_sublinearly(cls) -> None:
    means = [0.9, 0.7, 0.5, 0.3, 0.1]
    horizon = 4000
    curves = np.mean([play_bernoulli(cls(5, 1), means, horizon, seed) for seed in range(10)], axis=0)
    half = curves[horizon // 2 - 1]
    assert curves[-1] - half <= 0.5 * half
