"""
Moduł z pasywnymi politykami porównawczymi: D-UCB, SW-TS, RExp3.
"""
import math
from collections import deque
from typing import Dict, Any, Deque, Tuple, Optional

import numpy as np

from exceptions import DomainError
from models import Selection, RoundOutcome
from base_bandits import Policy
from bandit_core import top_l, beta_samples
from config import DEFAULT_GAMMA, DEFAULT_WINDOW, DEFAULT_BATCH

DUCB_XI = 0.5
DUCB_BOUND = 1.0


class DiscountedUCB(Policy):
    """
    D-UCB: średnie i liczności dyskontowane współczynnikiem γ.

    Indeks: μ̂_i(γ) + 2B·sqrt(ξ·ln n_t(γ) / N_i(γ)), n_t(γ) = Σ_i N_i(γ).
    """

    name = "ducb"

    def __init__(self, n_arms: int, n_plays: int = 1, gamma: float = DEFAULT_GAMMA):
        super().__init__(n_arms, n_plays)
        if not 0.0 < gamma <= 1.0:
            raise DomainError(f"gamma musi należeć do (0,1], podano {gamma}")
        self.gamma = gamma
        self.reset()

    def reset(self) -> None:
        self.discounted_pulls = np.zeros(self.n_arms, dtype=np.float64)
        self.discounted_sums = np.zeros(self.n_arms, dtype=np.float64)

    def indices(self) -> np.ndarray:
        pulls = self.discounted_pulls
        total = float(pulls.sum())
        log_total = max(math.log(total), 0.0) if total > 0 else 0.0
        observed = pulls > 0
        safe = np.where(observed, pulls, 1.0)
        index = self.discounted_sums / safe + 2.0 * DUCB_BOUND * np.sqrt(DUCB_XI * log_total / safe)
        return np.where(observed, index, np.inf)

    def select(self, t: int, rng: np.random.Generator) -> Selection:
        return top_l(self.indices(), self.n_plays)

    def update(self, t: int, outcome: RoundOutcome) -> None:
        if self.gamma != 1.0:
            self.discounted_pulls *= self.gamma
            self.discounted_sums *= self.gamma
        for arm, reward in zip(outcome.arms, outcome.rewards):
            self.discounted_pulls[arm] += 1.0
            self.discounted_sums[arm] += reward

    def state_dict(self) -> Dict[str, Any]:
        state = super().state_dict()
        state.update(gamma=self.gamma, pulls=self.discounted_pulls.tolist(),
                     sums=self.discounted_sums.tolist())
        return state


class SlidingWindowTS(Policy):
    """SW-TS: MP-TS na statystykach z ostatnich W rund."""

    name = "swts"

    def __init__(self, n_arms: int, n_plays: int = 1, window: int = DEFAULT_WINDOW):
        super().__init__(n_arms, n_plays)
        if window < 1:
            raise DomainError(f"Okno W musi być >= 1, podano {window}")
        self.window = window
        self.reset()

    def reset(self) -> None:
        self.buffer: Deque[Tuple[Tuple[int, ...], Tuple[float, ...]]] = deque()
        self.pulls = np.zeros(self.n_arms, dtype=np.int64)
        self.successes = np.zeros(self.n_arms, dtype=np.float64)

    def select(self, t: int, rng: np.random.Generator) -> Selection:
        theta = beta_samples(rng, self.successes + 1.0, self.pulls - self.successes + 1.0)
        return top_l(theta, self.n_plays)

    def update(self, t: int, outcome: RoundOutcome) -> None:
        if len(self.buffer) == self.window:
            old_arms, old_rewards = self.buffer.popleft()
            for arm, reward in zip(old_arms, old_rewards):
                self.pulls[arm] -= 1
                self.successes[arm] -= reward
        self.buffer.append((tuple(outcome.arms), tuple(outcome.rewards)))
        for arm, reward in zip(outcome.arms, outcome.rewards):
            self.pulls[arm] += 1
            self.successes[arm] += reward

    def state_dict(self) -> Dict[str, Any]:
        state = super().state_dict()
        state.update(window=self.window, pulls=self.pulls.tolist(),
                     successes=self.successes.tolist())
        return state


class RExp3(Policy):
    """
    RExp3: Exp3 z restartem wag co Δ_T rund.

    Dla L > 1 ramiona są losowane kolejno bez zwracania z renormalizacją;
    estymator ważony używa p_i z rozkładu przed losowaniem.
    """

    name = "rexp3"

    def __init__(self, n_arms: int, n_plays: int = 1, batch: int = DEFAULT_BATCH):
        super().__init__(n_arms, n_plays)
        if batch < 1:
            raise DomainError(f"Δ_T musi być >= 1, podano {batch}")
        self.batch = batch
        if n_arms > 1:
            self.exploration = min(1.0, math.sqrt(n_arms * math.log(n_arms) / ((math.e - 1.0) * batch)))
        else:
            self.exploration = 1.0
        self._probabilities: Optional[np.ndarray] = None
        self.reset()

    def reset(self) -> None:
        self.restarts = 0
        self._restart_weights()

    def _restart_weights(self) -> None:
        self.log_weights = np.zeros(self.n_arms, dtype=np.float64)
        self._probabilities = None

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_weights.max())

    def probabilities(self) -> np.ndarray:
        """p_i = (1−γ)·w_i/Σw + γ/K."""
        weights = self.weights
        return (1.0 - self.exploration) * weights / weights.sum() + self.exploration / self.n_arms

    def select(self, t: int, rng: np.random.Generator) -> Selection:
        if (t - 1) % self.batch == 0:
            if t > 1:
                self.restarts += 1
            self._restart_weights()
        probs = self.probabilities()
        self._probabilities = probs
        remaining = probs.copy()
        chosen = []
        for _ in range(self.n_plays):
            cumulative = np.cumsum(remaining)
            u = rng.random() * cumulative[-1]
            arm = int(np.searchsorted(cumulative, u, side='right'))
            if arm >= self.n_arms or remaining[arm] == 0.0:
                arm = int(np.flatnonzero(remaining)[-1])
            chosen.append(arm)
            remaining[arm] = 0.0
        return Selection(tuple(chosen))

    def update(self, t: int, outcome: RoundOutcome) -> None:
        probs = self._probabilities if self._probabilities is not None else self.probabilities()
        for arm, reward in zip(outcome.arms, outcome.rewards):
            estimate = reward / probs[arm]
            self.log_weights[arm] += self.exploration * estimate / self.n_arms

    def state_dict(self) -> Dict[str, Any]:
        state = super().state_dict()
        state.update(batch=self.batch, exploration=self.exploration,
                     log_weights=self.log_weights.tolist())
        return state


BASELINE_CLASSES = {
    "ducb": DiscountedUCB,
    "swts": SlidingWindowTS,
    "rexp3": RExp3,
}
