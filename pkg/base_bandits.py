"""
Moduł ze stacjonarnymi politykami bazowymi: MP-TS, MP-KL-UCB, Elimination-UCB.

Każda polityka realizuje kontrakt select(t, rng) -> Selection,
update(t, outcome), reset(). Numer rundy t jest lokalny względem bieżącego
okna (1 w pierwszej rundzie po utworzeniu lub resecie).
"""
import math
import logging
from abc import ABC, abstractmethod
from typing import Dict, Any, List, Sequence

import numpy as np

from exceptions import UsageError, DomainError
from models import ArmStats, Selection, RoundOutcome
from bandit_core import top_l, kl_ucb_indices, beta_samples, hoeffding_radius


class Policy(ABC):
    """Bazowa klasa dla wszystkich polityk."""

    name = "policy"

    def __init__(self, n_arms: int, n_plays: int = 1):
        """
        Inicjalizuje politykę.

        Args:
            n_arms: Liczba ramion K
            n_plays: Liczba ramion wybieranych w rundzie L

        Raises:
            UsageError: L spoza [1, K]
        """
        if n_arms < 1:
            raise UsageError(f"K musi być >= 1, podano {n_arms}")
        if not 1 <= n_plays <= n_arms:
            raise UsageError(f"L={n_plays} spoza zakresu [1, K={n_arms}]")
        self.n_arms = n_arms
        self.n_plays = n_plays

    @abstractmethod
    def select(self, t: int, rng: np.random.Generator) -> Selection:
        """Wybiera ramiona na rundę t."""
        pass

    @abstractmethod
    def update(self, t: int, outcome: RoundOutcome) -> None:
        """Aktualizuje stan po obserwacji nagród rundy t."""
        pass

    @abstractmethod
    def reset(self) -> None:
        """Przywraca stan świeżo utworzonej polityki."""
        pass

    def state_dict(self) -> Dict[str, Any]:
        """Stan polityki do porównań (bez generatora)."""
        return {"name": self.name, "n_arms": self.n_arms, "n_plays": self.n_plays}


class BasePolicy(Policy):
    """Polityka bazowa oparta na statystykach N_i, S_i z bieżącego okna."""

    def __init__(self, n_arms: int, n_plays: int = 1):
        super().__init__(n_arms, n_plays)
        self.stats = ArmStats.empty(n_arms)

    def update(self, t: int, outcome: RoundOutcome) -> None:
        for arm, reward in zip(outcome.arms, outcome.rewards):
            self.stats.record(arm, reward)

    def reset(self) -> None:
        self.stats = ArmStats.empty(self.n_arms)

    def rebuild(self, arm_rounds: Sequence[np.ndarray], arm_rewards: Sequence[np.ndarray]) -> None:
        """
        Odtwarza statystyki z zachowanych obserwacji (po obcięciu okna).

        Args:
            arm_rounds: Dla każdego ramienia lokalne numery rund obserwacji
            arm_rewards: Dla każdego ramienia nagrody w tych rundach
        """
        self.reset()
        for arm in range(self.n_arms):
            self.stats.pulls[arm] = len(arm_rewards[arm])
            self.stats.successes[arm] = float(np.sum(arm_rewards[arm]))

    def state_dict(self) -> Dict[str, Any]:
        state = super().state_dict()
        state["stats"] = self.stats.to_dict()
        return state


class MultiplePlayTS(BasePolicy):
    """MP-TS: próbkowanie Thompsona z rozkładów Beta(S+1, N−S+1)."""

    name = "ts"

    def select(self, t: int, rng: np.random.Generator) -> Selection:
        alpha = self.stats.successes + 1.0
        beta = self.stats.pulls - self.stats.successes + 1.0
        theta = beta_samples(rng, alpha, beta)
        return top_l(theta, self.n_plays)


class MultiplePlayKLUCB(BasePolicy):
    """MP-KL-UCB: top-L ramion według indeksu KL-UCB."""

    name = "klucb"

    def indices(self, t: int) -> np.ndarray:
        pulls = self.stats.pulls
        with np.errstate(divide='ignore', invalid='ignore'):
            mu_hat = np.where(pulls > 0, self.stats.successes / np.maximum(pulls, 1), 0.0)
        return kl_ucb_indices(mu_hat, pulls, t)

    def select(self, t: int, rng: np.random.Generator) -> Selection:
        return top_l(self.indices(t), self.n_plays)


class EliminationUCB(BasePolicy):
    """
    Elimination-UCB: ramię k = t mod K jest dobierane, dopóki należy do
    zbioru kandydatów Î*; pozostałe L−1 ramion według U_i = μ̂_i + B_i.
    Eliminacja korzysta wyłącznie ze statystyk monitorujących N^E, S^E.
    """

    name = "eucb"

    def __init__(self, n_arms: int, n_plays: int = 1, horizon: int = 1):
        super().__init__(n_arms, n_plays)
        if horizon < 1:
            raise DomainError(f"Horyzont T musi być >= 1, podano {horizon}")
        self.horizon = horizon
        self.log_term = 4.0 * math.log(horizon)
        self.candidates = np.ones(n_arms, dtype=bool)
        self.eliminations: List[int] = []

    def monitored_arm(self, t: int) -> int:
        return t % self.n_arms

    def upper_bounds(self) -> np.ndarray:
        """U_i = μ̂_i + B_i (dla N_i = 0 +inf)."""
        return self.stats.means() + hoeffding_radius(self.stats.pulls, self.log_term)

    def select(self, t: int, rng: np.random.Generator) -> Selection:
        scores = self.upper_bounds()
        k = self.monitored_arm(t)
        if not self.candidates[k]:
            return top_l(scores, self.n_plays)
        if self.n_plays == 1:
            return Selection((k,))
        others = scores.copy()
        others[k] = -np.inf
        rest = top_l(others, self.n_plays - 1)
        return Selection((k,) + rest.arms)

    def update(self, t: int, outcome: RoundOutcome) -> None:
        k = self.monitored_arm(t)
        for arm, reward in zip(outcome.arms, outcome.rewards):
            self.stats.record(arm, reward, monitor=(arm == k))
        self._try_eliminate(t, k)

    def _try_eliminate(self, t: int, k: int) -> None:
        if not self.candidates[k] or np.count_nonzero(self.candidates) < 2:
            return
        monitor_pulls = self.stats.monitor_pulls
        radius = hoeffding_radius(monitor_pulls, self.log_term)
        means = self.stats.monitor_means()
        with np.errstate(invalid='ignore'):
            lower = np.where(monitor_pulls > 0, means - radius, -np.inf)
        upper_k = means[k] + radius[k] if monitor_pulls[k] > 0 else np.inf
        lower[k] = -np.inf
        if np.any(lower > upper_k):
            self.candidates[k] = False
            self.eliminations.append(t)
            logging.debug(f"Elimination-UCB: eliminacja ramienia {k + 1} w rundzie {t}, "
                          f"pozostało kandydatów {np.count_nonzero(self.candidates)}")

    def reset(self) -> None:
        super().reset()
        self.candidates = np.ones(self.n_arms, dtype=bool)
        self.eliminations = []

    def rebuild(self, arm_rounds: Sequence[np.ndarray], arm_rewards: Sequence[np.ndarray]) -> None:
        """Odtwarza N, S oraz N^E, S^E; przynależność do monitoringu liczona od lokalnych rund."""
        super().rebuild(arm_rounds, arm_rewards)
        self.candidates = np.ones(self.n_arms, dtype=bool)
        self.eliminations = []
        for arm in range(self.n_arms):
            rounds = np.asarray(arm_rounds[arm])
            rewards = np.asarray(arm_rewards[arm])
            monitored = (rounds % self.n_arms) == arm
            self.stats.monitor_pulls[arm] = int(np.count_nonzero(monitored))
            self.stats.monitor_successes[arm] = float(rewards[monitored].sum())

    def state_dict(self) -> Dict[str, Any]:
        state = super().state_dict()
        state["candidates"] = self.candidates.tolist()
        state["horizon"] = self.horizon
        return state


BASE_POLICY_CLASSES = {
    "ts": MultiplePlayTS,
    "klucb": MultiplePlayKLUCB,
    "eucb": EliminationUCB,
}


def create_base_policy(name: str, n_arms: int, n_plays: int, horizon: int) -> BasePolicy:
    """
    Tworzy politykę bazową po nazwie.

    Raises:
        UsageError: nieznana nazwa
    """
    if name not in BASE_POLICY_CLASSES:
        raise UsageError(f"Nieznana polityka bazowa: {name}")
    if name == "eucb":
        return EliminationUCB(n_arms, n_plays, horizon=horizon)
    return BASE_POLICY_CLASSES[name](n_arms, n_plays)
