"""
Moduł meta-bandytów ADR i ADS.

Meta-bandyta opakowuje dowolną politykę bazową i trzyma po jednym oknie
ADWIN na ramię (obserwacje ramienia w rundach, w których było wybrane).
Po detekcji ADR resetuje całe okno, a ADS zostawia prawą część W2.
"""
import logging
from abc import abstractmethod
from typing import Dict, Any, List, Optional, Set

import numpy as np

from adwin import Window
from base_bandits import Policy, BasePolicy
from models import Selection, RoundOutcome, Split, MetaStepResult


class MetaBandit(Policy):
    """Wspólna część ADR/ADS: okna ramion, czas lokalny i przegląd podziałów."""

    mode = "meta"

    def __init__(self, base: BasePolicy, delta: float = 0.001, check_stride: int = 1):
        """
        Inicjalizuje meta-bandytę.

        Args:
            base: Polityka bazowa
            delta: Poziom ufności detektorów
            check_stride: Co który punkt podziału sprawdzać (1 = dokładnie)
        """
        super().__init__(base.n_arms, base.n_plays)
        self.base = base
        self.delta = delta
        self.check_stride = check_stride
        self.windows = [Window(delta, check_stride=check_stride) for _ in range(self.n_arms)]
        self.window_start = 1
        self.reset_rounds: List[int] = []
        self.last_detection: Optional[MetaStepResult] = None
        self._pending: Set[int] = set()
        if check_stride > 1:
            logging.warning(f"{self.name}: check_stride={check_stride}, przegląd podziałów jest przybliżony")

    @property
    def name(self) -> str:
        return f"{self.mode}-{self.base.name}"

    def local_time(self, t: int) -> int:
        return t - self.window_start + 1

    def select(self, t: int, rng: np.random.Generator) -> Selection:
        return self.base.select(self.local_time(t), rng)

    def update(self, t: int, outcome: RoundOutcome) -> None:
        """Aktualizuje politykę bazową i okna, po czym sprawdza podziały."""
        self.base.update(self.local_time(t), outcome)
        for arm, reward in zip(outcome.arms, outcome.rewards):
            self.windows[arm].append(reward, t)
        dirty = self._pending.union(outcome.arms)
        self._pending = set()
        self.last_detection = None

        for arm in sorted(dirty):
            split = self.windows[arm].find_split()
            if split is not None:
                self._on_detection(t, arm, split)
                self.reset_rounds.append(t)
                self.last_detection = MetaStepResult(
                    outcome=outcome, changed=True, detecting_arm=arm, breakpoint=split.breakpoint)
                break

    def step(self, env, t: int, rng: np.random.Generator) -> MetaStepResult:
        """
        Jedna runda: wybór, losowanie nagród ze środowiska, aktualizacja, detekcja.

        Args:
            env: Środowisko z metodą play(t, selection, rng)
            t: Globalny numer rundy
            rng: Generator przebiegu

        Returns:
            Wynik rundy z flagą resetu/obcięcia
        """
        selection = self.select(t, rng)
        outcome = env.play(t, selection, rng)
        self.update(t, outcome)
        if self.last_detection is not None:
            return self.last_detection
        return MetaStepResult(outcome=outcome, changed=False)

    @abstractmethod
    def _on_detection(self, t: int, arm: int, split: Split) -> None:
        """Reakcja na wykrycie zmiany przez ramię `arm` w rundzie t."""
        pass

    def observation_counts(self) -> np.ndarray:
        return np.array([len(w) for w in self.windows], dtype=np.int64)

    def reset(self) -> None:
        self.base.reset()
        for window in self.windows:
            window.clear()
        self.window_start = 1
        self.reset_rounds = []
        self.last_detection = None
        self._pending = set()

    def state_dict(self) -> Dict[str, Any]:
        """Stan do porównań; bez dziennika resetów i bez początku okna."""
        return {
            "name": self.name,
            "base": self.base.state_dict(),
            "windows": [w.values.tolist() for w in self.windows],
        }


class ADRBandit(MetaBandit):
    """ADR: po wykryciu zmiany resetuje politykę bazową i wszystkie okna."""

    mode = "adr"

    def _on_detection(self, t: int, arm: int, split: Split) -> None:
        logging.debug(f"ADR: zmiana na ramieniu {arm + 1} w rundzie {t} "
                      f"(|W1|={split.prefix_size}, różnica {split.gap:.4f} >= {split.threshold:.4f})")
        self.base.reset()
        for window in self.windows:
            window.clear()
        self.window_start = t + 1


class ADSBandit(MetaBandit):
    """ADS: po wykryciu zmiany zostawia obserwacje z rund po punkcie podziału."""

    mode = "ads"

    def _on_detection(self, t: int, arm: int, split: Split) -> None:
        breakpoint = split.breakpoint
        logging.debug(f"ADS: zmiana na ramieniu {arm + 1} w rundzie {t}, "
                      f"zachowane rundy > {breakpoint}")
        for window in self.windows:
            window.drop_through(breakpoint)
        self.window_start = breakpoint + 1
        offset = self.window_start - 1
        self.base.rebuild(
            [w.rounds - offset for w in self.windows],
            [w.values for w in self.windows],
        )
        self._pending = set(range(self.n_arms))


META_CLASSES = {"adr": ADRBandit, "ads": ADSBandit}
