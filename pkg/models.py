"""
Moduł z modelami danych używanymi w symulatorze.
"""
from dataclasses import dataclass, field
from typing import Optional, List, Dict, Any, Tuple, Iterator

import numpy as np

from exceptions import UsageError


@dataclass(frozen=True)
class Selection:
    """Zbiór ramion wybranych w rundzie (kolejność wg rankingu, indeksy od 0)."""
    arms: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.arms)

    def __iter__(self) -> Iterator[int]:
        return iter(self.arms)

    def __contains__(self, arm: object) -> bool:
        return arm in self.arms

    def validate(self, n_arms: int, n_plays: int) -> None:
        """
        Sprawdza niezmienniki wyboru.

        Args:
            n_arms: Liczba ramion K
            n_plays: Liczba zagrań L

        Raises:
            UsageError: Niepoprawny wybór
        """
        if len(self.arms) != n_plays:
            raise UsageError(f"Wybór ma {len(self.arms)} ramion, oczekiwano {n_plays}")
        if len(set(self.arms)) != len(self.arms):
            raise UsageError(f"Powtórzone ramiona w wyborze: {self.arms}")
        if any(arm < 0 or arm >= n_arms for arm in self.arms):
            raise UsageError(f"Ramię poza zakresem [0, {n_arms}): {self.arms}")


@dataclass(frozen=True)
class RoundOutcome:
    """Wynik rundy: wybór oraz nagrody ramion, których nagrody zostały ujawnione."""
    selection: Selection
    arms: Tuple[int, ...]
    rewards: Tuple[float, ...]

    @classmethod
    def full(cls, selection: Selection, rewards) -> 'RoundOutcome':
        """Wynik z pełną informacją zwrotną dla wszystkich wybranych ramion."""
        return cls(selection=selection, arms=selection.arms,
                   rewards=tuple(float(r) for r in rewards))

    @property
    def reward_sum(self) -> float:
        return float(sum(self.rewards))


@dataclass
class ArmStats:
    """
    Statystyki ramion: N_i, S_i oraz statystyki monitorujące N_i^E, S_i^E.

    Tablice numpy o długości K; historia obserwacji jest trzymana osobno
    (w oknach detektorów), a nie tutaj.
    """
    pulls: np.ndarray
    successes: np.ndarray
    monitor_pulls: np.ndarray
    monitor_successes: np.ndarray

    @classmethod
    def empty(cls, n_arms: int) -> 'ArmStats':
        return cls(
            pulls=np.zeros(n_arms, dtype=np.int64),
            successes=np.zeros(n_arms, dtype=np.float64),
            monitor_pulls=np.zeros(n_arms, dtype=np.int64),
            monitor_successes=np.zeros(n_arms, dtype=np.float64),
        )

    @property
    def n_arms(self) -> int:
        return len(self.pulls)

    def record(self, arm: int, reward: float, monitor: bool = False) -> None:
        """Dodaje obserwację ramienia (opcjonalnie także do statystyk monitorujących)."""
        self.pulls[arm] += 1
        self.successes[arm] += reward
        if monitor:
            self.monitor_pulls[arm] += 1
            self.monitor_successes[arm] += reward

    def means(self) -> np.ndarray:
        """Średnie S_i/N_i; dla N_i = 0 zwraca +inf (konwencja 0/0 = +inf)."""
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(self.pulls > 0, self.successes / np.maximum(self.pulls, 1), np.inf)

    def monitor_means(self) -> np.ndarray:
        """Średnie S_i^E/N_i^E; dla N_i^E = 0 zwraca +inf."""
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(self.monitor_pulls > 0,
                            self.monitor_successes / np.maximum(self.monitor_pulls, 1), np.inf)

    def to_dict(self) -> Dict[str, List[float]]:
        return {
            "pulls": self.pulls.tolist(),
            "successes": self.successes.tolist(),
            "monitor_pulls": self.monitor_pulls.tolist(),
            "monitor_successes": self.monitor_successes.tolist(),
        }


@dataclass(frozen=True)
class Split:
    """Podział okna W = W1 ∪ W2 spełniający test zmiany."""
    prefix_size: int
    breakpoint: int
    gap: float
    threshold: float


@dataclass(frozen=True)
class DetectionReport:
    """Raport z obserwacji w detektorze ADWIN."""
    detected: bool
    breakpoint: Optional[int]
    retained_size: int
    shrinks: int = 0


@dataclass(frozen=True)
class MetaStepResult:
    """Wynik kroku meta-bandyty (ADR/ADS)."""
    outcome: RoundOutcome
    changed: bool
    detecting_arm: Optional[int] = None
    breakpoint: Optional[int] = None


@dataclass(frozen=True)
class ReplayEvent:
    """Zdarzenie z logu: znacznik czasu, zaprezentowane ramię (od 0) i nagroda."""
    timestamp: int
    arm: int
    reward: int


@dataclass
class ReplayLog:
    """Log do ewaluacji offline."""
    events: List[ReplayEvent]
    n_arms: int

    def __len__(self) -> int:
        return len(self.events)


@dataclass
class ChangeDiagnostics:
    """Diagnostyka zmian globalnych środowiska."""
    kind: str
    applicable: bool
    changepoints: List[int] = field(default_factory=list)
    ratio_all: Optional[float] = None
    ratio_nonzero: Optional[float] = None
    drift_speed: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "applicable": self.applicable,
            "changepoints": list(self.changepoints),
            "ratio_all": self.ratio_all,
            "ratio_nonzero": self.ratio_nonzero,
            "drift_speed": self.drift_speed,
        }


@dataclass
class RunRecord:
    """Zapis pojedynczego przebiegu symulacji."""
    policy: str
    run: int
    metric: str
    times: List[int] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    resets: List[int] = field(default_factory=list)
    reset_rounds: List[int] = field(default_factory=list)
    selections: Optional[List[Tuple[int, ...]]] = None
    rounds_completed: int = 0
    skips: int = 0
    exhausted: bool = False

    @property
    def final_value(self) -> float:
        return self.values[-1] if self.values else 0.0

    def add_point(self, t: int, value: float) -> None:
        self.times.append(t)
        self.values.append(value)
        self.resets.append(len(self.reset_rounds))

    def to_rows(self) -> List[Dict[str, Any]]:
        """
        Konwertuje zapis do wierszy CSV `policy,run,t,metric,value`.

        Returns:
            Lista słowników z wierszami
        """
        rows = []
        for t, value, resets in zip(self.times, self.values, self.resets):
            rows.append({"policy": self.policy, "run": self.run, "t": t,
                         "metric": self.metric, "value": value})
            rows.append({"policy": self.policy, "run": self.run, "t": t,
                         "metric": "resets", "value": float(resets)})
        return rows
