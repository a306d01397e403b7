"""
Moduł środowisk: syntetyczne środowiska Bernoulliego, diagnostyka zmian
globalnych, strumienie testowe dla ADWIN oraz ewaluacja offline z logu.

Ramiona są indeksowane od 0; w plikach (log, CSV) od 1.
"""
import re
import logging
from dataclasses import dataclass
from typing import Optional, List

import numpy as np
import pandas as pd

from exceptions import DomainError, ReplayParseError, ReplaySchemaError, ReplayExhaustedError
from models import Selection, RoundOutcome, ChangeDiagnostics, ReplayEvent, ReplayLog
from config import ENVIRONMENT_KINDS

LOCAL_CHANGE_ARMS = 10
LOCAL_CHANGE_MEAN = 0.5
ZERO_CHANGE = 1e-12
LOG_COLUMNS = ["t", "arm", "reward"]


class SyntheticEnvironment:
    """
    Środowisko z deterministycznymi średnimi μ(i,t) i nagrodami Bernoulliego.

    Początkowe średnie μ_{i,1} = (K+1−i)/K dla ramion i = 1..K.
    Zmiany skokowe obowiązują w rundach (⌊T/3⌋, ⌊2T/3⌋].
    """

    def __init__(self, kind: str, n_arms: int, horizon: int):
        """
        Inicjalizuje środowisko.

        Args:
            kind: stationary | gradual | abrupt | abrupt_local
            n_arms: Liczba ramion K
            horizon: Horyzont T

        Raises:
            DomainError: Nieznany rodzaj lub niepoprawne K, T
        """
        if kind not in ENVIRONMENT_KINDS:
            raise DomainError(f"Nieznany rodzaj środowiska: {kind}")
        if n_arms < 1 or horizon < 1:
            raise DomainError(f"K i T muszą być >= 1, podano K={n_arms}, T={horizon}")
        self.kind = kind
        self.n_arms = n_arms
        self.horizon = horizon
        self.initial_means = (n_arms - np.arange(n_arms, dtype=np.float64)) / n_arms
        self.first_change = horizon // 3
        self.second_change = (2 * horizon) // 3
        self._changed_means = self._build_changed_means()

    def _build_changed_means(self) -> Optional[np.ndarray]:
        if self.kind == "abrupt":
            return 1.0 - self.initial_means
        if self.kind == "abrupt_local":
            changed = self.initial_means.copy()
            changed[:min(LOCAL_CHANGE_ARMS, self.n_arms)] = LOCAL_CHANGE_MEAN
            return changed
        return None

    @property
    def changepoints(self) -> List[int]:
        """Rundy t, po których średnie się zmieniają (μ_t ≠ μ_{t+1})."""
        if self._changed_means is None:
            return []
        points = []
        for t in (self.first_change, self.second_change):
            if 1 <= t < self.horizon and t not in points:
                points.append(t)
        return points

    def _check_round(self, t: int) -> None:
        if not 1 <= t <= self.horizon:
            raise DomainError(f"Runda {t} spoza zakresu [1, {self.horizon}]")

    def means_at(self, t: int) -> np.ndarray:
        """Wektor średnich μ_{·,t} (tylko do odczytu)."""
        self._check_round(t)
        if self.kind == "gradual":
            weight = (t - 1) / self.horizon
            return (1.0 - weight) * self.initial_means + weight * (1.0 - self.initial_means)
        if self._changed_means is not None and self.first_change < t <= self.second_change:
            return self._changed_means
        return self.initial_means

    def mean(self, arm: int, t: int) -> float:
        """
        Średnia ramienia w rundzie t.

        Raises:
            DomainError: ramię lub runda spoza zakresu
        """
        if not 0 <= arm < self.n_arms:
            raise DomainError(f"Ramię {arm} spoza zakresu [0, {self.n_arms})")
        return float(self.means_at(t)[arm])

    def sample(self, arm: int, t: int, rng: np.random.Generator) -> int:
        """Nagroda Bernoulli(μ(arm, t)) z generatora przebiegu."""
        return int(rng.random() < self.mean(arm, t))

    def play(self, t: int, selection: Selection, rng: np.random.Generator) -> RoundOutcome:
        """Losuje nagrody wybranych ramion (w kolejności wyboru)."""
        means = self.means_at(t)
        draws = rng.random(len(selection.arms))
        rewards = tuple(float(u < means[arm]) for u, arm in zip(draws, selection.arms))
        return RoundOutcome(selection=selection, arms=selection.arms, rewards=rewards)

    def diagnostics(self) -> ChangeDiagnostics:
        """
        Diagnostyka zmian globalnych.

        Dla zmian skokowych: max_j |Δμ_j| / min_i |Δμ_i| po punktach zmian,
        liczone ze wszystkimi ramionami (+inf, gdy któreś się nie zmienia)
        oraz tylko z ramionami o niezerowej zmianie. Dla dryfu liniowego:
        min_i / max_j prędkości dryfu oraz prędkość b.
        """
        if self.kind == "stationary":
            return ChangeDiagnostics(kind=self.kind, applicable=False)

        if self.kind == "gradual":
            drift = np.abs(1.0 - 2.0 * self.initial_means) / self.horizon
            nonzero = drift[drift > ZERO_CHANGE]
            speed = float(drift.max())
            if nonzero.size == 0:
                return ChangeDiagnostics(kind=self.kind, applicable=False, drift_speed=speed)
            return ChangeDiagnostics(
                kind=self.kind,
                applicable=True,
                ratio_all=float(drift.min() / drift.max()),
                ratio_nonzero=float(nonzero.min() / nonzero.max()),
                drift_speed=speed,
            )

        changes = []
        for t in self.changepoints:
            changes.append(np.abs(self.means_at(t + 1) - self.means_at(t)))
        if not changes:
            return ChangeDiagnostics(kind=self.kind, applicable=False)
        ratio_all = 0.0
        ratio_nonzero = 0.0
        for change in changes:
            nonzero = change[change > ZERO_CHANGE]
            if nonzero.size == 0:
                continue
            largest = float(change.max())
            ratio_all = max(ratio_all, np.inf if nonzero.size < change.size else largest / float(change.min()))
            ratio_nonzero = max(ratio_nonzero, largest / float(nonzero.min()))
        return ChangeDiagnostics(
            kind=self.kind,
            applicable=True,
            changepoints=self.changepoints,
            ratio_all=ratio_all,
            ratio_nonzero=ratio_nonzero,
        )


def global_change_ratio(env: SyntheticEnvironment) -> Optional[float]:
    """Stosunek zmian globalnych (None, gdy nie dotyczy)."""
    diagnostics = env.diagnostics()
    if not diagnostics.applicable or env.kind == "gradual":
        return None
    return diagnostics.ratio_all


def gradual_ratio(env: SyntheticEnvironment) -> Optional[float]:
    """
    Stosunek prędkości dryfu z przedziału (0,1] (None, gdy nie dotyczy).

    Liczony po ramionach z niezerowym dryfem; ramię bez dryfu sygnalizuje
    diagnostics().ratio_all == 0.
    """
    diagnostics = env.diagnostics()
    if not diagnostics.applicable or env.kind != "gradual":
        return None
    return diagnostics.ratio_nonzero


@dataclass(frozen=True)
class StreamSpec:
    """Opis strumienia jednowymiarowego dla eksperymentu błędu ADWIN."""
    kind: str = "stationary"
    horizon: int = 10000
    mean: float = 0.5
    low: float = 0.2
    high: float = 0.8
    changes: int = 1
    speed: float = 0.0
    noiseless: bool = False

    def means(self) -> np.ndarray:
        """
        Średnie μ_t dla t = 1..T.

        Raises:
            DomainError: nieznany rodzaj strumienia lub średnie spoza [0,1]
        """
        T = self.horizon
        if self.kind == "stationary":
            means = np.full(T, self.mean, dtype=np.float64)
        elif self.kind in ("abrupt", "step"):
            segment = np.arange(T) * (self.changes + 1) // T
            means = np.where(segment % 2 == 0, self.low, self.high).astype(np.float64)
        elif self.kind == "gradual":
            span = self.high - self.low
            if span <= 0 or self.speed <= 0:
                means = np.full(T, self.low, dtype=np.float64)
            else:
                travelled = np.arange(T) * self.speed
                phase = np.mod(travelled, 2.0 * span)
                means = self.low + np.where(phase <= span, phase, 2.0 * span - phase)
        else:
            raise DomainError(f"Nieznany rodzaj strumienia: {self.kind}")
        if np.any(means < 0.0) or np.any(means > 1.0):
            raise DomainError("Średnie strumienia muszą należeć do [0,1]")
        return means

    def generate(self, rng: np.random.Generator) -> np.ndarray:
        """Losuje strumień (dla `noiseless` lub 'step' zwraca same średnie)."""
        means = self.means()
        if self.noiseless or self.kind == "step":
            return means.copy()
        return (rng.random(self.horizon) < means).astype(np.float64)


class ReplayCursor:
    """Kursor po logu; stan pojedynczego przebiegu."""

    def __init__(self, log: ReplayLog):
        self.log = log
        self.position = 0
        self.rounds = 0
        self.skips = 0

    @property
    def exhausted(self) -> bool:
        return self.position >= len(self.log.events)

    def next_event(self) -> ReplayEvent:
        """
        Pobiera kolejne zdarzenie.

        Raises:
            ReplayExhaustedError: log wyczerpany
        """
        if self.exhausted:
            raise ReplayExhaustedError(f"Log wyczerpany po {self.position} zdarzeniach")
        event = self.log.events[self.position]
        self.position += 1
        return event


def replay_step(cursor: ReplayCursor, selection: Selection) -> Optional[RoundOutcome]:
    """
    Konsumuje jedno zdarzenie logu.

    Zdarzenie pasuje, gdy zaprezentowane ramię należy do wyboru; wtedy
    ujawniana jest tylko jego nagroda. Przy braku dopasowania zdarzenie jest
    pomijane (runda polityki nie postępuje).

    Returns:
        Wynik rundy lub None (pominięcie albo wyczerpany log, patrz cursor.exhausted)
    """
    if cursor.exhausted:
        return None
    event = cursor.next_event()
    if event.arm in selection:
        cursor.rounds += 1
        return RoundOutcome(selection=selection, arms=(event.arm,), rewards=(float(event.reward),))
    cursor.skips += 1
    return None


def _parse_int(value: str, column: str, line: int) -> int:
    try:
        return int(value.strip())
    except (ValueError, AttributeError):
        raise ReplayParseError(f"kolumna '{column}' nie jest liczbą całkowitą: '{value}'", line)


def load_log(path: str, n_arms: Optional[int] = None) -> ReplayLog:
    """
    Wczytuje log w formacie CSV `t,arm,reward` (ramiona od 1).

    Puste linie są pomijane; numery linii w błędach odpowiadają linii pliku.

    Args:
        path: Ścieżka do pliku
        n_arms: Rozmiar słownika ramion (domyślnie największy identyfikator)

    Returns:
        Log z ramionami indeksowanymi od 0

    Raises:
        ReplaySchemaError: zły nagłówek lub ramię spoza słownika
        ReplayParseError: błędny wiersz (z numerem linii)
        OSError: błąd odczytu pliku
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False,
                            encoding='utf-8')
        frame = frame.fillna("")
    except pd.errors.EmptyDataError:
        raise ReplaySchemaError(f"Pusty plik logu bez nagłówka: {path}")
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ReplayParseError(f"niepoprawna liczba pól ({e})", int(match.group(1)) if match else 0)

    columns = [c.strip() for c in frame.columns]
    if columns != LOG_COLUMNS:
        raise ReplaySchemaError(f"Nagłówek logu musi mieć postać t,arm,reward, jest: {','.join(columns)}")

    raw = []
    previous_t = -1
    for row_index, (t_raw, arm_raw, reward_raw) in enumerate(frame.itertuples(index=False, name=None)):
        line = row_index + 2
        if not (t_raw or arm_raw or reward_raw):
            continue
        t = _parse_int(t_raw, "t", line)
        arm = _parse_int(arm_raw, "arm", line)
        reward = _parse_int(reward_raw, "reward", line)
        if t < 0:
            raise ReplayParseError(f"ujemny znacznik czasu {t}", line)
        if t < previous_t:
            raise ReplayParseError(f"zdarzenia nie są uporządkowane w czasie ({t} < {previous_t})", line)
        if reward not in (0, 1):
            raise ReplayParseError(f"nagroda musi wynosić 0 lub 1, jest {reward}", line)
        if arm < 1:
            raise ReplaySchemaError(f"Linia {line}: nieznany identyfikator ramienia {arm}")
        previous_t = t
        raw.append((t, arm, reward, line))

    vocabulary = n_arms if n_arms is not None else max((arm for _, arm, _, _ in raw), default=0)
    events = []
    for t, arm, reward, line in raw:
        if arm > vocabulary:
            raise ReplaySchemaError(f"Linia {line}: ramię {arm} spoza słownika 1..{vocabulary}")
        events.append(ReplayEvent(timestamp=t, arm=arm - 1, reward=reward))

    logging.info(f"Wczytano log {path}: {len(events)} zdarzeń, {vocabulary} ramion")
    return ReplayLog(events=events, n_arms=vocabulary)


def save_log(log: ReplayLog, path: str) -> None:
    """Zapisuje log w formacie CSV `t,arm,reward` (ramiona od 1)."""
    frame = pd.DataFrame(
        [(e.timestamp, e.arm + 1, e.reward) for e in log.events],
        columns=LOG_COLUMNS,
    )
    frame.to_csv(path, index=False, lineterminator='\n', encoding='utf-8')
    logging.info(f"Zapisano log {path} ({len(log.events)} zdarzeń)")


def generate_replay_log(env: SyntheticEnvironment, horizon: int,
                        rng: np.random.Generator) -> ReplayLog:
    """
    Log polityki logującej wybierającej ramię jednostajnie w każdej rundzie.

    Args:
        env: Środowisko syntetyczne
        horizon: Liczba zdarzeń (<= T środowiska)
        rng: Generator

    Returns:
        Log o znanej strukturze
    """
    arms = rng.integers(0, env.n_arms, size=horizon)
    draws = rng.random(horizon)
    events = []
    for t in range(1, horizon + 1):
        arm = int(arms[t - 1])
        reward = int(draws[t - 1] < env.mean(arm, t))
        events.append(ReplayEvent(timestamp=t, arm=arm, reward=reward))
    return ReplayLog(events=events, n_arms=env.n_arms)


def import_click_log(path: str, top_arms: Optional[int] = None,
                     timestamp_column: str = "timestamp", item_column: str = "item_id",
                     click_column: str = "click") -> ReplayLog:
    """
    Konwertuje tabelę kliknięć (znacznik czasu, element, kliknięcie) do logu.

    Zdarzenia tego samego elementu w obrębie jednej sekundy są łączone;
    nagroda wynosi 1, gdy wystąpiło choć jedno kliknięcie. Zostaje `top_arms`
    najczęstszych elementów, numerowanych od najczęstszego.

    Raises:
        ReplaySchemaError: brak wymaganych kolumn
    """
    frame = pd.read_csv(path, encoding='utf-8')
    missing = [c for c in (timestamp_column, item_column, click_column) if c not in frame.columns]
    if missing:
        raise ReplaySchemaError(f"Brak kolumn w tabeli kliknięć: {', '.join(missing)}")

    stamps = frame[timestamp_column]
    if pd.api.types.is_numeric_dtype(stamps):
        seconds = np.floor(stamps.astype(float)).astype(np.int64)
    else:
        seconds = pd.to_datetime(stamps).astype("int64") // 1_000_000_000
    events = pd.DataFrame({
        "second": seconds,
        "item": frame[item_column],
        "click": (frame[click_column].astype(float) > 0).astype(int),
        "order": np.arange(len(frame)),
    })
    grouped = (events.groupby(["second", "item"], sort=False)
               .agg(click=("click", "max"), order=("order", "min"))
               .reset_index())

    counts = grouped.groupby("item").size().reset_index(name="count")
    counts = counts.sort_values(["count", "item"], ascending=[False, True], kind="stable")
    if top_arms is not None:
        counts = counts.head(top_arms)
    arm_ids = {item: rank for rank, item in enumerate(counts["item"])}

    grouped = grouped[grouped["item"].isin(arm_ids)].sort_values(["second", "order"], kind="stable")
    origin = int(grouped["second"].min()) if len(grouped) else 0
    log_events = [
        ReplayEvent(timestamp=int(second) - origin, arm=arm_ids[item], reward=int(click))
        for second, item, click in zip(grouped["second"], grouped["item"], grouped["click"])
    ]
    logging.info(f"Zaimportowano {len(log_events)} zdarzeń z {path} ({len(arm_ids)} ramion)")
    return ReplayLog(events=log_events, n_arms=len(arm_ids))
