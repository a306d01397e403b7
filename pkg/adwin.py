"""
Moduł detektora zmian ADWIN (adaptacyjne okno).

Okno przechowuje obserwacje wraz z numerami rund i sumami prefiksowymi,
dzięki czemu przegląd wszystkich podziałów W = W1 ∪ W2 kosztuje O(|W|)
operacji wektorowych.
"""
import math
import logging
import threading
from typing import Optional, Dict

import numpy as np

from exceptions import DomainError, UsageError
from models import Split, DetectionReport


def _check_delta(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta musi należeć do (0,1), podano {delta}")
    return delta


def epsilon_cut(n1: int, n2: int, delta: float) -> float:
    """
    Próg Hoeffdinga dla różnicy średnich dwóch części okna.

    Args:
        n1: Liczność W1
        n2: Liczność W2
        delta: Poziom ufności z przedziału (0,1)

    Returns:
        sqrt(ln(1/δ)/(2·n1)) + sqrt(ln(1/δ)/(2·n2))

    Raises:
        DomainError: n1 < 1, n2 < 1 lub delta spoza (0,1)
    """
    if n1 < 1 or n2 < 1:
        raise DomainError(f"Liczności podziału muszą być >= 1, podano ({n1}, {n2})")
    _check_delta(delta)
    log_inv = -math.log(delta)
    return math.sqrt(log_inv / (2.0 * n1)) + math.sqrt(log_inv / (2.0 * n2))


class ThresholdTable:
    """
    Tablica połówek progu H[m] = sqrt(ln(1/δ)/(2m)) dla danego δ.

    epsilon_cut(n1, n2, δ) == H[n1] + H[n2]; tablica rośnie przez podwajanie
    i jest współdzielona przez wszystkie okna o tym samym δ.
    """

    def __init__(self, delta: float, capacity: int = 1024):
        self.delta = _check_delta(delta)
        self._log_inv = -math.log(delta)
        self._lock = threading.Lock()
        self._half = self._build(capacity)

    def _build(self, capacity: int) -> np.ndarray:
        m = np.arange(capacity + 1, dtype=np.float64)
        half = np.empty(capacity + 1, dtype=np.float64)
        half[0] = np.inf
        half[1:] = np.sqrt(self._log_inv / (2.0 * m[1:]))
        return half

    def halves(self, n: int) -> np.ndarray:
        """Zwraca tablicę H o długości co najmniej n+1."""
        half = self._half
        if len(half) <= n:
            with self._lock:
                half = self._half
                if len(half) <= n:
                    capacity = len(half) - 1
                    while capacity < n:
                        capacity *= 2
                    half = self._build(capacity)
                    self._half = half
        return half


_TABLES: Dict[float, ThresholdTable] = {}
_TABLES_LOCK = threading.Lock()


def threshold_table(delta: float) -> ThresholdTable:
    """Zwraca współdzieloną tablicę progów dla δ."""
    table = _TABLES.get(delta)
    if table is None:
        with _TABLES_LOCK:
            table = _TABLES.get(delta)
            if table is None:
                table = ThresholdTable(delta)
                _TABLES[delta] = table
    return table


class Window:
    """
    Ciągły segment obserwacji z sumami prefiksowymi.

    Element k okna to wartość z rundy rounds[k]. W trybie samodzielnym rundy
    są kolejne; w meta-bandytach okno ramienia trzyma tylko rundy, w których
    ramię było obserwowane.
    """

    def __init__(self, delta: float, check_stride: int = 1,
                 horizon: Optional[int] = None, capacity: int = 64):
        if check_stride < 1:
            raise DomainError(f"check_stride musi być >= 1, podano {check_stride}")
        self.delta = _check_delta(delta)
        self.check_stride = check_stride
        self.horizon = horizon
        self._table = threshold_table(delta)
        self._allocate(max(capacity, 2))
        self._size = 0
        self._min = math.inf
        self._max = -math.inf

    def _allocate(self, capacity: int) -> None:
        self._values = np.zeros(capacity, dtype=np.float64)
        self._rounds = np.zeros(capacity, dtype=np.int64)
        self._prefix = np.zeros(capacity + 1, dtype=np.float64)

    def _grow(self) -> None:
        n = self._size
        values, rounds, prefix = self._values, self._rounds, self._prefix
        self._allocate(2 * len(values))
        self._values[:n] = values[:n]
        self._rounds[:n] = rounds[:n]
        self._prefix[:n + 1] = prefix[:n + 1]

    def __len__(self) -> int:
        return self._size

    @property
    def size(self) -> int:
        return self._size

    @property
    def start_time(self) -> Optional[int]:
        """Runda najstarszej obserwacji (None dla pustego okna)."""
        return int(self._rounds[0]) if self._size else None

    @property
    def values(self) -> np.ndarray:
        return self._values[:self._size]

    @property
    def rounds(self) -> np.ndarray:
        return self._rounds[:self._size]

    @property
    def total(self) -> float:
        return float(self._prefix[self._size])

    def append(self, x: float, round_index: int) -> None:
        """
        Dodaje obserwację na koniec okna.

        Raises:
            DomainError: x spoza [0,1]
            UsageError: przekroczony horyzont okna
        """
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"Obserwacja musi należeć do [0,1], podano {x}")
        if self.horizon is not None and self._size >= self.horizon:
            raise UsageError(f"Okno przekroczyłoby horyzont T={self.horizon}")
        if self._size == len(self._values):
            self._grow()
        n = self._size
        self._values[n] = x
        self._rounds[n] = round_index
        self._prefix[n + 1] = self._prefix[n] + x
        self._size = n + 1
        if x < self._min:
            self._min = x
        if x > self._max:
            self._max = x

    def mean(self) -> float:
        """
        Średnia arytmetyczna obserwacji w oknie.

        Raises:
            UsageError: okno jest puste
        """
        if self._size == 0:
            raise UsageError("Średnia z pustego okna")
        return float(self._prefix[self._size]) / self._size

    def segment_mean(self, start: int, stop: int) -> float:
        """Średnia elementów o indeksach [start, stop)."""
        if not 0 <= start < stop <= self._size:
            raise UsageError(f"Niepoprawny segment [{start}, {stop}) dla okna rozmiaru {self._size}")
        return float(self._prefix[stop] - self._prefix[start]) / (stop - start)

    def find_split(self) -> Optional[Split]:
        """
        Szuka pierwszego (najkrótszy prefiks W1) podziału spełniającego
        |μ̂_W1 − μ̂_W2| >= ε_cut(|W1|, |W2|, δ). Nie modyfikuje okna.

        Returns:
            Znaleziony podział lub None
        """
        n = self._size
        if n < 2 or self._min == self._max:
            return None
        prefix = self._prefix
        half = self._table.halves(n)
        total = prefix[n]
        if self.check_stride == 1:
            head = prefix[1:n]
            m = np.arange(1, n, dtype=np.float64)
            eps = half[1:n] + half[n - 1:0:-1]
        else:
            idx = np.arange(1, n, self.check_stride)
            head = prefix[idx]
            m = idx.astype(np.float64)
            eps = half[idx] + half[n - idx]
        gap = np.abs(head / m - (total - head) / (n - m))
        hits = np.flatnonzero(gap >= eps)
        if hits.size == 0:
            return None
        first = int(hits[0])
        prefix_size = int(m[first])
        return Split(
            prefix_size=prefix_size,
            breakpoint=int(self._rounds[prefix_size - 1]),
            gap=float(gap[first]),
            threshold=float(eps[first]),
        )

    def drop_prefix(self, count: int) -> None:
        """Usuwa `count` najstarszych obserwacji; sumy prefiksowe liczone od nowa."""
        if count <= 0:
            return
        n = self._size
        count = min(count, n)
        kept = n - count
        if kept:
            self._values[:kept] = self._values[count:n]
            self._rounds[:kept] = self._rounds[count:n]
            np.cumsum(self._values[:kept], out=self._prefix[1:kept + 1])
            self._min = float(self._values[:kept].min())
            self._max = float(self._values[:kept].max())
        else:
            self._min = math.inf
            self._max = -math.inf
        self._size = kept

    def drop_through(self, breakpoint: int) -> int:
        """
        Zostawia tylko obserwacje z rund > breakpoint.

        Returns:
            Liczba usuniętych obserwacji
        """
        count = int(np.searchsorted(self.rounds, breakpoint, side='right'))
        self.drop_prefix(count)
        return count

    def clear(self) -> None:
        self._size = 0
        self._min = math.inf
        self._max = -math.inf


class AdaptiveWindow:
    """Samodzielny estymator ADWIN dla jednowymiarowego strumienia."""

    def __init__(self, delta: float, check_stride: int = 1, horizon: Optional[int] = None):
        self.window = Window(delta, check_stride=check_stride, horizon=horizon)
        self.horizon = horizon
        self.t = 0
        self.detections = []
        self._last_estimate: Optional[float] = None
        if check_stride > 1:
            logging.warning(f"ADWIN z check_stride={check_stride}: przegląd podziałów jest przybliżony")

    @property
    def delta(self) -> float:
        return self.window.delta

    def would_detect(self) -> Optional[Split]:
        """Pierwszy podział spełniający test zmiany, bez modyfikacji okna."""
        return self.window.find_split()

    def observe(self, x: float) -> DetectionReport:
        """
        Dodaje obserwację i obcina okno dopóki istnieje podział spełniający test.

        Args:
            x: Wartość z przedziału [0,1]

        Returns:
            Raport z detekcji

        Raises:
            DomainError: x spoza [0,1]
            UsageError: runda t przekroczyłaby horyzont T
        """
        if self.horizon is not None and self.t >= self.horizon:
            raise UsageError(f"Strumień dłuższy niż horyzont T={self.horizon}")
        self.t += 1
        self.window.append(x, self.t)
        shrinks = 0
        breakpoint = None
        split = self.window.find_split()
        while split is not None:
            breakpoint = split.breakpoint
            self.window.drop_prefix(split.prefix_size)
            shrinks += 1
            split = self.window.find_split()
        if shrinks:
            self.detections.append(self.t)
            logging.debug(f"ADWIN: zmiana w rundzie {self.t}, punkt podziału {breakpoint}, "
                          f"rozmiar okna {self.window.size}")
        self._last_estimate = self.window.mean()
        return DetectionReport(
            detected=shrinks > 0,
            breakpoint=breakpoint,
            retained_size=self.window.size,
            shrinks=shrinks,
        )

    def mean_estimate(self) -> float:
        """
        Bieżąca estymata średniej μ̂_W.

        Dla pustego okna zwraca ostatnią poprawną estymatę.

        Raises:
            UsageError: nie było jeszcze żadnej obserwacji
        """
        if self.window.size:
            return self.window.mean()
        if self._last_estimate is None:
            raise UsageError("Estymata z pustego okna bez wcześniejszych obserwacji")
        return self._last_estimate

    def reset(self) -> None:
        self.window.clear()
        self.t = 0
        self.detections = []
        self._last_estimate = None
