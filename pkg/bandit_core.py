"""
Wspólne prymitywy numeryczne polityk: dywergencja KL, indeks KL-UCB,
wybór top-L, regret oraz generator losowy przebiegu.
"""
import math
from typing import Union

import numpy as np

from exceptions import DomainError, UsageError
from models import Selection

KL_CLAMP = 1e-12
BISECTION_STEPS = 64

ArrayLike = Union[float, np.ndarray]


def make_rng(seed: int) -> np.random.Generator:
    """Generator przebiegu (PCG64) dla danego ziarna."""
    return np.random.default_rng(seed)


def _check_unit(name: str, value: ArrayLike) -> None:
    arr = np.asarray(value, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} musi należeć do [0,1], podano {value}")


def kl_bernoulli_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Wektorowa d_KL(p, q) dla rozkładów Bernoulliego (bez sprawdzania dziedziny)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    with np.errstate(divide='ignore', invalid='ignore'):
        first = np.where(p > 0.0, p * np.log(p / q), 0.0)
        second = np.where(p < 1.0, (1.0 - p) * np.log((1.0 - p) / (1.0 - q)), 0.0)
    return first + second


def kl_bernoulli(p: float, q: float) -> float:
    """
    Dywergencja Kullbacka-Leiblera między Bernoulli(p) i Bernoulli(q).

    Konwencja 0·ln(0/·) = 0; dla q ∈ {0,1} różnego od p wynik to +inf.

    Raises:
        DomainError: p lub q spoza [0,1]
    """
    _check_unit("p", p)
    _check_unit("q", q)
    if p == q:
        return 0.0
    return float(kl_bernoulli_array(np.float64(p), np.float64(q)))


def kl_ucb_indices(mu_hat: np.ndarray, pulls: np.ndarray, t: int) -> np.ndarray:
    """
    Indeksy KL-UCB dla wszystkich ramion naraz (bisekcja wektorowa).

    U_i = max{q ∈ [μ̂_i, 1] : N_i·d_KL(μ̂_i, q) <= ln(t/N_i)}; dla N_i = 0
    indeks wynosi 1, a dla ln(t/N_i) <= 0 indeks równa się μ̂_i.

    Args:
        mu_hat: Średnie empiryczne (dowolne dla N_i = 0)
        pulls: Liczby obserwacji N_i
        t: Numer rundy (>= 1)

    Returns:
        Tablica indeksów
    """
    if t < 1:
        raise DomainError(f"Runda musi być >= 1, podano {t}")
    pulls = np.asarray(pulls, dtype=np.float64)
    played = pulls > 0
    n = np.where(played, pulls, 1.0)
    mu = np.where(played, np.clip(np.asarray(mu_hat, dtype=np.float64), 0.0, 1.0), 0.0)
    budget = np.log(t / n)
    active = played & (budget > 0.0)

    lo = mu.copy()
    hi = np.ones_like(mu)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        q = np.clip(mid, KL_CLAMP, 1.0 - KL_CLAMP)
        inside = n * kl_bernoulli_array(mu, q) <= budget
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)

    return np.where(played, np.where(active, lo, mu), 1.0)


def kl_ucb_index(mu_hat: float, n: int, t: int) -> float:
    """
    Indeks KL-UCB pojedynczego ramienia.

    Args:
        mu_hat: Średnia empiryczna
        n: Liczba obserwacji
        t: Numer rundy

    Returns:
        Indeks z przedziału [mu_hat, 1]
    """
    if n == 0:
        return 1.0
    _check_unit("mu_hat", mu_hat)
    return float(kl_ucb_indices(np.array([mu_hat]), np.array([n]), t)[0])


def top_l(scores: np.ndarray, n_plays: int) -> Selection:
    """
    L ramion o największych wynikach; remisy rozstrzyga mniejszy indeks.

    Raises:
        UsageError: L < 1 lub L > K
    """
    scores = np.asarray(scores, dtype=np.float64)
    if not 1 <= n_plays <= len(scores):
        raise UsageError(f"L={n_plays} spoza zakresu [1, K={len(scores)}]")
    if n_plays == 1:
        return Selection((int(np.argmax(scores)),))
    order = np.argsort(-scores, kind='stable')
    return Selection(tuple(int(i) for i in order[:n_plays]))


def best_sum(oracle_means: np.ndarray, n_plays: int) -> float:
    """Suma średnich L najlepszych ramion."""
    means = np.asarray(oracle_means, dtype=np.float64)
    n_plays = min(n_plays, len(means))
    if n_plays == 1:
        return float(means.max())
    return float(np.sort(means)[len(means) - n_plays:].sum())


def regret_step(oracle_means: np.ndarray, selection: Selection) -> float:
    """
    Regret rundy: max po |I|=L sumy μ minus suma μ wybranych ramion.

    Args:
        oracle_means: Średnie μ_{·,t} wszystkich ramion
        selection: Wybór I(t)

    Returns:
        Wartość >= 0
    """
    means = np.asarray(oracle_means, dtype=np.float64)
    selection.validate(len(means), len(selection))
    chosen = float(np.sort(means[list(selection.arms)]).sum())
    return max(0.0, best_sum(means, len(selection)) - chosen)


def beta_samples(rng: np.random.Generator, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """
    Próbki Beta(α, β) jako g1/(g1+g2) z dwóch losowań Gamma(kształt, 1).

    Kolejność losowań: najpierw Gamma(α_i) dla wszystkich ramion rosnąco,
    potem Gamma(β_i) dla wszystkich ramion rosnąco.
    """
    g1 = rng.standard_gamma(alpha)
    g2 = rng.standard_gamma(beta)
    return g1 / (g1 + g2)


def hoeffding_radius(pulls: np.ndarray, log_term: float) -> np.ndarray:
    """sqrt(log_term/(2N)); dla N = 0 zwraca +inf."""
    pulls = np.asarray(pulls, dtype=np.float64)
    with np.errstate(divide='ignore'):
        return np.where(pulls > 0, np.sqrt(log_term / (2.0 * np.maximum(pulls, 1.0))), math.inf)
