"""
Wspólne fikstury testów.
"""
import os
from typing import Sequence, List

import numpy as np
import pytest

from base_bandits import Policy
from bandit_core import make_rng, top_l
from models import Selection, RoundOutcome


class FixedPolicy(Policy):
    """Polityka zawsze wybierająca te same ramiona."""

    name = "fixed"

    def __init__(self, n_arms: int, arms: Sequence[int]):
        super().__init__(n_arms, len(arms))
        self.arms = tuple(arms)
        self.updates: List[RoundOutcome] = []

    def select(self, t, rng):
        return Selection(self.arms)

    def update(self, t, outcome):
        self.updates.append(outcome)

    def reset(self):
        self.updates = []


class OraclePolicy(Policy):
    """Polityka znająca średnie środowiska (wybiera prawdziwe top-L)."""

    name = "oracle"

    def __init__(self, env, n_plays: int = 1):
        super().__init__(env.n_arms, n_plays)
        self.env = env

    def select(self, t, rng):
        return top_l(self.env.means_at(t), self.n_plays)

    def update(self, t, outcome):
        pass

    def reset(self):
        pass


class SequenceEnvironment:
    """Środowisko deterministyczne: nagroda ramienia w rundzie t to rewards[arm][t-1]."""

    def __init__(self, rewards: Sequence[Sequence[float]]):
        self.rewards = [list(r) for r in rewards]
        self.n_arms = len(self.rewards)
        self.horizon = min(len(r) for r in self.rewards)

    def means_at(self, t):
        return np.array([r[t - 1] for r in self.rewards], dtype=np.float64)

    def play(self, t, selection, rng):
        return RoundOutcome.full(selection, [self.rewards[arm][t - 1] for arm in selection.arms])


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def fixed_policy():
    return FixedPolicy


@pytest.fixture
def oracle_policy():
    return OraclePolicy


@pytest.fixture
def sequence_env():
    return SequenceEnvironment


@pytest.fixture
def write_log(tmp_path):
    """Zapisuje log replay z podanych wierszy i zwraca ścieżkę."""
    def _write(rows, header="t,arm,reward", name="log.csv"):
        path = tmp_path / name
        lines = [header] + [",".join(str(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def clean_environment(monkeypatch, tmp_path):
    """Usuwa zmienne SIM_* i przechodzi do pustego katalogu (bez .env)."""
    for key in list(os.environ):
        if key.startswith("SIM_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path
