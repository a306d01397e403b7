"""
Moduł zarządzania konfiguracją symulatora.
"""
import os
import logging
from typing import Optional, List, Dict, Any
from dataclasses import dataclass, field
from dotenv import load_dotenv, dotenv_values

from exceptions import ConfigurationError


ENVIRONMENT_KINDS = ("stationary", "gradual", "abrupt", "abrupt_local")
REPLAY_PREFIX = "replay:"

BASE_POLICIES = ("ts", "klucb", "eucb")
META_POLICIES = tuple(f"{meta}-{base}" for meta in ("adr", "ads") for base in BASE_POLICIES)
BASELINE_POLICIES = ("ducb", "swts", "rexp3")
KNOWN_POLICIES = BASE_POLICIES + META_POLICIES + BASELINE_POLICIES

# Domyślne hiperparametry (pogrubione wartości z tabeli strojenia)
DEFAULT_GAMMA = 0.9
DEFAULT_WINDOW = 1000
DEFAULT_BATCH = 1000

PARAM_PREFIX = "param."


@dataclass
class SimulationDefaults:
    """Domyślne parametry eksperymentów."""
    delta: float = 0.001
    n_arms: int = 100
    horizon: int = 10000
    n_plays: int = 1
    runs: int = 10
    seed: int = 0
    cadence: Optional[int] = None
    workers: int = 1
    check_stride: int = 1


@dataclass
class OutputConfig:
    """Konfiguracja plików wyjściowych."""
    out: Optional[str] = None
    summary_out: Optional[str] = None
    float_format: str = "%.6f"


@dataclass
class LoggingConfig:
    """Konfiguracja logowania."""
    log_file: Optional[str] = None
    level: str = "INFO"


@dataclass
class AppConfig:
    """Główna konfiguracja aplikacji."""
    simulation: SimulationDefaults = field(default_factory=SimulationDefaults)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def from_environment(cls, env_path: Optional[str] = None) -> 'AppConfig':
        """
        Tworzy konfigurację na podstawie zmiennych środowiskowych SIM_*.

        Args:
            env_path: Ścieżka do pliku .env

        Returns:
            Obiekt konfiguracji

        Raises:
            ConfigurationError: Niepoprawna wartość zmiennej
        """
        if env_path and os.path.exists(env_path):
            load_dotenv(dotenv_path=env_path, override=True)
            logging.info(f"Wczytano konfigurację z {env_path}")

        cadence = os.environ.get('SIM_CADENCE')
        simulation = SimulationDefaults(
            delta=cls._get_number('SIM_DELTA', '0.001', float),
            n_arms=cls._get_number('SIM_K', '100', int),
            horizon=cls._get_number('SIM_T', '10000', int),
            n_plays=cls._get_number('SIM_L', '1', int),
            runs=cls._get_number('SIM_RUNS', '10', int),
            seed=cls._get_number('SIM_SEED', '0', int),
            cadence=cls._get_number('SIM_CADENCE', cadence, int) if cadence else None,
            workers=cls._get_number('SIM_WORKERS', '1', int),
            check_stride=cls._get_number('SIM_CHECK_STRIDE', '1', int),
        )

        logging_config = LoggingConfig(
            log_file=os.environ.get('SIM_LOG_FILE') or None,
            level=os.environ.get('SIM_LOG_LEVEL', 'INFO').upper()
        )

        output = OutputConfig(float_format=os.environ.get('SIM_FLOAT_FORMAT') or "%.6f")
        try:
            output.float_format % 1.0
        except (TypeError, ValueError):
            raise ConfigurationError(f"SIM_FLOAT_FORMAT: niepoprawny format '{output.float_format}'")

        return cls(simulation=simulation, output=output, logging=logging_config)

    @staticmethod
    def _get_number(key: str, default: str, cast):
        """
        Pobiera liczbę ze zmiennej środowiskowej.

        Args:
            key: Nazwa zmiennej
            default: Wartość domyślna (tekst)
            cast: Typ docelowy (int lub float)

        Returns:
            Wartość liczbowa
        """
        raw = os.environ.get(key, default)
        try:
            return cast(raw)
        except (TypeError, ValueError):
            raise ConfigurationError(f"{key}: niepoprawna wartość '{raw}'")


@dataclass
class ExperimentConfig:
    """Konfiguracja pojedynczego eksperymentu symulacyjnego."""
    env: str = "stationary"
    policies: List[str] = field(default_factory=lambda: ["adr-ts"])
    n_arms: int = 100
    horizon: int = 10000
    n_plays: int = 1
    runs: int = 10
    seed: int = 0
    delta: float = 0.001
    cadence: Optional[int] = None
    check_stride: int = 1
    workers: int = 1
    out: Optional[str] = None
    summary_out: Optional[str] = None
    params: Dict[str, str] = field(default_factory=dict)
    record_selections: bool = False
    replay_limit: Optional[int] = None

    @property
    def is_replay(self) -> bool:
        return self.env.startswith(REPLAY_PREFIX)

    @property
    def replay_path(self) -> Optional[str]:
        return self.env[len(REPLAY_PREFIX):] if self.is_replay else None

    def replay_rounds(self, log_length: int) -> int:
        """Limit rund polityki w ewaluacji offline: replay_limit lub długość logu."""
        return log_length if self.replay_limit is None else self.replay_limit

    def effective_cadence(self, horizon: Optional[int] = None) -> int:
        """Zwraca co ile rund zapisywać metryki (domyślnie max(1, T // 1000))."""
        if self.cadence is not None:
            return self.cadence
        return max(1, (horizon or self.horizon) // 1000)

    def param_float(self, name: str, default: float) -> float:
        raw = self.params.get(name)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigurationError(f"param.{name}: niepoprawna wartość '{raw}'")

    def param_int(self, name: str, default: int) -> int:
        raw = self.params.get(name)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"param.{name}: niepoprawna wartość '{raw}'")

    def policy_delta(self) -> float:
        """Delta detektora dla meta-bandytów (param.delta nadpisuje pole delta)."""
        return self.param_float("delta", self.delta)

    def validate(self) -> None:
        """
        Sprawdza poprawność konfiguracji.

        Raises:
            ConfigurationError: Gdy któreś pole ma niepoprawną wartość
        """
        if not self.is_replay and self.env not in ENVIRONMENT_KINDS:
            raise ConfigurationError(
                f"env: nieznane środowisko '{self.env}' (dozwolone: {', '.join(ENVIRONMENT_KINDS)}, replay:ŚCIEŻKA)")
        if self.is_replay and not self.replay_path:
            raise ConfigurationError("env: brak ścieżki logu po 'replay:'")
        if not self.policies:
            raise ConfigurationError("policy: nie podano żadnej polityki")
        for name in self.policies:
            if name not in KNOWN_POLICIES:
                raise ConfigurationError(
                    f"policy: nieznana polityka '{name}' (dozwolone: {', '.join(KNOWN_POLICIES)})")
        if self.runs < 1:
            raise ConfigurationError(f"runs: musi być >= 1, podano {self.runs}")
        if self.n_arms < 1:
            raise ConfigurationError(f"K: musi być >= 1, podano {self.n_arms}")
        if self.horizon < 1:
            raise ConfigurationError(f"T: musi być >= 1, podano {self.horizon}")
        if not 1 <= self.n_plays <= self.n_arms:
            raise ConfigurationError(f"L: musi spełniać 1 <= L <= K={self.n_arms}, podano {self.n_plays}")
        delta = self.policy_delta()
        if not 0.0 < delta < 1.0:
            raise ConfigurationError(f"delta: musi należeć do (0,1), podano {delta}")
        if self.cadence is not None and self.cadence < 1:
            raise ConfigurationError(f"cadence: musi być >= 1, podano {self.cadence}")
        if self.workers < 1:
            raise ConfigurationError(f"workers: musi być >= 1, podano {self.workers}")
        if self.replay_limit is not None and self.replay_limit < 1:
            raise ConfigurationError(f"replay_limit: musi być >= 1, podano {self.replay_limit}")
        if self.param_int("check_stride", self.check_stride) < 1:
            raise ConfigurationError("check_stride: musi być >= 1")
        gamma = self.param_float("gamma", DEFAULT_GAMMA)
        if not 0.0 < gamma <= 1.0:
            raise ConfigurationError(f"param.gamma: musi należeć do (0,1], podano {gamma}")
        if self.param_int("window", DEFAULT_WINDOW) < 1:
            raise ConfigurationError("param.window: musi być >= 1")
        if self.param_int("batch", DEFAULT_BATCH) < 1:
            raise ConfigurationError("param.batch: musi być >= 1")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        """
        Tworzy konfigurację ze słownika (np. z pliku klucz=wartość).

        Klucze `param.<nazwa>` trafiają do hiperparametrów polityk.

        Args:
            data: Słownik z wartościami (tekstowymi lub już skonwertowanymi)

        Returns:
            Obiekt konfiguracji

        Raises:
            ConfigurationError: Nieznany klucz lub niepoprawna wartość
        """
        config = cls()
        casts = {
            "env": str, "n_arms": int, "horizon": int, "n_plays": int, "runs": int,
            "seed": int, "delta": float, "cadence": int, "check_stride": int,
            "workers": int, "out": str, "summary_out": str, "replay_limit": int,
        }
        aliases = {"k": "n_arms", "t": "horizon", "l": "n_plays"}
        params = dict(config.params)

        for raw_key, value in data.items():
            key = raw_key.strip().lower()
            if value is None:
                continue
            if key.startswith(PARAM_PREFIX):
                params[key[len(PARAM_PREFIX):]] = str(value).strip()
                continue
            key = aliases.get(key, key)
            if key in ("policy", "policies"):
                config.policies = cls._parse_policies(value)
            elif key == "params":
                params.update({str(k): str(v) for k, v in dict(value).items()})
            elif key == "record_selections":
                config.record_selections = str(value).strip().lower() in ("1", "true", "tak", "yes")
            elif key in casts:
                try:
                    setattr(config, key, casts[key](str(value).strip()))
                except ValueError:
                    raise ConfigurationError(f"{key}: niepoprawna wartość '{value}'")
            else:
                raise ConfigurationError(f"Nieznany klucz konfiguracji: '{raw_key}'")

        config.params = params
        return config

    def to_dict(self) -> Dict[str, Any]:
        """Konwertuje konfigurację do słownika."""
        return {
            "env": self.env,
            "policies": list(self.policies),
            "n_arms": self.n_arms,
            "horizon": self.horizon,
            "n_plays": self.n_plays,
            "runs": self.runs,
            "seed": self.seed,
            "delta": self.delta,
            "cadence": self.cadence,
            "check_stride": self.check_stride,
            "workers": self.workers,
            "out": self.out,
            "summary_out": self.summary_out,
            "params": dict(self.params),
            "record_selections": self.record_selections,
            "replay_limit": self.replay_limit,
        }

    @classmethod
    def from_defaults(cls, defaults: SimulationDefaults) -> 'ExperimentConfig':
        """Tworzy konfigurację z wartości domyślnych (środowisko SIM_*)."""
        return cls(
            n_arms=defaults.n_arms,
            horizon=defaults.horizon,
            n_plays=defaults.n_plays,
            runs=defaults.runs,
            seed=defaults.seed,
            delta=defaults.delta,
            cadence=defaults.cadence,
            check_stride=defaults.check_stride,
            workers=defaults.workers,
        )

    def merged(self, overrides: Dict[str, Any]) -> 'ExperimentConfig':
        """
        Zwraca nową konfigurację z nadpisanymi polami.

        Wartości None są pomijane; `params` są łączone.
        """
        data = self.to_dict()
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "params":
                data["params"] = {**data["params"], **value}
            else:
                data[key] = value
        return ExperimentConfig.from_dict(data)

    @staticmethod
    def _parse_policies(value: Any) -> List[str]:
        if isinstance(value, (list, tuple)):
            return [str(v).strip().lower() for v in value if str(v).strip()]
        return [p.strip().lower() for p in str(value).split(",") if p.strip()]


def load_config_file(path: str) -> Dict[str, Optional[str]]:
    """
    Wczytuje plik konfiguracyjny klucz=wartość (format .env, komentarze '#').

    Args:
        path: Ścieżka do pliku

    Returns:
        Słownik surowych wartości

    Raises:
        OSError: Gdy pliku nie da się odczytać
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Nie znaleziono pliku konfiguracyjnego: {path}")
    values = dotenv_values(path, encoding='utf-8')
    logging.info(f"Wczytano plik konfiguracyjny {path} ({len(values)} kluczy)")
    return dict(values)


def parse_param_overrides(items: Optional[List[str]]) -> Dict[str, str]:
    """
    Zamienia listę 'klucz=wartość' na słownik hiperparametrów.

    Raises:
        ConfigurationError: Element bez znaku '='
    """
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigurationError(f"--param: oczekiwano klucz=wartość, podano '{item}'")
        key, value = item.split("=", 1)
        params[key.strip().lower()] = value.strip()
    return params
