"""
Podkomenda `adwin-error`: całkowity błąd estymatora ADWIN na strumieniach testowych.
"""
import argparse

import pandas as pd

from cli.base_command import BaseCommand
from environments import StreamSpec
from exceptions import ConfigurationError
from harness import adwin_error_experiment


class AdwinErrorCommand(BaseCommand):
    """Wypisuje Err(T) dla kolejnych przebiegów jako CSV run,err."""

    name = "adwin-error"
    help = "Błąd Err(T) estymatora ADWIN na generowanych strumieniach"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--stream", default="stationary",
                            choices=["stationary", "abrupt", "gradual", "step"], help="Rodzaj strumienia")
        parser.add_argument("--T", dest="horizon", type=int, default=10000, help="Długość strumienia")
        parser.add_argument("--mean", type=float, default=0.5, help="Średnia strumienia stacjonarnego")
        parser.add_argument("--low", type=float, default=0.2, help="Niższa średnia")
        parser.add_argument("--high", type=float, default=0.8, help="Wyższa średnia")
        parser.add_argument("--changes", type=int, default=1, help="Liczba zmian M")
        parser.add_argument("--speed", type=float, default=0.0, help="Prędkość dryfu b")
        parser.add_argument("--noiseless", action="store_true", help="Strumień bez szumu (same średnie)")
        parser.add_argument("--delta", default="auto", help="Poziom ufności lub 'auto' (1/T^3)")
        parser.add_argument("--runs", type=int, default=100, help="Liczba przebiegów")
        parser.add_argument("--seed", type=int, help="Ziarno bazowe")
        parser.add_argument("--workers", type=int, help="Liczba procesów")
        parser.add_argument("--out", default="-", help="Plik CSV lub '-' dla stdout")

    def execute(self, args: argparse.Namespace) -> int:
        if args.horizon < 1:
            raise ConfigurationError(f"T: musi być >= 1, podano {args.horizon}")
        if args.changes < 0:
            raise ConfigurationError(f"changes: musi być >= 0, podano {args.changes}")
        delta = self.parse_delta(args.delta, args.horizon)
        stream = StreamSpec(kind=args.stream, horizon=args.horizon, mean=args.mean, low=args.low,
                            high=args.high, changes=args.changes, speed=args.speed,
                            noiseless=args.noiseless)
        seed = args.seed if args.seed is not None else self.config.simulation.seed
        workers = args.workers if args.workers is not None else self.config.simulation.workers
        errors = adwin_error_experiment(stream, delta, args.runs, seed=seed, workers=workers)
        frame = pd.DataFrame({"run": range(len(errors)), "err": errors})
        self.write_frame(frame, args.out)
        return 0

    @staticmethod
    def parse_delta(raw: str, horizon: int) -> float:
        """'auto' oznacza δ = 1/T³."""
        if raw == "auto":
            return 1.0 / float(horizon) ** 3 if horizon > 1 else 0.5
        try:
            delta = float(raw)
        except ValueError:
            raise ConfigurationError(f"delta: niepoprawna wartość '{raw}'")
        if not 0.0 < delta < 1.0:
            raise ConfigurationError(f"delta: musi należeć do (0,1), podano {delta}")
        return delta
