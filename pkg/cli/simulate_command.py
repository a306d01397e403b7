"""
Podkomenda `simulate`: eksperymenty bandytowe na środowiskach syntetycznych
lub na logu do ewaluacji offline.
"""
import argparse
import logging
import threading
from typing import Optional, Dict, Any, List

from cli.base_command import BaseCommand
from config import ExperimentConfig, load_config_file, parse_param_overrides
from exceptions import ConfigurationError
from harness import run_experiment, write_outputs, run_delta_sweep


class SimulateCommand(BaseCommand):
    """Uruchamia eksperyment i zapisuje surowe wyniki oraz podsumowanie."""

    name = "simulate"
    help = "Symulacja polityk bandytowych (regret lub skumulowana nagroda)"

    def __init__(self, config, stop_event: Optional[threading.Event] = None):
        super().__init__(config)
        self.stop_event = stop_event or threading.Event()

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--env", help="stationary | gradual | abrupt | abrupt_local | replay:ŚCIEŻKA")
        parser.add_argument("--policy", help="Polityka lub lista po przecinku, np. adr-ts,ducb")
        parser.add_argument("--K", dest="n_arms", type=int, help="Liczba ramion")
        parser.add_argument("--T", dest="horizon", type=int,
                            help="Horyzont (liczba rund); dla replay limit rund, domyślnie długość logu")
        parser.add_argument("--L", dest="n_plays", type=int, help="Liczba ramion wybieranych w rundzie")
        parser.add_argument("--runs", type=int, help="Liczba przebiegów")
        parser.add_argument("--seed", type=int, help="Ziarno bazowe (przebieg r używa seed + r)")
        parser.add_argument("--delta", type=float, help="Poziom ufności detektorów")
        parser.add_argument("--cadence", type=int, help="Zapis metryk co ile rund")
        parser.add_argument("--workers", type=int, help="Liczba procesów")
        parser.add_argument("--check-stride", dest="check_stride", type=int,
                            help="Co który punkt podziału sprawdzać (1 = dokładnie)")
        parser.add_argument("--out", help="Plik CSV z wierszami policy,run,t,metric,value")
        parser.add_argument("--summary-out", dest="summary_out", help="Plik CSV z podsumowaniem")
        parser.add_argument("--param", action="append", metavar="KLUCZ=WARTOŚĆ",
                            help="Hiperparametr polityki (delta, check_stride, gamma, window, batch)")
        parser.add_argument("--config", help="Plik konfiguracyjny klucz=wartość")
        parser.add_argument("--sweep-deltas", dest="sweep_deltas",
                            help="Lista wartości δ po przecinku; zapisuje tylko podsumowanie")

    def build_config(self, args: argparse.Namespace) -> ExperimentConfig:
        """
        Składa konfigurację: wartości domyślne < SIM_* < plik < flagi CLI.

        Raises:
            ConfigurationError: niepoprawna konfiguracja
        """
        experiment = ExperimentConfig.from_defaults(self.config.simulation)
        experiment.out = self.config.output.out
        experiment.summary_out = self.config.output.summary_out

        if args.config:
            experiment = experiment.merged(load_config_file(args.config))

        overrides: Dict[str, Any] = {
            "env": args.env,
            "policies": args.policy,
            "n_arms": args.n_arms,
            "horizon": args.horizon,
            "n_plays": args.n_plays,
            "runs": args.runs,
            "seed": args.seed,
            "delta": args.delta,
            "cadence": args.cadence,
            "workers": args.workers,
            "check_stride": args.check_stride,
            "out": args.out,
            "summary_out": args.summary_out,
            "params": parse_param_overrides(args.param) or None,
        }
        experiment = experiment.merged(overrides)
        if experiment.is_replay and args.horizon is not None:
            experiment.replay_limit = args.horizon
        experiment.validate()
        return experiment

    def execute(self, args: argparse.Namespace) -> int:
        experiment = self.build_config(args)
        if not experiment.out and not (args.sweep_deltas and experiment.summary_out):
            raise ConfigurationError("out: podaj --out (plik CSV z wynikami)")

        if args.sweep_deltas:
            deltas = self._parse_deltas(args.sweep_deltas)
            summary = run_delta_sweep(experiment, deltas, stop_event=self.stop_event)
            path = experiment.summary_out or experiment.out
            self.write_frame(summary, path)
            logging.info(f"Zapisano przegląd δ do {path}")
            return 0

        records = run_experiment(experiment, stop_event=self.stop_event)
        write_outputs(records, experiment, float_format=self.config.output.float_format)
        return 0

    @staticmethod
    def _parse_deltas(raw: str) -> List[float]:
        try:
            deltas = [float(item) for item in raw.split(",") if item.strip()]
        except ValueError:
            raise ConfigurationError(f"--sweep-deltas: niepoprawna lista '{raw}'")
        if not deltas:
            raise ConfigurationError("--sweep-deltas: pusta lista")
        return deltas
