"""
Aplikacja wiersza poleceń symulatora.
"""
import os
import sys
import argparse
import logging
import threading
from typing import Optional, List

from config import AppConfig
from exceptions import (ConfigurationError, ReplayLogError, OperationCancelledError,
                        DomainError, UsageError)
from cli.simulate_command import SimulateCommand
from cli.adwin_command import AdwinCommand
from cli.diagnose_command import DiagnoseCommand
from cli.adwin_error_command import AdwinErrorCommand

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INTERRUPTED = 130


class SimulatorApp:
    """Główna aplikacja: konfiguracja, logowanie i wybór podkomendy."""

    def __init__(self, env_path: Optional[str] = None):
        """
        Inicjalizuje aplikację.

        Args:
            env_path: Ścieżka do pliku .env (domyślnie .env w katalogu roboczym)
        """
        self.env_path = env_path or os.path.join(os.getcwd(), ".env")
        self.config: Optional[AppConfig] = None
        self.stop_event = threading.Event()

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="main.py",
            description="Symulator niestacjonarnych bandytów z detektorem ADWIN",
        )
        parser.add_argument("--log-file", dest="log_file", help="Plik logu (domyślnie SIM_LOG_FILE)")
        parser.add_argument("--log-level", dest="log_level",
                            choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Poziom logowania")
        subparsers = parser.add_subparsers(dest="command_name", required=True)

        commands = [
            SimulateCommand(self.config, stop_event=self.stop_event),
            AdwinCommand(self.config),
            DiagnoseCommand(self.config),
            AdwinErrorCommand(self.config),
        ]
        for command in commands:
            command.register(subparsers)
        return parser

    def _setup_logging(self, level_name: str, log_file: Optional[str]) -> None:
        """Konfiguruje system logowania."""
        level = getattr(logging, level_name.upper(), logging.INFO)
        root = logging.getLogger('')
        for handler in list(root.handlers):
            root.removeHandler(handler)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s'))
        logging.basicConfig(level=level, handlers=[console_handler])

        if log_file:
            try:
                file_handler = logging.FileHandler(log_file, mode='a', encoding='utf-8')
                file_handler.setFormatter(logging.Formatter(
                    '%(asctime)s - %(levelname)s - %(name)s - %(funcName)s - %(message)s',
                    datefmt='%Y-%m-%d %H:%M:%S'
                ))
                root.addHandler(file_handler)
            except OSError as e:
                logging.warning(f"Nie udało się otworzyć pliku logu {log_file}: {e}")
        root.setLevel(level)

    def run(self, argv: Optional[List[str]] = None) -> int:
        """
        Uruchamia aplikację.

        Args:
            argv: Argumenty (domyślnie sys.argv[1:])

        Returns:
            Kod wyjścia: 0 sukces, 2 błąd konfiguracji, 3 błąd wejścia/wyjścia
        """
        try:
            self.config = AppConfig.from_environment(self.env_path)
        except ConfigurationError as e:
            print(f"Błąd konfiguracji: {e}", file=sys.stderr)
            return EXIT_CONFIG

        parser = self._build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else EXIT_CONFIG

        self._setup_logging(args.log_level or self.config.logging.level,
                            args.log_file or self.config.logging.log_file)

        try:
            return args.command.execute(args)
        except (ConfigurationError, DomainError, UsageError) as e:
            logging.error(f"Błąd konfiguracji: {e}")
            return EXIT_CONFIG
        except (ReplayLogError, OSError) as e:
            logging.error(f"Błąd wejścia/wyjścia: {e}")
            return EXIT_IO
        except OperationCancelledError:
            logging.warning("Operacja została anulowana")
            return EXIT_INTERRUPTED
        except KeyboardInterrupt:
            self.stop_event.set()
            logging.info("Aplikacja przerwana przez Ctrl+C")
            return EXIT_INTERRUPTED
        except Exception as e:
            logging.error(f"Nieoczekiwany błąd aplikacji: {e}")
            return EXIT_FAILURE
