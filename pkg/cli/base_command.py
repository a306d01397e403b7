"""
Bazowa klasa dla podkomend CLI.
"""
import sys
import argparse
from abc import ABC, abstractmethod
from contextlib import contextmanager
from typing import Iterator, Optional, TextIO

import pandas as pd

from config import AppConfig


class BaseCommand(ABC):
    """Bazowa klasa dla wszystkich podkomend."""

    name = ""
    help = ""

    def __init__(self, config: AppConfig):
        """
        Inicjalizuje komendę.

        Args:
            config: Konfiguracja aplikacji (wartości domyślne)
        """
        self.config = config

    def register(self, subparsers) -> argparse.ArgumentParser:
        """
        Rejestruje parser podkomendy.

        Args:
            subparsers: Obiekt zwrócony przez add_subparsers

        Returns:
            Utworzony parser
        """
        parser = subparsers.add_parser(self.name, help=self.help, description=self.help)
        self.add_arguments(parser)
        parser.set_defaults(command=self)
        return parser

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Dodaje argumenty podkomendy."""
        pass

    @abstractmethod
    def execute(self, args: argparse.Namespace) -> int:
        """
        Wykonuje podkomendę.

        Returns:
            Kod wyjścia
        """
        pass

    @contextmanager
    def open_output(self, path: str) -> Iterator[TextIO]:
        """Otwiera plik wyjściowy lub stdout dla '-'."""
        if path in (None, "-"):
            yield sys.stdout
            return
        with open(path, "w", encoding="utf-8", newline="") as handle:
            yield handle

    def write_frame(self, frame: pd.DataFrame, path: str, float_format: Optional[str] = None) -> None:
        """Zapisuje ramkę jako CSV do pliku lub na stdout (domyślnie w formacie SIM_FLOAT_FORMAT)."""
        if float_format is None:
            float_format = self.config.output.float_format
        with self.open_output(path) as handle:
            frame.to_csv(handle, index=False, lineterminator='\n', float_format=float_format)
