"""
Podkomenda `adwin`: samodzielny detektor na strumieniu wartości.
"""
import sys
import argparse
from typing import List, TextIO

from cli.base_command import BaseCommand
from exceptions import DomainError
from harness import run_adwin_stream


class AdwinCommand(BaseCommand):
    """Czyta po jednej wartości w linii i wypisuje t,estimate,detected,window_size."""

    name = "adwin"
    help = "Detektor ADWIN na strumieniu wartości z [0,1]"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--delta", type=float, help="Poziom ufności (domyślnie SIM_DELTA)")
        parser.add_argument("--input", default="-", help="Plik wejściowy lub '-' dla stdin")
        parser.add_argument("--out", default="-", help="Plik CSV lub '-' dla stdout")
        parser.add_argument("--check-stride", dest="check_stride", type=int,
                            help="Co który punkt podziału sprawdzać (1 = dokładnie)")
        parser.add_argument("--T", dest="horizon", type=int,
                            help="Horyzont strumienia; dłuższe wejście jest błędem")

    def execute(self, args: argparse.Namespace) -> int:
        delta = args.delta if args.delta is not None else self.config.simulation.delta
        stride = args.check_stride if args.check_stride is not None else self.config.simulation.check_stride
        if args.input == "-":
            values = self.read_values(sys.stdin)
        else:
            with open(args.input, "r", encoding="utf-8") as handle:
                values = self.read_values(handle)
        self.write_frame(run_adwin_stream(values, delta, check_stride=stride,
                                          horizon=args.horizon), args.out)
        return 0

    @staticmethod
    def read_values(handle: TextIO) -> List[float]:
        """
        Wczytuje wartości (puste linie są pomijane).

        Raises:
            DomainError: wartość nie jest liczbą
        """
        values = []
        for line_number, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise DomainError(f"Linia {line_number}: '{text}' nie jest liczbą")
        return values
