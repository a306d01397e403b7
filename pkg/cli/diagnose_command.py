"""
Podkomenda `diagnose`: diagnostyka zmian globalnych środowiska.
"""
import argparse

import pandas as pd

from cli.base_command import BaseCommand
from environments import SyntheticEnvironment


class DiagnoseCommand(BaseCommand):
    """Wypisuje punkty zmian i współczynniki zmian globalnych jako CSV metric,value."""

    name = "diagnose"
    help = "Diagnostyka zmian globalnych środowiska syntetycznego"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--env", required=True, help="stationary | gradual | abrupt | abrupt_local")
        parser.add_argument("--K", dest="n_arms", type=int, help="Liczba ramion")
        parser.add_argument("--T", dest="horizon", type=int, help="Horyzont")
        parser.add_argument("--out", default="-", help="Plik CSV lub '-' dla stdout")

    def execute(self, args: argparse.Namespace) -> int:
        n_arms = args.n_arms if args.n_arms is not None else self.config.simulation.n_arms
        horizon = args.horizon if args.horizon is not None else self.config.simulation.horizon
        diagnostics = SyntheticEnvironment(args.env, n_arms, horizon).diagnostics()

        if not diagnostics.applicable:
            rows = [("applicable", "nie dotyczy")]
        else:
            rows = [("applicable", "tak")]
            if diagnostics.changepoints:
                rows.append(("changepoints", " ".join(str(t) for t in diagnostics.changepoints)))
            rows.append(("ratio_all", diagnostics.ratio_all))
            rows.append(("ratio_nonzero", diagnostics.ratio_nonzero))
        if diagnostics.drift_speed is not None:
            rows.append(("drift_speed", diagnostics.drift_speed))

        self.write_frame(pd.DataFrame(rows, columns=["metric", "value"]), args.out)
        return 0
