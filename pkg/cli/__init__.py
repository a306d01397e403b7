"""
Moduł CLI aplikacji.
"""
from .app import SimulatorApp
from .base_command import BaseCommand
from .simulate_command import SimulateCommand
from .adwin_command import AdwinCommand
from .diagnose_command import DiagnoseCommand
from .adwin_error_command import AdwinErrorCommand

__all__ = [
    'SimulatorApp',
    'BaseCommand',
    'SimulateCommand',
    'AdwinCommand',
    'DiagnoseCommand',
    'AdwinErrorCommand'
]
