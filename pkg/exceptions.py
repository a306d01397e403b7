"""
Moduł z definicjami własnych wyjątków symulatora.
"""


class SimulatorError(Exception):
    """Bazowy wyjątek dla błędów symulatora."""
    pass


class DomainError(SimulatorError, ValueError):
    """Argument spoza dziedziny (np. wartość spoza [0,1], delta spoza (0,1))."""
    pass


class UsageError(SimulatorError):
    """Naruszenie kontraktu użycia (np. średnia z pustego okna, L > K)."""
    pass


class ConfigurationError(SimulatorError):
    """Niepoprawna konfiguracja eksperymentu."""
    pass


class OperationCancelledError(SimulatorError):
    """Wyjątek wyrzucany gdy eksperyment zostanie anulowany przez użytkownika."""
    pass


class ReplayLogError(SimulatorError):
    """Bazowy błąd logu do ewaluacji offline."""
    pass


class ReplayParseError(ReplayLogError):
    """Błędny wiersz w logu."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"Linia {line_number}: {message}")
        self.line_number = line_number


class ReplaySchemaError(ReplayLogError):
    """Nieznany identyfikator ramienia lub zły nagłówek logu."""
    pass


class ReplayExhaustedError(ReplayLogError):
    """Log został w całości wykorzystany."""
    pass
