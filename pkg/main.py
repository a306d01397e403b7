"""
Punkt wejścia symulatora niestacjonarnych bandytów.
"""
import sys
import logging
from pathlib import Path

# Dodaj katalog główny do ścieżki Python
sys.path.insert(0, str(Path(__file__).parent))

try:
    from cli.app import SimulatorApp
except ImportError as e:
    print(f"Błąd importu: {e}")
    print("Upewnij się, że wszystkie wymagane moduły są zainstalowane (pip install -r requirements.txt).")
    sys.exit(1)


def main():
    """Główna funkcja aplikacji."""
    try:
        app = SimulatorApp()
        sys.exit(app.run())

    except Exception as e:
        logging.critical(f"Krytyczny błąd aplikacji: {e}")
        print(f"Krytyczny błąd: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
