"""
Entry point для запуска magsig как модуля
"""
from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
