"""
magsig: локализация по магнитным суперструктурам с помощью магнитометра смартфона.
Симуляция записей, обработка сигнала, признаки, классификаторы, оценка и эксперименты.
"""
from .errors import MagsigError

__version__ = "0.1.0"

__all__ = ["MagsigError", "__version__"]
