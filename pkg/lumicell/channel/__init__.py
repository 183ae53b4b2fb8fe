"""
Оптический канал: ламбертовская модель и суперпозиция сигналов светильников.
"""

from .optical import channel_gain, gain_field, normalized_tx_power, rss_model, superpose

__all__ = ["channel_gain", "gain_field", "normalized_tx_power", "rss_model", "superpose"]
