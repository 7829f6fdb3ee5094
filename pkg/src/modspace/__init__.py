"""Discrete Gabor analysis on modulation spaces, step multipliers and STFT products."""

from .grid import GridSpec, SampledSignal, fourier, sample
from .windows import WindowPair, WindowSpec, make_window_pair

__all__ = ["GridSpec", "SampledSignal", "WindowPair", "WindowSpec", "fourier", "make_window_pair", "sample"]
__version__ = "0.1.0"
