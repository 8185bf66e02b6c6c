"""Significant wave height forecasting from hourly buoy records.

The pipeline: rolling windows over a cleaned multivariate series, wavelet
and Fourier feature maps per window, a small convolutional encoder over
those maps, energy-weighted fusion of the encoded sequence with the raw
window, and an LSTM decoder producing a point forecast per horizon.
"""

__version__ = "0.1.0"
