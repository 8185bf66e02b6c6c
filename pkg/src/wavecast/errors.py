"""Exception hierarchy shared across the package.

Two broad families matter to callers: DataError for anything wrong with
input files or their contents, NumericalError for degenerate or non-finite
arithmetic. The command line maps them to distinct exit codes.
"""

from __future__ import annotations


class WavecastError(Exception):
    """Base class for all package errors."""


class DataError(WavecastError):
    """A problem with input data or on-disk artifacts."""


class MalformedHeader(DataError):
    """Buoy file header is missing or does not match a known layout."""


class EmptyFile(DataError):
    """Input file contains no data rows."""


class NoUsableSegment(DataError):
    """No contiguous gap-free stretch long enough to window."""


class DegenerateVariable(DataError):
    """A variable is constant on the training split; z-scoring is undefined."""


class BadCheckpoint(DataError):
    """Checkpoint file is corrupt, truncated, or not ours."""


class NumericalError(WavecastError):
    """Arithmetic became degenerate or non-finite."""


class NumericalFault(NumericalError):
    """An operation produced NaN or infinity under the finite-value guard."""


class NonFiniteLoss(NumericalError):
    """Training loss left the finite range; the run is aborted."""


class ZeroSpectrum(NumericalError):
    """Signal has no oscillating energy; spectral weights are undefined."""


class DegenerateVariance(NumericalError):
    """A metric that divides by a standard deviation met a constant vector."""


class DisconnectedGraph(WavecastError):
    """backward() was called on a value with no path to any parameter."""
