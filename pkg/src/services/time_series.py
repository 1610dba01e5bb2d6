"""Statistics of sampled observables: window averages, dominant frequency, peaks and
exponential envelope fits."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize, signal
from scipy.integrate import trapezoid

from src.core.errors import InvalidParameterException, NumericalException

logger = logging.getLogger(__name__)

Window = Tuple[float, float]

DEFAULT_WINDOW: Window = (5.0, 200.0)
_GRID_SLACK = 1e-9


@dataclass(frozen=True)
class Series:
    """One observable sampled on a uniform time grid."""

    times: np.ndarray
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise InvalidParameterException(
                f"series '{self.name}' has {self.values.size} values for {self.times.size} times"
            )

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    def restrict(self, window: Optional[Window]) -> "Series":
        """Samples with t0 ≤ t ≤ t1.

        Raises:
            InvalidParameterException: If the window leaves the grid or holds < 2 samples
        """
        if window is None:
            return self
        t0, t1 = window
        if t0 < self.times[0] - _GRID_SLACK or t1 > self.times[-1] + _GRID_SLACK or t0 >= t1:
            raise InvalidParameterException(
                f"window [{t0}, {t1}] is not inside the grid "
                f"[{self.times[0]}, {self.times[-1]}]"
            )
        inside = (self.times >= t0 - _GRID_SLACK) & (self.times <= t1 + _GRID_SLACK)
        if np.count_nonzero(inside) < 2:
            raise InvalidParameterException(f"window [{t0}, {t1}] holds fewer than two samples")
        return Series(self.times[inside], self.values[inside], self.name)


def _defined(series: Series) -> Series:
    if not np.all(np.isfinite(series.values)):
        raise InvalidParameterException(f"series '{series.name}' is undefined inside the window")
    return series


def time_average(series: Series, window: Optional[Window] = DEFAULT_WINDOW) -> float:
    """Trapezoidal mean over the window."""
    part = _defined(series.restrict(window))
    span = part.times[-1] - part.times[0]
    return float(trapezoid(part.values, part.times) / span)


def time_std(series: Series, window: Optional[Window] = DEFAULT_WINDOW) -> float:
    """Square root of the trapezoidal mean of the squared deviation."""
    part = _defined(series.restrict(window))
    span = part.times[-1] - part.times[0]
    mean = trapezoid(part.values, part.times) / span
    return float(np.sqrt(trapezoid((part.values - mean) ** 2, part.times) / span))


def _parabolic_offset(left: float, centre: float, right: float) -> float:
    curvature = left - 2 * centre + right
    if curvature >= 0:
        return 0.0
    return 0.5 * (left - right) / curvature


def dominant_frequency(series: Series, window: Optional[Window] = DEFAULT_WINDOW) -> float:
    """Frequency of the largest non-zero peak of the mean-subtracted periodogram.

    A signal cos(2π f t) with t in units of τ₀ is reported as f (in units of Ω = 1/τ₀).

    Raises:
        NumericalException: If the series carries no oscillation or the window is shorter
            than two periods
    """
    part = _defined(series.restrict(window))
    span = part.times[-1] - part.times[0]
    freqs, power = signal.periodogram(
        part.values, fs=1.0 / part.dt, detrend="constant", nfft=8 * part.values.size
    )
    freqs, power = freqs[1:], power[1:]
    if power.size < 3 or power.max() <= 1e-30:
        raise NumericalException(f"series '{series.name}' has no oscillation to analyse")
    peak = int(np.argmax(power))
    frequency = freqs[peak]
    if 0 < peak < power.size - 1:
        offset = _parabolic_offset(power[peak - 1], power[peak], power[peak + 1])
        frequency += offset * (freqs[1] - freqs[0])
    if span * frequency < 2.0:
        raise NumericalException(
            f"window of {span:g} τ₀ is shorter than two periods of f = {frequency:.4g}"
        )
    return float(frequency)


def local_maxima(series: Series) -> List[Tuple[float, float]]:
    """Interior local maxima (3-point stencil) refined by a parabola through the stencil."""
    t, v = series.times, series.values
    peaks = []
    for i in range(1, v.size - 1):
        left, centre, right = v[i - 1], v[i], v[i + 1]
        if not (np.isfinite(left) and np.isfinite(centre) and np.isfinite(right)):
            continue
        if left < centre >= right:
            offset = _parabolic_offset(left, centre, right)
            peaks.append(
                (float(t[i] + offset * series.dt), float(centre - 0.25 * (left - right) * offset))
            )
    return peaks


def global_maximum(series: Series, window: Optional[Window] = None) -> Tuple[float, float]:
    """Location and height of the largest sample, refined when it is interior."""
    part = series.restrict(window)
    i = int(np.nanargmax(part.values))
    t, v = part.times, part.values
    if 0 < i < v.size - 1 and np.isfinite(v[i - 1]) and np.isfinite(v[i + 1]):
        offset = _parabolic_offset(v[i - 1], v[i], v[i + 1])
        return float(t[i] + offset * part.dt), float(v[i] - 0.25 * (v[i - 1] - v[i + 1]) * offset)
    return float(t[i]), float(v[i])


@dataclass(frozen=True)
class EnvelopeFit:
    """Least-squares fit A·exp(−λt) to the local maxima of a series."""

    amplitude: float
    rate: float
    n_maxima: int


def _decay(t, amplitude, rate):
    return amplitude * np.exp(-rate * t)


def envelope_exponential_fit(series: Series) -> EnvelopeFit:
    """Fit the decay of a series' envelope.

    Raises:
        NumericalException: If fewer than 3 local maxima exist or the fit does not converge
    """
    peaks = local_maxima(series)
    if len(peaks) < 3:
        raise NumericalException(
            f"envelope fit needs at least 3 local maxima, series '{series.name}' has {len(peaks)}"
        )
    times, heights = (np.array(values) for values in zip(*peaks))
    try:
        params, _ = optimize.curve_fit(
            _decay, times, heights, p0=[max(heights[0], 1e-12), 0.1], maxfev=10000
        )
    except RuntimeError as exc:
        raise NumericalException(f"envelope fit did not converge: {exc}") from exc
    logger.debug(f"Envelope fit over {len(peaks)} maxima: A={params[0]:.4g} rate={params[1]:.4g}")
    return EnvelopeFit(amplitude=float(params[0]), rate=float(params[1]), n_maxima=len(peaks))
