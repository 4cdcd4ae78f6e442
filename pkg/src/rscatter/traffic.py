"""Pareto modeling of WiFi on/off durations.

Durations are in microseconds throughout.  The same MLE routine fits both
states: scale_min is the sample minimum (the likelihood is monotonically
increasing in it) and shape = N / (sum log x_i - N log scale_min).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTraceError,
    EmptyTraceError,
    InfiniteMeanError,
    ParameterError,
    TraceParseError,
)


@dataclass(frozen=True)
class ParetoParams:
    """Shape and scale of one Pareto law (off: lambda/tau_m, on: mu/delta_m)."""

    shape: float
    scale_min: float

    def __post_init__(self):
        if not (self.shape > 0):
            raise ParameterError(f"shape must be positive, got {self.shape}")
        if not (self.scale_min > 0):
            raise ParameterError(f"scale_min must be positive, got {self.scale_min}")


@dataclass(frozen=True)
class TrafficStats:
    """Fitted Pareto parameters for the off and on states."""

    off: ParetoParams
    on: ParetoParams


@dataclass
class DurationTrace:
    """Measured alternating on/off durations in microseconds."""

    off_durations: np.ndarray
    on_durations: np.ndarray

    def __post_init__(self):
        self.off_durations = np.asarray(self.off_durations, dtype=float)
        self.on_durations = np.asarray(self.on_durations, dtype=float)
        if np.any(self.off_durations <= 0) or np.any(self.on_durations <= 0):
            raise ParameterError("all durations must be positive")


def pareto_pdf(tau, p):
    """Density shape * scale^shape / tau^(shape+1) for tau >= scale, else 0."""
    tau = np.asarray(tau, dtype=float)
    out = np.where(
        tau >= p.scale_min,
        p.shape * p.scale_min**p.shape / np.maximum(tau, p.scale_min) ** (p.shape + 1),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def pareto_cdf(tau, p):
    tau = np.asarray(tau, dtype=float)
    out = np.where(tau >= p.scale_min, 1.0 - (p.scale_min / np.maximum(tau, p.scale_min)) ** p.shape, 0.0)
    return float(out) if out.ndim == 0 else out


def pareto_sample(rng, p, size=None):
    """Inverse-CDF sampler: scale * U^(-1/shape) with U uniform on (0, 1]."""
    u = 1.0 - rng.random(size)  # (0, 1]
    return p.scale_min * u ** (-1.0 / p.shape)


def pareto_mean(p):
    """Mean shape*scale/(shape-1); diverges for shape <= 1."""
    if p.shape <= 1.0:
        raise InfiniteMeanError(
            f"Pareto mean is infinite for shape={p.shape} (need shape > 1)"
        )
    return p.shape * p.scale_min / (p.shape - 1.0)


def mle_fit(samples):
    """Maximum-likelihood Pareto fit of one duration sequence."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ParameterError(f"need at least 2 samples to fit, got {x.size}")
    if np.any(x <= 0):
        raise ParameterError("all samples must be positive")
    scale = float(x.min())
    denom = float(np.sum(np.log(x))) - x.size * math.log(scale)
    if denom <= 0:
        raise DegenerateTraceError("all samples equal; shape estimate is undefined")
    return ParetoParams(shape=x.size / denom, scale_min=scale)


def log_likelihood(samples, p):
    """Pareto log-likelihood of a sample set; -inf if any sample < scale_min."""
    x = np.asarray(samples, dtype=float)
    if np.any(x < p.scale_min):
        return -math.inf
    return (
        x.size * math.log(p.shape)
        + x.size * p.shape * math.log(p.scale_min)
        - (p.shape + 1.0) * float(np.sum(np.log(x)))
    )


def fit_stats(trace):
    """Fit both states of a trace; Eqs. for on and off are identical in form."""
    return TrafficStats(off=mle_fit(trace.off_durations), on=mle_fit(trace.on_durations))


def measure_trace(power_samples, sample_rate, power_threshold):
    """Run-length encode a thresholded power sequence into on/off durations.

    Leading and trailing partial runs are discarded to avoid biasing short
    durations.  Duration of a run = run_length / sample_rate * 1e6 us.
    """
    if sample_rate <= 0:
        raise ParameterError(f"sample_rate must be positive, got {sample_rate}")
    power = np.asarray(power_samples, dtype=float)
    if power.size == 0:
        raise EmptyTraceError("empty power sequence")
    above = power > power_threshold
    edges = np.flatnonzero(np.diff(above.astype(np.int8))) + 1
    if edges.size == 0:
        raise EmptyTraceError("no threshold crossings in power sequence")
    # runs between the first and last crossing are complete
    starts = edges[:-1]
    ends = edges[1:]
    lengths = ends - starts
    states = above[starts]
    us = lengths / sample_rate * 1e6
    return DurationTrace(off_durations=us[~states], on_durations=us[states])


def save_trace(trace, path):
    """Write the trace CSV: one `state,duration_us` record per run.

    Runs are interleaved in temporal order starting with the on state;
    leftover entries of the longer sequence follow at the end.
    """
    on = list(trace.on_durations)
    off = list(trace.off_durations)
    with open(path, "w") as fh:
        fh.write("# state,duration_us\n")
        for i in range(max(len(on), len(off))):
            if i < len(on):
                fh.write(f"on,{float(on[i])!r}\n")
            if i < len(off):
                fh.write(f"off,{float(off[i])!r}\n")


def load_trace(path):
    """Parse a trace CSV; rejects nonpositive durations and malformed lines."""
    on = []
    off = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise TraceParseError(lineno, f"expected 'state,duration_us', got {line!r}")
            state, dur_s = parts[0].strip().lower(), parts[1].strip()
            if state not in ("on", "off"):
                raise TraceParseError(lineno, f"state must be 'on' or 'off', got {state!r}")
            try:
                dur = float(dur_s)
            except ValueError:
                raise TraceParseError(lineno, f"bad duration {dur_s!r}") from None
            if dur <= 0:
                raise TraceParseError(lineno, f"duration must be positive, got {dur}")
            (on if state == "on" else off).append(dur)
    return DurationTrace(off_durations=np.array(off), on_durations=np.array(on))
