"""Fit Pareto on/off statistics from a synthetic excitation trace.

Generates a gate with known heavy-tailed on/off durations, writes it to a
trace CSV, reads it back, and fits both states by maximum likelihood --
the round trip a deployment would do with real channel-power recordings.
"""

import tempfile
from pathlib import Path

import numpy as np

from rscatter import channel, traffic


def main():
    truth_off = traffic.ParetoParams(shape=2.5, scale_min=4.0)
    truth_on = traffic.ParetoParams(shape=2.0, scale_min=100.0)
    stats = traffic.TrafficStats(off=truth_off, on=truth_on)

    rng = np.random.default_rng(2024)
    durations = channel.gate_durations(rng, stats, total_us=500_000)
    trace = traffic.DurationTrace(
        on_durations=durations[0::2], off_durations=durations[1::2]
    )
    print(f"synthesized {len(durations)} alternating runs covering 0.5 s")

    path = Path(tempfile.mkdtemp()) / "trace.csv"
    traffic.save_trace(trace, path)
    fitted = traffic.fit_stats(traffic.load_trace(path))

    print(f"true  off: shape={truth_off.shape:.3f} scale={truth_off.scale_min:.3f} us")
    print(f"fit   off: shape={fitted.off.shape:.3f} scale={fitted.off.scale_min:.3f} us")
    print(f"true  on : shape={truth_on.shape:.3f} scale={truth_on.scale_min:.3f} us")
    print(f"fit   on : shape={fitted.on.shape:.3f} scale={fitted.on.scale_min:.3f} us")

    print(f"mean silent duration: {traffic.pareto_mean(fitted.off):.2f} us "
          f"(true {traffic.pareto_mean(truth_off):.2f} us)")
    print(f"mean busy duration  : {traffic.pareto_mean(fitted.on):.2f} us "
          f"(true {traffic.pareto_mean(truth_on):.2f} us)")


if __name__ == "__main__":
    main()
