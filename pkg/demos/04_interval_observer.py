"""Measurement-driven interval observer on a discrete linear benchmark.

Simulates one noisy trajectory, generates output measurements, and shows how
the predict/update observer keeps the state enclosure bounded while the
open-loop tube keeps growing.

Run: python3 demos/04_interval_observer.py
"""

from pathlib import Path

import numpy as np

from mixmono import (
    REMAINDER,
    Measurement,
    eval_point,
    load_bundled,
    observe,
    reach_tube,
    write_measurements,
    write_tube,
)

OUT = Path(__file__).parent / "output"
STEPS = 30


def main():
    OUT.mkdir(exist_ok=True)
    model = load_bundled("scott_example")
    obs = model.observation
    rng = np.random.default_rng(7)

    x = np.array(model.init.midpoint())
    measurements = []
    for k in range(STEPS + 1):
        v = rng.uniform(obs.noise.lo, obs.noise.hi)
        y = np.array([eval_point(e, x) for e in obs.exprs]) + np.asarray(obs.V) @ v
        measurements.append(Measurement(t=k * model.dt, y=tuple(y)))
        if k < STEPS:
            w = rng.uniform(model.disturbance.lo, model.disturbance.hi)
            x = np.array(
                [eval_point(e, np.concatenate([x, w])) for e in model.dynamics]
            )

    mpath = OUT / "scott_measurements.csv"
    write_measurements(measurements, mpath)

    open_loop = reach_tube(model, REMAINDER, STEPS)
    closed = observe(model, REMAINDER, measurements)
    print(f"{'step':>4s}  {'open-loop width':>16s}  {'observer width':>15s}")
    for k in range(0, STEPS + 1, 5):
        print(f"{k:4d}  {max(open_loop[k].box.widths()):16.4f}  "
              f"{max(closed[k].box.widths()):15.4f}")

    tube_path = OUT / "scott_observer.csv"
    write_tube(closed, "csv", tube_path, model.state_names)
    print(f"\nwrote {mpath} and {tube_path}")
    print("the *_lo_upd/*_hi_upd columns carry the post-measurement bounds")


if __name__ == "__main__":
    main()
