"""
One scenario, with and without a falsified tie-line reading
===========================================================

Simulates the two-area loop for a single load disturbance, then repeats
the run with a step falsification injected into the tie-line power
measurement.  Writes both trajectories (CSV + SVG) next to this script.
"""

from pathlib import Path

import numpy as np

from agcdetect.attacks import AttackKind, AttackSpec, Channel, Scenario
from agcdetect.pipeline import write_trajectory_artifacts
from agcdetect.simulation import AgcParameters, SimulationConfig, simulate

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

params = AgcParameters()
config = SimulationConfig(dt=0.005, horizon=80.0, measurement_rate=10.0)

# A 0.04 pu load step in area 1 at t = 10 s, nothing else.
quiet = Scenario(load_area=1, load_magnitude=0.04, load_time=10.0)
base = simulate(params, config, quiet)
write_trajectory_artifacts(base, out_dir / "load_step_only.csv")

# Same disturbance, but from t = 25 s the transmitted tie-line deviation
# is offset by +0.08 pu for 30 s.  The controller chases the lie.
attack = AttackSpec(kind=AttackKind.PULSE, target=Channel.PTIE,
                    start_time=25.0, duration=30.0, magnitude=0.08)
attacked = simulate(params, config,
                    Scenario(load_area=1, load_magnitude=0.04,
                             load_time=10.0, attack=attack))
write_trajectory_artifacts(attacked, out_dir / "load_step_ptie_pulse.csv")

t = np.asarray(base.times)
late = t >= 25.0    # the attack window and its aftermath
for name, clean, dirty in (
        ("delta_f1 (Hz)", base.measured_delta_f1, attacked.measured_delta_f1),
        ("delta_f2 (Hz)", base.measured_delta_f2, attacked.measured_delta_f2),
        ("delta_Ptie (pu)", base.measured_delta_Ptie,
         attacked.measured_delta_Ptie)):
    clean = np.asarray(clean)[late]
    dirty = np.asarray(dirty)[late]
    print(f"{name:16s} peak after t=25s: quiet {np.abs(clean).max():.4f}   "
          f"attacked {np.abs(dirty).max():.4f}")

# The falsification leaves the pre-attack samples bit-identical.
pre = t < 25.0
assert np.array_equal(np.asarray(base.measured_delta_f1)[pre],
                      np.asarray(attacked.measured_delta_f1)[pre])
print(f"wrote 4 files under {out_dir}")
