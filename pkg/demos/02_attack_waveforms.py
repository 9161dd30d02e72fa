"""
The five falsification waveforms
================================

Applies each attack kind to the same slowly decaying reference signal and
plots the transmitted (falsified) measurement next to the true one.  Every
waveform decomposes as ``falsified = true * scale(t) + add(t)``; the table
printed below shows the decomposition at a probe instant inside the window.
"""

from pathlib import Path

import numpy as np

from agcdetect._svg import line_plot
from agcdetect.attacks import (AttackKind, AttackSpec, Channel,
                               attack_coefficients)

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

times = np.arange(0.0, 60.0, 0.1)
true = 0.2 * np.exp(-times / 18.0) * np.cos(times / 3.0)

specs = {
    "step": AttackSpec(AttackKind.STEP, Channel.F1, start_time=15.0,
                       magnitude=0.1),
    "ramp": AttackSpec(AttackKind.RAMP, Channel.F1, start_time=15.0,
                       duration=25.0, ramp_rate=0.006),
    "pulse": AttackSpec(AttackKind.PULSE, Channel.F1, start_time=15.0,
                        duration=25.0, magnitude=0.1),
    "scaling": AttackSpec(AttackKind.SCALING, Channel.F1, start_time=15.0,
                          duration=25.0, scale_factor=0.8),
    "combined": AttackSpec(AttackKind.COMBINED, Channel.F1, start_time=15.0,
                           duration=25.0, ramp_rate=0.006, scale_factor=0.8),
}

series = {"true": true}
print(f"{'kind':10s} {'scale(30s)':>10s} {'add(30s)':>10s}")
for name, spec in specs.items():
    scale, add = attack_coefficients(spec, times)
    series[name] = true * scale + add
    probe = np.searchsorted(times, 30.0)
    print(f"{name:10s} {scale[probe]:10.3f} {add[probe]:10.4f}")

svg = line_plot(times, series, title="falsification waveforms",
                y_label="delta_f1 (Hz)")
(out_dir / "attack_waveforms.svg").write_text(svg)
print(f"wrote {out_dir / 'attack_waveforms.svg'}")
