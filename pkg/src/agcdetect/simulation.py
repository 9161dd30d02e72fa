"""Nonlinear two-area AGC closed-loop simulation.

Fixed-step forward-Euler integration of the classic two-area load-frequency
model with three nonlinearities: governor dead-band (GDB), generation rate
constraint (GRC) and a transport delay on the area control error (ACE).
The control center sees the three communicated channels (delta_f1, delta_f2,
delta_Ptie); attacks on those channels are injected by the caller through
``measured_inputs`` / ``Scenario.attack``, so the loop reacts to falsified
data exactly like the real controller would.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AgcParameters",
    "SimulationConfig",
    "SystemState",
    "Trajectory",
    "NonFiniteStateError",
    "deadband",
    "rate_limit",
    "step_dynamics",
    "simulate",
    "simulate_with_states",
]


class NonFiniteStateError(RuntimeError):
    """Raised when an integration step produces a non-finite state component."""

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


_BIAS_RTOL = 1e-12


@dataclass(frozen=True)
class AgcParameters:
    """Physical constants of the two-area plant.

    Per-area values are (area 1, area 2) pairs.  Defaults are the standard
    two-area load-frequency-control textbook set; every value is
    configurable.  ``bias_B`` is the frequency bias factor 1/R + D and is
    recomputed from the droop and damping when left as ``None``.
    """

    inertia_H: tuple[float, float] = (5.0, 5.0)            # pu*s
    damping_D: tuple[float, float] = (0.00833, 0.00833)    # pu/Hz
    droop_R: tuple[float, float] = (2.4, 2.4)              # Hz/pu
    governor_Tg: tuple[float, float] = (0.08, 0.08)        # s
    turbine_Tt: tuple[float, float] = (0.3, 0.3)           # s
    integral_gain_KI: tuple[float, float] = (0.3, 0.3)     # 1/s
    bias_B: tuple[float, float] | None = None              # pu/Hz
    sync_coeff_Ps: float = 0.545                           # pu/(Hz*s)
    grc_limit: float = 0.1                                 # pu/s
    gdb_width: float = 0.0006                              # pu, total band
    ace_delay_tau: float = 2.0                             # s
    base_frequency: float = 60.0                           # Hz

    def __post_init__(self):
        for name in ("inertia_H", "damping_D", "droop_R", "governor_Tg",
                     "turbine_Tt", "integral_gain_KI"):
            vals = getattr(self, name)
            if len(vals) != 2 or any(v <= 0 for v in vals):
                raise ValueError(f"{name} must be two strictly positive values")
        if self.sync_coeff_Ps <= 0 or self.grc_limit <= 0:
            raise ValueError("sync_coeff_Ps and grc_limit must be > 0")
        if self.gdb_width < 0 or self.ace_delay_tau < 0:
            raise ValueError("gdb_width and ace_delay_tau must be >= 0")
        if self.base_frequency <= 0:
            raise ValueError("base_frequency must be > 0")
        computed = tuple(1.0 / r + d for r, d in zip(self.droop_R, self.damping_D))
        if self.bias_B is None:
            object.__setattr__(self, "bias_B", computed)
        else:
            for given, want in zip(self.bias_B, computed):
                if abs(given - want) > _BIAS_RTOL * abs(want):
                    raise ValueError(
                        f"bias_B must equal 1/droop_R + damping_D "
                        f"(given {given!r}, expected {want!r})")

    def to_dict(self):
        return {
            "inertia_H": list(self.inertia_H),
            "damping_D": list(self.damping_D),
            "droop_R": list(self.droop_R),
            "governor_Tg": list(self.governor_Tg),
            "turbine_Tt": list(self.turbine_Tt),
            "integral_gain_KI": list(self.integral_gain_KI),
            "bias_B": list(self.bias_B),
            "sync_coeff_Ps": self.sync_coeff_Ps,
            "grc_limit": self.grc_limit,
            "gdb_width": self.gdb_width,
            "ace_delay_tau": self.ace_delay_tau,
            "base_frequency": self.base_frequency,
        }

    @classmethod
    def from_dict(cls, d):
        kwargs = dict(d)
        for name in ("inertia_H", "damping_D", "droop_R", "governor_Tg",
                     "turbine_Tt", "integral_gain_KI", "bias_B"):
            if kwargs.get(name) is not None:
                kwargs[name] = tuple(kwargs[name])
        return cls(**kwargs)


@dataclass(frozen=True)
class SimulationConfig:
    """Integrator step, horizon and measurement decimation."""

    dt: float = 0.005              # s
    horizon: float = 80.0          # s
    measurement_rate: float = 10.0  # Hz

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
            raise ValueError("horizon must be an integral number of dt steps")
        per = 1.0 / (self.dt * self.measurement_rate)
        if abs(per - round(per)) > 1e-9 or round(per) < 1:
            raise ValueError("measurement_rate must divide 1/dt")
        count = self.horizon * self.measurement_rate
        if abs(count - round(count)) > 1e-9:
            raise ValueError("horizon * measurement_rate must be integral")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def steps_per_sample(self) -> int:
        return int(round(1.0 / (self.dt * self.measurement_rate)))

    @property
    def sample_count(self) -> int:
        return int(round(self.horizon * self.measurement_rate))

    def to_dict(self):
        return {"dt": self.dt, "horizon": self.horizon,
                "measurement_rate": self.measurement_rate}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class SystemState:
    """Full integrator state.

    ``ace_delay_buffer`` is a per-area ring of the most recent ACE values;
    its length is round(ace_delay_tau / dt) and ``buffer_pos`` points at the
    oldest entry (the one about to be consumed and overwritten).
    """

    delta_f: list[float] = field(default_factory=lambda: [0.0, 0.0])       # Hz
    delta_Pm: list[float] = field(default_factory=lambda: [0.0, 0.0])      # pu
    delta_Pv: list[float] = field(default_factory=lambda: [0.0, 0.0])      # pu
    integrator_x: list[float] = field(default_factory=lambda: [0.0, 0.0])  # pu
    delta_Ptie: float = 0.0                                                # pu
    ace_delay_buffer: list[list[float]] = field(default_factory=lambda: [[], []])
    buffer_pos: int = 0

    @classmethod
    def zero(cls, params: AgcParameters, dt: float) -> "SystemState":
        k = delay_steps(params.ace_delay_tau, dt)
        return cls(ace_delay_buffer=[[0.0] * k, [0.0] * k])

    def is_finite(self) -> bool:
        vals = (self.delta_f + self.delta_Pm + self.delta_Pv
                + self.integrator_x + [self.delta_Ptie])
        return all(np.isfinite(v) for v in vals)


def delay_steps(tau: float, dt: float) -> int:
    """Transport delay in whole integrator steps (fractional taus rounded)."""
    return int(round(tau / dt))


def deadband(u: float, width: float) -> float:
    """Dead-zone with slope-1 recovery outside the band.

    Returns 0 for |u| <= width/2, otherwise u shifted toward zero by half
    the band width.  Total function, odd in u.
    """
    half = 0.5 * width
    if u > half:
        return u - half
    if u < -half:
        return u + half
    return 0.0


def rate_limit(prev: float, candidate: float, max_rate: float, dt: float) -> float:
    """Clamp candidate into [prev - max_rate*dt, prev + max_rate*dt]."""
    step = max_rate * dt
    hi = prev + step
    if candidate > hi:
        return hi
    lo = prev - step
    if candidate < lo:
        return lo
    return candidate


def _derived_constants(params: AgcParameters):
    f0 = params.base_frequency
    H1, H2 = params.inertia_H
    Tt1, Tt2 = params.turbine_Tt
    Tg1, Tg2 = params.governor_Tg
    R1, R2 = params.droop_R
    return (
        f0 / (2.0 * H1), f0 / (2.0 * H2),
        params.damping_D[0], params.damping_D[1],
        1.0 / R1, 1.0 / R2,
        1.0 / Tt1, 1.0 / Tt2,
        1.0 / Tg1, 1.0 / Tg2,
        params.integral_gain_KI[0], params.integral_gain_KI[1],
        params.bias_B[0], params.bias_B[1],
        params.sync_coeff_Ps, params.grc_limit, params.gdb_width,
    )


def _step_values(c, f1, f2, pm1, pm2, pv1, pv2, x1, x2, ptie,
                 ud1, ud2, dl_ace1, dl_ace2, dt):
    """One forward-Euler update on plain floats.

    All derivatives are evaluated at the incoming state (simultaneous
    update); GDB acts on the governor driving signal, GRC on the turbine
    power increment, and the delayed ACE values drive the integrators.
    """
    (a1, a2, d1, d2, invR1, invR2, invTt1, invTt2, invTg1, invTg2,
     ki1, ki2, _b1, _b2, ps, grc, gdb) = c

    nf1 = f1 + dt * a1 * (pm1 - ud1 - ptie - d1 * f1)
    nf2 = f2 + dt * a2 * (pm2 - ud2 + ptie - d2 * f2)
    npm1 = rate_limit(pm1, pm1 + dt * invTt1 * (pv1 - pm1), grc, dt)
    npm2 = rate_limit(pm2, pm2 + dt * invTt2 * (pv2 - pm2), grc, dt)
    npv1 = pv1 + dt * invTg1 * (deadband(x1 - f1 * invR1, gdb) - pv1)
    npv2 = pv2 + dt * invTg2 * (deadband(x2 - f2 * invR2, gdb) - pv2)
    nx1 = x1 - dt * ki1 * dl_ace1
    nx2 = x2 - dt * ki2 * dl_ace2
    nptie = ptie + dt * ps * (f1 - f2)
    return nf1, nf2, npm1, npm2, npv1, npv2, nx1, nx2, nptie


def step_dynamics(state: SystemState, params: AgcParameters,
                  load_disturbance: tuple[float, float],
                  measured_inputs: tuple[float, float, float],
                  dt: float) -> SystemState:
    """Advance the plant one step of size dt.

    ``measured_inputs`` are the (possibly attacked) delta_f1, delta_f2,
    delta_Ptie the control center sees; the ACEs are computed from them,
    pushed through the transport delay ring and the delayed values drive
    the integral controllers.  The swing/tie-line equations use the true
    state throughout.
    """
    c = _derived_constants(params)
    b1, b2 = c[12], c[13]
    mf1, mf2, mptie = measured_inputs
    ace1 = mptie + b1 * mf1
    ace2 = -mptie + b2 * mf2

    buf1 = list(state.ace_delay_buffer[0])
    buf2 = list(state.ace_delay_buffer[1])
    pos = state.buffer_pos
    if buf1:
        dl_ace1, dl_ace2 = buf1[pos], buf2[pos]
        buf1[pos] = ace1
        buf2[pos] = ace2
        pos = (pos + 1) % len(buf1)
    else:
        dl_ace1, dl_ace2 = ace1, ace2

    vals = _step_values(
        c, state.delta_f[0], state.delta_f[1],
        state.delta_Pm[0], state.delta_Pm[1],
        state.delta_Pv[0], state.delta_Pv[1],
        state.integrator_x[0], state.integrator_x[1], state.delta_Ptie,
        load_disturbance[0], load_disturbance[1], dl_ace1, dl_ace2, dt)
    if not all(np.isfinite(v) for v in vals):
        raise NonFiniteStateError("integration step produced a non-finite value")
    nf1, nf2, npm1, npm2, npv1, npv2, nx1, nx2, nptie = vals
    return SystemState(
        delta_f=[nf1, nf2], delta_Pm=[npm1, npm2], delta_Pv=[npv1, npv2],
        integrator_x=[nx1, nx2], delta_Ptie=nptie,
        ace_delay_buffer=[buf1, buf2], buffer_pos=pos)


@dataclass
class Trajectory:
    """The 3-channel measurement stream received at the control center.

    When an attack is active the targeted channel holds the falsified
    values; channels are sampled uniformly at ``measurement_rate``.
    """

    measured_delta_f1: np.ndarray   # Hz
    measured_delta_f2: np.ndarray   # Hz
    measured_delta_Ptie: np.ndarray  # pu
    measurement_rate: float         # Hz

    def __post_init__(self):
        n = len(self.measured_delta_f1)
        if len(self.measured_delta_f2) != n or len(self.measured_delta_Ptie) != n:
            raise ValueError("all three channels must have equal length")

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (self.measurement_rate == other.measurement_rate
                and np.array_equal(self.measured_delta_f1, other.measured_delta_f1)
                and np.array_equal(self.measured_delta_f2, other.measured_delta_f2)
                and np.array_equal(self.measured_delta_Ptie, other.measured_delta_Ptie))

    @property
    def sample_count(self) -> int:
        return len(self.measured_delta_f1)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.sample_count) / self.measurement_rate

    def channels(self):
        """Channel arrays in registry order (f1, f2, ptie)."""
        return (self.measured_delta_f1, self.measured_delta_f2,
                self.measured_delta_Ptie)

    def to_csv(self, path):
        """Write `t,f1,f2,ptie` rows, 9 significant digits."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,f1,f2,ptie\n")
            for t, a, b, p in zip(self.times, self.measured_delta_f1,
                                  self.measured_delta_f2, self.measured_delta_Ptie):
                fh.write(f"{t:.9g},{a:.9g},{b:.9g},{p:.9g}\n")

    @classmethod
    def from_csv(cls, path, measurement_rate=None):
        data = np.genfromtxt(path, delimiter=",", names=True)
        t = np.atleast_1d(data["t"])
        if measurement_rate is None:
            if len(t) < 2:
                raise ValueError("cannot infer measurement_rate from one row")
            measurement_rate = 1.0 / (t[1] - t[0])
        return cls(np.atleast_1d(data["f1"]).astype(float),
                   np.atleast_1d(data["f2"]).astype(float),
                   np.atleast_1d(data["ptie"]).astype(float),
                   float(measurement_rate))


def simulate(params: AgcParameters, config: SimulationConfig, scenario) -> Trajectory:
    """Run the closed loop for one scenario and return the measured channels.

    The attack (if any) is applied inside the loop: the controller reacts
    to the falsified stream and the same stream is recorded.  Deterministic;
    identical inputs give bit-identical trajectories.
    """
    traj, _ = _run(params, config, scenario, record_states=False)
    return traj


def simulate_with_states(params: AgcParameters, config: SimulationConfig, scenario):
    """Like :func:`simulate` but also returns the per-step internal state.

    Returns (trajectory, states) where ``states`` is a dict of arrays of
    length n_steps+1 (including the initial state) for keys ``delta_f``,
    ``delta_Pm``, ``delta_Pv``, ``integrator_x`` (each (n, 2)) and
    ``delta_Ptie`` (n,).  Intended for invariant checks and demos.
    """
    return _run(params, config, scenario, record_states=True)


def _run(params, config, scenario, record_states):
    from .attacks import attack_coefficients

    c = _derived_constants(params)
    b1, b2 = c[12], c[13]
    dt = config.dt
    n_steps = config.n_steps
    decim = config.steps_per_sample

    k = delay_steps(params.ace_delay_tau, dt)
    buf1 = [0.0] * k
    buf2 = [0.0] * k
    pos = 0

    # Per-step attack decomposition: measured = true*scale + add on the
    # targeted channel, identity elsewhere.
    times = np.arange(n_steps) * dt
    target = None
    if scenario.attack is not None:
        scale_arr, add_arr = attack_coefficients(scenario.attack, times)
        scale = scale_arr.tolist()
        add = add_arr.tolist()
        target = scenario.attack.target.value

    load_area = scenario.load_area
    load_mag = scenario.load_magnitude
    load_time = scenario.load_time

    n_samples = config.sample_count
    mf1_out = np.empty(n_samples)
    mf2_out = np.empty(n_samples)
    mptie_out = np.empty(n_samples)

    if record_states:
        hist_f = np.empty((n_steps + 1, 2))
        hist_pm = np.empty((n_steps + 1, 2))
        hist_pv = np.empty((n_steps + 1, 2))
        hist_x = np.empty((n_steps + 1, 2))
        hist_ptie = np.empty(n_steps + 1)

    f1 = f2 = pm1 = pm2 = pv1 = pv2 = x1 = x2 = ptie = 0.0
    out_i = 0
    for n in range(n_steps):
        t = n * dt
        mf1, mf2, mptie = f1, f2, ptie
        if target == "f1":
            mf1 = f1 * scale[n] + add[n]
        elif target == "f2":
            mf2 = f2 * scale[n] + add[n]
        elif target == "ptie":
            mptie = ptie * scale[n] + add[n]

        if n % decim == 0:
            mf1_out[out_i] = mf1
            mf2_out[out_i] = mf2
            mptie_out[out_i] = mptie
            out_i += 1
        if record_states:
            hist_f[n] = (f1, f2)
            hist_pm[n] = (pm1, pm2)
            hist_pv[n] = (pv1, pv2)
            hist_x[n] = (x1, x2)
            hist_ptie[n] = ptie

        ace1 = mptie + b1 * mf1
        ace2 = -mptie + b2 * mf2
        if k:
            dl_ace1, dl_ace2 = buf1[pos], buf2[pos]
            buf1[pos] = ace1
            buf2[pos] = ace2
            pos += 1
            if pos == k:
                pos = 0
        else:
            dl_ace1, dl_ace2 = ace1, ace2

        ud1 = load_mag if (load_area == 1 and t >= load_time) else 0.0
        ud2 = load_mag if (load_area == 2 and t >= load_time) else 0.0

        f1, f2, pm1, pm2, pv1, pv2, x1, x2, ptie = _step_values(
            c, f1, f2, pm1, pm2, pv1, pv2, x1, x2, ptie,
            ud1, ud2, dl_ace1, dl_ace2, dt)

        if not (np.isfinite(f1) and np.isfinite(f2) and np.isfinite(pm1)
                and np.isfinite(pm2) and np.isfinite(pv1) and np.isfinite(pv2)
                and np.isfinite(x1) and np.isfinite(x2) and np.isfinite(ptie)):
            raise NonFiniteStateError(
                f"state became non-finite at step {n} (t={t:.3f} s)", step_index=n)

    if record_states:
        hist_f[n_steps] = (f1, f2)
        hist_pm[n_steps] = (pm1, pm2)
        hist_pv[n_steps] = (pv1, pv2)
        hist_x[n_steps] = (x1, x2)
        hist_ptie[n_steps] = ptie

    traj = Trajectory(mf1_out, mf2_out, mptie_out, config.measurement_rate)
    if not record_states:
        return traj, None
    states = {"delta_f": hist_f, "delta_Pm": hist_pm, "delta_Pv": hist_pv,
              "integrator_x": hist_x, "delta_Ptie": hist_ptie}
    return traj, states
