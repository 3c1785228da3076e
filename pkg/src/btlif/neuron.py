"""Leaky integrate-and-fire membrane dynamics.

The neuron is the parallel RC circuit: a constant input current charges the
membrane capacitance, the leak resistance pulls the potential back toward
rest, and a spike is emitted (with reset to rest) whenever the potential
reaches the firing threshold.  Two routes are provided for the firing rate
under constant drive: explicit forward-Euler time stepping and the exact
closed-form solution of the charge-up time.  The two must agree; tests use
the stepped route as the brute-force oracle for the closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class StepSizeError(ValueError):
    """Integration step too coarse relative to the membrane time constant."""


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class NeuronParams:
    """Circuit parameters of the behavioral neuron.

    Units: leak_resistance in ohms (> 0), membrane_capacitance in farads
    (> 0), potentials in volts, refractory_time in seconds (>= 0).  The
    firing threshold must sit strictly above the resting potential,
    otherwise the neuron would fire unconditionally.
    """

    leak_resistance: float
    membrane_capacitance: float
    resting_potential: float
    firing_threshold: float
    refractory_time: float = 0.0

    def __post_init__(self) -> None:
        for name in ("leak_resistance", "membrane_capacitance",
                     "resting_potential", "firing_threshold",
                     "refractory_time"):
            _require_finite(name, getattr(self, name))
        if self.leak_resistance <= 0.0:
            raise ValueError("leak_resistance must be positive")
        if self.membrane_capacitance <= 0.0:
            raise ValueError("membrane_capacitance must be positive")
        if not self.firing_threshold > self.resting_potential:
            raise ValueError(
                "firing_threshold must lie strictly above resting_potential")
        if self.refractory_time < 0.0:
            raise ValueError("refractory_time must be >= 0")
        if not (math.isfinite(self.tau_m) and self.tau_m > 0.0):
            raise ValueError("membrane time constant must be finite and positive")

    @property
    def tau_m(self) -> float:
        """Membrane time constant, seconds."""
        return self.leak_resistance * self.membrane_capacitance

    @property
    def critical_current(self) -> float:
        """Smallest constant current whose steady state touches the threshold."""
        return (self.firing_threshold - self.resting_potential) / self.leak_resistance


@dataclass(frozen=True)
class NeuronState:
    """Evolving state of one neuron.

    ``time_since_spike`` is None until the first spike.  During the
    refractory countdown the membrane is clamped to the resting potential.
    """

    membrane_potential: float
    time_since_spike: float | None = None
    refractory_remaining: float = 0.0

    @property
    def in_refractory(self) -> bool:
        return self.refractory_remaining > 0.0

    @classmethod
    def at_rest(cls, params: NeuronParams) -> "NeuronState":
        return cls(membrane_potential=params.resting_potential)


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"
    SPIKING = "spiking"


@dataclass(frozen=True)
class FrequencyResult:
    """Firing rate in hertz plus the drive regime it was computed in."""

    frequency: float
    regime: Regime

    def __post_init__(self) -> None:
        if self.frequency < 0.0 or not math.isfinite(self.frequency):
            raise ValueError("frequency must be finite and >= 0")
        if (self.frequency == 0.0) != (self.regime is Regime.SUBCRITICAL):
            raise ValueError("frequency is zero exactly in the subcritical regime")


@dataclass(frozen=True)
class SpikeRecord:
    """Time-sorted spike events, each a (time_seconds, neuron_id) pair."""

    events: tuple[tuple[float, int], ...] = ()

    def __post_init__(self) -> None:
        last = -math.inf
        for t, nid in self.events:
            if not math.isfinite(t) or t < 0.0:
                raise ValueError(f"spike time must be finite and >= 0, got {t!r}")
            if t < last:
                raise ValueError("spike times must be non-decreasing")
            if nid < 0:
                raise ValueError("neuron_id must be >= 0")
            last = t

    @classmethod
    def from_trains(cls, trains: list[list[float]]) -> "SpikeRecord":
        """Merge per-neuron spike-time lists; ties break by neuron index."""
        events = [(t, nid) for nid, train in enumerate(trains) for t in train]
        events.sort()
        return cls(tuple(events))

    def __len__(self) -> int:
        return len(self.events)

    def times(self, neuron_id: int | None = None) -> list[float]:
        if neuron_id is None:
            return [t for t, _ in self.events]
        return [t for t, nid in self.events if nid == neuron_id]

    def counts(self, n_neurons: int) -> list[int]:
        out = [0] * n_neurons
        for _, nid in self.events:
            if nid >= n_neurons:
                raise ValueError(f"neuron_id {nid} out of range for {n_neurons} neurons")
            out[nid] += 1
        return out

    def empirical_frequency(self, neuron_id: int = 0) -> float:
        """(spike count - 1) / (last - first spike time); 0.0 below 2 spikes."""
        times = self.times(neuron_id)
        if len(times) < 2:
            return 0.0
        return (len(times) - 1) / (times[-1] - times[0])

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("time_s,neuron_id\n")
            for t, nid in self.events:
                fh.write(f"{t!r},{nid}\n")


def lif_step(state: NeuronState, params: NeuronParams, input_current: float,
             dt: float) -> tuple[NeuronState, bool]:
    """Advance the membrane by one explicit Euler step of

        dV/dt = -(V - V_rest) / tau_m + I / C

    Threshold crossing is detected after the step; a crossing resets the
    potential to rest and starts the refractory countdown, which consumes
    whole steps before integration resumes.  dt = 0 is the identity.
    """
    _require_finite("input_current", input_current)
    _require_finite("dt", dt)
    if dt < 0.0:
        raise ValueError("dt must be >= 0")
    if dt == 0.0:
        return state, False

    since = None if state.time_since_spike is None else state.time_since_spike + dt
    if state.refractory_remaining > 0.0:
        remaining = state.refractory_remaining - dt
        if remaining < 0.0:
            remaining = 0.0
        return NeuronState(params.resting_potential, since, remaining), False

    rest = params.resting_potential
    v = state.membrane_potential
    v = v + dt * ((rest - v) / params.tau_m + input_current / params.membrane_capacitance)
    if v >= params.firing_threshold:
        return NeuronState(rest, 0.0, params.refractory_time), True
    return NeuronState(v, since, 0.0), False


def _constant_drive_spike_times(params: NeuronParams, input_current: float,
                                n_steps: int, dt: float) -> list[float]:
    # Tight loop sharing lif_step's arithmetic exactly (same expressions,
    # same operand order) so stepped results match lif_step bit for bit.
    rest = params.resting_potential
    thresh = params.firing_threshold
    tau = params.tau_m
    cap = params.membrane_capacitance
    t_ref = params.refractory_time
    v = rest
    refr = 0.0
    times: list[float] = []
    for k in range(1, n_steps + 1):
        if refr > 0.0:
            refr -= dt
            continue
        v = v + dt * ((rest - v) / tau + input_current / cap)
        if v >= thresh:
            times.append(k * dt)
            v = rest
            refr = t_ref
    return times


def simulate_single_neuron(params: NeuronParams, input_current: float,
                           duration: float, dt: float) -> SpikeRecord:
    """Step a resting neuron under constant drive and record its spikes.

    Requires dt <= tau_m / 100; a coarser step raises StepSizeError rather
    than silently producing an inaccurate rate.
    """
    _require_finite("input_current", input_current)
    _require_finite("duration", duration)
    _require_finite("dt", dt)
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if dt > params.tau_m / 100.0:
        raise StepSizeError(
            f"dt={dt!r} too coarse: need dt <= tau_m/100 = {params.tau_m / 100.0!r}")
    n_steps = int(round(duration / dt))
    times = _constant_drive_spike_times(params, input_current, n_steps, dt)
    return SpikeRecord(tuple((t, 0) for t in times))


def _charge_time(params: NeuronParams, input_current: float) -> float:
    # Time from rest to threshold under constant supercritical drive.
    rise = input_current * params.leak_resistance  # steady-state rise above rest, volts
    gap = params.firing_threshold - params.resting_potential
    return params.tau_m * math.log(rise / (rise - gap))


def closed_form_frequency(params: NeuronParams, input_current: float) -> FrequencyResult:
    """Exact firing rate under constant drive.

    For supercritical current the interspike period is the refractory time
    plus the RC charge-up time tau_m * ln(I*R_L / (I*R_L - (V_th - V_rest))).
    At or below the critical current the charge-up time diverges and the
    rate is exactly zero.
    """
    _require_finite("input_current", input_current)
    if input_current <= params.critical_current:
        return FrequencyResult(0.0, Regime.SUBCRITICAL)
    period = params.refractory_time + _charge_time(params, input_current)
    if not math.isfinite(period):
        # Drive within one ulp of critical: treat as the divergent boundary.
        return FrequencyResult(0.0, Regime.SUBCRITICAL)
    return FrequencyResult(1.0 / period, Regime.SPIKING)
