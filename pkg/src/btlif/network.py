"""Clock-driven spiking network: feedforward fan-in onto a winner-take-all
output layer.

Tick semantics matter for tie cases, so they are fixed here once: within a
tick the engine (1) gathers the synaptic current pulses from input spikes
landing on that tick, (2) advances every non-refractory output membrane by
one Euler step that includes those pulses, (3) detects threshold crossings
in ascending neuron index, and (4) applies mutual inhibition from the set
of neurons that fired to all others.  A presynaptic spike therefore
deposits exactly dV = weight * current_scale * dt / C_M on each output
membrane (one-tick current pulse), and simultaneous crossers all fire
before inhibition lands.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .neuron import (NeuronParams, SpikeRecord, StepSizeError, Regime,
                     _charge_time, _constant_drive_spike_times,
                     closed_form_frequency)


class InhibitionMode(enum.Enum):
    HARD_RESET = "hard_reset"
    SUBTRACTIVE = "subtractive"


class InputMode(enum.Enum):
    LIF = "lif"                  # step every input neuron explicitly
    CLOSED_FORM = "closed_form"  # regular trains from the analytic rate


@dataclass
class SynapseMatrix:
    """Bounded feedforward weights, one row per input neuron.

    current_scale converts a unit weight into the amperes delivered to the
    postsynaptic membrane for one tick per presynaptic spike.
    """

    weights: np.ndarray
    w_min: float = 0.0
    w_max: float = 1.0
    current_scale: float = 5e-9

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 2:
            raise ValueError("weights must be a 2-D array")
        if not (math.isfinite(self.w_min) and math.isfinite(self.w_max)
                and self.w_min < self.w_max):
            raise ValueError("need finite bounds with w_min < w_max")
        if not (math.isfinite(self.current_scale) and self.current_scale > 0.0):
            raise ValueError("current_scale must be finite and positive")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        if np.any(self.weights < self.w_min) or np.any(self.weights > self.w_max):
            raise ValueError(f"weights must lie within [{self.w_min}, {self.w_max}]")

    @property
    def n_inputs(self) -> int:
        return self.weights.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.weights.shape[1]

    def with_weights(self, weights: np.ndarray) -> "SynapseMatrix":
        """Same bounds and scale, new (already clipped) weight values."""
        return SynapseMatrix(weights, self.w_min, self.w_max, self.current_scale)

    @classmethod
    def random(cls, n_inputs: int, n_outputs: int, rng: np.random.Generator,
               init_high: float = 0.1, w_min: float = 0.0, w_max: float = 1.0,
               current_scale: float = 5e-9) -> "SynapseMatrix":
        """Uniform initial weights in [w_min, w_min + init_high*(w_max - w_min)]."""
        high = w_min + init_high * (w_max - w_min)
        weights = rng.uniform(w_min, high, size=(n_inputs, n_outputs))
        return cls(weights, w_min, w_max, current_scale)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.weights:
                fh.write(",".join(repr(float(w)) for w in row) + "\n")

    @classmethod
    def read_csv(cls, path, n_inputs: int, n_outputs: int, w_min: float = 0.0,
                 w_max: float = 1.0, current_scale: float = 5e-9) -> "SynapseMatrix":
        rows: list[list[float]] = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    rows.append([float(x) for x in line.split(",")])
                except ValueError:
                    raise ValueError(f"{path}: line {lineno}: non-numeric weight") from None
        shape = (len(rows), len(rows[0]) if rows else 0)
        if shape != (n_inputs, n_outputs) or any(len(r) != shape[1] for r in rows):
            raise ValueError(
                f"{path}: expected {n_inputs} rows x {n_outputs} columns, got "
                f"{shape[0]} rows x {shape[1]} columns")
        return cls(np.array(rows), w_min, w_max, current_scale)


@dataclass(frozen=True)
class NetworkConfig:
    """Topology, winner-take-all settings, and clock for one network run."""

    neuron_params: NeuronParams
    dt: float
    duration: float
    input_count: int = 16
    output_count: int = 3
    inhibition_mode: InhibitionMode = InhibitionMode.HARD_RESET
    inhibition_strength: float = 0.0  # volts per rival spike, subtractive mode
    input_mode: InputMode = InputMode.LIF

    def __post_init__(self) -> None:
        if self.input_count < 1 or self.output_count < 1:
            raise ValueError("neuron counts must be >= 1")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be finite and positive")
        if not (math.isfinite(self.duration) and self.duration >= self.dt):
            raise ValueError("duration must be finite and >= dt")
        if self.inhibition_strength < 0.0:
            raise ValueError("inhibition_strength must be >= 0")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


def _check_step_size(config: NetworkConfig) -> None:
    limit = config.neuron_params.tau_m / 100.0
    if config.dt > limit:
        raise StepSizeError(
            f"dt={config.dt!r} too coarse: need dt <= tau_m/100 = {limit!r}")


def _validate_currents(input_currents, config: NetworkConfig) -> list[float]:
    currents = [float(c) for c in input_currents]
    if len(currents) != config.input_count:
        raise ValueError(
            f"expected {config.input_count} input currents, got {len(currents)}")
    for c in currents:
        if not math.isfinite(c) or c < 0.0:
            raise ValueError("input currents must be finite and >= 0")
    return currents


def input_layer_spikes(input_currents, config: NetworkConfig) -> SpikeRecord:
    """Spike trains of the input neurons, each driven by its constant current.

    LIF mode steps every neuron with the same integrator as
    simulate_single_neuron.  CLOSED_FORM mode lays down the analytic regular
    train; the two agree to within one dt per successive spike.
    """
    currents = _validate_currents(input_currents, config)
    _check_step_size(config)
    n_steps = config.n_steps
    dt = config.dt
    params = config.neuron_params
    horizon = n_steps * dt
    trains: list[list[float]] = []
    for current in currents:
        if config.input_mode is InputMode.LIF:
            trains.append(_constant_drive_spike_times(params, current, n_steps, dt))
        else:
            result = closed_form_frequency(params, current)
            if result.regime is Regime.SUBCRITICAL:
                trains.append([])
                continue
            charge = _charge_time(params, current)
            t_ref = params.refractory_time
            train = []
            k = 0
            while True:
                t = (k + 1) * charge + k * t_ref
                if t > horizon:
                    break
                train.append(t)
                k += 1
            trains.append(train)
    return SpikeRecord.from_trains(trains)


def _tick_of(t: float, dt: float) -> int:
    # First tick whose end time is >= t; robust to t being k*dt +- rounding.
    return max(1, math.ceil(t / dt - 1e-9))


def run_network(input_currents, weights: SynapseMatrix,
                config: NetworkConfig) -> tuple[SpikeRecord, SpikeRecord]:
    """Run the clock-driven network; returns (input_spikes, output_spikes)."""
    if weights.n_inputs != config.input_count or weights.n_outputs != config.output_count:
        raise ValueError(
            f"weight matrix is {weights.n_inputs}x{weights.n_outputs}, config wants "
            f"{config.input_count}x{config.output_count}")
    input_record = input_layer_spikes(input_currents, config)

    n_steps = config.n_steps
    dt = config.dt
    params = config.neuron_params
    rest = params.resting_potential
    thresh = params.firing_threshold
    tau = params.tau_m
    cap = params.membrane_capacitance
    t_ref = params.refractory_time
    n_out = config.output_count
    scale = weights.current_scale
    hard = config.inhibition_mode is InhibitionMode.HARD_RESET
    strength = config.inhibition_strength

    w_rows = [tuple(float(w) for w in row) for row in weights.weights]
    spikers_at: list[list[int]] = [[] for _ in range(n_steps + 1)]
    for t, nid in input_record.events:
        k = _tick_of(t, dt)
        if k <= n_steps:
            spikers_at[k].append(nid)

    v = [rest] * n_out
    refr = [0.0] * n_out
    events: list[tuple[float, int]] = []
    out_range = range(n_out)
    for k in range(1, n_steps + 1):
        ids = spikers_at[k]
        if ids:
            syn = [0.0] * n_out
            for i in ids:
                row = w_rows[i]
                for j in out_range:
                    syn[j] += row[j]
        else:
            syn = None
        fired: list[int] = []
        for j in out_range:
            if refr[j] > 0.0:
                refr[j] -= dt
                v[j] = rest
                continue
            current = scale * syn[j] if syn is not None else 0.0
            vj = v[j]
            vj = vj + dt * ((rest - vj) / tau + current / cap)
            if vj >= thresh:
                fired.append(j)
                vj = rest
                refr[j] = t_ref
            v[j] = vj
        if fired:
            t_now = k * dt
            for j in fired:
                events.append((t_now, j))
            for j in out_range:
                if j in fired:
                    continue
                if hard:
                    v[j] = rest
                else:
                    v[j] = max(rest, v[j] - strength * len(fired))
    return input_record, SpikeRecord(tuple(events))


def classify(output_spikes: SpikeRecord, output_count: int = 3) -> int | None:
    """Winner by spike count; ties go to the lowest index; None if silent."""
    counts = output_spikes.counts(output_count)
    if sum(counts) == 0:
        return None
    return counts.index(max(counts))
