"""Tunneling-device abstraction and energy-per-spike accounting.

The physical device enters the model only as a monotone lookup table from
drain voltage to the tunneling current that charges the membrane.  Energy
per spike is the constant-bias supply energy over one spike cycle,
V_D * I_in / f.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

from .neuron import NeuronParams, Regime, closed_form_frequency


class TableRangeError(ValueError):
    """Query voltage outside the table; extrapolation is refused."""


class SubcriticalInputError(ValueError):
    """The bias never drives a spike, so there is no cycle to account."""


class IVParseError(ValueError):
    """Malformed IV table file; message carries the offending line number."""


@dataclass(frozen=True)
class DeviceIVTable:
    """Ordered (drain_voltage, input_current) knots, volts and amperes.

    Voltages strictly increase; currents are non-negative and non-decreasing
    (tunneling current grows with drain bias).  Lookup interpolates linearly
    in (V, log I) when every current is positive, since the current spans
    orders of magnitude; with any zero current it falls back to linear in
    (V, I).  Queries outside the knot range are refused.
    """

    voltages: tuple[float, ...]
    currents: tuple[float, ...]
    source: str = ""

    def __post_init__(self) -> None:
        if len(self.voltages) != len(self.currents):
            raise ValueError("voltages and currents must have equal length")
        if len(self.voltages) < 2:
            raise ValueError("need at least 2 knots")
        for v, i in zip(self.voltages, self.currents):
            if not (math.isfinite(v) and math.isfinite(i)):
                raise ValueError("knots must be finite")
            if i < 0.0:
                raise ValueError("currents must be non-negative")
        for a, b in zip(self.voltages, self.voltages[1:]):
            if not b > a:
                raise ValueError("voltages must be strictly increasing")
        for a, b in zip(self.currents, self.currents[1:]):
            if b < a:
                raise ValueError("currents must be non-decreasing")

    @property
    def v_min(self) -> float:
        return self.voltages[0]

    @property
    def v_max(self) -> float:
        return self.voltages[-1]


def iv_lookup(table: DeviceIVTable, drain_voltage: float) -> float:
    """Interpolated input current at the given drain voltage; exact at knots."""
    if not math.isfinite(drain_voltage):
        raise ValueError("drain_voltage must be finite")
    if drain_voltage < table.v_min or drain_voltage > table.v_max:
        raise TableRangeError(
            f"drain_voltage {drain_voltage!r} outside table range "
            f"[{table.v_min!r}, {table.v_max!r}]")
    idx = bisect_left(table.voltages, drain_voltage)
    if idx < len(table.voltages) and table.voltages[idx] == drain_voltage:
        return table.currents[idx]
    v_lo, v_hi = table.voltages[idx - 1], table.voltages[idx]
    i_lo, i_hi = table.currents[idx - 1], table.currents[idx]
    t = (drain_voltage - v_lo) / (v_hi - v_lo)
    if all(c > 0.0 for c in table.currents):
        return math.exp((1.0 - t) * math.log(i_lo) + t * math.log(i_hi))
    return (1.0 - t) * i_lo + t * i_hi


def parse_iv_table(text: str, source: str = "") -> DeviceIVTable:
    """Parse the plain-text table format: an optional leading block of
    '#' comment lines, then one '<voltage> <current>' pair per line."""
    voltages: list[float] = []
    currents: list[float] = []
    in_header = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if in_header:
                continue
            raise IVParseError(f"line {lineno}: comment allowed only in the header")
        in_header = False
        parts = line.split()
        if len(parts) != 2:
            raise IVParseError(
                f"line {lineno}: expected '<voltage> <current>', got {raw!r}")
        try:
            voltages.append(float(parts[0]))
            currents.append(float(parts[1]))
        except ValueError:
            raise IVParseError(f"line {lineno}: non-numeric value in {raw!r}") from None
    try:
        return DeviceIVTable(tuple(voltages), tuple(currents), source=source)
    except ValueError as exc:
        raise IVParseError(str(exc)) from None


def load_iv_table(path) -> DeviceIVTable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_iv_table(fh.read(), source=str(path))


@dataclass
class EnergyLedger:
    """Accumulated supply energy and spike count for one run.

    Both totals only grow; energy per spike is defined once at least one
    spike has been counted.  Ledgers from parallel runs combine by merge().
    """

    total_energy: float = 0.0
    spike_count: int = 0

    def add_energy(self, joules: float) -> None:
        if not math.isfinite(joules) or joules < 0.0:
            raise ValueError("energy increment must be finite and >= 0")
        self.total_energy += joules

    def add_spikes(self, n: int = 1) -> None:
        if n < 0:
            raise ValueError("spike increment must be >= 0")
        self.spike_count += n

    @property
    def energy_per_spike(self) -> float:
        if self.spike_count == 0:
            raise ValueError("energy per spike undefined before the first spike")
        return self.total_energy / self.spike_count

    def merge(self, other: "EnergyLedger") -> None:
        self.total_energy += other.total_energy
        self.spike_count += other.spike_count


def energy_per_spike(params: NeuronParams, table: DeviceIVTable,
                     drain_voltage: float) -> float:
    """Supply energy V_D * I_in * t_cycle for one spike cycle at constant bias."""
    current = iv_lookup(table, drain_voltage)
    result = closed_form_frequency(params, current)
    if result.regime is Regime.SUBCRITICAL:
        raise SubcriticalInputError(
            f"drain_voltage {drain_voltage!r} drives {current!r} A, below the "
            f"critical current {params.critical_current!r} A: no spike cycle")
    return drain_voltage * current / result.frequency


def energy_sweep(params: NeuronParams, table: DeviceIVTable, v_min: float,
                 v_max: float, n_points: int) -> list[tuple[float, float | None]]:
    """Energy per spike on a uniform voltage grid.

    Subcritical grid points report None instead of raising, so a sweep may
    straddle the spiking onset.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if v_max < v_min:
        raise ValueError("v_max must be >= v_min")
    for v in (v_min, v_max):
        if v < table.v_min or v > table.v_max:
            raise TableRangeError(
                f"sweep bound {v!r} outside table range [{table.v_min!r}, {table.v_max!r}]")
    out: list[tuple[float, float | None]] = []
    step = (v_max - v_min) / (n_points - 1)
    for k in range(n_points):
        v = v_max if k == n_points - 1 else v_min + k * step
        try:
            out.append((v, energy_per_spike(params, table, v)))
        except SubcriticalInputError:
            out.append((v, None))
    return out


def frequency_sweep(params: NeuronParams, table: DeviceIVTable, v_min: float,
                    v_max: float, n_points: int) -> list[tuple[float, float, float]]:
    """(drain_voltage, input_current, closed_form_frequency) on a uniform grid."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if v_max < v_min:
        raise ValueError("v_max must be >= v_min")
    for v in (v_min, v_max):
        if v < table.v_min or v > table.v_max:
            raise TableRangeError(
                f"sweep bound {v!r} outside table range [{table.v_min!r}, {table.v_max!r}]")
    out: list[tuple[float, float, float]] = []
    step = (v_max - v_min) / (n_points - 1)
    for k in range(n_points):
        v = v_max if k == n_points - 1 else v_min + k * step
        current = iv_lookup(table, v)
        out.append((v, current, closed_form_frequency(params, current).frequency))
    return out
