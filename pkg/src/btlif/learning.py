"""Supervised spike-timing plasticity and the training loop.

The rule steers the output weights with the class label: presynaptic
spikes that precede a spike of the labeled neuron within the causal window
potentiate that column, rivals that fired get their active synapses
depressed, and a silent labeled neuron receives a rate-proportional
teaching boost so learning can bootstrap from small weights.  Weights are
clipped to their bounds after every update.
"""

from __future__ import annotations

import enum
import itertools
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, replace

import numpy as np

from .encoding import IrisSample, PopulationCoder, encode, fit_coder
from .network import NetworkConfig, SynapseMatrix, classify, run_network
from .neuron import SpikeRecord


class SupervisionMode(enum.Enum):
    TARGET_ONLY = "target_only"
    TARGET_AND_RIVAL = "target_and_rival"


@dataclass(frozen=True)
class StdpParams:
    a_plus: float = 1.0
    a_minus: float = 0.5
    tau_plus: float = 5e-3      # seconds, causal pairing window
    learning_rate: float = 0.01
    supervision_mode: SupervisionMode = SupervisionMode.TARGET_AND_RIVAL

    def __post_init__(self) -> None:
        if self.a_plus < 0.0 or self.a_minus < 0.0:
            raise ValueError("amplitudes must be >= 0")
        if not (math.isfinite(self.tau_plus) and self.tau_plus > 0.0):
            raise ValueError("tau_plus must be positive")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0.0):
            raise ValueError("learning_rate must be positive")


@dataclass(frozen=True)
class TrainingReport:
    """Per-epoch held-out accuracy trace plus the weights that produced it."""

    accuracies: tuple[float, ...]
    weights: SynapseMatrix
    final_train_accuracy: float

    def __post_init__(self) -> None:
        for a in self.accuracies + (self.final_train_accuracy,):
            if not 0.0 <= a <= 1.0:
                raise ValueError("accuracies must lie in [0, 1]")


def _pair_sum(pre_times: list[float], post_times: list[float], tau_plus: float) -> float:
    # Sum of exp(-dt/tau+) over causal (pre -> post) pairs with dt <= tau+;
    # a pre spike on the same tick as the post counts (it caused it).
    total = 0.0
    for t_post in post_times:
        lo = bisect_left(pre_times, t_post - tau_plus)
        hi = bisect_right(pre_times, t_post)
        for t_pre in pre_times[lo:hi]:
            total += math.exp(-(t_post - t_pre) / tau_plus)
    return total


def stdp_update(weights: SynapseMatrix, input_spikes: SpikeRecord,
                output_spikes: SpikeRecord, label: int,
                params: StdpParams) -> SynapseMatrix:
    """One supervised update from a single sample presentation."""
    n_in, n_out = weights.n_inputs, weights.n_outputs
    if not 0 <= label < n_out:
        raise ValueError(f"label {label} out of range for {n_out} outputs")
    pre = [input_spikes.times(i) for i in range(n_in)]
    lr = params.learning_rate
    new = weights.weights.copy()

    target_posts = output_spikes.times(label)
    if target_posts:
        for i in range(n_in):
            if pre[i]:
                new[i, label] += lr * params.a_plus * _pair_sum(
                    pre[i], target_posts, params.tau_plus)
    else:
        # Teaching term: silent target, push its column toward the active
        # inputs in proportion to their firing counts.
        counts = [len(p) for p in pre]
        top = max(counts, default=0)
        if top > 0:
            for i in range(n_in):
                new[i, label] += lr * params.a_plus * counts[i] / top

    if params.supervision_mode is SupervisionMode.TARGET_AND_RIVAL:
        for j in range(n_out):
            if j == label:
                continue
            rival_posts = output_spikes.times(j)
            if not rival_posts:
                continue
            for i in range(n_in):
                if pre[i]:
                    new[i, j] -= lr * params.a_minus * _pair_sum(
                        pre[i], rival_posts, params.tau_plus)

    np.clip(new, weights.w_min, weights.w_max, out=new)
    return weights.with_weights(new)


def stratified_split(samples: list[IrisSample],
                     rng: np.random.Generator) -> tuple[list[IrisSample], list[IrisSample]]:
    """Per-class shuffled 50/50 split (first half train, second half test)."""
    by_class: dict[int, list[IrisSample]] = {}
    for s in samples:
        by_class.setdefault(s.label, []).append(s)
    train: list[IrisSample] = []
    test: list[IrisSample] = []
    for label in sorted(by_class):
        group = by_class[label]
        order = rng.permutation(len(group))
        half = len(group) // 2
        train.extend(group[i] for i in order[:half])
        test.extend(group[i] for i in order[half:])
    return train, test


def prepare_data(samples: list[IrisSample], rng: np.random.Generator,
                 i_max: float = 7.5e-10, sigma: float = 0.125,
                 fields_per_feature: int = 4):
    """Split, fit the coder on the training half only, and encode both halves.

    Returns (train_pairs, test_pairs, coder) with pairs of
    (input_currents, label).
    """
    if not samples:
        raise ValueError("dataset is empty")
    train_samples, test_samples = stratified_split(samples, rng)
    coder = fit_coder(train_samples, fields_per_feature=fields_per_feature,
                      sigma=sigma, i_max=i_max)
    train_pairs = [(encode(s, coder), s.label) for s in train_samples]
    test_pairs = [(encode(s, coder), s.label) for s in test_samples]
    return train_pairs, test_pairs, coder


def evaluate(pairs, weights: SynapseMatrix, config: NetworkConfig) -> float:
    """Fraction of (currents, label) pairs classified correctly.

    A silent output layer gives no decision and is scored as wrong.
    """
    if not pairs:
        raise ValueError("dataset is empty")
    correct = 0
    for currents, label in pairs:
        _, out_spikes = run_network(currents, weights, config)
        if classify(out_spikes, config.output_count) == label:
            correct += 1
    return correct / len(pairs)


def train(samples: list[IrisSample], config: NetworkConfig, stdp: StdpParams,
          epochs: int, seed: int, *, i_max: float = 7.5e-10, sigma: float = 0.125,
          w_min: float = 0.0, w_max: float = 1.0, current_scale: float = 5e-9,
          init_weight_high: float = 0.1) -> TrainingReport:
    """Seeded training run: per epoch, shuffle the training half, present
    every sample through the network with an update after each, then score
    the held-out half.  Fully deterministic for a given seed."""
    if not samples:
        raise ValueError("dataset is empty")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if i_max <= config.neuron_params.critical_current:
        raise ValueError(
            f"i_max {i_max!r} A is subcritical for the input neurons "
            f"(critical current {config.neuron_params.critical_current!r} A)")
    rng = np.random.default_rng(seed)
    train_pairs, test_pairs, _ = prepare_data(samples, rng, i_max=i_max, sigma=sigma)
    weights = SynapseMatrix.random(config.input_count, config.output_count, rng,
                                   init_high=init_weight_high, w_min=w_min,
                                   w_max=w_max, current_scale=current_scale)
    accuracies = []
    for _ in range(epochs):
        for idx in rng.permutation(len(train_pairs)):
            currents, label = train_pairs[idx]
            in_spikes, out_spikes = run_network(currents, weights, config)
            weights = stdp_update(weights, in_spikes, out_spikes, label, stdp)
        accuracies.append(evaluate(test_pairs, weights, config))
    final_train = evaluate(train_pairs, weights, config)
    return TrainingReport(tuple(accuracies), weights, final_train)


def grid_search(samples: list[IrisSample], config: NetworkConfig,
                base: StdpParams, grid: dict[str, list], epochs: int,
                seed: int, **train_kwargs) -> list[tuple[dict, float]]:
    """Exhaustive scan over StdpParams field values.

    grid maps field names to candidate values; returns (combo, final
    held-out accuracy) sorted best first.  Meant for small grids.
    """
    names = sorted(grid)
    results = []
    for values in itertools.product(*(grid[n] for n in names)):
        combo = dict(zip(names, values))
        report = train(samples, config, replace(base, **combo), epochs, seed,
                       **train_kwargs)
        results.append((combo, report.accuracies[-1]))
    results.sort(key=lambda item: -item[1])
    return results
