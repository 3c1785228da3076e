"""Simulation toolkit for a tunneling-based leaky integrate-and-fire neuron.

Layers: single-neuron dynamics and the closed-form rate (neuron), the
device IV table and energy accounting (device), the clock-driven
winner-take-all network (network), gaussian population coding of the iris
features (encoding), supervised spike-timing plasticity (learning), and a
CSV-emitting command line (cli).
"""

from .device import (DeviceIVTable, EnergyLedger, SubcriticalInputError,
                     TableRangeError, energy_per_spike, energy_sweep,
                     frequency_sweep, iv_lookup, load_iv_table, parse_iv_table)
from .encoding import (IrisSample, PopulationCoder, encode, fit_coder,
                       load_iris, make_toy_dataset)
from .learning import (StdpParams, SupervisionMode, TrainingReport, evaluate,
                       grid_search, stdp_update, train)
from .network import (InhibitionMode, InputMode, NetworkConfig, SynapseMatrix,
                      classify, input_layer_spikes, run_network)
from .neuron import (FrequencyResult, NeuronParams, NeuronState, Regime,
                     SpikeRecord, StepSizeError, closed_form_frequency,
                     lif_step, simulate_single_neuron)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
