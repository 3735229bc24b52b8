"""Single-spike temporally coded spiking networks: exact simulation, a
ReLU-to-spiking compiler with provable emulation, and linear-region analysis.
"""

from .ann_core import ReluNetwork, ann_forward, layer_range_bound
from .boxes import Box
from .calculus import TypedSNN, concatenate, merge_neurons, parallelize
from .compiler import (
    CompileReport,
    build_affine_gadget,
    build_example_3_1,
    build_example_3_1_ann,
    build_layer_gadget,
    build_neuron_gadget,
    build_relu_gadget,
    compile_ann,
)
from .errors import (
    CertificateError,
    DimensionError,
    DomainViolationError,
    IncompatibleNetworksError,
    InvalidParameterError,
    RealizationUndefinedError,
    SpikecError,
)
from .regions import (
    EmpiricalRegionCount,
    Halfspace,
    RegionDescriptor,
    count_feasible,
    empirical_region_count,
    enumerate_regions,
    stabilized_region_count,
)
from .snn_core import (
    NEVER,
    ContributionCertificate,
    EncodingSpec,
    FiringTime,
    Layer,
    SpikeVector,
    SpikingNetwork,
    finite,
    layer_certificates,
    layer_forward,
    layer_forward_batch,
    network_forward,
    network_forward_batch,
    network_trace,
    oracle_firing_time,
    realize,
    realize_batch,
    resolve_firing_time,
    single_neuron_network,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "CertificateError",
    "CompileReport",
    "ContributionCertificate",
    "DimensionError",
    "DomainViolationError",
    "EmpiricalRegionCount",
    "EncodingSpec",
    "FiringTime",
    "Halfspace",
    "IncompatibleNetworksError",
    "InvalidParameterError",
    "Layer",
    "NEVER",
    "RealizationUndefinedError",
    "RegionDescriptor",
    "ReluNetwork",
    "SpikeVector",
    "SpikecError",
    "SpikingNetwork",
    "TypedSNN",
    "ann_forward",
    "build_affine_gadget",
    "build_example_3_1",
    "build_example_3_1_ann",
    "build_layer_gadget",
    "build_neuron_gadget",
    "build_relu_gadget",
    "compile_ann",
    "concatenate",
    "count_feasible",
    "empirical_region_count",
    "enumerate_regions",
    "finite",
    "layer_certificates",
    "layer_forward",
    "layer_forward_batch",
    "layer_range_bound",
    "merge_neurons",
    "network_forward",
    "network_forward_batch",
    "network_trace",
    "oracle_firing_time",
    "parallelize",
    "realize",
    "realize_batch",
    "resolve_firing_time",
    "single_neuron_network",
    "stabilized_region_count",
]
