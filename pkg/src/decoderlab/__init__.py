"""Surface-code decoder laboratory.

Builds the rotated surface code and its syndrome-extraction circuit,
simulates circuit-level stochastic Pauli noise by Pauli-frame propagation,
derives spacetime detector graphs by exhaustive single-fault enumeration,
and decodes with union-find (half-edge growth plus peeling) and greedy
closest-pair decoders.  The clustering module turns the accompanying
analytical machinery into executable form: scale schedules, level-k
clustered/isolated hierarchies, minimal-witness counting, the closed-form
threshold, and round-by-round verification of the cluster stopping
guarantee.  The adversarial module constructs the Cantor-like chains that
limit the greedy decoder's effective distance.
"""

from .adversarial import (CantorPattern, cantor_decompose, cantor_pattern,
                          verify_greedy_failure, weight_bound)
from .circuit import (Circuit, CircuitOp, FaultLocation, FaultResponse, FaultSet,
                      ShotOutcome, build_syndrome_circuit, circuit_from_text,
                      sample_faults, shot_rng, simulate_shot,
                      single_fault_response)
from .clustering import (ClusterDecomposition, IsolatedDecomposition,
                         ScaleSchedule, StoppingReport, ThresholdReport,
                         VALIDATED_UF, analytical_threshold, check_constraints,
                         decompose_clustered, decompose_isolated, f_k,
                         minimal_witness_check, p_k_bound_log10,
                         series_constant, verify_stopping_guarantee,
                         zeta_direct)
from .decoders import (Correction, DecodeTrace, Syndrome, correction_action,
                       greedy_decode, logical_flip, peel_cluster, uf_decode)
from .detector_graph import (DetectorEdge, DetectorGraph, DetectorNode,
                             GraphBuildError, LocalityCertificate,
                             build_detector_graph, graph_from_edges,
                             spacetime_length, verify_locality)
from .experiments import (ExperimentConfig, ParallelRuntimeRecord, SweepRow,
                          decode_shot, memory_setup, parallel_uf_time,
                          rows_to_csv, run_memory, sweep, wilson_interval)
from .lattice import (Coord, Face, SurfaceCode, build_surface_code,
                      pauli_commutes, pauli_product_support, stabilizer_of)
from .tableau import Tableau

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
