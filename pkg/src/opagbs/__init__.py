"""Entanglement and photon statistics of lossy SU(1,1) networks of two-mode squeezers."""
from .entanglement import (
    NegativityResult,
    contiguous_partitions,
    log_negativity,
    partial_transpose,
    partition_sweep,
)
from .exceptions import NumericalError, ResourceLimitError, UnphysicalStateError
from .gaussian_core import (
    CovarianceState,
    QuadratureOrdering,
    SymplecticMatrix,
    bloch_messiah_two_mode,
    complex_to_quad,
    quad_to_complex,
    symplectic_eigenvalues,
    symplectic_form,
    vacuum_state,
)
from .hafnian import hafnian, hafnian_bruteforce, hafnian_fast
from .loss_channels import (
    GaussianChannel,
    compose,
    loss_channel,
    lossy_network_channel,
    operator_moment_covariance,
    output_state,
)
from .opa_network import Bipartition, NetworkSpec, OpaSpec, network_symplectic, propagate_lossless
from .sampling import (
    PhotonPattern,
    WMatrices,
    build_w,
    enumerate_distribution,
    fock_oracle_two_mode,
    pattern_probability,
    sample_patterns,
)

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "CovarianceState",
    "GaussianChannel",
    "NegativityResult",
    "NetworkSpec",
    "NumericalError",
    "OpaSpec",
    "PhotonPattern",
    "QuadratureOrdering",
    "ResourceLimitError",
    "SymplecticMatrix",
    "UnphysicalStateError",
    "WMatrices",
    "bloch_messiah_two_mode",
    "build_w",
    "complex_to_quad",
    "compose",
    "contiguous_partitions",
    "enumerate_distribution",
    "fock_oracle_two_mode",
    "hafnian",
    "hafnian_bruteforce",
    "hafnian_fast",
    "log_negativity",
    "loss_channel",
    "lossy_network_channel",
    "network_symplectic",
    "operator_moment_covariance",
    "output_state",
    "partial_transpose",
    "partition_sweep",
    "pattern_probability",
    "propagate_lossless",
    "quad_to_complex",
    "sample_patterns",
    "symplectic_eigenvalues",
    "symplectic_form",
    "vacuum_state",
]
