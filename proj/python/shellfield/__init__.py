"""Mass-shell pairings, smeared-field operator algebra, and Gaussian
random-field sampling over finite mode sets.

The compiled core carries the numerics; this package re-exports it.
"""

from ._core import (  # noqa: F401
    RNG_ALGORITHM,
    FockState,
    GramMatrix,
    KernelKind,
    QuadratureRule,
    SampleBatch,
    ShellConfig,
    TestFunction,
    __version__,
    ccr_commutator,
    classical_ip,
    commutator_kernel,
    compare_to_fock,
    empirical_moments,
    field_commutator,
    field_moment,
    gram,
    pairing,
    quantum_ip,
    resonance_nonlocality_witness,
    resonance_probability,
    sample,
)
