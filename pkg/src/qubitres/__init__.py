"""Two qubits coupled to a thermal reservoir: resonance theory of decoherence and entanglement."""
from .system import SystemParams, cluster_partition, hamiltonian_eigenvalues
from .spectral import FormFactor, SpectralData
from .rates import CouplingSet, lowest_order_rates
from .density import DensityMatrix4
from .propagator import ResonanceData, evolve, evolve_grid, resonance_data

__version__ = "0.1.0"
