"""
Exception hierarchy for the gadget reinforcement learning engine.

Every error raised by the package derives from GrlError, so callers (the CLI in
particular) can catch one type. Each concrete error also derives from the
builtin exception it refines.
"""


class GrlError(Exception):
    """Base class for all errors raised by this package."""
    pass


# ===================================================================
# SIMULATION
# ===================================================================

class QubitIndexError(GrlError, IndexError):
    """A gate or Pauli term addresses a qubit outside the register."""
    pass


class UnboundParameterError(GrlError, ValueError):
    """A gate still carries a symbolic parameter where a number is needed."""
    pass


class QubitCountMismatchError(GrlError, ValueError):
    """Two objects that must share a register size do not."""
    pass


class ImaginaryResidueError(GrlError, ArithmeticError):
    """An expectation value came out with a non-negligible imaginary part."""
    pass


class OracleBoundError(GrlError, ValueError):
    """Dense diagonalization requested above the supported qubit count."""
    pass


class InvalidHamiltonianError(GrlError, ValueError):
    """A Hamiltonian or model specification is malformed."""
    pass


# ===================================================================
# CIRCUITS AND ENCODING
# ===================================================================

class InvalidGateError(GrlError, ValueError):
    """A gate instruction violates its kind's arity or parameter rules."""
    pass


class ParameterCountError(GrlError, ValueError):
    """The number of values does not match the number of free parameters."""
    pass


class EncodingError(GrlError, ValueError):
    """A circuit cannot be encoded under the given encoding spec."""
    pass


class MalformedObservationError(GrlError, ValueError):
    """An observation tensor does not describe a valid circuit."""
    pass


class GadgetArityError(GrlError, ValueError):
    """A gadget acts on more qubits than the supported maximum."""
    pass


# ===================================================================
# REINFORCEMENT LEARNING
# ===================================================================

class EpisodeFinishedError(GrlError, RuntimeError):
    """step() was called on an environment whose episode is over."""
    pass


class ActionIndexError(GrlError, IndexError):
    """An action index is outside the current action table."""
    pass


class InsufficientMemoryError(GrlError, RuntimeError):
    """The replay memory holds fewer transitions than one batch."""
    pass


# ===================================================================
# PROGRAM SYNTHESIS
# ===================================================================

class UncoveredGateKindError(GrlError, ValueError):
    """A corpus uses a gate kind the grammar has no primitive for."""
    pass


class EmptyCorpusError(GrlError, ValueError):
    """Fragment enumeration or extraction was given no circuits."""
    pass


# ===================================================================
# CONFIGURATION AND ARTIFACTS
# ===================================================================

class InvalidConfigError(GrlError, ValueError):
    """A configuration file or preset is invalid."""
    pass


class ArtifactError(GrlError, FileNotFoundError):
    """A persisted artifact is missing or malformed."""
    pass
