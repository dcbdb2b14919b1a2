"""Gate compilation for switched Josephson charge-qubit networks.

Commands are sequences of letters (a switch setting held for a duration);
executing a command yields a unitary. The compiler searches letter
durations that realise a target gate up to the SU(n) phase.
"""

from .compiler import (
    CompileResult,
    OptimizerConfig,
    Template,
    closed_form_command,
    closed_form_schedule,
    compile1_device,
    compile1_embedded,
    compile2,
    embedded_template,
    evolve,
    f_test,
    grad_f,
    one_qubit_device_template,
    two_qubit_template,
)
from .device import DEFAULT_ENERGIES, EnergyConfig, SwitchState, hamiltonian1, hamiltonian2
from .gates import GateTarget, from_matrix, library, phase_fidelity, su_project
from .liealg import GeneratorSet, device_generators, lie_closure_dim, standard_generators
from .qml import Command, Letter, Letter1, command_from_times, dump, execute, load, parse, serialize

__version__ = "0.1.0"
