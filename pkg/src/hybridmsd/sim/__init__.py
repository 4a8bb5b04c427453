"""Brute-force density-matrix simulator used as the oracle for every map."""
from .circuit import (
    H4_LAYOUT,
    H4Layout,
    OutcomeTable,
    ParityCheck,
    calibrate_h4_layout,
    h4_branch_batch,
    h4_circuit,
    h4_closed_form,
)
from .codes import (
    CODES,
    FIVE_QUBIT_CODE,
    STEANE_CODE,
    CodeSpec,
    calibrate_correction,
    code_distill,
    equal_input_distill,
)
from .states import (
    CLIFFORD_ROTATIONS,
    ImpossibleOutcome,
    PauliString,
    bloch_from_density,
    check_density,
    density_from_bloch,
    measure_projective,
    product_state,
)
