"""Heat-bath algorithmic cooling: bias algebra, exact circuit simulation,
error thresholds and limits, cooling schedules, and an ABC-chain tape
emulator with a command-line front end (`hbcool`)."""

from .bias import (
    ErrorRates,
    bias_from_prob,
    debias_step,
    fibonacci,
    iterate_to_fixed_point,
    prob_from_bias,
    steady_state_bias,
    steady_state_bias_noisy,
    three_bc_bias,
    three_bc_bias_unequal,
    two_bc_accept_bias,
    two_bc_accept_prob,
)
from .circuits import (
    Circuit,
    Gate,
    apply_gate,
    circuit_from_text,
    circuit_to_text,
    cnot_cswap_majority,
    majority_circuit_cswap,
    majority_circuit_toffoli,
    two_bc_circuit,
    two_bc_sort_circuit,
)
from .cooling import (
    CoolingResult,
    CostLedger,
    RegisterBiases,
    fibonacci_algorithm,
    fibonacci_bound_check,
    heatbath_recursive,
    random_hb_trace_check,
    run_with_noise,
    simple_recursive,
    three_bc_hb,
    trace_to_jsonl,
)
from .distribution import JointDistribution, product_distribution
from .limits import (
    ASYM_AFTER,
    ASYM_DURING,
    SYM_AFTER,
    SYM_DURING,
    BiasUpdateModel,
    LimitReport,
    attracting_limit,
    bisect_root,
    blim_asym_after,
    blim_asym_after_second_order,
    blim_asym_during,
    blim_asym_during_second_order,
    blim_sym_after,
    blim_sym_after_second_order,
    blim_sym_during,
    blim_sym_during_second_order,
    limit_report,
    make_model,
    newbias_asym_after,
    newbias_asym_during,
    newbias_sym_after,
    newbias_sym_during,
    summary_table,
    threshold_sym_after,
    threshold_sym_during,
)
from .noise import (
    brute_force_best_permutation_bias,
    best_bias_over_permutations,
    enumerate_noisy_output_bias,
    optimal_permutation_bias,
    pattern_bits,
    pattern_index,
    symmetric_pattern_probability,
)
from .tape import (
    ChainLoop,
    PrimitiveOp,
    apply_permutation,
    bring_pair_under_head,
    compile_cooling_step,
    execute,
    pulse_program_from_text,
    pulse_program_to_text,
    shift_sequence,
    swap_adjacent,
)

__version__ = "0.1.0"
