from src.backends.states import State, zero_state, pair, ds_state, ds_state_decompose, tomography, state_distance
from src.backends.classical import ClassicalAlgebra, make_classical_effect
from src.backends.hilbertian import HilbertianAlgebra, make_hilbertian_effect
from src.backends.sums import DirectSumAlgebra, direct_sum, ds_effect, ds_project
from src.backends.contexts import (
    Context, make_context, context_from_vectors, context_from_unitary, standard_context, ds_contexts,
    context_coefficients, context_residual, is_sharp, is_one_dimensional, support_vector, hat_state,
    transition_probability,
)