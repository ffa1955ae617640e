from src.representation.comparability import (
    ContextSpace, ComparabilityData, context_space, L_operator, validate_comparability, canonical_unitaries, extend,
)
from src.representation.transport import (
    SelfTestReport, TransportedProduct, tilde, represent_J, transported_product, strong_comparability_residual,
    representation_self_test,
)
