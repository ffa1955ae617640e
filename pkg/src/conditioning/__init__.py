from src.conditioning.gamma import (
    ConditionReport, FixedPoint, evaluate, condition, gamma_apply, verify_gamma_identities, gamma_fixed_point,
)
from src.conditioning.certainty import (
    UNIQUE, NONE, MANY,
    CertaintyVerdict, DispersionVerdict, HatStateReport, OrderReport, unique_certainty_state, dispersion_analysis,
    verify_hat_state_laws, order_determined, state_panel,
)
