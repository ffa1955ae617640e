from src.effects.errors import CoseaError
from src.effects.core import (
    ToleranceConfig, Effect, Algebra, check_same, complement, orthogonal, oplus, ominus, scalar, le, seq,
    commutes, commutes_by_seq, distance, equal, is_zero,
)
