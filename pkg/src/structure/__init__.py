from src.structure.commutant import (
    CommutantBasis, algebra_span, in_commutant, commutant_basis, center_basis, is_factor,
)
from src.structure.factors import (
    CentralSplit, FactorDecomposition, central_split, minimal_central_sharps, factorize,
)
from src.structure.joint import (
    CommutantWitness, Refusal, simultaneous_atoms, joint_context, atom_commutant_witness,
)
