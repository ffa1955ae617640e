from src.spectral.forms import (
    SpectralForm, SpectrumStats, spectral_form, context_representation, spectrum_stats, is_eigeneffect,
)
from src.spectral.inverse import (
    InverseAudit, InverseSweep, ceiling, pseudo_inverse, is_invertible, inverse, involution_residuals,
    audit_inverse_preserving, sample_invertible, inverse_preservation_sweep,
)
