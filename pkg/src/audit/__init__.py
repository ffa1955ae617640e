from src.audit.suites import (
    Check, Suite, AxiomSuite, TheoremSuite, StructureSuite, SpectralSuite, ConditioningSuite, RepresentationSuite,
    CombinedSuite,
)
