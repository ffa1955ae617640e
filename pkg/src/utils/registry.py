suite = {
    "all": "src.audit.suites.CombinedSuite",
    "axioms": "src.audit.suites.AxiomSuite",
    "theorems": "src.audit.suites.TheoremSuite",
    "structure": "src.audit.suites.StructureSuite",
    "spectral": "src.audit.suites.SpectralSuite",
    "conditioning": "src.audit.suites.ConditioningSuite",
    "representation": "src.audit.suites.RepresentationSuite",
}

backend = {
    "classical": "src.backends.classical.ClassicalAlgebra",
    "hilbertian": "src.backends.hilbertian.HilbertianAlgebra",
    "direct_sum": "src.backends.sums.direct_sum",
}

command = {
    "check": "src.cli.commands.check",
    "decompose": "src.cli.commands.decompose",
    "spectrum": "src.cli.commands.spectrum",
    "condition": "src.cli.commands.condition_command",
    "represent": "src.cli.commands.represent",
    "audit-inverse": "src.cli.commands.audit_inverse",
}
