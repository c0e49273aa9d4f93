"""
kzassoc: truncated KZ and cyclotomic associators with verified relations.

The package computes the Drinfeld KZ associator Phi, the cyclotomic
associators Psi_N and Phi_1/2 as renormalized holonomies in truncated free
algebras with mpmath coefficients, and checks the relations between them
(hexagon, dualities, octogon, distribution, changes of variable and the U(t4)
relation) as residuals ``LHS * RHS^-1 - 1``.

Usage:
    from kzassoc import AssociatorStore, verify_hexagon_psi4, setup_logging

    setup_logging()
    store = AssociatorStore(prec=192, terms=120)
    row = verify_hexagon_psi4(store)
    print(row.residual, row.passed)

Log records are JSON on STDERR; see :func:`setup_logging`.
"""

from .automorphisms import (
    MobiusSymmetry,
    delta_map,
    mobius_to_automorphism,
    named_automorphisms,
    pi_map,
)
from .decorators import trace
from .errors import (
    ArityError,
    BackendMismatchError,
    ContractViolation,
    DomainError,
    DslError,
    DslSyntaxError,
    KzAssocError,
    ResourceGuardError,
    SeriesFormatError,
    UnboundNameError,
)
from .filters import RunContextFilter
from .formatters import JsonLogFormatter
from .holonomy import (
    ConnectionData,
    compute_phi,
    compute_phi_half,
    compute_psi,
    cyclotomic_alphabet,
    ode_oracle_psi,
    renormalized_holonomy,
)
from .ncseries import Alphabet, GeneratorMap, Series, apply_hom, exp, inverse, log, mul
from .relations import (
    AssociatorStore,
    VerificationReport,
    verify_all,
    verify_broadhurst,
    verify_distributivity,
    verify_hexagon_psi4,
    verify_ns1,
    verify_ns2,
    verify_octogon,
    verify_okuda,
    verify_phi_duality,
    verify_phi_half,
    verify_t4_relation,
)
from .reldsl import bind_and_eval, parse, parse_catalogue
from .setup import setup_logging
from .t4algebra import NormalFormTable, build_normal_forms

__all__ = [
    "Alphabet",
    "ArityError",
    "AssociatorStore",
    "BackendMismatchError",
    "ConnectionData",
    "ContractViolation",
    "DomainError",
    "DslError",
    "DslSyntaxError",
    "GeneratorMap",
    "JsonLogFormatter",
    "KzAssocError",
    "MobiusSymmetry",
    "NormalFormTable",
    "ResourceGuardError",
    "RunContextFilter",
    "Series",
    "SeriesFormatError",
    "UnboundNameError",
    "VerificationReport",
    "apply_hom",
    "bind_and_eval",
    "build_normal_forms",
    "compute_phi",
    "compute_phi_half",
    "compute_psi",
    "cyclotomic_alphabet",
    "delta_map",
    "exp",
    "inverse",
    "log",
    "mobius_to_automorphism",
    "mul",
    "named_automorphisms",
    "ode_oracle_psi",
    "parse",
    "parse_catalogue",
    "pi_map",
    "renormalized_holonomy",
    "setup_logging",
    "trace",
    "verify_all",
    "verify_broadhurst",
    "verify_distributivity",
    "verify_hexagon_psi4",
    "verify_ns1",
    "verify_ns2",
    "verify_octogon",
    "verify_okuda",
    "verify_phi_duality",
    "verify_phi_half",
    "verify_t4_relation",
]
