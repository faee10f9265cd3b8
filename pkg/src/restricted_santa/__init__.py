"""Quasi-polynomial local search for restricted max-min fair allocation."""

from .certificate import DualCertificate, build_dual_certificate, verify_dual_certificate
from .engine import Edge, Matching, distance_bound, extend_matching, lex_less, signature_of
from .errors import InvariantBreach, Malformed, TooLarge
from .model import (
    Allocation,
    Approximation,
    Instance,
    Kind,
    bundle_value,
    classify_resource,
    generate_instance,
    load_instance,
    make_instance,
    validate_instance,
)
from .oracle import exact_opt
from .solver import decide, solve, verify_allocation

__all__ = [
    "Allocation",
    "Approximation",
    "DualCertificate",
    "Edge",
    "Instance",
    "InvariantBreach",
    "Kind",
    "Malformed",
    "Matching",
    "TooLarge",
    "build_dual_certificate",
    "bundle_value",
    "classify_resource",
    "decide",
    "distance_bound",
    "exact_opt",
    "extend_matching",
    "generate_instance",
    "lex_less",
    "load_instance",
    "make_instance",
    "signature_of",
    "solve",
    "validate_instance",
    "verify_allocation",
    "verify_dual_certificate",
]
