"""Finite poset reconstruction workbench.

Core poset values, canonical certificates, order-autonomous decomposition,
deck machinery, pseudo-similar pair structure, deck-only reconstruction
procedures, and an exhaustive property verifier with a CLI.
"""

from .core import Poset, linear_sum, disjoint_union, parse_poset_text, format_poset_text
from .canonical import Cert, canonical_cert, cert_to_poset, isomorphic
from .deck import Deck, deck, invert_deck, pi_deck

__all__ = [
    "Poset",
    "linear_sum",
    "disjoint_union",
    "parse_poset_text",
    "format_poset_text",
    "Cert",
    "canonical_cert",
    "cert_to_poset",
    "isomorphic",
    "Deck",
    "deck",
    "invert_deck",
    "pi_deck",
]
