"""Specification-pattern catalog and seeded formula generators.

Templates are written with placeholder atoms ``P Q R S T Z`` and use ``->``
freely. Templates that need weak until (``W``) are kept in the catalog so
reports can list them, but they cannot be instantiated.
"""
from __future__ import annotations

import re

import numpy as np

from errors import NotExpressible
from logs import get_logger
from ltl import And, Atom, Eventually, Formula, Globally, Next, Not, Or, Until, atoms, parse, rename_many
from monitor import Topology

logger = get_logger("progmon.patterns")

WEAK_UNTIL = re.compile(r"\bW\b")

CATALOG: dict[str, tuple[str, ...]] = {
    "absence": (
        "G !P",
        "F R -> (!P U R)",
        "G (Q -> G !P)",
        "G ((Q & !R & F R) -> (!P U R))",
        "G (Q & !R -> (!P W R))",
    ),
    "existence": (
        "F P",
        "!R W (P & !R)",
        "G !Q | F (Q & F P)",
        "G (Q & !R -> (!R W (P & !R)))",
        "G (Q & !R -> (!R U (P & !R)))",
    ),
    "bounded-existence": (
        "(!P U ((P U ((!P U ((P U G !P) | G P)) | G !P)) | G P)) | G !P",
        "F R -> ((!P & !R) U (R | ((P & !R) U (R | ((!P & !R) U (R | ((P & !R) U (R | (!P U R)))))))))",
        "G (Q & !R -> ((!P & !R) U (R | ((P & !R) U (R | ((!P & !R) U (R | ((P & !R) U (R | (!P W R) | G P)))))))))",
    ),
    "universal": (
        "G P",
        "F R -> (P U R)",
        "G (Q -> G P)",
        "G ((Q & !R & F R) -> (P U R))",
        "G (Q & !R -> (P W R))",
    ),
    "precedence": (
        "(!P U S) | G !P",
        "F R -> (!P U (S | R))",
        "G !Q | F (Q & (!P W S))",
        "G ((Q & !R & F R) -> (!P U (S | R)))",
    ),
    "response": (
        "G (P -> F S)",
        "F R -> (P -> (!R U (S & !R))) U R",
        "G (Q -> G (P -> F S))",
        "G ((Q & !R & F R) -> (P -> (!R U (S & !R))) U R)",
        "G (Q & !R -> ((P -> (!R U (S & !R))) W R))",
    ),
    "precedence-chain": (
        "F P -> (!P U (S & !P & X (!P U T)))",
        "F R -> (!P U (R | (S & !P & X (!P U T))))",
        "F (S & X F T) -> (!S U P)",
        "G !Q | F (Q & (F P -> (!P U (S & !P & X (!P U T)))))",
    ),
    "response-chain": (
        "G (P -> F (S & X F T))",
        "G (S & X F T -> X (!T U (T & F P)))",
        "G (Q -> G (P -> F (S & X F T)))",
        "F R -> (P -> (!R U (S & !R & X (!R U T)))) U R",
    ),
    "constrained-chain": (
        "G (P -> F (S & !Z & X (!Z U T)))",
        "G (Q -> G (P -> F (S & !Z & X (!Z U T))))",
        "F R -> (P -> (!R U (S & !R & !Z & X ((!R & !Z) U T)))) U R",
    ),
}

PATTERN_CLASSES = tuple(CATALOG)

ABBREVIATIONS = {
    "absence": "abs",
    "existence": "exis",
    "bounded-existence": "bexis",
    "universal": "univ",
    "precedence": "prec",
    "response": "resp",
    "precedence-chain": "precc",
    "response-chain": "respc",
    "constrained-chain": "consc",
}


def compile_template(template: str) -> Formula:
    """Parse a template; weak until has no counterpart in the formula grammar.

    Raises:
        NotExpressible: the template uses ``W``.
    """
    if WEAK_UNTIL.search(template):
        raise NotExpressible(template, "weak until is outside the formula grammar")
    return parse(template)


def templates(cls: str) -> tuple[str, ...]:
    try:
        return CATALOG[cls]
    except KeyError:
        raise ValueError(f"unknown pattern class {cls!r}; choose from {', '.join(PATTERN_CLASSES)}") from None


def skipped_templates(cls: str) -> list[str]:
    return [text for text in templates(cls) if WEAK_UNTIL.search(text)]


def gen_pattern(cls: str, topo: Topology, seed: int) -> Formula:
    """Instantiate one template of ``cls`` with distinct atoms observed in ``topo``.

    The template is picked from the seed; inexpressible templates are passed
    over in catalog order.

    Raises:
        NotExpressible: no template of the class can be written in the grammar.
        ValueError: the alphabet is smaller than the template's placeholders.
    """
    names = sorted(topo.alphabet)
    options = templates(cls)
    rng = np.random.default_rng(seed)
    start = int(rng.integers(len(options)))
    for offset in range(len(options)):
        text = options[(start + offset) % len(options)]
        try:
            template = compile_template(text)
        except NotExpressible as e:
            logger.debug(f"Skipping {cls} template: {e}")
            continue
        placeholders = sorted(atoms(template))
        if len(placeholders) > len(names):
            raise ValueError(f"{cls} template {text!r} needs {len(placeholders)} atoms, alphabet has {len(names)}")
        chosen = rng.choice(names, size=len(placeholders), replace=False)
        return rename_many(template, {ph: str(name) for ph, name in zip(placeholders, chosen)})
    raise NotExpressible(cls, "every template needs weak until")


def random_formula(rng: np.random.Generator, names, depth: int) -> Formula:
    """Seeded random formula over ``names`` with nesting at most ``depth``."""
    names = sorted(names)
    if depth <= 0 or rng.random() < 0.25:
        return Atom(str(rng.choice(names)))
    kind = int(rng.integers(7))
    if kind == 0:
        return Not(random_formula(rng, names, depth - 1))
    if kind == 1:
        return And(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))
    if kind == 2:
        return Or(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))
    if kind == 3:
        return Next(random_formula(rng, names, depth - 1))
    if kind == 4:
        return Eventually(random_formula(rng, names, depth - 1))
    if kind == 5:
        return Globally(random_formula(rng, names, depth - 1))
    return Until(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))
