"""Evidential structures and the satisfaction relation.

A structure pairs a set of admissible (hypothesis, observation) states and
a finite set of candidate priors with an evidence space.  A world fixes one
state and one prior; term evaluation at a world reads the prior directly,
reads weights from the space, and obtains the post-observation probability
by combining the prior with the weight row of the world's observation.

Evaluation is exact and read-only; structures are immutable and safe to
share.  Quantified formulas are rejected here: checking them would require
deciding first-order real arithmetic, which is out of scope for this
package (the satisfiability routine handles the quantifier-free linear
fragment instead).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from . import evidence as ev
from .formula import (
    Cmp,
    FAnd,
    FForall,
    FHyp,
    FNot,
    FObs,
    Formula,
    HAnd,
    HAtom,
    HNot,
    HTrue,
    HypothesisFormula,
    PosteriorTerm,
    PriorTerm,
    Signature,
    Term,
    Var,
    WeightTerm,
    validate,
)

__all__ = [
    "SemanticsError",
    "UndefinedPosteriorError",
    "UnboundVariableError",
    "QuantifierUnsupportedError",
    "EvidentialStructure",
    "World",
    "ValidityReport",
    "denote",
    "eval_term",
    "satisfies",
    "valid_in",
    "check_validity",
]


class SemanticsError(ValueError):
    """Base class for evaluation problems."""


class UndefinedPosteriorError(SemanticsError):
    """The prior gives mass zero to every hypothesis the observation supports."""

    def __init__(self, world: "World"):
        super().__init__(
            f"posterior undefined at world (h={world.h!r}, ob={world.ob!r}): "
            "the prior assigns zero mass to every hypothesis consistent with the observation"
        )
        self.world = world


class UnboundVariableError(SemanticsError):
    pass


class QuantifierUnsupportedError(SemanticsError):
    pass


@dataclass(frozen=True)
class World:
    """One admissible state plus the prior in force there."""

    h: str
    ob: str
    mu: ev.Distribution


@dataclass(frozen=True)
class EvidentialStructure:
    """States, candidate priors, and an evidence space over one signature.

    The prior set must be finite and nonempty so validity can be decided by
    enumerating worlds; worlds themselves are never stored, only produced on
    demand as states x priors.
    """

    sig: Signature
    states: tuple[tuple[str, str], ...]
    priors: tuple[ev.Distribution, ...]
    space: ev.EvidenceSpace

    def __post_init__(self):
        object.__setattr__(self, "states", tuple((h, ob) for h, ob in self.states))
        object.__setattr__(self, "priors", tuple(self.priors))
        if not self.states:
            raise SemanticsError("a structure needs at least one state")
        if not self.priors:
            raise SemanticsError("a structure needs at least one prior")
        if self.space.sig != self.sig:
            raise SemanticsError("evidence space signature differs from the structure signature")
        seen = set()
        for h, ob in self.states:
            if not self.sig.is_hypothesis(h) or not self.sig.is_observation(ob):
                raise SemanticsError(f"state ({h!r}, {ob!r}) is outside the signature product")
            if (h, ob) in seen:
                raise SemanticsError(f"duplicate state ({h!r}, {ob!r})")
            seen.add((h, ob))
        for mu in self.priors:
            if mu.hypotheses != self.sig.hypotheses:
                raise SemanticsError("prior is not over the structure's hypotheses")

    def worlds(self) -> Iterator[World]:
        for h, ob in self.states:
            for mu in self.priors:
                yield World(h, ob, mu)

    def validate_world(self, w: World) -> None:
        if (w.h, w.ob) not in self.states:
            raise SemanticsError(f"({w.h!r}, {w.ob!r}) is not a state of the structure")
        if w.mu not in self.priors:
            raise SemanticsError("the world's prior is not one of the structure's priors")


def denote(rho: HypothesisFormula, sig: Signature) -> frozenset[str]:
    """The set of hypotheses a hypothesis formula names."""
    if isinstance(rho, HTrue):
        return frozenset(sig.hypotheses)
    if isinstance(rho, HAtom):
        if not sig.is_hypothesis(rho.name):
            raise SemanticsError(f"unknown hypothesis: {rho.name!r}")
        return frozenset({rho.name})
    if isinstance(rho, HNot):
        return frozenset(sig.hypotheses) - denote(rho.inner, sig)
    if isinstance(rho, HAnd):
        return denote(rho.left, sig) & denote(rho.right, sig)
    raise TypeError(f"not a hypothesis formula: {rho!r}")


class _WorldEvaluator:
    """Caches the world's posterior across the terms of one evaluation."""

    def __init__(self, m: EvidentialStructure, w: World, valuation: Mapping[str, Fraction]):
        self.m = m
        self.w = w
        self.valuation = valuation
        self._posterior: ev.Distribution | None = None

    def posterior(self) -> ev.Distribution:
        if self._posterior is None:
            try:
                self._posterior = ev.posterior(self.m.space, self.w.mu, self.w.ob)
            except ev.DisjointSupportError:
                raise UndefinedPosteriorError(self.w) from None
        return self._posterior

    def factor_value(self, factor) -> Fraction:
        if isinstance(factor, PriorTerm):
            return self.w.mu.mass_of(denote(factor.rho, self.m.sig))
        if isinstance(factor, PosteriorTerm):
            return self.posterior().mass_of(denote(factor.rho, self.m.sig))
        if isinstance(factor, WeightTerm):
            return ev.weight(self.m.space, factor.ob, denote(factor.rho, self.m.sig))
        if isinstance(factor, Var):
            try:
                return Fraction(self.valuation[factor.name])
            except KeyError:
                raise UnboundVariableError(f"unbound variable: {factor.name!r}") from None
        raise TypeError(f"not a term factor: {factor!r}")

    def term_value(self, t: Term) -> Fraction:
        total = Fraction(0)
        for mono in t.monomials:
            value = mono.coeff
            for factor in mono.factors:
                value *= self.factor_value(factor)
            total += value
        return total

    def holds(self, f: Formula) -> bool:
        if isinstance(f, FHyp):
            return f.name == self.w.h
        if isinstance(f, FObs):
            return f.name == self.w.ob
        if isinstance(f, Cmp):
            return self.term_value(f.term) >= f.bound
        if isinstance(f, FNot):
            return not self.holds(f.inner)
        if isinstance(f, FAnd):
            return self.holds(f.left) and self.holds(f.right)
        if isinstance(f, FForall):
            raise QuantifierUnsupportedError(
                "quantified formulas cannot be model-checked; only the quantifier-free "
                "fragment is supported"
            )
        raise TypeError(f"not a formula: {f!r}")


def eval_term(
    m: EvidentialStructure,
    w: World,
    t: Term,
    valuation: Mapping[str, Fraction] | None = None,
) -> Fraction:
    """Exact value of a polynomial term at a world."""
    m.validate_world(w)
    return _WorldEvaluator(m, w, valuation or {}).term_value(t)


def satisfies(
    m: EvidentialStructure,
    w: World,
    f: Formula,
    valuation: Mapping[str, Fraction] | None = None,
) -> bool:
    """Truth of a quantifier-free formula at a world."""
    validate(f, m.sig)
    m.validate_world(w)
    return _WorldEvaluator(m, w, valuation or {}).holds(f)


def valid_in(m: EvidentialStructure, f: Formula) -> bool:
    """Truth at every world of the structure (closed, quantifier-free formulas).

    An undefined posterior at any world is raised as an error naming the
    world rather than silently counted either way.
    """
    from .formula import is_closed

    if not is_closed(f):
        raise SemanticsError("validity is only defined for closed formulas")
    validate(f, m.sig)
    for w in m.worlds():
        if not _WorldEvaluator(m, w, {}).holds(f):
            return False
    return True


@dataclass(frozen=True)
class ValidityReport:
    """Validity over the worlds where evaluation is defined.

    ``holds`` ignores worlds with an undefined posterior; those worlds are
    reported separately so callers can decide whether partiality matters.
    """

    holds: bool
    counterexample: World | None
    undefined: tuple[World, ...]


def check_validity(m: EvidentialStructure, f: Formula) -> ValidityReport:
    from .formula import is_closed

    if not is_closed(f):
        raise SemanticsError("validity is only defined for closed formulas")
    validate(f, m.sig)
    undefined = []
    counterexample = None
    for w in m.worlds():
        try:
            if not _WorldEvaluator(m, w, {}).holds(f):
                counterexample = w
                break
        except UndefinedPosteriorError:
            undefined.append(w)
    return ValidityReport(
        holds=counterexample is None,
        counterexample=counterexample,
        undefined=tuple(undefined),
    )
