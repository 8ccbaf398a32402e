"""Abstract syntax for the evidence logic.

Three nested languages share one formula type:

* hypothesis formulas: boolean combinations of hypothesis atoms (plus the
  constant ``true``), used as arguments of the probability and evidence
  operators;
* the linear fragment: quantifier-free, variable-free formulas whose
  inequality atoms are linear in the basic terms;
* the full language: adds polynomial monomials, numeric variables, and
  first-order quantification over them.

All coefficients and comparison bounds are exact rationals.  Disjunction,
implication, existential quantification, and the comparison operators other
than ``>=`` are parse-time sugar; the AST stores only the canonical
connectives, so two formulas are equal exactly when their trees are equal.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

__all__ = [
    "Signature",
    "HTrue",
    "HAtom",
    "HNot",
    "HAnd",
    "HypothesisFormula",
    "PriorTerm",
    "PosteriorTerm",
    "WeightTerm",
    "Var",
    "Factor",
    "Monomial",
    "Term",
    "FHyp",
    "FObs",
    "Cmp",
    "FNot",
    "FAnd",
    "FForall",
    "Formula",
    "Language",
    "FormulaError",
    "ShapeError",
    "UnknownNameError",
    "h_or",
    "h_implies",
    "f_or",
    "f_implies",
    "f_exists",
    "and_all",
    "or_all",
    "cmp_ge",
    "cmp_le",
    "cmp_gt",
    "cmp_lt",
    "cmp_eq",
    "term_of",
    "negate_term",
    "subtract_terms",
    "constant_value",
    "classify",
    "free_variables",
    "is_closed",
    "validate",
    "render",
    "render_term",
    "render_hformula",
]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

#: Words with fixed meaning in the concrete syntax; not usable as names.
RESERVED_WORDS = frozenset({"Pr0", "Pr", "we", "forall", "exists", "true"})


class FormulaError(ValueError):
    """Base class for formula construction and parsing problems."""


class ShapeError(FormulaError):
    """An operator was applied to an argument of the wrong kind."""


class UnknownNameError(FormulaError):
    """An atom names neither a hypothesis nor an observation."""


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class Signature:
    """Named hypotheses and observations; both lists ordered and disjoint."""

    hypotheses: tuple[str, ...]
    observations: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "observations", tuple(self.observations))
        for group, names in (("hypotheses", self.hypotheses), ("observations", self.observations)):
            if not names:
                raise FormulaError(f"signature needs at least one of each kind; {group} is empty")
            for name in names:
                if not _NAME_RE.match(name):
                    raise FormulaError(f"invalid {group[:-1]} name: {name!r}")
                if name in RESERVED_WORDS:
                    raise FormulaError(f"{name!r} is a reserved word")
            if len(set(names)) != len(names):
                raise FormulaError(f"duplicate names among {group}")
        overlap = set(self.hypotheses) & set(self.observations)
        if overlap:
            raise FormulaError(f"names used as both hypothesis and observation: {sorted(overlap)}")

    def is_hypothesis(self, name: str) -> bool:
        return name in self.hypotheses

    def is_observation(self, name: str) -> bool:
        return name in self.observations


# ---------------------------------------------------------------------------
# Hypothesis formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HTrue:
    """The constant denoting the full hypothesis set."""


@dataclass(frozen=True)
class HAtom:
    name: str


@dataclass(frozen=True)
class HNot:
    inner: "HypothesisFormula"


@dataclass(frozen=True)
class HAnd:
    left: "HypothesisFormula"
    right: "HypothesisFormula"


HypothesisFormula = Union[HTrue, HAtom, HNot, HAnd]


def h_or(a: HypothesisFormula, b: HypothesisFormula) -> HypothesisFormula:
    return HNot(HAnd(HNot(a), HNot(b)))


def h_implies(a: HypothesisFormula, b: HypothesisFormula) -> HypothesisFormula:
    return HNot(HAnd(a, HNot(b)))


def hypothesis_atoms(rho: HypothesisFormula) -> frozenset[str]:
    if isinstance(rho, HTrue):
        return frozenset()
    if isinstance(rho, HAtom):
        return frozenset({rho.name})
    if isinstance(rho, HNot):
        return hypothesis_atoms(rho.inner)
    if isinstance(rho, HAnd):
        return hypothesis_atoms(rho.left) | hypothesis_atoms(rho.right)
    raise TypeError(f"not a hypothesis formula: {rho!r}")


def eval_hformula(rho: HypothesisFormula, truth: dict[str, bool]) -> bool:
    """Propositional truth value of ``rho`` under an atom assignment."""
    if isinstance(rho, HTrue):
        return True
    if isinstance(rho, HAtom):
        return truth[rho.name]
    if isinstance(rho, HNot):
        return not eval_hformula(rho.inner, truth)
    if isinstance(rho, HAnd):
        return eval_hformula(rho.left, truth) and eval_hformula(rho.right, truth)
    raise TypeError(f"not a hypothesis formula: {rho!r}")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PriorTerm:
    """Probability of a hypothesis formula before the observation."""

    rho: HypothesisFormula


@dataclass(frozen=True)
class PosteriorTerm:
    """Probability of a hypothesis formula after the observation."""

    rho: HypothesisFormula


@dataclass(frozen=True)
class WeightTerm:
    """Weight of evidence an observation lends to a hypothesis formula."""

    ob: str
    rho: HypothesisFormula


@dataclass(frozen=True)
class Var:
    """A numeric variable, for the quantified language."""

    name: str


Factor = Union[PriorTerm, PosteriorTerm, WeightTerm, Var]


def _factor_key(factor: Factor):
    if isinstance(factor, PriorTerm):
        return (0, render_hformula(factor.rho), "")
    if isinstance(factor, PosteriorTerm):
        return (1, render_hformula(factor.rho), "")
    if isinstance(factor, WeightTerm):
        return (2, factor.ob, render_hformula(factor.rho))
    if isinstance(factor, Var):
        return (3, factor.name, "")
    raise TypeError(f"not a term factor: {factor!r}")


@dataclass(frozen=True)
class Monomial:
    """A rational coefficient times a multiset of factors.

    Factors are stored sorted under a fixed canonical order, so two
    monomials with the same multiset compare equal.
    """

    coeff: Fraction
    factors: tuple[Factor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeff", _frac(self.coeff))
        ordered = tuple(sorted(self.factors, key=_factor_key))
        object.__setattr__(self, "factors", ordered)

    @property
    def is_constant(self) -> bool:
        return not self.factors


@dataclass(frozen=True)
class Term:
    """A sum of monomials, kept in written order (no rearrangement)."""

    monomials: tuple[Monomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "monomials", tuple(self.monomials))
        if not self.monomials:
            raise FormulaError("a term needs at least one monomial")

    @property
    def is_linear(self) -> bool:
        """At most one factor per monomial, and never a variable."""
        return all(
            len(m.factors) <= 1 and not any(isinstance(x, Var) for x in m.factors)
            for m in self.monomials
        )

    @property
    def is_constant(self) -> bool:
        return all(m.is_constant for m in self.monomials)


def term_of(*monomials: Monomial) -> Term:
    return Term(tuple(monomials))


def negate_term(t: Term) -> Term:
    return Term(tuple(Monomial(-m.coeff, m.factors) for m in t.monomials))


def subtract_terms(a: Term, b: Term) -> Term:
    return Term(a.monomials + negate_term(b).monomials)


def constant_value(t: Term) -> Fraction:
    if not t.is_constant:
        raise ShapeError("term is not constant")
    return sum((m.coeff for m in t.monomials), Fraction(0))


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FHyp:
    name: str


@dataclass(frozen=True)
class FObs:
    name: str


@dataclass(frozen=True)
class Cmp:
    """The inequality atom ``term >= bound`` with a rational bound."""

    term: Term
    bound: Fraction

    def __post_init__(self):
        object.__setattr__(self, "bound", _frac(self.bound))


@dataclass(frozen=True)
class FNot:
    inner: "Formula"


@dataclass(frozen=True)
class FAnd:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class FForall:
    var: str
    body: "Formula"


Formula = Union[FHyp, FObs, Cmp, FNot, FAnd, FForall]


def f_or(a: Formula, b: Formula) -> Formula:
    return FNot(FAnd(FNot(a), FNot(b)))


def f_implies(a: Formula, b: Formula) -> Formula:
    return FNot(FAnd(a, FNot(b)))


def f_exists(var: str, body: Formula) -> Formula:
    return FNot(FForall(var, FNot(body)))


def and_all(formulas: Iterable[Formula]) -> Formula:
    items = list(formulas)
    if not items:
        raise FormulaError("empty conjunction")
    acc = items[0]
    for f in items[1:]:
        acc = FAnd(acc, f)
    return acc


def or_all(formulas: Iterable[Formula]) -> Formula:
    items = list(formulas)
    if not items:
        raise FormulaError("empty disjunction")
    acc = items[0]
    for f in items[1:]:
        acc = f_or(acc, f)
    return acc


def cmp_ge(t: Term, bound) -> Formula:
    return Cmp(t, _frac(bound))


def cmp_le(t: Term, bound) -> Formula:
    return Cmp(negate_term(t), -_frac(bound))


def cmp_gt(t: Term, bound) -> Formula:
    return FNot(cmp_le(t, bound))


def cmp_lt(t: Term, bound) -> Formula:
    return FNot(cmp_ge(t, bound))


def cmp_eq(t: Term, bound) -> Formula:
    return FAnd(cmp_ge(t, bound), cmp_le(t, bound))


class Language(enum.Enum):
    """The three nested languages, smallest first."""

    HYPOTHESIS = "L_h"
    LINEAR = "L^ev"
    FULL = "L^fo-ev"

    def __str__(self) -> str:  # pragma: no cover - trivial
        return self.value


def _subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, FNot):
        yield from _subformulas(f.inner)
    elif isinstance(f, FAnd):
        yield from _subformulas(f.left)
        yield from _subformulas(f.right)
    elif isinstance(f, FForall):
        yield from _subformulas(f.body)


def atoms(f: Formula) -> list[Formula]:
    """Structurally distinct leaf atoms (plus quantified subtrees), in order."""
    seen: list[Formula] = []
    for node in _subformulas(f):
        if isinstance(node, (FHyp, FObs, Cmp, FForall)):
            if isinstance(node, FForall):
                if node not in seen:
                    seen.append(node)
                continue
            if node not in seen:
                seen.append(node)
    return seen


def comparison_atoms(f: Formula) -> list[Cmp]:
    """Distinct inequality atoms in first-occurrence order."""
    out: list[Cmp] = []
    for node in _subformulas(f):
        if isinstance(node, Cmp) and node not in out:
            out.append(node)
    return out


def classify(f: Formula) -> Language:
    """Smallest of the three languages containing ``f``."""
    has_cmp_or_obs = False
    for node in _subformulas(f):
        if isinstance(node, FForall):
            return Language.FULL
        if isinstance(node, FObs):
            has_cmp_or_obs = True
        elif isinstance(node, Cmp):
            has_cmp_or_obs = True
            for m in node.term.monomials:
                if len(m.factors) >= 2 or any(isinstance(x, Var) for x in m.factors):
                    return Language.FULL
    return Language.LINEAR if has_cmp_or_obs else Language.HYPOTHESIS


def free_variables(f: Formula, bound: frozenset[str] = frozenset()) -> frozenset[str]:
    if isinstance(f, (FHyp, FObs)):
        return frozenset()
    if isinstance(f, Cmp):
        found = set()
        for m in f.term.monomials:
            for factor in m.factors:
                if isinstance(factor, Var) and factor.name not in bound:
                    found.add(factor.name)
        return frozenset(found)
    if isinstance(f, FNot):
        return free_variables(f.inner, bound)
    if isinstance(f, FAnd):
        return free_variables(f.left, bound) | free_variables(f.right, bound)
    if isinstance(f, FForall):
        return free_variables(f.body, bound | {f.var})
    raise TypeError(f"not a formula: {f!r}")


def is_closed(f: Formula) -> bool:
    return not free_variables(f)


# ---------------------------------------------------------------------------
# Well-formedness against a signature
# ---------------------------------------------------------------------------


def validate_hformula(rho: HypothesisFormula, sig: Signature) -> None:
    if isinstance(rho, HTrue):
        return
    if isinstance(rho, HAtom):
        if not sig.is_hypothesis(rho.name):
            if sig.is_observation(rho.name):
                raise ShapeError(f"observation {rho.name!r} used where a hypothesis formula is required")
            raise UnknownNameError(f"unknown hypothesis: {rho.name!r}")
        return
    if isinstance(rho, HNot):
        validate_hformula(rho.inner, sig)
        return
    if isinstance(rho, HAnd):
        validate_hformula(rho.left, sig)
        validate_hformula(rho.right, sig)
        return
    raise TypeError(f"not a hypothesis formula: {rho!r}")


def _validate_factor(factor: Factor, sig: Signature) -> None:
    if isinstance(factor, (PriorTerm, PosteriorTerm)):
        validate_hformula(factor.rho, sig)
    elif isinstance(factor, WeightTerm):
        if not sig.is_observation(factor.ob):
            raise ShapeError(f"first argument of we must be an observation, got {factor.ob!r}")
        validate_hformula(factor.rho, sig)
    elif isinstance(factor, Var):
        if sig.is_hypothesis(factor.name) or sig.is_observation(factor.name):
            raise ShapeError(f"variable {factor.name!r} collides with a signature name")
        if not _NAME_RE.match(factor.name) or factor.name in RESERVED_WORDS:
            raise FormulaError(f"invalid variable name: {factor.name!r}")
    else:
        raise TypeError(f"not a term factor: {factor!r}")


def validate_term(t: Term, sig: Signature) -> None:
    for m in t.monomials:
        for factor in m.factors:
            _validate_factor(factor, sig)


def validate(f: Formula, sig: Signature) -> None:
    """Raise unless every atom of ``f`` is well-formed over ``sig``."""
    if isinstance(f, FHyp):
        if not sig.is_hypothesis(f.name):
            raise UnknownNameError(f"unknown hypothesis: {f.name!r}")
    elif isinstance(f, FObs):
        if not sig.is_observation(f.name):
            raise UnknownNameError(f"unknown observation: {f.name!r}")
    elif isinstance(f, Cmp):
        validate_term(f.term, sig)
    elif isinstance(f, FNot):
        validate(f.inner, sig)
    elif isinstance(f, FAnd):
        validate(f.left, sig)
        validate(f.right, sig)
    elif isinstance(f, FForall):
        if sig.is_hypothesis(f.var) or sig.is_observation(f.var):
            raise ShapeError(f"quantified variable {f.var!r} collides with a signature name")
        validate(f.body, sig)
    else:
        raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Rendering (canonical concrete syntax)
# ---------------------------------------------------------------------------


def render_hformula(rho: HypothesisFormula) -> str:
    if isinstance(rho, HTrue):
        return "true"
    if isinstance(rho, HAtom):
        return rho.name
    if isinstance(rho, HNot):
        inner = render_hformula(rho.inner)
        if isinstance(rho.inner, HAnd):
            inner = f"({inner})"
        return "~" + inner
    if isinstance(rho, HAnd):
        left = render_hformula(rho.left)
        right = render_hformula(rho.right)
        if isinstance(rho.right, HAnd):
            right = f"({right})"
        return f"{left} & {right}"
    raise TypeError(f"not a hypothesis formula: {rho!r}")


def _render_factor(factor: Factor) -> str:
    if isinstance(factor, PriorTerm):
        return f"Pr0({render_hformula(factor.rho)})"
    if isinstance(factor, PosteriorTerm):
        return f"Pr({render_hformula(factor.rho)})"
    if isinstance(factor, WeightTerm):
        return f"we({factor.ob}, {render_hformula(factor.rho)})"
    if isinstance(factor, Var):
        return factor.name
    raise TypeError(f"not a term factor: {factor!r}")


def _render_monomial_magnitude(m: Monomial) -> str:
    mag = abs(m.coeff)
    if not m.factors:
        return str(mag)
    factors = "*".join(_render_factor(x) for x in m.factors)
    if mag == 1:
        return factors
    return f"{mag}*{factors}"


def render_term(t: Term) -> str:
    pieces = []
    for i, m in enumerate(t.monomials):
        mag = _render_monomial_magnitude(m)
        if i == 0:
            pieces.append(("-" + mag) if m.coeff < 0 else mag)
        else:
            pieces.append(("- " if m.coeff < 0 else "+ ") + mag)
    return " ".join(pieces)


def render(f: Formula) -> str:
    """Canonical text: only ``~``, ``&``, ``forall``, and ``>=`` atoms.

    ``parse(render(f))`` reproduces ``f`` exactly; sugar present when a
    formula was first written does not survive the round trip.
    """
    if isinstance(f, (FHyp, FObs)):
        return f.name
    if isinstance(f, Cmp):
        return f"{render_term(f.term)} >= {f.bound}"
    if isinstance(f, FNot):
        inner = render(f.inner)
        if isinstance(f.inner, (FAnd, Cmp)):
            inner = f"({inner})"
        return "~" + inner
    if isinstance(f, FAnd):
        left = render(f.left)
        right = render(f.right)
        if isinstance(f.right, FAnd):
            right = f"({right})"
        return f"{left} & {right}"
    if isinstance(f, FForall):
        body = render(f.body)
        if isinstance(f.body, FAnd):
            body = f"({body})"
        return f"forall {f.var} {body}"
    raise TypeError(f"not a formula: {f!r}")
