"""Recursive-descent parser for the concrete formula syntax.

The grammar (EBNF, also shipped under ``docs/grammar.ebnf``):

    formula     = implied ;
    implied     = ored , [ "=>" , implied ] ;
    ored        = anded , { "|" , anded } ;
    anded       = unary , { "&" , unary } ;
    unary       = "~" , unary
                | ( "forall" | "exists" ) , variable , unary
                | atom ;
    atom        = comparison | name | "(" , formula , ")" ;
    comparison  = term , ( ">=" | "<=" | ">" | "<" | "=" ) , term ;
    term        = [ "-" ] , monomial , { ( "+" | "-" ) , monomial } ;
    monomial    = operand , { "*" , operand } ;
    operand     = constant , [ "/" , constant ] | basic | variable ;
    basic       = "Pr0" , "(" , hformula , ")"
                | "Pr" , "(" , hformula , ")"
                | "we" , "(" , name , "," , hformula , ")" ;
    constant    = ( integer | "(" , constexpr , ")" ) , [ "^" , [ "-" ] , integer ] ;
    constexpr   = arithmetic over constants with + - * / ^ and parentheses ;
    hformula    = same connective grammar over hypothesis names and "true" ;

Constant arithmetic is folded to an exact rational while parsing; division
is permitted only between constants.  Disjunction, implication, ``exists``,
and the comparison operators other than ``>=`` are rewritten into the
canonical connectives, so the parser returns exactly the trees described in
``formula``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .formula import (
    Cmp,
    FAnd,
    FForall,
    FHyp,
    FNot,
    FObs,
    Factor,
    Formula,
    FormulaError,
    HAtom,
    HTrue,
    HypothesisFormula,
    HNot,
    HAnd,
    Monomial,
    PosteriorTerm,
    PriorTerm,
    RESERVED_WORDS,
    ShapeError,
    Signature,
    Term,
    UnknownNameError,
    Var,
    WeightTerm,
    cmp_eq,
    cmp_ge,
    cmp_gt,
    cmp_le,
    cmp_lt,
    constant_value,
    f_exists,
    f_implies,
    f_or,
    h_implies,
    h_or,
    subtract_terms,
)

__all__ = ["ParseError", "parse_formula", "parse_term_text", "parse_hformula_text"]


class ParseError(FormulaError):
    """Syntax error, carrying the character offset where it was noticed."""

    def __init__(self, message: str, position: int):
        super().__init__(f"at position {position}: {message}")
        self.position = position


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<int>\d+)
      | (?P<op>>=|<=|=>|[=<>&|~()+\-*/^,])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # name | int | op | eof
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


_CMP_OPS = (">=", "<=", ">", "<", "=")


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.sig = sig

    # -- token plumbing ----------------------------------------------------

    def _peek(self) -> _Token:
        return self.tokens[self.pos]

    def _next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect(self, text: str) -> _Token:
        tok = self._peek()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self._next()

    def _err(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self._peek()
        return ParseError(message, tok.pos)

    # -- formulas ----------------------------------------------------------

    def parse_formula(self) -> Formula:
        f = self._implied()
        tok = self._peek()
        if tok.kind != "eof":
            raise self._err(f"unexpected trailing input {tok.text!r}", tok)
        return f

    def _implied(self) -> Formula:
        left = self._ored()
        if self._peek().text == "=>":
            self._next()
            return f_implies(left, self._implied())
        return left

    def _ored(self) -> Formula:
        acc = self._anded()
        while self._peek().text == "|":
            self._next()
            acc = f_or(acc, self._anded())
        return acc

    def _anded(self) -> Formula:
        acc = self._unary()
        while self._peek().text == "&":
            self._next()
            acc = FAnd(acc, self._unary())
        return acc

    def _unary(self) -> Formula:
        tok = self._peek()
        if tok.text == "~":
            self._next()
            return FNot(self._unary())
        if tok.text in ("forall", "exists"):
            self._next()
            var = self._variable_name()
            body = self._unary()
            if tok.text == "forall":
                return FForall(var, body)
            return f_exists(var, body)
        return self._atom()

    def _variable_name(self) -> str:
        tok = self._peek()
        if tok.kind != "name":
            raise self._err("expected a variable name after the quantifier", tok)
        if tok.text in RESERVED_WORDS:
            raise self._err(f"{tok.text!r} is reserved and cannot be a variable", tok)
        if self.sig.is_hypothesis(tok.text) or self.sig.is_observation(tok.text):
            raise ShapeError(
                f"at position {tok.pos}: quantified variable {tok.text!r} collides with a signature name"
            )
        self._next()
        return tok.text

    def _atom(self) -> Formula:
        tok = self._peek()
        if tok.kind == "eof":
            raise self._err("unexpected end of input", tok)
        save = self.pos
        try:
            return self._comparison()
        except FormulaError as exc:
            cmp_error = exc
            self.pos = save
        if tok.text == "(":
            self._next()
            f = self._implied()
            self._expect(")")
            return f
        if tok.kind == "name":
            name = tok.text
            if name == "true":
                raise self._err("the constant true is only valid inside Pr0/Pr/we", tok)
            if self.sig.is_hypothesis(name):
                self._next()
                return FHyp(name)
            if self.sig.is_observation(name):
                self._next()
                return FObs(name)
            if name not in RESERVED_WORDS:
                raise UnknownNameError(f"at position {tok.pos}: unknown identifier {name!r}")
        raise cmp_error

    # -- comparisons and terms ----------------------------------------------

    def _comparison(self) -> Formula:
        lhs = self._term()
        tok = self._peek()
        if tok.text not in _CMP_OPS:
            raise self._err("expected a comparison operator", tok)
        self._next()
        rhs = self._term()
        if rhs.is_constant:
            alpha = constant_value(rhs)
            target, bound = lhs, alpha
        else:
            target, bound = subtract_terms(lhs, rhs), Fraction(0)
        if tok.text == ">=":
            return cmp_ge(target, bound)
        if tok.text == "<=":
            return cmp_le(target, bound)
        if tok.text == ">":
            return cmp_gt(target, bound)
        if tok.text == "<":
            return cmp_lt(target, bound)
        return cmp_eq(target, bound)

    def _term(self) -> Term:
        monomials = []
        sign = 1
        if self._peek().text == "-":
            self._next()
            sign = -1
        monomials.append(self._monomial(sign))
        while self._peek().text in ("+", "-"):
            sign = 1 if self._next().text == "+" else -1
            monomials.append(self._monomial(sign))
        return Term(tuple(monomials))

    def _monomial(self, sign: int) -> Monomial:
        coeff = Fraction(sign)
        factors: list[Factor] = []
        while True:
            tok = self._peek()
            if tok.kind == "int" or tok.text == "(":
                value = self._const_operand()
                while self._peek().text == "/":
                    self._next()
                    divisor = self._const_operand()
                    if divisor == 0:
                        raise self._err("division by zero in a constant", tok)
                    value /= divisor
                coeff *= value
            elif tok.kind == "name":
                factors.append(self._factor())
                if self._peek().text == "/":
                    raise self._err("division is only allowed between constants", self._peek())
            else:
                raise self._err("expected a number, basic term, or variable", tok)
            if self._peek().text == "*":
                self._next()
                continue
            break
        return Monomial(coeff, tuple(factors))

    def _factor(self) -> Factor:
        tok = self._next()
        name = tok.text
        if name in ("Pr0", "Pr"):
            self._expect("(")
            rho = self._hformula()
            self._expect(")")
            return PriorTerm(rho) if name == "Pr0" else PosteriorTerm(rho)
        if name == "we":
            self._expect("(")
            ob_tok = self._peek()
            if ob_tok.kind != "name":
                raise self._err("expected an observation name", ob_tok)
            if not self.sig.is_observation(ob_tok.text):
                if self.sig.is_hypothesis(ob_tok.text):
                    raise ShapeError(
                        f"at position {ob_tok.pos}: first argument of we must be an observation, "
                        f"got hypothesis {ob_tok.text!r}"
                    )
                raise UnknownNameError(
                    f"at position {ob_tok.pos}: unknown observation {ob_tok.text!r}"
                )
            self._next()
            self._expect(",")
            rho = self._hformula()
            self._expect(")")
            return WeightTerm(ob_tok.text, rho)
        if name in ("forall", "exists", "true"):
            raise self._err(f"{name!r} cannot appear inside a term", tok)
        if self.sig.is_hypothesis(name):
            raise ShapeError(
                f"at position {tok.pos}: hypothesis atom {name!r} cannot appear in a term"
            )
        if self.sig.is_observation(name):
            raise ShapeError(
                f"at position {tok.pos}: observation atom {name!r} cannot appear in a term"
            )
        return Var(name)

    # -- constants -----------------------------------------------------------

    def _const_operand(self) -> Fraction:
        tok = self._peek()
        if tok.kind == "int":
            self._next()
            base = Fraction(int(tok.text))
        elif tok.text == "(":
            self._next()
            base = self._const_expr()
            self._expect(")")
        else:
            raise self._err("expected a constant", tok)
        if self._peek().text == "^":
            self._next()
            exponent = self._signed_int()
            if base == 0 and exponent < 0:
                raise self._err("zero cannot be raised to a negative power", tok)
            base = base**exponent
        return base

    def _signed_int(self) -> int:
        sign = 1
        if self._peek().text == "-":
            self._next()
            sign = -1
        tok = self._peek()
        if tok.kind != "int":
            raise self._err("expected an integer exponent", tok)
        self._next()
        return sign * int(tok.text)

    def _const_expr(self) -> Fraction:
        value = self._const_product()
        while self._peek().text in ("+", "-"):
            op = self._next().text
            rhs = self._const_product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _const_product(self) -> Fraction:
        value = self._const_unary()
        while self._peek().text in ("*", "/"):
            op = self._next().text
            tok = self._peek()
            rhs = self._const_unary()
            if op == "/":
                if rhs == 0:
                    raise self._err("division by zero in a constant", tok)
                value /= rhs
            else:
                value *= rhs
        return value

    def _const_unary(self) -> Fraction:
        if self._peek().text == "-":
            self._next()
            return -self._const_unary()
        return self._const_operand()

    # -- hypothesis formulas -------------------------------------------------

    def _hformula(self) -> HypothesisFormula:
        left = self._h_ored()
        if self._peek().text == "=>":
            self._next()
            return h_implies(left, self._hformula())
        return left

    def _h_ored(self) -> HypothesisFormula:
        acc = self._h_anded()
        while self._peek().text == "|":
            self._next()
            acc = h_or(acc, self._h_anded())
        return acc

    def _h_anded(self) -> HypothesisFormula:
        acc = self._h_unary()
        while self._peek().text == "&":
            self._next()
            acc = HAnd(acc, self._h_unary())
        return acc

    def _h_unary(self) -> HypothesisFormula:
        tok = self._peek()
        if tok.text == "~":
            self._next()
            return HNot(self._h_unary())
        if tok.text == "(":
            self._next()
            rho = self._hformula()
            self._expect(")")
            return rho
        if tok.kind == "name":
            name = tok.text
            if name == "true":
                self._next()
                return HTrue()
            if self.sig.is_hypothesis(name):
                self._next()
                return HAtom(name)
            if self.sig.is_observation(name):
                raise ShapeError(
                    f"at position {tok.pos}: observation {name!r} used where a hypothesis "
                    "formula is required"
                )
            raise UnknownNameError(f"at position {tok.pos}: unknown hypothesis {name!r}")
        raise self._err("expected a hypothesis formula", tok)


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse ``text`` into its unique AST over ``sig``.

    Raises :class:`ParseError` on malformed syntax, and the usual
    well-formedness errors when an atom does not belong to the signature.
    """
    return _Parser(text, sig).parse_formula()


def parse_term_text(text: str, sig: Signature) -> Term:
    """Parse a bare polynomial term (used by term evaluation entry points)."""
    parser = _Parser(text, sig)
    term = parser._term()
    tok = parser._peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
    return term


def parse_hformula_text(text: str, sig: Signature) -> HypothesisFormula:
    """Parse a bare hypothesis formula."""
    parser = _Parser(text, sig)
    rho = parser._hformula()
    tok = parser._peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
    return rho
