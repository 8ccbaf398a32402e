"""Evidence spaces, weight of evidence, and Dempster-style combination.

Everything in this module is exact: likelihoods, weights, and posteriors
are arbitrary-precision rationals, and the realizability check for weight
tables is decided by an exact-rational linear program whose certificates
can be verified by hand.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .formula import Signature
from .linprog import solve_lp

__all__ = [
    "EvidenceError",
    "DisjointSupportError",
    "UnsupportedArityError",
    "InvalidWitnessError",
    "EvidenceSpace",
    "Distribution",
    "WeightTable",
    "WitnessVector",
    "LogLikelihood",
    "WeightCheck",
    "weight",
    "loglikelihood",
    "shafer_weight",
    "combine",
    "posterior",
    "tabulate",
    "check_weight_table",
    "reconstruct",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class EvidenceError(ValueError):
    """Base class for evidence-space problems."""


class DisjointSupportError(EvidenceError):
    """Combination is undefined: the two distributions share no support."""


class UnsupportedArityError(EvidenceError):
    """The operation is only defined for two competing hypotheses."""


class InvalidWitnessError(EvidenceError):
    """A claimed realizability witness does not reconstruct a valid space."""


def _frac(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class EvidenceSpace:
    """A likelihood distribution over observations for each hypothesis.

    ``likelihood[i][j]`` is the probability of observation ``j`` under
    hypothesis ``i``.  Every row sums to exactly one, and every observation
    has positive likelihood under at least one hypothesis (otherwise the
    observation could never be made and the weights below would divide by
    zero).
    """

    sig: Signature
    likelihood: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(_frac(v) for v in row) for row in self.likelihood)
        object.__setattr__(self, "likelihood", rows)
        n_h, n_o = len(self.sig.hypotheses), len(self.sig.observations)
        if len(rows) != n_h or any(len(row) != n_o for row in rows):
            raise EvidenceError("likelihood matrix shape does not match the signature")
        for h, row in zip(self.sig.hypotheses, rows):
            for v in row:
                if not (0 <= v <= 1):
                    raise EvidenceError(f"likelihood out of [0,1] for hypothesis {h!r}: {v}")
            total = sum(row)
            if total != 1:
                raise EvidenceError(f"likelihoods for hypothesis {h!r} sum to {total}, not 1")
        for j, ob in enumerate(self.sig.observations):
            if all(row[j] == 0 for row in rows):
                raise EvidenceError(f"observation {ob!r} has zero likelihood under every hypothesis")

    def mu(self, h: str, ob: str) -> Fraction:
        return self.likelihood[self._h_index(h)][self._ob_index(ob)]

    def _h_index(self, h: str) -> int:
        try:
            return self.sig.hypotheses.index(h)
        except ValueError:
            raise EvidenceError(f"unknown hypothesis: {h!r}") from None

    def _ob_index(self, ob: str) -> int:
        try:
            return self.sig.observations.index(ob)
        except ValueError:
            raise EvidenceError(f"unknown observation: {ob!r}") from None

    def column_sum(self, ob: str) -> Fraction:
        j = self._ob_index(ob)
        return sum(row[j] for row in self.likelihood)


@dataclass(frozen=True)
class Distribution:
    """An exact probability distribution over named hypotheses."""

    hypotheses: tuple[str, ...]
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "masses", tuple(_frac(v) for v in self.masses))
        if len(self.hypotheses) != len(self.masses):
            raise EvidenceError("distribution names and masses differ in length")
        if any(v < 0 for v in self.masses):
            raise EvidenceError("negative mass in distribution")
        total = sum(self.masses)
        if total != 1:
            raise EvidenceError(f"distribution masses sum to {total}, not 1")

    @classmethod
    def from_mapping(cls, hypotheses: Sequence[str], mapping: Mapping[str, object]) -> "Distribution":
        return cls(tuple(hypotheses), tuple(_frac(mapping[h]) for h in hypotheses))

    def mass(self, h: str) -> Fraction:
        try:
            return self.masses[self.hypotheses.index(h)]
        except ValueError:
            raise EvidenceError(f"unknown hypothesis: {h!r}") from None

    def mass_of(self, hs: Iterable[str]) -> Fraction:
        wanted = set(hs)
        return sum((m for h, m in zip(self.hypotheses, self.masses) if h in wanted), _ZERO)

    @classmethod
    def uniform(cls, hypotheses: Sequence[str]) -> "Distribution":
        n = len(hypotheses)
        return cls(tuple(hypotheses), tuple(Fraction(1, n) for _ in hypotheses))


@dataclass(frozen=True)
class WeightTable:
    """A candidate weight function: entries in [0,1] indexed (observation, hypothesis).

    Whether the table is realizable as the weight function of some evidence
    space is not an invariant; :func:`check_weight_table` decides it.
    """

    sig: Signature
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(_frac(v) for v in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n_h, n_o = len(self.sig.hypotheses), len(self.sig.observations)
        if len(rows) != n_o or any(len(row) != n_h for row in rows):
            raise EvidenceError("weight table shape does not match the signature")
        for row in rows:
            for v in row:
                if not (0 <= v <= 1):
                    raise EvidenceError(f"weight table entry out of [0,1]: {v}")

    def entry(self, ob: str, h: str) -> Fraction:
        return self.entries[self.sig.observations.index(ob)][self.sig.hypotheses.index(h)]


@dataclass(frozen=True)
class WitnessVector:
    """One nonnegative scaling factor per observation."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_frac(v) for v in self.values))
        if any(v < 0 for v in self.values):
            raise EvidenceError("witness entries must be nonnegative")


@functools.total_ordering
@dataclass(frozen=True)
class LogLikelihood:
    """The two-hypothesis confirmation measure, kept symbolic.

    Stores the likelihood ratio exactly instead of a numeric logarithm;
    comparisons go through the ratio, so ordering statements are exact.
    ``kind`` is -1, 0, or +1 for -infinity, finite, and +infinity.
    """

    kind: int
    ratio: Fraction | None = None

    def __post_init__(self):
        if self.kind == 0:
            if self.ratio is None or self.ratio <= 0:
                raise EvidenceError("finite log-likelihood needs a positive ratio")
        elif self.kind not in (-1, 1):
            raise EvidenceError("kind must be -1, 0, or 1")

    def __lt__(self, other: "LogLikelihood") -> bool:
        if self.kind != other.kind:
            return self.kind < other.kind
        if self.kind == 0:
            return self.ratio < other.ratio
        return False

    def exact_log2(self) -> int | None:
        """The exact base-2 logarithm when the ratio is a power of two."""
        if self.kind != 0:
            return None
        num, den = self.ratio.numerator, self.ratio.denominator
        if num & (num - 1) or den & (den - 1):
            return None
        return num.bit_length() - den.bit_length()

    def __str__(self) -> str:
        if self.kind > 0:
            return "+inf"
        if self.kind < 0:
            return "-inf"
        exact = self.exact_log2()
        return str(exact) if exact is not None else f"log2({self.ratio})"


@dataclass(frozen=True)
class WeightCheck:
    """Outcome of the realizability test; both answers are values.

    On success ``witness`` scales the table back into likelihood rows.  On
    failure ``reason`` explains which property broke, and ``certificate``
    (when the linear system itself is infeasible) holds Farkas multipliers,
    one per hypothesis row then one per observation bound, that refute the
    system by inspection.
    """

    realizable: bool
    witness: WitnessVector | None = None
    reason: str | None = None
    certificate: tuple[Fraction, ...] | None = None


def weight(space: EvidenceSpace, ob: str, hs: Iterable[str]) -> Fraction:
    """Weight of evidence ``ob`` lends to the hypothesis set ``hs``.

    The likelihood mass of ``ob`` within ``hs``, normalized by its mass
    under all hypotheses; additive in ``hs`` by construction.
    """
    j = space._ob_index(ob)
    wanted = set(hs)
    unknown = wanted - set(space.sig.hypotheses)
    if unknown:
        raise EvidenceError(f"unknown hypotheses: {sorted(unknown)}")
    total = space.column_sum(ob)
    num = sum(
        (row[j] for h, row in zip(space.sig.hypotheses, space.likelihood) if h in wanted),
        _ZERO,
    )
    return num / total


def loglikelihood(space: EvidenceSpace, ob: str, h: str) -> LogLikelihood:
    """Confirmation of ``h`` by ``ob`` against its complement (two hypotheses only)."""
    if len(space.sig.hypotheses) != 2:
        raise UnsupportedArityError(
            "log-likelihood confirmation needs exactly two hypotheses, "
            f"got {len(space.sig.hypotheses)}"
        )
    i = space._h_index(h)
    j = space._ob_index(ob)
    num = space.likelihood[i][j]
    den = space.likelihood[1 - i][j]
    if num == 0 and den == 0:  # pragma: no cover - excluded by relevance
        raise EvidenceError("both likelihoods are zero")
    if den == 0:
        return LogLikelihood(kind=1)
    if num == 0:
        return LogLikelihood(kind=-1)
    return LogLikelihood(kind=0, ratio=num / den)


def shafer_weight(space: EvidenceSpace, ob: str, hs: Iterable[str]) -> Fraction:
    """Best-case likelihood of ``ob`` within ``hs`` against the global best case."""
    j = space._ob_index(ob)
    wanted = set(hs)
    if not wanted:
        raise EvidenceError("hypothesis set must be nonempty")
    unknown = wanted - set(space.sig.hypotheses)
    if unknown:
        raise EvidenceError(f"unknown hypotheses: {sorted(unknown)}")
    num = max(row[j] for h, row in zip(space.sig.hypotheses, space.likelihood) if h in wanted)
    den = max(row[j] for row in space.likelihood)
    return num / den


def combine(m1: Distribution, m2: Distribution) -> Distribution:
    """Pointwise product of two distributions, renormalized."""
    if m1.hypotheses != m2.hypotheses:
        raise EvidenceError("distributions are over different hypotheses")
    products = [a * b for a, b in zip(m1.masses, m2.masses)]
    total = sum(products)
    if total == 0:
        raise DisjointSupportError("the distributions have disjoint support")
    return Distribution(m1.hypotheses, tuple(p / total for p in products))


def weight_row(space: EvidenceSpace, ob: str) -> Distribution:
    """The weight function of ``ob`` as a distribution over hypotheses."""
    return Distribution(
        space.sig.hypotheses,
        tuple(weight(space, ob, {h}) for h in space.sig.hypotheses),
    )


def posterior(space: EvidenceSpace, prior: Distribution, ob: str) -> Distribution:
    """Update ``prior`` by the weight of ``ob``; equals Bayesian conditioning."""
    if prior.hypotheses != space.sig.hypotheses:
        raise EvidenceError("prior is not over the space's hypotheses")
    return combine(prior, weight_row(space, ob))


def tabulate(space: EvidenceSpace) -> WeightTable:
    """The full weight table of a space, one row per observation."""
    return WeightTable(
        space.sig,
        tuple(
            tuple(weight(space, ob, {h}) for h in space.sig.hypotheses)
            for ob in space.sig.observations
        ),
    )


def canonical_witness(space: EvidenceSpace) -> WitnessVector:
    """The witness that always realizes a tabulated space: column sums."""
    return WitnessVector(tuple(space.column_sum(ob) for ob in space.sig.observations))


def check_weight_table(table: WeightTable) -> WeightCheck:
    """Decide whether some evidence space has ``table`` as its weight function.

    Two conditions are tested exactly: each observation row must be a
    probability distribution over the hypotheses, and the linear system
    ``sum_i table[ob_i][h] * x_i = 1`` for every ``h`` must admit a strictly
    positive solution.  Strict positivity matters: a solution with a zero
    component would reconstruct a space in which that observation can never
    occur, violating the relevance requirement, and such tables are not
    weight functions of any space.  The search maximizes the smallest
    component, so any positive optimum yields an interior witness.
    """
    n_h = len(table.sig.hypotheses)
    n_o = len(table.sig.observations)
    for ob, row in zip(table.sig.observations, table.entries):
        total = sum(row)
        if total != 1:
            return WeightCheck(
                realizable=False,
                reason=f"row {ob!r} sums to {total}, not 1",
            )

    # Variables x_1..x_n, t; maximize t subject to the hypothesis equations,
    # x_i >= t, and t <= 1 (a cap that keeps the program bounded).
    c = [_ZERO] * n_o + [_ONE]
    A_eq = [[table.entries[i][k] for i in range(n_o)] + [_ZERO] for k in range(n_h)]
    b_eq = [_ONE] * n_h
    A_le = [
        [(-_ONE if j == i else _ZERO) for j in range(n_o)] + [_ONE]  # t - x_i <= 0
        for i in range(n_o)
    ]
    b_le = [_ZERO] * n_o
    A_le.append([_ZERO] * n_o + [_ONE])
    b_le.append(_ONE)

    result = solve_lp(c, A_eq, b_eq, A_le, b_le, maximize=True)
    if result.status == "infeasible":
        return WeightCheck(
            realizable=False,
            reason="no nonnegative scaling makes every hypothesis row sum to 1",
            certificate=result.farkas,
        )
    assert result.status == "optimal", result.status
    if result.objective <= 0:
        return WeightCheck(
            realizable=False,
            reason="every admissible scaling zeroes out some observation",
        )
    witness = WitnessVector(result.x[:n_o])
    return WeightCheck(realizable=True, witness=witness)


def reconstruct(table: WeightTable, witness: WitnessVector) -> EvidenceSpace:
    """Build a space whose weight function equals ``table``, scaled by ``witness``.

    The reconstruction is not unique and makes no attempt to match whatever
    space the table may have come from; equality of weight tables is the
    only guarantee.
    """
    n_o = len(table.sig.observations)
    if len(witness.values) != n_o:
        raise InvalidWitnessError("witness length does not match the observations")
    likelihood = tuple(
        tuple(table.entries[i][k] * witness.values[i] for i in range(n_o))
        for k in range(len(table.sig.hypotheses))
    )
    try:
        return EvidenceSpace(table.sig, likelihood)
    except EvidenceError as exc:
        raise InvalidWitnessError(f"witness does not reconstruct a valid space: {exc}") from exc
