"""Multilinear pseudo-Boolean polynomials and the binary-to-Ising transform.

A :class:`BinaryPolynomial` maps sorted tuples of variable indices to real
coefficients; the empty tuple holds the constant. Because variables are
0/1, ``x * x == x`` and products are merged into multilinear form on
construction. Every polynomial carries an optimization sense so that profit
Hamiltonians stay in their natural (maximize) orientation until they are
handed to the simulator.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .errors import ParameterError, ParseError

MINIMIZE = "minimize"
MAXIMIZE = "maximize"
_SENSES = (MINIMIZE, MAXIMIZE)

# coefficients below this magnitude are treated as cancelled
ZERO_TOL = 1e-12

Term = tuple[int, ...]
Number = Union[int, float]


def _canonical(num_vars: int, terms: Union[Mapping, Iterable]) -> dict:
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: dict = defaultdict(float)
    for key, coeff in items:
        idx = tuple(sorted({int(i) for i in key}))
        if idx and (idx[0] < 0 or idx[-1] >= num_vars):
            raise ParameterError(f"term {key} references a variable outside [0, {num_vars})")
        acc[idx] += float(coeff)
    return {k: c for k, c in sorted(acc.items(), key=lambda kv: (len(kv[0]), kv[0])) if abs(c) > ZERO_TOL}


@dataclass(frozen=True, eq=False)
class BinaryPolynomial:
    """Multilinear polynomial over 0/1 variables with an optimization sense.

    Treat instances as immutable; arithmetic returns new polynomials whose
    sense is inherited from the left operand.
    """

    num_vars: int
    terms: dict = field(default_factory=dict)
    sense: str = MINIMIZE

    def __post_init__(self):
        if self.num_vars < 0:
            raise ParameterError("num_vars must be non-negative")
        if self.sense not in _SENSES:
            raise ParameterError(f"sense must be one of {_SENSES}, got {self.sense!r}")
        object.__setattr__(self, "terms", _canonical(self.num_vars, self.terms))

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, value: Number, num_vars: int, sense: str = MINIMIZE) -> "BinaryPolynomial":
        return cls(num_vars, {(): value}, sense)

    @classmethod
    def variable(cls, i: int, num_vars: int, sense: str = MINIMIZE) -> "BinaryPolynomial":
        return cls(num_vars, {(i,): 1.0}, sense)

    # -- queries ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, BinaryPolynomial):
            return NotImplemented
        return (self.num_vars, self.sense, self.terms) == (other.num_vars, other.sense, other.terms)

    def __repr__(self):
        return f"BinaryPolynomial({self.num_vars}, {self.terms}, {self.sense!r})"

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def coefficient(self, *idx: int) -> float:
        return self.terms.get(tuple(sorted(idx)), 0.0)

    def with_sense(self, sense: str) -> "BinaryPolynomial":
        return BinaryPolynomial(self.num_vars, self.terms, sense)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "BinaryPolynomial":
        if isinstance(other, BinaryPolynomial):
            if other.num_vars != self.num_vars:
                raise ParameterError(f"num_vars mismatch: {self.num_vars} vs {other.num_vars}")
            return other
        if isinstance(other, (int, float)):
            return BinaryPolynomial.constant(other, self.num_vars, self.sense)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, scale(other, -1.0))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(other, scale(self, -1.0))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return multiply(self, other)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class IsingPolynomial:
    """Real-weighted sum of Z-monomials; the empty key is the identity term."""

    num_qubits: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", _canonical(self.num_qubits, self.terms))

    def __eq__(self, other):
        if not isinstance(other, IsingPolynomial):
            return NotImplemented
        return (self.num_qubits, self.terms) == (other.num_qubits, other.terms)

    def evaluate(self, spins: Sequence[int]) -> float:
        """Value at a spin assignment with entries in {+1, -1}."""
        if len(spins) != self.num_qubits:
            raise ParameterError(f"expected {self.num_qubits} spins, got {len(spins)}")
        total = 0.0
        for key, c in self.terms.items():
            prod = 1
            for i in key:
                prod *= spins[i]
            total += c * prod
        return total


class LocalityStats(NamedTuple):
    max_degree: int
    term_count: int
    per_degree_counts: dict


def evaluate(p: BinaryPolynomial, s: Sequence[int]) -> float:
    """Value of ``p`` at the 0/1 assignment ``s``."""
    if len(s) != p.num_vars:
        raise ParameterError(f"selection has length {len(s)}, polynomial has {p.num_vars} variables")
    total = 0.0
    for key, c in p.terms.items():
        if all(s[i] for i in key):
            total += c
    return total


def add(p: BinaryPolynomial, q: BinaryPolynomial) -> BinaryPolynomial:
    if p.num_vars != q.num_vars:
        raise ParameterError(f"num_vars mismatch: {p.num_vars} vs {q.num_vars}")
    merged = list(p.terms.items()) + list(q.terms.items())
    return BinaryPolynomial(p.num_vars, merged, p.sense)


def scale(p: BinaryPolynomial, c: Number) -> BinaryPolynomial:
    return BinaryPolynomial(p.num_vars, {k: c * v for k, v in p.terms.items()}, p.sense)


def multiply(p: BinaryPolynomial, q: BinaryPolynomial) -> BinaryPolynomial:
    if p.num_vars != q.num_vars:
        raise ParameterError(f"num_vars mismatch: {p.num_vars} vs {q.num_vars}")
    prod = [
        (set(k1) | set(k2), c1 * c2)
        for k1, c1 in p.terms.items()
        for k2, c2 in q.terms.items()
    ]
    return BinaryPolynomial(p.num_vars, prod, p.sense)


def negate_sense(p: BinaryPolynomial) -> BinaryPolynomial:
    """Flip the sense and every coefficient: minimizing the result maximizes ``p``."""
    flipped = MAXIMIZE if p.sense == MINIMIZE else MINIMIZE
    return BinaryPolynomial(p.num_vars, {k: -v for k, v in p.terms.items()}, flipped)


def expand_product_of_complements(var_set: Iterable[int], num_vars: int | None = None) -> BinaryPolynomial:
    """Expand ``prod_{v in var_set} (1 - x_v)`` into multilinear form.

    The term for subset ``T`` has coefficient ``(-1)**len(T)``, so the result
    has ``2**len(var_set)`` terms.
    """
    vs = sorted(set(var_set))
    if not vs:
        raise ParameterError("var_set must be non-empty")
    if num_vars is None:
        num_vars = vs[-1] + 1
    terms = {
        sub: (-1.0) ** r
        for r in range(len(vs) + 1)
        for sub in itertools.combinations(vs, r)
    }
    return BinaryPolynomial(num_vars, terms)


def binary_to_ising(p: BinaryPolynomial) -> IsingPolynomial:
    """Substitute ``x_i = (1 - Z_i) / 2`` and collect Z-monomials.

    With this convention a selected variable (x=1) sits on the Z eigenvalue -1.
    """
    acc: dict = defaultdict(float)
    for key, c in p.terms.items():
        w = c / 2 ** len(key)
        for r in range(len(key) + 1):
            for sub in itertools.combinations(key, r):
                acc[sub] += w * (-1) ** r
    return IsingPolynomial(p.num_vars, acc)


def locality_stats(p: Union[BinaryPolynomial, IsingPolynomial]) -> LocalityStats:
    counts: dict = defaultdict(int)
    for key in p.terms:
        counts[len(key)] += 1
    return LocalityStats(max(counts, default=0), len(p.terms), dict(sorted(counts.items())))


# -- text dump -------------------------------------------------------------


def _fmt(c: float) -> str:
    return str(int(c)) if float(c).is_integer() else repr(float(c))


def dump_terms(p: Union[BinaryPolynomial, IsingPolynomial]) -> str:
    """One term per line as ``coeff [i j k]``; the constant is ``coeff []``."""
    lines = [f"{_fmt(c)} [{' '.join(map(str, key))}]" for key, c in p.terms.items()]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_terms(text: str, num_vars: int, sense: str = MINIMIZE) -> BinaryPolynomial:
    """Inverse of :func:`dump_terms`; lines starting with ``#`` are skipped."""
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            coeff, rest = line.split(" ", 1)
            inner = rest.strip()
            if not (inner.startswith("[") and inner.endswith("]")):
                raise ValueError("missing brackets")
            idx = [int(t) for t in inner[1:-1].split()]
            terms.append((idx, float(coeff)))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: cannot parse term {raw!r} ({exc})") from exc
    return BinaryPolynomial(num_vars, terms, sense)
