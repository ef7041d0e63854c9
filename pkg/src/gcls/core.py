"""Core data model for generalised (multi-)clause-sets.

Variables take values from finite domains {0, ..., size-1}.  A literal
``(v, e)`` is the constraint "v must not take value e"; a clause is a
clashing-free set of such literals (at most one literal per variable), and a
multi-clause-set maps clauses to positive multiplicities.

A partial assignment satisfies a literal (v, e) iff it binds v to some value
different from e, and falsifies it iff it binds v to e exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Tuple


class Literal(NamedTuple):
    var: int
    value: int


class Clause(frozenset):
    """A clashing-free frozenset of literals.

    Construction rejects two literals on the same variable with different
    values; duplicate (var, value) pairs collapse by set semantics.
    """

    def __new__(cls, literals: Iterable[Tuple[int, int]] = ()) -> "Clause":
        lits = frozenset(Literal(int(v), int(e)) for (v, e) in literals)
        by_var: Dict[int, int] = {}
        for lit in lits:
            if by_var.setdefault(lit.var, lit.value) != lit.value:
                raise ValueError(f"clashing literals on variable {lit.var}")
        return super().__new__(cls, lits)

    @property
    def variables(self) -> frozenset:
        return frozenset(lit.var for lit in self)

    def value_on(self, v: int) -> int:
        """The forbidden value this clause states for v (KeyError if absent)."""
        for lit in self:
            if lit.var == v:
                return lit.value
        raise KeyError(v)

    def has_var(self, v: int) -> bool:
        return any(lit.var == v for lit in self)

    def without_vars(self, vs) -> "Clause":
        return Clause(lit for lit in self if lit.var not in vs)

    def sort_key(self) -> tuple:
        return tuple(sorted(self))

    def __repr__(self) -> str:
        inner = ",".join(f"{v}:{e}" for (v, e) in sorted(self))
        return "{" + inner + "}"


#: The empty clause (unsatisfiable by every assignment).
BOT = Clause()


class VariableTable:
    """Immutable declaration of variables and their domain sizes.

    The domain of a declared variable v is range(domain_size(v)).  Var ids are
    positive integers; domain sizes are >= 1.
    """

    __slots__ = ("_sizes",)

    def __init__(self, entries: Mapping[int, int] | Iterable[Tuple[int, int]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        sizes: Dict[int, int] = {}
        for v, size in items:
            v, size = int(v), int(size)
            if v < 1:
                raise ValueError(f"var ids must be positive, got {v}")
            if size < 1:
                raise ValueError(f"domain size of {v} must be >= 1, got {size}")
            if sizes.setdefault(v, size) != size:
                raise ValueError(f"variable {v} declared twice with different sizes")
            sizes[v] = size
        self._sizes = dict(sorted(sizes.items()))

    def domain_size(self, v: int) -> int:
        return self._sizes[v]

    def domain(self, v: int) -> range:
        return range(self._sizes[v])

    def variables(self) -> Tuple[int, ...]:
        return tuple(self._sizes)

    def __contains__(self, v: int) -> bool:
        return v in self._sizes

    def __len__(self) -> int:
        return len(self._sizes)

    def declare(self, v: int, size: int) -> "VariableTable":
        """A new table with v declared (must agree if already present)."""
        if v in self._sizes and self._sizes[v] != size:
            raise ValueError(f"variable {v} already declared with size {self._sizes[v]}")
        return VariableTable({**self._sizes, v: size})

    def merge(self, other: "VariableTable") -> "VariableTable":
        merged = dict(self._sizes)
        for v, size in other._sizes.items():
            if merged.setdefault(v, size) != size:
                raise ValueError(f"tables disagree on domain size of variable {v}")
        return VariableTable(merged)

    def sizes(self) -> Dict[int, int]:
        return dict(self._sizes)

    def __eq__(self, other) -> bool:
        return isinstance(other, VariableTable) and self._sizes == other._sizes

    def __repr__(self) -> str:
        return f"VariableTable({self._sizes})"


def _clause_items(clauses) -> Iterator[Tuple[Clause, int]]:
    if isinstance(clauses, MultiClauseSet):
        yield from clauses.items()
    elif isinstance(clauses, Mapping):
        yield from clauses.items()
    else:
        for entry in clauses:
            if isinstance(entry, tuple) and len(entry) == 2 and isinstance(entry[1], int) \
                    and not isinstance(entry[0], (int, Literal)):
                yield entry
            else:
                yield entry, 1


class MultiClauseSet:
    """A map from clauses to positive multiplicities over a variable table.

    Iteration order of clauses is canonical (sorted literal tuples), so equal
    objects print and serialise identically.  With set_view=True all
    multiplicities collapse to 1 and stay that way under operations.
    """

    __slots__ = ("table", "set_view", "_clauses")

    def __init__(self, table: VariableTable, clauses=(), set_view: bool = False):
        self.table = table
        self.set_view = bool(set_view)
        acc: Dict[Clause, int] = {}
        for clause, mult in _clause_items(clauses):
            if not isinstance(clause, Clause):
                clause = Clause(clause)
            if mult < 0:
                raise ValueError("negative multiplicity")
            if mult == 0:
                continue
            for lit in clause:
                if lit.var not in table:
                    raise ValueError(f"variable {lit.var} not declared")
                if not 0 <= lit.value < table.domain_size(lit.var):
                    raise ValueError(f"value {lit.value} outside domain of variable {lit.var}")
            acc[clause] = acc.get(clause, 0) + mult
        if self.set_view:
            acc = {c: 1 for c in acc}
        self._clauses = {c: acc[c] for c in sorted(acc, key=Clause.sort_key)}

    # -- accessors ---------------------------------------------------------

    def items(self) -> Tuple[Tuple[Clause, int], ...]:
        return tuple(self._clauses.items())

    def clauses(self) -> Tuple[Clause, ...]:
        return tuple(self._clauses)

    def multiplicity(self, clause: Clause) -> int:
        return self._clauses.get(clause, 0)

    def __contains__(self, clause: Clause) -> bool:
        return clause in self._clauses

    def __bool__(self) -> bool:
        return bool(self._clauses)

    def with_clauses(self, clauses) -> "MultiClauseSet":
        return MultiClauseSet(self.table, clauses, set_view=self.set_view)

    def as_set(self) -> "MultiClauseSet":
        return MultiClauseSet(self.table, self._clauses, set_view=True)

    def as_multi(self) -> "MultiClauseSet":
        return MultiClauseSet(self.table, self._clauses, set_view=False)

    # -- measures ----------------------------------------------------------

    def var_set(self) -> frozenset:
        return frozenset(lit.var for c in self._clauses for lit in c)

    @property
    def c(self) -> int:
        return sum(self._clauses.values())

    @property
    def n(self) -> int:
        return len(self.var_set())

    @property
    def ell(self) -> int:
        return sum(m * len(c) for c, m in self._clauses.items())

    @property
    def rd(self) -> int:
        return sum(self.table.domain_size(v) - 1 for v in self.var_set())

    @property
    def delta(self) -> int:
        return self.c - self.rd

    def count(self, lit: Tuple[int, int]) -> int:
        lit = Literal(*lit)
        return sum(m for c, m in self._clauses.items() if lit in c)

    def var_count(self, v: int) -> int:
        return sum(m for c, m in self._clauses.items() if c.has_var(v))

    def slack(self, lit: Tuple[int, int]) -> int:
        return self.var_count(lit[0]) - self.count(lit)

    def min_slack(self, v: int) -> int:
        return min(self.slack((v, e)) for e in self.table.domain(v))

    def values_of(self, v: int) -> frozenset:
        return frozenset(c.value_on(v) for c in self._clauses if c.has_var(v))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "MultiClauseSet") -> "MultiClauseSet":
        table = self.table.merge(other.table)
        acc = dict(self._clauses)
        for c, m in other._clauses.items():
            acc[c] = acc.get(c, 0) + m
        return MultiClauseSet(table, acc, set_view=self.set_view and other.set_view)

    def __eq__(self, other) -> bool:
        """Equality of the clause maps plus domain sizes on occurring variables."""
        if not isinstance(other, MultiClauseSet):
            return NotImplemented
        if self._clauses != other._clauses:
            return False
        return all(self.table.domain_size(v) == other.table.domain_size(v)
                   for v in self.var_set())

    def __repr__(self) -> str:
        body = " + ".join((f"{m}*{c!r}" if m != 1 else repr(c))
                          for c, m in self._clauses.items())
        return f"MultiClauseSet[{body or 'T'}]"


def top(table: VariableTable | None = None) -> MultiClauseSet:
    """The empty multi-clause-set (satisfied by everything)."""
    return MultiClauseSet(table or VariableTable())


class PartialAssignment(Mapping):
    """An immutable, hashable map from variables to values."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[int, int] | Iterable[Tuple[int, int]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        acc: Dict[int, int] = {}
        for v, e in items:
            v, e = int(v), int(e)
            if acc.setdefault(v, e) != e:
                raise ValueError(f"variable {v} bound twice")
        self._bindings = dict(sorted(acc.items()))

    def __getitem__(self, v: int) -> int:
        return self._bindings[v]

    def __iter__(self) -> Iterator[int]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __hash__(self) -> int:
        return hash(tuple(self._bindings.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, PartialAssignment):
            return self._bindings == other._bindings
        if isinstance(other, Mapping):
            return self._bindings == dict(other)
        return NotImplemented

    def satisfies_literal(self, lit: Tuple[int, int]) -> bool:
        v, e = lit
        return v in self._bindings and self._bindings[v] != e

    def falsifies_literal(self, lit: Tuple[int, int]) -> bool:
        v, e = lit
        return self._bindings.get(v) == e

    def satisfies_clause(self, clause: Clause) -> bool:
        return any(self.satisfies_literal(lit) for lit in clause)

    def __repr__(self) -> str:
        inner = ",".join(f"{v}->{e}" for v, e in self._bindings.items())
        return f"<{inner}>"


EMPTY_ASSIGNMENT = PartialAssignment()


def assign(*pairs: Tuple[int, int]) -> PartialAssignment:
    return PartialAssignment(pairs)


# -- operations -------------------------------------------------------------


def compose(outer: PartialAssignment, inner: PartialAssignment) -> PartialAssignment:
    """Sequential composition: apply inner first; on overlap inner wins."""
    merged = dict(outer)
    merged.update(inner)
    return PartialAssignment(merged)


def apply(phi: PartialAssignment, F: MultiClauseSet) -> MultiClauseSet:
    """Restrict F by phi: drop satisfied clauses, delete falsified literals."""
    for v, e in phi.items():
        if v in F.table and not 0 <= e < F.table.domain_size(v):
            raise ValueError(f"value {e} outside domain of variable {v}")
    acc: Dict[Clause, int] = {}
    for clause, mult in F.items():
        if phi.satisfies_clause(clause):
            continue
        reduced = clause.without_vars(phi.keys())
        acc[reduced] = acc.get(reduced, 0) + mult
    return F.with_clauses(acc)


def cross_out(V, F: MultiClauseSet) -> MultiClauseSet:
    """Remove every literal whose variable lies in V; clause count is kept."""
    V = frozenset(V)
    acc: Dict[Clause, int] = {}
    for clause, mult in F.items():
        reduced = clause.without_vars(V)
        acc[reduced] = acc.get(reduced, 0) + mult
    return F.with_clauses(acc)


def touched(F: MultiClauseSet, V) -> MultiClauseSet:
    """The sub-multi-clause-set of clauses containing a variable from V."""
    V = frozenset(V)
    return F.with_clauses({c: m for c, m in F.items() if c.variables & V})


def restrict(F: MultiClauseSet, V) -> MultiClauseSet:
    """Restriction F[V]: clauses touching V, with all other variables crossed out."""
    V = frozenset(V)
    return cross_out(F.var_set() - V, touched(F, V))


@dataclass(frozen=True)
class Measures:
    n: int
    c: int
    ell: int
    rd: int
    delta: int
    literal_counts: Dict[Literal, int]
    variable_counts: Dict[int, int]
    slack_counts: Dict[Literal, int]


def measures(F: MultiClauseSet) -> Measures:
    """All basic counting measures of F, weighted by multiplicity.

    Per-literal counts cover every (variable, value) pair of occurring
    variables, including values that never occur (count 0, full slack).
    """
    lit_counts: Dict[Literal, int] = {}
    var_counts: Dict[int, int] = {}
    for v in sorted(F.var_set()):
        var_counts[v] = 0
        for e in F.table.domain(v):
            lit_counts[Literal(v, e)] = 0
    for clause, mult in F.items():
        for lit in clause:
            lit_counts[lit] += mult
            var_counts[lit.var] += mult
    slacks = {lit: var_counts[lit.var] - cnt for lit, cnt in lit_counts.items()}
    return Measures(n=F.n, c=F.c, ell=F.ell, rd=F.rd, delta=F.delta,
                    literal_counts=lit_counts, variable_counts=var_counts,
                    slack_counts=slacks)


def rename(F: MultiClauseSet, v: int, w: int, h: Mapping[int, int]):
    """Replace variable v by w, mapping values through h.

    Returns (renamed multi-clause-set, flag whether h was injective on the
    values of v actually occurring in F).  Rejects value-map images outside
    the domain of w; clause collisions merge as usual.
    """
    if w not in F.table:
        raise ValueError(f"target variable {w} not declared")
    if v != w and w in F.var_set():
        raise ValueError(f"target variable {w} already occurs in F")
    wsize = F.table.domain_size(w)
    occurring = sorted(F.values_of(v))
    for e in occurring:
        if e not in h:
            raise ValueError(f"value map does not cover occurring value {e}")
        if not 0 <= h[e] < wsize:
            raise ValueError(f"value map sends {e} outside the domain of {w}")
    injective = len({h[e] for e in occurring}) == len(occurring)
    acc: Dict[Clause, int] = {}
    for clause, mult in F.items():
        if clause.has_var(v):
            lits = [lit for lit in clause if lit.var != v]
            lits.append(Literal(w, h[clause.value_on(v)]))
            clause = Clause(lits)
        acc[clause] = acc.get(clause, 0) + mult
    return F.with_clauses(acc), injective


def domain_uniformisation(F: MultiClauseSet) -> MultiClauseSet:
    """Enlarge all occurring domains to a common size, forbidding new values.

    Every occurring variable gets the maximal occurring domain size; unit
    clauses exclude the padded values, which keeps the deficiency unchanged.
    """
    occurring = sorted(F.var_set())
    if not occurring:
        return F
    target = max(F.table.domain_size(v) for v in occurring)
    table = F.table
    units = []
    for v in occurring:
        old = F.table.domain_size(v)
        if old < target:
            table = VariableTable({**table.sizes(), v: target})
            units.extend(Clause([(v, e)]) for e in range(old, target))
    acc: Dict[Clause, int] = dict(F.items())
    for unit in units:
        acc[unit] = acc.get(unit, 0) + 1
    return MultiClauseSet(table, acc, set_view=F.set_view)


def clause_to_assignment(clause: Clause) -> PartialAssignment:
    """The assignment setting exactly the literals of the clause false."""
    return PartialAssignment({lit.var: lit.value for lit in clause})


def assignment_to_clause(phi: PartialAssignment) -> Clause:
    """The clause falsified exactly by (extensions of) phi."""
    return Clause(phi.items())


def falsifying_count(table: VariableTable, clause: Clause, V) -> int:
    """Number of total assignments over V falsifying the clause."""
    V = frozenset(V)
    if not clause.variables <= V:
        raise ValueError("clause mentions variables outside V")
    return math.prod(table.domain_size(v) for v in V - clause.variables)
