"""Conflict structure of multi-clause-sets.

Two clauses *clash* in a variable v when both constrain v but exclude
different values; the number of such variables is the number of conflicts
between the two clauses.  Arranging these counts in a symmetric matrix --
one row per clause *occurrence*, so multiplicities matter -- gives the
conflict matrix, the adjacency matrix of the conflict multigraph.

This module computes that matrix and reads structure off it:

* hitting clause-sets (every two occurrences clash), their degree, and
  regularity (every pair clashes in exactly r variables);
* multihitting clause-sets: the conflict graph is complete multipartite,
  i.e. "does not clash with" is an equivalence relation on the clause
  occurrences; the blocks of the (unique) multipartition are returned;
* a counting satisfiability decision for hitting clause-sets: distinct
  clauses of a hitting clause-set are falsified by disjoint sets of total
  assignments, so the instance is unsatisfiable exactly when the
  falsifying counts add up to the full assignment-space size;
* the inertia of a symmetric matrix over the rationals, computed exactly
  by congruence elimination.  The quantity of interest is the "hermitian
  defect" ``m - max(n_plus, n_minus)``: for a conflict matrix it bounds
  the deficiency of the clause-set from above, which makes the matrix a
  purely combinatorial certificate against large deficiency.

Everything here is exact integer / rational arithmetic; no floating
point is involved.
"""

from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .core import Clause, MultiClauseSet, falsifying_count

__all__ = [
    "ConflictMatrix",
    "HittingClassification",
    "Inertia",
    "Multipartition",
    "clause_rows",
    "classify_hitting",
    "conflict_matrix",
    "deficiency_bound_check",
    "hermitian_rank",
    "hitting_sat",
]


def clause_rows(F: MultiClauseSet) -> Tuple[Clause, ...]:
    """The clause occurrences of F in matrix row order.

    Clauses appear in canonical sorted order, each repeated according to
    its multiplicity (so copies of the same clause occupy adjacent rows).
    All index-based results in this module -- conflict matrices and
    multipartition blocks -- refer to this ordering.
    """
    return tuple(C for C, mult in F.items() for _ in range(mult))


def _conflicts(C: Clause, D: Clause) -> int:
    """Number of variables on which C and D exclude different values."""
    count = 0
    for lit in C:
        if D.has_var(lit.var) and D.value_on(lit.var) != lit.value:
            count += 1
    return count


class ConflictMatrix:
    """Symmetric nonnegative integer matrix with zero diagonal.

    Entry (i, j) counts the conflicts between clause occurrences i and j;
    the diagonal is zero because a clause never clashes with itself (nor
    with another copy of itself).
    """

    __slots__ = ("_rows",)

    def __init__(self, rows: Sequence[Sequence[int]]):
        entries = tuple(tuple(int(x) for x in row) for row in rows)
        m = len(entries)
        for i, row in enumerate(entries):
            if len(row) != m:
                raise ValueError("conflict matrix must be square")
            if row[i] != 0:
                raise ValueError("conflict matrix must have zero diagonal")
            for j, x in enumerate(row):
                if x < 0:
                    raise ValueError("conflict counts cannot be negative")
                if entries[j][i] != x:
                    raise ValueError("conflict matrix must be symmetric")
        self._rows = entries

    @property
    def order(self) -> int:
        return len(self._rows)

    def rows(self) -> Tuple[Tuple[int, ...], ...]:
        return self._rows

    def entry(self, i: int, j: int) -> int:
        return self._rows[i][j]

    def __getitem__(self, i: int) -> Tuple[int, ...]:
        return self._rows[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, ConflictMatrix):
            return self._rows == other._rows
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        body = ", ".join(repr(list(row)) for row in self._rows)
        return f"ConflictMatrix([{body}])"


def conflict_matrix(F: MultiClauseSet) -> ConflictMatrix:
    """Conflict matrix of F over the row order of clause_rows(F)."""
    rows = clause_rows(F)
    m = len(rows)
    entries: List[List[int]] = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            entries[i][j] = entries[j][i] = _conflicts(rows[i], rows[j])
    return ConflictMatrix(entries)


class Multipartition(NamedTuple):
    """Partition of the clause-occurrence indices witnessing multihitting.

    Two occurrences share a block exactly when they do not clash; blocks
    are sorted internally and listed by smallest member.
    """

    blocks: Tuple[Tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.blocks)


class HittingClassification(NamedTuple):
    """What the conflict matrix says about a clause-set.

    hitting         every two occurrences clash (vacuous below two clauses)
    hitting_degree  largest number of conflicts between two occurrences,
                    None when there are fewer than two clauses
    regular         r when every pair of occurrences clashes in exactly r
                    variables (0 below two clauses), None otherwise
    multihitting    the conflict graph is complete multipartite
    multipartition  the witnessing partition, None when not multihitting
    """

    hitting: bool
    hitting_degree: Optional[int]
    regular: Optional[int]
    multihitting: bool
    multipartition: Optional[Multipartition]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        self.parent[self.find(x)] = self.find(y)


def classify_hitting(F: MultiClauseSet) -> HittingClassification:
    """Hitting / regular / multihitting analysis of the conflict matrix.

    Multihitting detection merges occurrences along non-edges of the
    conflict graph and then verifies that no two occurrences in the same
    component clash; since the blocks of a complete multipartite graph
    are exactly the connected components of its complement, the
    multipartition is unique whenever it exists.
    """
    matrix = conflict_matrix(F)
    m = matrix.order
    off_diagonal = [matrix.entry(i, j) for i in range(m) for j in range(i + 1, m)]

    hitting = all(x > 0 for x in off_diagonal)
    hitting_degree = max(off_diagonal) if off_diagonal else None
    if off_diagonal:
        regular = off_diagonal[0] if len(set(off_diagonal)) == 1 else None
    else:
        regular = 0

    uf = _UnionFind(m)
    for i in range(m):
        for j in range(i + 1, m):
            if matrix.entry(i, j) == 0:
                uf.union(i, j)
    # Merging along non-edges makes any two occurrences from different
    # components clash automatically; what can still fail is a clash inside
    # a component, which is exactly what rules out a multipartition.
    component = [uf.find(i) for i in range(m)]
    multihitting = all(
        matrix.entry(i, j) == 0
        for i in range(m)
        for j in range(i + 1, m)
        if component[i] == component[j]
    )

    multipartition = None
    if multihitting:
        grouped: dict = {}
        for i in range(m):
            grouped.setdefault(component[i], []).append(i)
        blocks = tuple(sorted(tuple(sorted(b)) for b in grouped.values()))
        multipartition = Multipartition(blocks)

    return HittingClassification(
        hitting=hitting,
        hitting_degree=hitting_degree,
        regular=regular,
        multihitting=multihitting,
        multipartition=multipartition,
    )


def hitting_sat(F: MultiClauseSet) -> bool:
    """Counting satisfiability decision for hitting clause-sets.

    Distinct clauses of a hitting clause-set exclude pairwise disjoint
    sets of total assignments, so F is unsatisfiable exactly when the
    falsifying counts of its clauses cover the whole assignment space:

        sum over clauses C of  prod over v not in C of |domain(v)|
            ==  prod over all v of |domain(v)|

    Counts are exact big integers.  Raises ValueError on input that is
    not hitting (the disjointness argument, and hence the criterion,
    would be wrong there).
    """
    if not classify_hitting(F).hitting:
        raise ValueError("hitting_sat needs a hitting clause-set")
    table = F.table
    occurring = sorted(F.var_set())
    space = 1
    for v in occurring:
        space *= table.domain_size(v)
    covered = sum(falsifying_count(table, C, occurring) for C in F.clauses())
    return covered != space


class Inertia(NamedTuple):
    """Signature of a symmetric rational matrix.

    n_plus / n_minus count positive / negative eigenvalues (with
    multiplicity); h = max(n_plus, n_minus) and hdef = order - h is the
    hermitian defect.  For a conflict matrix, hdef bounds the deficiency
    of the underlying clause-set from above.
    """

    n_plus: int
    n_minus: int
    h: int
    hdef: int


def hermitian_rank(M) -> Inertia:
    """Exact inertia of a symmetric matrix by rational congruence.

    Accepts a ConflictMatrix or any square symmetric matrix given as rows
    of rationals.  Elimination uses a 1x1 pivot on the largest-magnitude
    nonzero diagonal entry while one exists (ties broken by lowest
    index); when the remaining diagonal is all zero it uses a 2x2 pivot
    on the lexicographically least nonzero off-diagonal entry, which
    contributes one positive and one negative eigenvalue.  Congruence
    preserves the signature, so the count is exact.
    """
    rows = M.rows() if isinstance(M, ConflictMatrix) else tuple(tuple(r) for r in M)
    m = len(rows)
    for i, row in enumerate(rows):
        if len(row) != m:
            raise ValueError("matrix must be square")
        for j in range(m):
            if rows[i][j] != rows[j][i]:
                raise ValueError("matrix must be symmetric")
    A = [[Fraction(x) for x in row] for row in rows]

    active = list(range(m))
    n_plus = n_minus = 0
    while active:
        diagonal = [i for i in active if A[i][i] != 0]
        if diagonal:
            p = max(diagonal, key=lambda i: abs(A[i][i]))
            d = A[p][p]
            if d > 0:
                n_plus += 1
            else:
                n_minus += 1
            active.remove(p)
            for i in active:
                f = A[i][p] / d
                if f:
                    for j in active:
                        A[i][j] -= f * A[p][j]
            continue
        pair = next(
            ((i, j) for i in active for j in active if j > i and A[i][j] != 0),
            None,
        )
        if pair is None:
            break  # what remains is a zero matrix
        i, j = pair
        b = A[i][j]
        n_plus += 1
        n_minus += 1
        active.remove(i)
        active.remove(j)
        for k in active:
            ci, cj = A[k][i], A[k][j]
            if ci or cj:
                for l in active:
                    A[k][l] -= (ci * A[j][l] + cj * A[i][l]) / b

    h = max(n_plus, n_minus)
    return Inertia(n_plus=n_plus, n_minus=n_minus, h=h, hdef=m - h)


def deficiency_bound_check(F: MultiClauseSet) -> bool:
    """Whether delta(F) <= hdef(conflict_matrix(F)).

    This inequality is a theorem, so the check should never fail; it is
    exposed as a cross-validation hook, and a False return signals a bug
    in either the deficiency computation or the inertia computation.
    """
    return F.delta <= hermitian_rank(conflict_matrix(F)).hdef
