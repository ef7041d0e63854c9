"""Minimal unsatisfiability at deficiency one.

The clause-sets that are minimally unsatisfiable with deficiency exactly 1
have a complete structure theory, and this module implements it:

* ``DeficiencyOneTree`` -- a rooted tree whose inner nodes carry distinct
  variables and whose outgoing edges enumerate the node variable's domain.
  Reading the edge labels along the path to each leaf as literals gives a
  clause per leaf; ``tree_to_clause_set`` produces that clause-set, which
  is always a 1-regular hitting, saturated, minimally unsatisfiable
  clause-set of deficiency 1.

* ``recognize_mu1`` -- decides membership in the class by eliminating
  singular variables (all values but at most one occur exactly once) with
  the resolution/DP operator: members are exactly the clause-sets that
  reduce to the single empty clause through non-degenerate steps, in any
  elimination order.  Members that still contain a variable always contain
  a variable all of whose values occur exactly once, so the reduction
  never stalls on genuine members.

* ``classify_mu1`` -- splits the class into its two extremes and the rest:
  the saturated members (no literal can be added to any clause without
  making the set satisfiable) are exactly the tree images, and a witness
  tree is reconstructed for them; the marginal members (no literal can be
  removed without destroying minimal unsatisfiability) are exactly the
  totally singular ones, where every literal occurrence is unique.
  Everything else is intermediate.  The single empty clause is both
  saturated and marginal; it reports as saturated (with the trivial tree).

* ``saturate`` -- greedily widens the clauses of a minimally unsatisfiable
  input while unsatisfiability survives, ending in a saturated set with a
  clause-by-clause bijection to the input.

* ``is_saturated_mu``, ``stability_at_least``, ``degree_measures`` --
  saturation checking by exhaustive literal addition, bounded stability of
  irredundancy under partial assignments, and the min-max variable-degree
  measures.

Trees serialize to a parenthesized text form, see ``format_tree``.
"""

import itertools
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from .core import (
    BOT,
    Clause,
    Literal,
    MultiClauseSet,
    PartialAssignment,
    VariableTable,
    apply,
)
from .reductions import is_singular, singular_dp
from .satdec import decide, is_irredundant, is_minimally_unsatisfiable
from .structure import classify_hitting

__all__ = [
    "DeficiencyOneTree",
    "DegreeMeasures",
    "LEAF",
    "Mu1Classification",
    "Mu1Verdict",
    "classify_mu1",
    "degree_measures",
    "format_tree",
    "is_saturated_mu",
    "parse_tree",
    "recognize_mu1",
    "saturate",
    "stability_at_least",
    "tree_to_clause_set",
]


@dataclass(frozen=True)
class DeficiencyOneTree:
    """Rooted tree with variable-labelled inner nodes.

    A leaf is ``DeficiencyOneTree()``.  An inner node carries a variable
    and one child per domain value; the child at index j is the subtree
    reached by assigning value j, so the edge labelling is the tuple
    position.  Variable labels must be distinct across the whole tree;
    that global condition is checked by the consumers (tree_to_clause_set,
    parse_tree), not per node.
    """

    var: Optional[int] = None
    children: Tuple["DeficiencyOneTree", ...] = ()

    def __post_init__(self):
        if self.var is None:
            if self.children:
                raise ValueError("a leaf carries no children")
        else:
            if not isinstance(self.var, int):
                raise ValueError("inner nodes are labelled with integer variables")
            if not self.children:
                raise ValueError("an inner node needs one child per domain value")
            if not all(isinstance(c, DeficiencyOneTree) for c in self.children):
                raise ValueError("children must be trees")

    @property
    def is_leaf(self) -> bool:
        return self.var is None

    @classmethod
    def node(cls, var: int, children) -> "DeficiencyOneTree":
        return cls(var, tuple(children))


LEAF = DeficiencyOneTree()


def _check_labels(tree: DeficiencyOneTree) -> None:
    seen = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            continue
        if node.var in seen:
            raise ValueError(f"variable {node.var} labels two nodes")
        seen.add(node.var)
        stack.extend(node.children)


def tree_to_clause_set(tree: DeficiencyOneTree) -> MultiClauseSet:
    """The clause-set whose clauses are the root-to-leaf paths of the tree.

    Each leaf contributes the clause of literals (variable of node, value
    of outgoing edge) collected along its path from the root; the trivial
    tree yields the single empty clause.  The result is a 1-regular
    hitting (any two clauses clash exactly at their lowest common
    ancestor), saturated, minimally unsatisfiable clause-set of
    deficiency 1, over the domains spelled out by the node arities.
    """
    _check_labels(tree)
    sizes = {}
    clauses = []

    def walk(node, path):
        if node.is_leaf:
            clauses.append(Clause(path))
            return
        sizes[node.var] = len(node.children)
        for value, child in enumerate(node.children):
            walk(child, path + [(node.var, value)])

    walk(tree, [])
    return MultiClauseSet(VariableTable(sizes), {c: 1 for c in clauses},
                          set_view=True)


class Mu1Verdict(NamedTuple):
    """Outcome of the singular-elimination recognition.

    verdict  "mu1" or "not_mu1"
    steps    variables eliminated, in order, before the outcome was known
    reason   why recognition stopped short (not_mu1 only)
    """

    verdict: str
    steps: Tuple[int, ...]
    reason: Optional[str] = None


def recognize_mu1(F: MultiClauseSet) -> Mu1Verdict:
    """Decide minimal unsatisfiability at deficiency 1 by elimination.

    Repeatedly picks the smallest singular variable and resolves it away;
    membership is equivalent to every such maximal elimination sequence
    being non-degenerate (each step drops the clause count by exactly the
    domain size minus one) and ending in the single empty clause.  A
    degenerate step, or running out of singular variables early, refutes
    membership conclusively.
    """
    if any(mult > 1 for _, mult in F.items()):
        return Mu1Verdict("not_mu1", (), "a repeated clause is redundant")
    G = F.as_set()
    steps = []
    while True:
        if G.items() == ((BOT, 1),):
            return Mu1Verdict("mu1", tuple(steps))
        v = next((w for w in sorted(G.var_set()) if is_singular(G, w)), None)
        if v is None:
            return Mu1Verdict("not_mu1", tuple(steps),
                              "no singular variable left")
        G, degenerate = singular_dp(G, v)
        steps.append(v)
        if degenerate:
            return Mu1Verdict("not_mu1", tuple(steps),
                              f"degenerate elimination of variable {v}")


class Mu1Classification(NamedTuple):
    """Position of a deficiency-1 minimally unsatisfiable clause-set.

    category    "saturated", "marginal", or "intermediate"
    tree        witness tree whose image is the input (saturated only)
    diagnostic  explanation when a hitting input unexpectedly failed
                tree reconstruction (downgraded to intermediate)
    """

    category: str
    tree: Optional[DeficiencyOneTree]
    diagnostic: Optional[str] = None


def _tree_from_image(F: MultiClauseSet) -> DeficiencyOneTree:
    """Rebuild a tree whose image is the hitting clause-set F.

    The root is a variable occurring in every clause; when several
    qualify (a chain of single-valued variables above the first branching
    node), the single-valued ones must come first, lest the recursion try
    to place one variable into several subtrees.
    """
    table = F.table

    def build(clauses):
        if len(clauses) == 1 and clauses[0] == BOT:
            return LEAF
        if not clauses or any(c == BOT for c in clauses):
            raise ValueError("an empty clause sits next to other clauses")
        common = frozenset.intersection(*(c.variables for c in clauses))
        if not common:
            raise ValueError("no variable occurs in every clause")
        root = min(common, key=lambda v: (table.domain_size(v) > 1, v))
        children = []
        for value in table.domain(root):
            branch = [c.without_vars((root,)) for c in clauses
                      if c.value_on(root) == value]
            if not branch:
                raise ValueError(
                    f"value {value} of variable {root} appears in no clause")
            children.append(build(branch))
        return DeficiencyOneTree(root, tuple(children))

    tree = build(list(F.clauses()))
    if tree_to_clause_set(tree) != F.as_set():
        raise ValueError("reconstruction did not reproduce the clause-set")
    return tree


def classify_mu1(F: MultiClauseSet) -> Mu1Classification:
    """Saturated / marginal / intermediate split of the deficiency-1 class.

    Saturated members are exactly the hitting ones, equivalently the tree
    images, and the witness tree is returned; marginal members are exactly
    the totally singular ones (every literal occurrence unique).  The
    single empty clause qualifies as both and reports as saturated.
    Raises ValueError when the input is not minimally unsatisfiable of
    deficiency 1.
    """
    outcome = recognize_mu1(F)
    if outcome.verdict != "mu1":
        raise ValueError(
            f"not minimally unsatisfiable of deficiency 1 ({outcome.reason})")
    G = F.as_set()
    if classify_hitting(G).hitting:
        try:
            return Mu1Classification("saturated", _tree_from_image(G))
        except ValueError as exc:
            return Mu1Classification("intermediate", None, str(exc))
    if all(G.count((v, e)) == 1
           for v in G.var_set() for e in G.table.domain(v)):
        return Mu1Classification("marginal", None)
    return Mu1Classification("intermediate", None)


def _widen(clause: Clause, v: int, value: int) -> Clause:
    return Clause(tuple(clause) + (Literal(v, value),))


def saturate(F: MultiClauseSet, method: str = "auto") -> MultiClauseSet:
    """Greedy saturation of a minimally unsatisfiable clause-set.

    Sweeps clauses in canonical order, variables ascending, values
    ascending, keeping any literal addition under which the set stays
    unsatisfiable (which then keeps it minimally unsatisfiable), until a
    full sweep changes nothing.  Only variables of the input with at least
    two values are considered: adding a single-valued variable never
    changes the falsifying assignments, so it could be added everywhere
    and saturation would be unreachable.  The result extends each input
    clause (possibly trivially).  Raises ValueError on non-MU input.
    """
    if not is_minimally_unsatisfiable(F, method):
        raise ValueError("saturate needs a minimally unsatisfiable input")
    table = F.table
    clauses = [c for c, _ in F.items()]
    candidates = [v for v in sorted(F.var_set()) if table.domain_size(v) >= 2]
    changed = True
    while changed:
        changed = False
        for idx, clause in enumerate(clauses):
            for v in candidates:
                if clause.has_var(v):
                    continue
                for value in table.domain(v):
                    trial = list(clauses)
                    trial[idx] = _widen(clause, v, value)
                    G = MultiClauseSet(table, {c: 1 for c in trial},
                                       set_view=True)
                    if not decide(G, method).satisfiable:
                        clause = trial[idx]
                        clauses[idx] = clause
                        changed = True
                        break
    return F.with_clauses({c: 1 for c in clauses})


def is_saturated_mu(F: MultiClauseSet, method: str = "auto") -> bool:
    """Minimally unsatisfiable and no literal addition keeps it unsatisfiable.

    Tries every clause C, every at-least-two-valued variable of F outside
    C, and every value; widening a clause into a clause already present
    collapses the two, which leaves a satisfiable proper subset, so such
    additions count as rendering the set satisfiable.
    """
    if not is_minimally_unsatisfiable(F, method):
        return False
    table = F.table
    for clause in F.clauses():
        rest = [c for c in F.clauses() if c != clause]
        for v in sorted(F.var_set()):
            if table.domain_size(v) < 2 or clause.has_var(v):
                continue
            for value in table.domain(v):
                G = MultiClauseSet(
                    table, {c: 1 for c in rest + [_widen(clause, v, value)]},
                    set_view=True)
                if not decide(G, method).satisfiable:
                    return False
    return True


def stability_at_least(F: MultiClauseSet, k: int, method: str = "auto") -> bool:
    """Whether every assignment of at most k variables leaves F irredundant.

    k = 0 asks for irredundancy of F itself; negative k is vacuously true.
    Only assignments over occurring variables matter (others leave F
    unchanged), so k caps at n(F).
    """
    variables = sorted(F.var_set())
    table = F.table
    for r in range(0, min(k, len(variables)) + 1):
        for subset in itertools.combinations(variables, r):
            for values in itertools.product(*(table.domain(v) for v in subset)):
                phi = PartialAssignment(zip(subset, values))
                if not is_irredundant(apply(phi, F), method):
                    return False
    return True


class DegreeMeasures(NamedTuple):
    """Occurrence statistics over the occurring variables.

    mmvd  min over variables of the largest per-value occurrence count
    mvd   min over variables of the total occurrence count
    """

    mmvd: int
    mvd: int


def degree_measures(F: MultiClauseSet) -> DegreeMeasures:
    """Min-max value-degree and min variable-degree; needs n(F) > 0."""
    if F.n == 0:
        raise ValueError("degree measures need at least one occurring variable")
    table = F.table
    mmvd = min(max(F.count((v, e)) for e in table.domain(v))
               for v in F.var_set())
    mvd = min(F.var_count(v) for v in F.var_set())
    return DegreeMeasures(mmvd=mmvd, mvd=mvd)


# -- tree serialization ----------------------------------------------------
#
# tree   ::= '*' | '(' VAR branch+ ')'
# branch ::= '(' VALUE tree ')'
#
# VAR and VALUE are decimal integers; a node's branch values must cover
# 0 .. arity-1 exactly, in any order.  Emission is always ascending.


def format_tree(tree: DeficiencyOneTree) -> str:
    """Parenthesized text form, inverse of parse_tree."""
    if tree.is_leaf:
        return "*"
    branches = " ".join(f"({value} {format_tree(child)})"
                        for value, child in enumerate(tree.children))
    return f"({tree.var} {branches})"


def parse_tree(text: str) -> DeficiencyOneTree:
    """Parse the parenthesized tree format; see format_tree."""
    tokens = re.findall(r"[()*]|\d+|\S", text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of tree text")
        token = tokens[pos]
        if expected is not None and token != expected:
            raise ValueError(f"expected {expected!r}, found {token!r}")
        pos += 1
        return token

    def number(what):
        token = take()
        if not token.isdigit():
            raise ValueError(f"expected {what}, found {token!r}")
        return int(token)

    def tree():
        if peek() == "*":
            take()
            return LEAF
        take("(")
        var = number("a variable")
        branches = {}
        while peek() == "(":
            take("(")
            value = number("a value")
            if value in branches:
                raise ValueError(f"value {value} given twice for variable {var}")
            branches[value] = tree()
            take(")")
        take(")")
        if sorted(branches) != list(range(len(branches))):
            raise ValueError(
                f"branch values of variable {var} must cover 0..{len(branches) - 1}")
        if not branches:
            raise ValueError(f"variable {var} has no branches")
        return DeficiencyOneTree(var, tuple(branches[v] for v in sorted(branches)))

    result = tree()
    if pos != len(tokens):
        raise ValueError(f"trailing input {tokens[pos]!r}")
    _check_labels(result)
    return result
