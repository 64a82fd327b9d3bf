"""Rooted phylogenetic trees with branch lengths, Newick-backed.

Nodes are stored in postorder: every child index is smaller than its
parent's, and the root is always the last node. That numbering is what the
comparative routines rely on for single-pass bottom-up (index order) and
top-down (reversed index order) sweeps.

Trees are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np


class NewickError(ValueError):
    """Malformed Newick input; ``offset`` points at the offending character."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class TreeError(ValueError):
    """A structurally invalid tree or an invalid tree operation."""


# Characters that end a label or a branch-length token.
_TOKEN_END = set("(),:;")


@dataclass(frozen=True, eq=False)
class Tree:
    """A rooted tree over parallel per-node arrays, numbered in postorder.

    Attributes
    ----------
    parents : int ndarray, -1 for the root
    children : per-node tuple of child indices (empty for tips), in the
        left-to-right order of the source Newick
    lengths : float ndarray, branch length to the parent (0.0 at the root)
    labels : per-node label, ``None`` where absent; tips always carry one
    defaulted : node indices whose branch length was absent in the source
        and defaulted to 1.0
    """

    parents: np.ndarray
    children: tuple[tuple[int, ...], ...]
    lengths: np.ndarray
    labels: tuple[str | None, ...]
    defaulted: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n == 0:
            raise TreeError("tree has no nodes")
        if not (len(self.parents) == len(self.children) == len(self.lengths) == n):
            raise TreeError("per-node arrays disagree in length")
        roots = np.flatnonzero(self.parents < 0)
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root, found {len(roots)}")
        if roots[0] != n - 1:
            raise TreeError("root must be the last node (postorder numbering)")
        seen = 0
        for i, kids in enumerate(self.children):
            for c in kids:
                if c >= i:
                    raise TreeError("child index must precede its parent")
                if self.parents[c] != i:
                    raise TreeError("children and parents arrays disagree")
                seen += 1
        if seen != n - 1:
            raise TreeError("tree is not connected")
        if not np.all(np.isfinite(self.lengths)) or np.any(self.lengths < 0):
            raise TreeError("branch lengths must be finite and non-negative")
        tip_labels = [self.labels[i] for i in range(n) if not self.children[i]]
        if any(lab is None or lab == "" for lab in tip_labels):
            raise TreeError("every tip must be labeled")
        if len(set(tip_labels)) != len(tip_labels):
            raise TreeError("tip labels must be unique")

    # -- derived views ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def root(self) -> int:
        return self.n_nodes - 1

    @cached_property
    def tip_indices(self) -> np.ndarray:
        return np.array([i for i in range(self.n_nodes) if not self.children[i]], dtype=np.intp)

    @cached_property
    def tip_labels(self) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in self.tip_indices)  # type: ignore[misc]

    @property
    def n_tips(self) -> int:
        return len(self.tip_indices)

    def is_tip(self, i: int) -> bool:
        return not self.children[i]

    def postorder(self) -> range:
        """Node indices in postorder (the storage order)."""
        return range(self.n_nodes)

    @cached_property
    def root_distances(self) -> np.ndarray:
        """Path length from the root to every node."""
        dist = np.zeros(self.n_nodes)
        # Reversed index order visits every parent before its children.
        for i in range(self.n_nodes - 2, -1, -1):
            dist[i] = dist[self.parents[i]] + self.lengths[i]
        return dist

    @cached_property
    def height(self) -> float:
        """Maximum root-to-tip distance."""
        return float(max(self.root_distances[i] for i in self.tip_indices))

    def structurally_equal(self, other: "Tree") -> bool:
        """Exact equality of topology, labels, and branch lengths."""
        return (
            self.n_nodes == other.n_nodes
            and self.children == other.children
            and self.labels == other.labels
            and np.array_equal(self.lengths, other.lengths)
        )


@dataclass(frozen=True)
class TreeSummary:
    tip_count: int
    node_count: int
    height: float
    is_binary: bool
    polytomy_count: int


# -- construction ----------------------------------------------------------


class _PNode:
    """Mutable node used while parsing/pruning, before postorder flattening."""

    __slots__ = ("label", "length", "children", "defaulted", "offset")

    def __init__(self, label, length, children, defaulted, offset=0):
        self.label = label
        self.length = length
        self.children = children
        self.defaulted = defaulted
        self.offset = offset


def _flatten(root: _PNode) -> Tree:
    """Assign postorder indices to a nested node structure and build a Tree."""
    order: list[_PNode] = []
    stack: list[tuple[_PNode, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
        else:
            stack.append((node, True))
            for child in reversed(node.children):
                stack.append((child, False))
    index = {id(node): i for i, node in enumerate(order)}
    n = len(order)
    parents = np.full(n, -1, dtype=np.intp)
    children: list[tuple[int, ...]] = []
    lengths = np.zeros(n)
    labels: list[str | None] = []
    defaulted = set()
    for i, node in enumerate(order):
        kids = tuple(index[id(c)] for c in node.children)
        children.append(kids)
        for c in kids:
            parents[c] = i
        lengths[i] = node.length
        labels.append(node.label)
        if node.defaulted:
            defaulted.add(i)
    return Tree(parents, tuple(children), lengths, tuple(labels), frozenset(defaulted))


def _strip_comments(text: str) -> str:
    """Remove square-bracket comments (nesting allowed)."""
    out = []
    depth = 0
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            if depth > 0:
                depth -= 1
            else:
                out.append(ch)
        elif depth == 0:
            out.append(ch)
    return "".join(out)


def parse_newick(text: str) -> Tree:
    """Parse a single ``;``-terminated Newick statement into a Tree.

    Square-bracket comments are stripped first; error offsets refer to the
    comment-stripped text. Branch lengths absent from the input default to
    1.0 and the affected nodes are recorded in ``Tree.defaulted``; an absent
    root length becomes 0.0 (the root has no parent edge) and is not
    flagged.

    Raises
    ------
    NewickError
        On empty input, unbalanced parentheses, missing or duplicate tip
        labels, negative or non-numeric branch lengths, a missing ``;``,
        or trailing content. Each error carries the character offset.
    """
    s = _strip_comments(text)
    pos = _skip_ws(s, 0)
    if pos >= len(s):
        raise NewickError("empty input", 0)

    node, pos = _parse_subtree(s, pos)
    pos = _skip_ws(s, pos)
    if pos >= len(s) or s[pos] != ";":
        if pos < len(s) and s[pos] == ")":
            raise NewickError("unbalanced parentheses", pos)
        raise NewickError("missing ';' terminator", pos)
    pos = _skip_ws(s, pos + 1)
    if pos < len(s):
        raise NewickError("trailing content after ';'", pos)

    # Root branch length: absent means "no parent edge", not a default.
    if node.defaulted:
        node.length = 0.0
        node.defaulted = False

    _check_duplicate_tips(node)
    return _flatten(node)


def _skip_ws(s: str, pos: int) -> int:
    while pos < len(s) and s[pos].isspace():
        pos += 1
    return pos


def _parse_subtree(s: str, pos: int) -> tuple[_PNode, int]:
    pos = _skip_ws(s, pos)
    if pos < len(s) and s[pos] == "(":
        open_offset = pos
        pos += 1
        children: list[_PNode] = []
        while True:
            child, pos = _parse_subtree(s, pos)
            children.append(child)
            pos = _skip_ws(s, pos)
            if pos >= len(s):
                raise NewickError("unbalanced parentheses", len(s))
            if s[pos] == ",":
                pos += 1
                continue
            if s[pos] == ")":
                pos += 1
                break
            raise NewickError(f"unexpected character {s[pos]!r}", pos)
        label, pos = _read_label(s, pos)
        length, defaulted, pos = _read_length(s, pos)
        return _PNode(label, length, children, defaulted, open_offset), pos

    if pos < len(s) and s[pos] == ")":
        raise NewickError("unbalanced parentheses", pos)
    label_offset = pos
    label, pos = _read_label(s, pos)
    if label is None:
        raise NewickError("missing tip label", label_offset)
    length, defaulted, pos = _read_length(s, pos)
    return _PNode(label, length, [], defaulted, label_offset), pos


def _read_label(s: str, pos: int) -> tuple[str | None, int]:
    pos = _skip_ws(s, pos)
    start = pos
    while pos < len(s) and s[pos] not in _TOKEN_END and not s[pos].isspace():
        pos += 1
    token = s[start:pos]
    return (token if token else None), pos


def _read_length(s: str, pos: int) -> tuple[float, bool, int]:
    pos = _skip_ws(s, pos)
    if pos >= len(s) or s[pos] != ":":
        return 1.0, True, pos
    pos = _skip_ws(s, pos + 1)
    start = pos
    while pos < len(s) and s[pos] not in _TOKEN_END and not s[pos].isspace():
        pos += 1
    raw = s[start:pos]
    try:
        value = float(raw)
    except ValueError:
        raise NewickError(f"non-numeric branch length {raw!r}", start) from None
    if not np.isfinite(value):
        raise NewickError(f"non-finite branch length {raw!r}", start)
    if value < 0:
        raise NewickError(f"negative branch length {raw!r}", start)
    return value, False, pos


def _check_duplicate_tips(root: _PNode) -> None:
    seen: dict[str, int] = {}
    stack = [root]
    order: list[_PNode] = []
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(node.children)
    # Report the *later* occurrence, scanning tips in input order.
    for node in sorted((n for n in order if not n.children), key=lambda n: n.offset):
        if node.label in seen:
            raise NewickError(f"duplicate tip label {node.label!r}", node.offset)
        seen[node.label] = node.offset


def read_newick_file(path: str | Path) -> Tree:
    """Read one UTF-8 Newick tree from a file."""
    return parse_newick(Path(path).read_text(encoding="utf-8"))


# -- serialization ---------------------------------------------------------


def _format_length(x: float) -> str:
    # Shortest decimal that round-trips: integers lose the ".0", the rest
    # use repr (exact for float64).
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def write_newick(tree: Tree) -> str:
    """Serialize canonically: stored child order, shortest round-trip lengths."""
    parts: dict[int, str] = {}
    for i in tree.postorder():
        label = tree.labels[i] or ""
        suffix = f"{label}:{_format_length(float(tree.lengths[i]))}"
        if tree.children[i]:
            inner = ",".join(parts.pop(c) for c in tree.children[i])
            parts[i] = f"({inner}){suffix}"
        else:
            parts[i] = suffix
    return parts[tree.root] + ";"


def write_newick_file(tree: Tree, path: str | Path) -> None:
    Path(path).write_text(write_newick(tree) + "\n", encoding="utf-8")


# -- operations ------------------------------------------------------------


def prune_to_taxa(tree: Tree, keep: set[str] | frozenset[str]) -> Tree:
    """Induce the subtree on ``keep``, preserving root-to-tip path lengths.

    Unary internal nodes created by the pruning are suppressed and their
    branch lengths summed. The root is never suppressed, even if it ends up
    with a single child: dropping it would shorten every root-to-tip path.
    """
    keep = set(keep)
    known = set(tree.tip_labels)
    unknown = keep - known
    if unknown:
        raise TreeError(f"unknown tip label: {sorted(unknown)[0]!r}")
    if len(keep) < 2:
        raise TreeError(f"need >= 2 taxa, got {len(keep)}")

    built: dict[int, _PNode | None] = {}
    for i in tree.postorder():
        if tree.is_tip(i):
            if tree.labels[i] in keep:
                built[i] = _PNode(tree.labels[i], float(tree.lengths[i]), [], False)
            else:
                built[i] = None
            continue
        kids = [built[c] for c in tree.children[i] if built[c] is not None]
        if not kids:
            built[i] = None
        elif len(kids) == 1 and i != tree.root:
            # Splice out the unary node; child edge absorbs this edge.
            kids[0].length += float(tree.lengths[i])
            built[i] = kids[0]
        else:
            built[i] = _PNode(tree.labels[i], float(tree.lengths[i]), kids, False)

    root = built[tree.root]
    assert root is not None
    return _flatten(root)


def tree_summary(tree: Tree) -> TreeSummary:
    """Tip/node counts, height, binarity, and polytomy count."""
    internal = [i for i in tree.postorder() if not tree.is_tip(i)]
    polytomies = sum(1 for i in internal if len(tree.children[i]) > 2)
    is_binary = bool(internal) and all(len(tree.children[i]) == 2 for i in internal)
    if tree.n_nodes == 1:
        is_binary = False
    return TreeSummary(
        tip_count=tree.n_tips,
        node_count=tree.n_nodes,
        height=tree.height,
        is_binary=is_binary,
        polytomy_count=polytomies,
    )
