"""Shared fixtures-by-construction and independent oracle implementations.

The oracles here deliberately avoid the package's vectorized code paths:
they are dict-based recursions over the tree structure, kept in lockstep
with the documented arithmetic (same child order, same sequential
accumulation, same epsilon policy) so that equality can be asserted
bitwise, not just within a tolerance.
"""

from __future__ import annotations

import numpy as np

from lexiphylo.tree import Tree


def balanced_newick(depth: int, branch: float = 1.0, prefix: str = "T") -> str:
    """A balanced binary tree with 2**depth tips and unit-ish branches."""
    counter = iter(range(2**depth))

    def rec(d: int) -> str:
        if d == 0:
            return f"{prefix}{next(counter):03d}:{branch}"
        return f"({rec(d - 1)},{rec(d - 1)}):{branch}"

    return rec(depth) + ";"


def caterpillar_newick(n_tips: int, branch: float = 1.0) -> str:
    inner = f"T{n_tips - 1:03d}:{branch}"
    for i in range(n_tips - 2, -1, -1):
        inner = f"(T{i:03d}:{branch},{inner}):{branch}"
    # The outermost parenthetical is the root; drop its trailing length.
    return inner.rsplit(":", 1)[0] + ";"


# Small trees (<= 8 tips) for oracle-equivalence checks; one polytomy,
# one caterpillar, uneven branch lengths, and a zero-length branch.
SMALL_TREE_NEWICKS = [
    "(A:1,B:2);",
    "(A:1,(B:0.5,C:2.5):1);",
    "((A:1,B:1):1,(C:1,D:1):1);",
    "(A:1,B:1,C:1,D:1);",  # polytomy at the root
    "((A:0.1,B:0.2):0.5,(C:0.3,(D:0.2,E:0.9):0.4):0.6);",
    "(A:1,(B:1,(C:1,(D:1,E:1):1):1):1);",
    "((A:2,B:0):1,((C:1,D:1,E:1):0.5,F:3):1);",  # zero branch + polytomy
    "(((A:1,B:1):1,(C:1,D:1):1):1,((E:1,F:1):1,(G:1,H:1):1):1);",
]


# -- naive oracles -----------------------------------------------------------


def oracle_root_distances(tree: Tree) -> dict[int, float]:
    dist: dict[int, float] = {}

    def walk(node: int, acc: float) -> None:
        dist[node] = acc
        for child in tree.children[node]:
            walk(child, acc + float(tree.lengths[child]))

    walk(tree.root, 0.0)
    return dist


def oracle_epsilon(tree: Tree) -> float:
    dist = oracle_root_distances(tree)
    height = max(dist[int(i)] for i in tree.tip_indices)
    return 1e-8 * height if height > 0 else 1e-8


def oracle_nodal_estimates(tree: Tree, tip_values) -> dict[int, float]:
    """Recursive weighted-mean estimates, children in stored order."""
    eps = oracle_epsilon(tree)
    values = {int(i): float(v) for i, v in zip(tree.tip_indices, tip_values)}
    est: dict[int, float] = {}

    def weight(node: int) -> float:
        length = float(tree.lengths[node])
        return 1.0 / (length if length != 0.0 else eps)

    def visit(node: int) -> float:
        if not tree.children[node]:
            est[node] = values[node]
            return est[node]
        kids = tree.children[node]
        acc = weight(kids[0]) * visit(kids[0])
        total = weight(kids[0])
        for child in kids[1:]:
            acc += weight(child) * visit(child)
            total += weight(child)
        est[node] = acc / total
        return est[node]

    visit(tree.root)
    return est


def oracle_d_sum(tree: Tree, tip_values) -> float:
    """Sum of |child - parent| estimates over tips centered to +-0.5,
    accumulated in postorder (mirrors the documented d_sum arithmetic)."""
    est = oracle_nodal_estimates(tree, np.asarray(tip_values, dtype=float) - 0.5)
    total = 0.0

    def visit(node: int) -> None:
        nonlocal total
        for child in tree.children[node]:
            visit(child)
        if node != tree.root:
            total += abs(est[node] - est[int(tree.parents[node])])

    visit(tree.root)
    return total


def all_binary_traits(n: int):
    """Every non-constant 0/1 vector of length n."""
    for bits in range(1, 2**n - 1):
        yield np.array([(bits >> i) & 1 for i in range(n)], dtype=float)


def sample_binary_traits(n: int, count: int, seed: int):
    """Non-constant random 0/1 vectors."""
    rng = np.random.default_rng(seed)
    produced = 0
    while produced < count:
        trait = (rng.random(n) < rng.uniform(0.2, 0.8)).astype(float)
        if 0 < trait.sum() < n:
            produced += 1
            yield trait
