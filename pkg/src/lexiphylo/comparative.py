"""Brownian-motion trait machinery and the D statistic for binary traits.

The D statistic measures phylogenetic signal in a binary trait by placing
an observed change score between two Monte Carlo references:

* a *random* null - the tip values shuffled across tips (prevalence fixed),
  which defines D = 1, and
* a *Brownian-motion threshold* null - a continuous trait simulated under
  BM and thresholded to the observed prevalence, which defines D = 0.

The change score ``d`` is the sum of absolute differences of weighted-mean
nodal estimates along every edge. Any consistent clumping score works here
because the two nulls normalize its scale; calibration tests pin the
behavior (BM-threshold traits score near 0, shuffled traits near 1).

Determinism contract: all randomness comes from Philox streams. Replicate
``r`` of a D computation uses stream ``(seed, r)`` and draws, in order, the
shuffle permutation, the BM innovations (one per node, the root draw
unused), and the threshold tie-break keys. Results are therefore identical
across serial and parallel execution.

Zero-length branches are kept as stored; wherever a branch length is used
as an inverse weight (nodal estimates, contrasts) a zero is substituted by
``epsilon = 1e-8 * tree height`` (1e-8 absolute on a zero-height tree, which
makes the weights uniform). BM simulation uses raw lengths: a zero branch
genuinely means zero variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import stream
from .tree import Tree, prune_to_taxa

DEFAULT_N_REPS = 1000
_NULL_GAP_TOL = 1e-12


@dataclass(frozen=True)
class BmParams:
    """Brownian-motion parameters: rate (variance per unit length), root, seed."""

    sigma2: float
    root_value: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be positive and finite, got {self.sigma2}")
        if not np.isfinite(self.root_value):
            raise ValueError("root value must be finite")


@dataclass(frozen=True)
class DStatResult:
    d_obs: float
    mean_d_random: float
    mean_d_bm: float
    D: float
    p_random: float
    p_bm: float
    n_reps: int
    n_tips_used: int


def _epsilon(tree: Tree) -> float:
    return 1e-8 * tree.height if tree.height > 0 else 1e-8


def _inverse_length_weights(tree: Tree) -> tuple[np.ndarray, np.ndarray]:
    """Per-node weight 1/length (epsilon-substituted) and per-parent weight sums.

    Weight sums accumulate over children in stored order so that a naive
    recursive recomputation reproduces the arithmetic bit for bit.
    """
    eps = _epsilon(tree)
    w = np.zeros(tree.n_nodes)
    for i in range(tree.n_nodes - 1):
        length = float(tree.lengths[i])
        w[i] = 1.0 / (length if length != 0.0 else eps)
    totals = np.zeros(tree.n_nodes)
    for i in tree.postorder():
        total = 0.0
        for c in tree.children[i]:
            total += w[c]
        totals[i] = total
    return w, totals


def _nodal_estimates_batch(tree: Tree, tip_values: np.ndarray) -> np.ndarray:
    """Weighted-mean nodal estimates for a batch of tip-value vectors.

    ``tip_values`` has shape (batch, n_tips) in ``tree.tip_indices`` order;
    the result has shape (batch, n_nodes) with tips carrying their inputs.
    Children are accumulated in stored order, sequentially, to keep the
    arithmetic identical to a naive recursion.
    """
    w, totals = _inverse_length_weights(tree)
    batch = tip_values.shape[0]
    est = np.empty((batch, tree.n_nodes))
    est[:, tree.tip_indices] = tip_values
    for i in tree.postorder():
        kids = tree.children[i]
        if not kids:
            continue
        acc = w[kids[0]] * est[:, kids[0]]
        for c in kids[1:]:
            acc += w[c] * est[:, c]
        est[:, i] = acc / totals[i]
    return est


def _d_sum_batch(tree: Tree, tip_values: np.ndarray) -> np.ndarray:
    """Change score for each row of 0/1 ``tip_values``: sum of |edge differences|.

    Tips are first centered to +-0.5. That leaves every |child - parent|
    difference unchanged in exact arithmetic, and makes trait complementation
    a pure sign flip - exact in IEEE floating point - so
    d_sum(v) == d_sum(1 - v) holds bitwise, not just approximately.
    """
    est = _nodal_estimates_batch(tree, tip_values - 0.5)
    total = np.zeros(tip_values.shape[0])
    for i in range(tree.n_nodes - 1):
        total += np.abs(est[:, i] - est[:, tree.parents[i]])
    return total


def simulate_bm(tree: Tree, params: BmParams) -> np.ndarray:
    """Simulate Brownian motion on the tree; one value per node.

    The root takes ``params.root_value``; every other node adds a Gaussian
    innovation with variance ``sigma2 * branch length`` to its parent's
    value. Node ``i`` consumes innovation ``i`` of a single vector drawn
    from stream ``(seed, 0)``, so output is a pure function of the seed and
    the node numbering.
    """
    z = stream(params.seed, 0).standard_normal(tree.n_nodes)
    sd = np.sqrt(params.sigma2 * tree.lengths)
    values = np.empty(tree.n_nodes)
    values[tree.root] = params.root_value
    for i in range(tree.n_nodes - 2, -1, -1):
        values[i] = values[tree.parents[i]] + sd[i] * z[i]
    return values


def nodal_estimates(tree: Tree, tip_values: np.ndarray) -> np.ndarray:
    """Ancestral state estimates: bottom-up weighted means of child values.

    ``tip_values`` aligns with ``tree.tip_indices`` (= left-to-right tip
    order of the source Newick). Returns one value per node; tips carry
    their inputs, each internal node the 1/branch-length-weighted mean of
    its children. Every estimate lies within [min(tips), max(tips)].
    """
    tip_values = np.asarray(tip_values, dtype=float)
    if tip_values.shape != (tree.n_tips,):
        raise ValueError(f"expected {tree.n_tips} tip values, got {tip_values.shape}")
    if not np.all(np.isfinite(tip_values)):
        raise ValueError("tip values must be finite")
    return _nodal_estimates_batch(tree, tip_values[None, :])[0]


def d_sum(tree: Tree, tip_values: np.ndarray) -> float:
    """Observed change score for a binary trait: sum of |child - parent| estimates."""
    tip_values = np.asarray(tip_values, dtype=float)
    if not np.all((tip_values == 0) | (tip_values == 1)):
        raise ValueError("tip values must be coded 0/1")
    if tip_values.min() == tip_values.max():
        raise ValueError("constant trait: d_sum undefined")
    return float(_d_sum_batch(tree, tip_values[None, :])[0])


def _resolve_polytomies(tree: Tree, seed: int) -> Tree:
    """Randomly resolve multifurcations into binary nodes with 0-length branches."""
    from .tree import _flatten, _PNode  # deferred: shares the builder

    rng = stream(seed, 0)
    nodes: dict[int, _PNode] = {}
    for i in tree.postorder():
        kids = [nodes[c] for c in tree.children[i]]
        while len(kids) > 2:
            first, second = sorted(rng.choice(len(kids), size=2, replace=False))
            merged = _PNode(None, 0.0, [kids[first], kids[second]], False)
            kids = [k for j, k in enumerate(kids) if j not in (first, second)]
            kids.append(merged)
        nodes[i] = _PNode(tree.labels[i], float(tree.lengths[i]), kids, False)
    return _flatten(nodes[tree.root])


def estimate_sigma2(tree: Tree, tip_values: np.ndarray, seed: int = 0) -> float:
    """BM rate estimate: mean of squared standardized independent contrasts.

    Polytomies are first resolved at random (stream ``(seed, 0)``) with
    zero-length inserted branches, which the epsilon rule then handles.
    Raises on a constant trait ("zero variance").
    """
    tip_values = np.asarray(tip_values, dtype=float)
    if tip_values.shape != (tree.n_tips,):
        raise ValueError(f"expected {tree.n_tips} tip values, got {tip_values.shape}")
    if tree.n_tips < 2:
        raise ValueError("need >= 2 tips to estimate a rate")
    if np.ptp(tip_values) == 0:
        raise ValueError("zero variance: all tip values equal")

    if any(len(tree.children[i]) > 2 for i in tree.postorder()):
        tree = _resolve_polytomies(tree, seed)
    eps = _epsilon(tree)

    # Felsenstein contrasts: values and rate-scaled edge lengths percolate up.
    value = np.zeros(tree.n_nodes)
    value[tree.tip_indices] = tip_values
    adj_len = np.array(
        [length if length != 0.0 else eps for length in map(float, tree.lengths)]
    )
    contrasts: list[float] = []
    for i in tree.postorder():
        kids = tree.children[i]
        if not kids:
            continue
        if len(kids) == 1:  # unary chain (pruned root): pass through
            (c,) = kids
            value[i] = value[c]
            adj_len[i] += adj_len[c]
            continue
        a, b = kids
        va, vb = adj_len[a], adj_len[b]
        contrasts.append((value[a] - value[b]) / np.sqrt(va + vb))
        value[i] = (value[a] / va + value[b] / vb) / (1.0 / va + 1.0 / vb)
        adj_len[i] += va * vb / (va + vb)

    estimate = float(np.mean(np.square(contrasts)))
    if estimate == 0.0:
        raise ValueError("zero variance: all contrasts are zero")
    return estimate


def threshold_at_prevalence(values: np.ndarray, m: int, seed: int) -> np.ndarray:
    """Binarize ``values``: the m largest become 1, ties at the cut broken at random."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    if not 1 <= m < n:
        raise ValueError(f"m out of range: need 1 <= m < {n}, got {m}")
    tie_keys = stream(seed, 0).random(n)
    return _threshold(values, m, tie_keys)


def _threshold(values: np.ndarray, m: int, tie_keys: np.ndarray) -> np.ndarray:
    # lexsort: primary descending value, secondary the uniform tie key.
    order = np.lexsort((tie_keys, -values))
    out = np.zeros(len(values), dtype=np.int8)
    out[order[:m]] = 1
    return out


def d_statistic(
    tree: Tree,
    presence: np.ndarray,
    mask: np.ndarray,
    n_reps: int = DEFAULT_N_REPS,
    *,
    seed: int,
) -> DStatResult:
    """D statistic for one binary trait, with shuffle and BM-threshold nulls.

    ``presence`` and ``mask`` align with ``tree.tip_labels``. Tips with
    ``mask == 0`` are missing data and are pruned before anything else is
    computed. D = (d_obs - mean d_BM) / (mean d_random - mean d_BM), so a
    trait as clumped as Brownian motion scores ~0 and a phylogenetically
    random trait ~1. ``p_random`` is the fraction of shuffle-null scores
    <= d_obs, ``p_bm`` the fraction of BM-null scores >= d_obs.
    """
    presence = np.asarray(presence).astype(np.int8)
    mask = np.asarray(mask).astype(bool)
    if presence.shape != (tree.n_tips,) or mask.shape != (tree.n_tips,):
        raise ValueError("presence and mask must align with the tree tips")
    if np.any(presence[~mask] != 0):
        raise ValueError("presence must be 0 where the attested mask is 0")
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")

    used_labels = [lab for lab, keep in zip(tree.tip_labels, mask) if keep]
    n_used = len(used_labels)
    if n_used < 4:
        raise ValueError(f"fewer than 4 usable tips (got {n_used})")
    pruned = prune_to_taxa(tree, set(used_labels))

    by_label = {lab: v for lab, v, keep in zip(tree.tip_labels, presence, mask) if keep}
    trait = np.array([by_label[lab] for lab in pruned.tip_labels], dtype=np.int8)
    m = int(trait.sum())
    if m == 0 or m == n_used:
        raise ValueError("no variation in trait")

    d_obs = float(_d_sum_batch(pruned, trait[None, :].astype(float))[0])

    n_nodes = pruned.n_nodes
    sd = np.sqrt(pruned.lengths)  # BM null: sigma2 = 1, root 0 (scale-free)
    shuffled = np.empty((n_reps, n_used))
    innovations = np.empty((n_reps, n_nodes))
    ties = np.empty((n_reps, n_used))
    trait_f = trait.astype(float)
    for r in range(n_reps):
        g = stream(seed, r)
        shuffled[r] = trait_f[g.permutation(n_used)]
        innovations[r] = g.standard_normal(n_nodes)
        ties[r] = g.random(n_used)

    # One top-down sweep, vectorized over replicates.
    values = np.empty((n_reps, n_nodes))
    values[:, pruned.root] = 0.0
    for i in range(n_nodes - 2, -1, -1):
        values[:, i] = values[:, pruned.parents[i]] + sd[i] * innovations[:, i]
    bm_tip_values = values[:, pruned.tip_indices]
    bm_traits = np.empty((n_reps, n_used))
    for r in range(n_reps):
        bm_traits[r] = _threshold(bm_tip_values[r], m, ties[r])

    d_random = _d_sum_batch(pruned, shuffled)
    d_bm = _d_sum_batch(pruned, bm_traits)
    mean_random = float(d_random.mean())
    mean_bm = float(d_bm.mean())
    if abs(mean_random - mean_bm) < _NULL_GAP_TOL:
        raise ValueError("nulls indistinguishable: mean random and BM scores coincide")

    return DStatResult(
        d_obs=d_obs,
        mean_d_random=mean_random,
        mean_d_bm=mean_bm,
        D=(d_obs - mean_bm) / (mean_random - mean_bm),
        p_random=float(np.mean(d_random <= d_obs)),
        p_bm=float(np.mean(d_bm >= d_obs)),
        n_reps=n_reps,
        n_tips_used=n_used,
    )
