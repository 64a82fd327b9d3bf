#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpus under data/synthetic/.

Builds a 100-language random coalescent tree and a 50-concept cognate
table whose classes are carved from Brownian-motion traits evolved on that
tree, so concepts span the whole suitability spectrum: tight stable
classes, noisy high-singleton ones, heavy and light missingness, and a
sprinkling of loan flags. Everything is drawn from one fixed seed; rerun
to reproduce the files byte for byte.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lexiphylo import BmParams, parse_newick, simulate_bm, write_newick_file

SEED = 20260807
N_LANGUAGES = 100

CONCEPTS = [
    "I", "you", "we", "this", "that", "who", "what", "not", "all", "many",
    "one", "two", "big", "long", "small", "woman", "man", "person", "fish",
    "bird", "dog", "louse", "tree", "seed", "leaf", "root", "bark", "skin",
    "flesh", "blood", "bone", "egg", "horn", "tail", "feather", "hair",
    "head", "ear", "eye", "nose", "mouth", "tooth", "tongue", "claw",
    "foot", "knee", "hand", "belly", "neck", "water",
]

_SYLLABLES = [
    "ka", "ku", "ki", "pa", "pi", "pu", "ma", "mi", "mu", "wa", "wi", "wu",
    "ya", "yi", "yu", "ta", "ti", "tu", "nga", "ngu", "rra", "rri", "la",
    "li", "lu", "na", "ni", "nu", "rta", "rnu",
]


def language_names(rng: np.random.Generator, count: int) -> list[str]:
    names: list[str] = []
    seen: set[str] = set()
    while len(names) < count:
        n_syll = int(rng.integers(2, 5))
        name = "".join(rng.choice(_SYLLABLES) for _ in range(n_syll)).capitalize()
        if name not in seen:
            seen.add(name)
            names.append(name)
    return names


def coalescent_newick(rng: np.random.Generator, labels: list[str]) -> str:
    """Random ultrametric coalescent: pairs merge at exponential waiting times."""
    parts = [(label, 0.0) for label in labels]
    height = 0.0
    while len(parts) > 1:
        k = len(parts)
        height += float(rng.exponential(2.0 / (k * (k - 1))))
        i, j = sorted(rng.choice(k, size=2, replace=False))
        (sub_j, h_j) = parts.pop(j)
        (sub_i, h_i) = parts.pop(i)
        merged = (
            f"({sub_i}:{height - h_i:.6f},{sub_j}:{height - h_j:.6f})",
            height,
        )
        parts.append(merged)
    return parts[0][0] + ";"


def carve_classes(
    tip_values: np.ndarray, n_classes: int, shuffle_fraction: float, rng: np.random.Generator
) -> np.ndarray:
    """Quantile-bin a continuous trait into classes; shuffle some labels."""
    order = np.argsort(tip_values, kind="stable")
    assignments = np.empty(len(tip_values), dtype=int)
    for bin_index, chunk in enumerate(np.array_split(order, n_classes)):
        assignments[chunk] = bin_index
    n_shuffle = int(round(shuffle_fraction * len(tip_values)))
    if n_shuffle:
        idx = rng.choice(len(tip_values), size=n_shuffle, replace=False)
        assignments[idx] = rng.integers(0, n_classes, size=n_shuffle)
    return assignments


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "data" / "synthetic"
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    languages = language_names(rng, N_LANGUAGES)
    newick = coalescent_newick(rng, languages)
    tree = parse_newick(newick)
    write_newick_file(tree, out_dir / "tree.nwk")

    rows: list[str] = ["language,concept,cognate_id,loan"]
    taxa = list(tree.tip_labels)
    for c_index, concept in enumerate(CONCEPTS):
        n_classes = int(rng.integers(2, 9))
        shuffle_fraction = float(rng.uniform(0.0, 0.5)) if c_index % 3 else 0.05
        missing_rate = float(rng.uniform(0.0, 0.35))
        singleton_count = int(rng.integers(0, 6))
        loan_rate = float(rng.uniform(0.0, 0.08))

        values = simulate_bm(tree, BmParams(sigma2=1.0, seed=SEED + c_index))
        assignments = carve_classes(
            values[tree.tip_indices], n_classes, shuffle_fraction, rng
        )
        missing = rng.random(len(taxa)) < missing_rate
        # A few languages get a unique (singleton) class instead.
        singleton_idx = rng.choice(
            len(taxa), size=min(singleton_count, len(taxa)), replace=False
        )
        for s_rank, t_index in enumerate(sorted(int(i) for i in singleton_idx)):
            assignments[t_index] = n_classes + s_rank

        for t_index, language in enumerate(taxa):
            if missing[t_index]:
                continue
            cognate_id = f"{concept}-{assignments[t_index]:02d}"
            loan = 1 if rng.random() < loan_rate else 0
            rows.append(f"{language},{concept},{cognate_id},{loan}")
            # Occasional synonym: a second, borrowed class.
            if rng.random() < 0.02:
                other = int(rng.integers(0, n_classes))
                if other != assignments[t_index]:
                    rows.append(f"{language},{concept},{concept}-{other:02d},1")

    (out_dir / "cognates.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {out_dir / 'tree.nwk'} ({tree.n_tips} tips)")
    print(f"wrote {out_dir / 'cognates.csv'} ({len(rows) - 1} rows, {len(CONCEPTS)} concepts)")


if __name__ == "__main__":
    main()
