#!/usr/bin/env python3
"""Convert the LINQS Cora release (cora.content, cora.cites) to the engine's dataset layout.

    python3 tools/convert_cora.py path/to/cora data/cora

Writes graph.tsv, features.csv, labels.tsv and splits.json. The split is
20 training nodes per class, then 500 validation and 1000 test nodes drawn
from the remainder, all with a seeded shuffle.
"""

import argparse
import json
import random
import sys
from pathlib import Path

EXPECTED_NODES = 2708
EXPECTED_NNZ = 13264  # 2E + N, i.e. symmetric adjacency with self loops


def read_content(path):
    ids, rows, labels = [], [], []
    with open(path) as f:
        for line_no, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) < 3:
                sys.exit(f"{path}:{line_no}: expected id, features, label")
            ids.append(parts[0])
            rows.append(parts[1:-1])
            labels.append(parts[-1])
    width = {len(r) for r in rows}
    if len(width) != 1:
        sys.exit(f"{path}: rows have differing feature counts {sorted(width)}")
    return ids, rows, labels


def read_edges(path, index):
    edges = set()
    dropped = 0
    with open(path) as f:
        for line_no, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                sys.exit(f"{path}:{line_no}: expected two paper ids")
            a, b = parts
            # a handful of citations point at papers missing from cora.content
            if a not in index or b not in index:
                dropped += 1
                continue
            u, v = index[a], index[b]
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return sorted(edges), dropped


def make_split(labels, classes, per_class, n_val, n_test, seed):
    rng = random.Random(seed)
    order = list(range(len(labels)))
    rng.shuffle(order)
    train, rest = [], []
    taken = {c: 0 for c in classes}
    for i in order:
        c = labels[i]
        if taken[c] < per_class:
            taken[c] += 1
            train.append(i)
        else:
            rest.append(i)
    if len(rest) < n_val + n_test:
        sys.exit("not enough nodes left for the validation and test splits")
    return sorted(train), sorted(rest[:n_val]), sorted(rest[n_val:n_val + n_test])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", type=Path, help="directory holding cora.content and cora.cites")
    ap.add_argument("dst", type=Path, help="output dataset directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--per-class", type=int, default=20)
    ap.add_argument("--val", type=int, default=500)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--no-check", action="store_true", help="skip the node/edge count check")
    args = ap.parse_args()

    ids, rows, labels = read_content(args.src / "cora.content")
    index = {pid: i for i, pid in enumerate(ids)}
    if len(index) != len(ids):
        sys.exit("duplicate paper ids in cora.content")
    edges, dropped = read_edges(args.src / "cora.cites", index)

    classes = sorted(set(labels))
    class_id = {c: k for k, c in enumerate(classes)}
    n = len(ids)
    nnz = 2 * len(edges) + n
    print(f"nodes {n}, undirected edges {len(edges)}, nnz with self loops {nnz}, "
          f"classes {len(classes)}, features {len(rows[0])}, dropped citations {dropped}")
    if not args.no_check and (n != EXPECTED_NODES or nnz != EXPECTED_NNZ):
        sys.exit(f"count mismatch: want {EXPECTED_NODES} nodes and {EXPECTED_NNZ} nonzeros")

    train, val, test = make_split(labels, classes, args.per_class, args.val, args.test, args.seed)

    args.dst.mkdir(parents=True, exist_ok=True)
    with open(args.dst / "graph.tsv", "w") as f:
        f.writelines(f"{u}\t{v}\n" for u, v in edges)
    with open(args.dst / "features.csv", "w") as f:
        f.write(f"{n},{len(rows[0])}\n")
        f.writelines(",".join(r) + "\n" for r in rows)
    with open(args.dst / "labels.tsv", "w") as f:
        f.writelines(f"{i}\t{class_id[c]}\n" for i, c in enumerate(labels))
    with open(args.dst / "splits.json", "w") as f:
        json.dump({"train": train, "val": val, "test": test}, f)
        f.write("\n")
    print(f"train {len(train)}, val {len(val)}, test {len(test)} -> {args.dst}")


if __name__ == "__main__":
    main()
