#!/usr/bin/env python3
"""Convert public graph datasets into the directory format read by gnnsteal.

Output: meta.json, edges.csv, features.csv, labels.csv (node ids 0..n-1).

Supported inputs:
  npz        sparse-matrix archives (adj_*/attr_* arrays and labels), e.g. citeseer.npz,
             pubmed.npz as distributed with the "full" citation benchmarks
  planetoid  the ind.<name>.{x,tx,allx,y,ty,ally,graph,test.index} files
  mat        ACM in the .mat layout with 'feature', 'label' and a paper-author-paper
             adjacency ('PAP')
  linqs      <name>.content / <name>.cites (string ids, class names)
"""

import argparse
import json
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp


def from_npz(path):
    with np.load(path, allow_pickle=True) as z:
        adj = sp.csr_matrix((z["adj_data"], z["adj_indices"], z["adj_indptr"]), shape=tuple(z["adj_shape"]))
        if "attr_data" in z:
            x = sp.csr_matrix((z["attr_data"], z["attr_indices"], z["attr_indptr"]), shape=tuple(z["attr_shape"]))
        else:
            x = sp.csr_matrix(z["attr_matrix"])
        labels = np.asarray(z["labels"]).ravel()
    return adj, x, labels


def from_planetoid(directory, name):
    parts = {}
    for key in ("x", "tx", "allx", "y", "ty", "ally", "graph"):
        with open(Path(directory) / f"ind.{name}.{key}", "rb") as f:
            parts[key] = pickle.load(f, encoding="latin1")
    test_index = [int(line) for line in open(Path(directory) / f"ind.{name}.test.index")]
    order = np.sort(test_index)
    x = sp.vstack((sp.csr_matrix(parts["allx"]), sp.csr_matrix(parts["tx"]))).tolil()
    y = np.vstack((parts["ally"], parts["ty"]))
    # Test rows arrive in shuffled order and some ids are missing (isolated nodes).
    n = max(len(parts["graph"]), int(order.max()) + 1)
    if n > x.shape[0]:
        pad = n - x.shape[0]
        x = sp.vstack((x, sp.lil_matrix((pad, x.shape[1])))).tolil()
        y = np.vstack((y, np.zeros((pad, y.shape[1]))))
    x[test_index, :] = x[order, :]
    y[test_index, :] = y[order, :]
    labels = np.where(y.sum(1) > 0, y.argmax(1), -1)
    rows, cols = [], []
    for src, dsts in parts["graph"].items():
        for dst in dsts:
            rows.append(src)
            cols.append(dst)
    adj = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return adj, x.tocsr(), labels


def from_mat(path):
    m = scipy.io.loadmat(path)
    x = sp.csr_matrix(m["feature"])
    y = np.asarray(m["label"])
    labels = y.argmax(1) if y.ndim == 2 and y.shape[1] > 1 else y.ravel()
    adj = sp.csr_matrix(m["PAP"])
    return adj, x, labels


def from_linqs(directory, name):
    ids, feats, classes = {}, [], []
    for line in open(Path(directory) / f"{name}.content", encoding="utf-8"):
        cols = line.rstrip("\n").split("\t")
        if len(cols) < 3:
            continue
        ids[cols[0]] = len(ids)
        feats.append([float(v) for v in cols[1:-1]])
        classes.append(cols[-1])
    names = sorted(set(classes))
    labels = np.array([names.index(c) for c in classes])
    rows, cols = [], []
    for line in open(Path(directory) / f"{name}.cites", encoding="utf-8"):
        a, _, b = line.strip().partition("\t")
        if a in ids and b in ids:  # citations to papers without content are dropped
            rows.append(ids[a])
            cols.append(ids[b])
    n = len(ids)
    adj = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return adj, sp.csr_matrix(np.array(feats)), labels


def write(adj, x, labels, out, name):
    n = adj.shape[0]
    if x.shape[0] != n or len(labels) != n:
        sys.exit(f"inconsistent sizes: adjacency {n}, features {x.shape[0]}, labels {len(labels)}")
    # Undirected, no self-loops, each edge once.
    adj = sp.triu(((adj + adj.T) > 0).astype(np.int8), k=1).tocoo()
    labels = np.asarray(labels, dtype=np.int64)
    known = labels[labels >= 0]
    classes = int(known.max()) + 1 if known.size else 0

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.csv", "w") as f:
        for a, b in sorted(zip(adj.row.tolist(), adj.col.tolist())):
            f.write(f"{a},{b}\n")
    dense = x.toarray() if sp.issparse(x) else np.asarray(x)
    with open(out / "features.csv", "w") as f:
        for i, row in enumerate(dense):
            f.write(str(i) + "," + ",".join(repr(float(v)) if v != int(v) else str(int(v)) for v in row) + "\n")
    with open(out / "labels.csv", "w") as f:
        for i, label in enumerate(labels.tolist()):
            if label >= 0:
                f.write(f"{i},{label}\n")
    meta = {"n": int(n), "d": int(dense.shape[1]), "num_classes": classes, "name": name}
    (out / "meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    print(f"{name}: {n} nodes, {adj.nnz} edges, {dense.shape[1]} features, {classes} classes -> {out}")


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("format", choices=["npz", "planetoid", "mat", "linqs"])
    p.add_argument("source", help="input file (npz, mat) or directory (planetoid, linqs)")
    p.add_argument("out", type=Path, help="output dataset directory")
    p.add_argument("--name", help="dataset name (default: output directory name); planetoid/linqs file prefix")
    args = p.parse_args()
    name = args.name or args.out.name.lower()
    if args.format == "npz":
        adj, x, labels = from_npz(args.source)
    elif args.format == "planetoid":
        adj, x, labels = from_planetoid(args.source, name)
    elif args.format == "mat":
        adj, x, labels = from_mat(args.source)
    else:
        adj, x, labels = from_linqs(args.source, name)
    write(adj, x, labels, args.out, name)


if __name__ == "__main__":
    main()
