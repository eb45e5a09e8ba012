"""Converts toy npz and LINQS inputs and loads the result through the gnnsteal binary."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy.sparse as sp

converter, binary = Path(sys.argv[1]), Path(sys.argv[2])
rng = np.random.default_rng(0)
n, d = 40, 6

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    adj = sp.random(n, n, density=0.1, random_state=1, format="csr")
    x = sp.csr_matrix(rng.integers(0, 2, size=(n, d)).astype(float))
    labels = np.arange(n) % 3
    np.savez(tmp / "toy.npz", adj_data=adj.data, adj_indices=adj.indices, adj_indptr=adj.indptr, adj_shape=adj.shape,
             attr_data=x.data, attr_indices=x.indices, attr_indptr=x.indptr, attr_shape=x.shape, labels=labels)
    subprocess.run([sys.executable, converter, "npz", tmp / "toy.npz", tmp / "npz"], check=True)

    (tmp / "raw").mkdir()
    with open(tmp / "raw" / "toy.content", "w") as f:
        for i in range(n):
            f.write(f"p{i}\t" + "\t".join(str(int(v)) for v in x[i].toarray()[0]) + f"\tclass{labels[i]}\n")
    with open(tmp / "raw" / "toy.cites", "w") as f:
        for a, b in zip(*adj.nonzero()):
            f.write(f"p{a}\tp{b}\n")
        f.write("p0\tmissing\n")
    subprocess.run([sys.executable, converter, "linqs", tmp / "raw", tmp / "linqs", "--name", "toy"], check=True)

    for out in ("npz", "linqs"):
        meta = json.loads((tmp / out / "meta.json").read_text())
        assert meta["n"] == n and meta["d"] == d and meta["num_classes"] == 3, meta
        edges = [tuple(map(int, l.split(","))) for l in (tmp / out / "edges.csv").read_text().split()]
        assert all(a < b for a, b in edges), "edges must be i<j once each"
    assert (tmp / "npz" / "edges.csv").read_text() == (tmp / "linqs" / "edges.csv").read_text()
    assert (tmp / "npz" / "features.csv").read_text() == (tmp / "linqs" / "features.csv").read_text()

    cfg = tmp / "cfg.json"
    cfg.write_text(json.dumps({"structure": {"initial_k": 4, "hidden": 8, "inner_epochs": 3, "max_iterations": 1}}))
    subprocess.run([binary, "--config", cfg, "reconstruct-graph", "--query", tmp / "npz", "--out", tmp / "rg"], check=True)
print("ok")
