"""On-disk formats: Matrix Market graphs, CSV signals and sampling sets.

All tabular files are UTF-8 CSV with a header row and LF line endings;
floats are written with 17 significant digits so round trips are
bit-exact.
"""

from __future__ import annotations

import csv

import numpy as np
import scipy.io
import scipy.sparse as sp

from .dpp import SamplingSet
from .errors import ParseError
from .graphs import Graph


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def save_graph(g: Graph, path, labels_path=None) -> None:
    """Write the adjacency in symmetric coordinate Matrix Market format,
    with community labels in an optional sidecar CSV."""
    adj = sp.coo_matrix(
        (g.edge_w, (g.edge_i, g.edge_j)), shape=(g.n, g.n)
    )
    adj = adj + adj.T
    scipy.io.mmwrite(str(path), adj, symmetry="symmetric", precision=17)
    if labels_path is not None:
        if g.communities is None:
            raise ParseError("graph carries no community labels to write")
        with open(labels_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["node", "community"])
            for node, comm in enumerate(g.communities):
                writer.writerow([node, int(comm)])


def load_graph(path, labels_path=None) -> Graph:
    mat = scipy.io.mmread(str(path)).tocoo()
    if mat.shape[0] != mat.shape[1]:
        raise ParseError("adjacency matrix must be square")
    upper = mat.row < mat.col
    communities = None
    if labels_path is not None:
        labels = _read_csv_columns(labels_path, ["node", "community"])
        communities = np.zeros(mat.shape[0], dtype=np.int64)
        communities[labels["node"].astype(np.int64)] = labels["community"].astype(np.int64)
    return Graph.from_arrays(
        mat.shape[0], mat.row[upper], mat.col[upper], mat.data[upper], communities=communities
    )


def save_kernel_matrix(kernel, path) -> None:
    """Dense Matrix Market dump of a marginal kernel (debugging aid)."""
    scipy.io.mmwrite(str(path), kernel.matrix(), precision=17)


def save_signal(x: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value"])
        for v in np.asarray(x, dtype=float):
            writer.writerow([format_float(v)])


def load_signal(path) -> np.ndarray:
    cols = _read_csv_columns(path, ["value"])
    return cols["value"]


def save_sampling(s: SamplingSet, path) -> None:
    """Write `node,weight` rows; the weight field is empty when unfilled."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "weight"])
        for idx, node in enumerate(s.nodes):
            w = "" if s.weights is None else format_float(s.weights[idx])
            writer.writerow([int(node), w])


def load_sampling(path, method: str = "file") -> SamplingSet:
    nodes, weights = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["node", "weight"]:
            raise ParseError(f"{path}: expected header node,weight")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                nodes.append(int(row[0]))
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}:{lineno}: bad node field") from exc
            weights.append(row[1].strip() if len(row) > 1 else "")
    filled = [w for w in weights if w]
    if filled and len(filled) != len(weights):
        raise ParseError(f"{path}: weights must be all present or all empty")
    w = np.array([float(v) for v in weights], dtype=float) if filled else None
    return SamplingSet(nodes=np.asarray(nodes, dtype=np.int64), weights=w, method=method)


def save_probabilities(values: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "value"])
        for node, v in enumerate(np.asarray(values, dtype=float)):
            writer.writerow([node, format_float(v)])


def load_probabilities(path) -> np.ndarray:
    cols = _read_csv_columns(path, ["node", "value"])
    out = np.zeros(len(cols["node"]))
    out[cols["node"].astype(np.int64)] = cols["value"]
    return out


def _read_csv_columns(path, expected_header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != expected_header:
            raise ParseError(f"{path}: expected header {','.join(expected_header)}")
        rows = [row for row in reader if row]
    out = {}
    for j, name in enumerate(expected_header):
        try:
            out[name] = np.array([float(row[j]) for row in rows])
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}: bad value in column {name}") from exc
    return out
