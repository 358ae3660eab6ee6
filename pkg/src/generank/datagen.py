"""Synthetic instances: range-dependent random graphs, annotation-derived
networks, and expression vectors.

The range-dependent model connects nodes i < j with probability
``beta * lam**(j - i - 1)``, independently per pair; with beta = 1 the
path graph is always a subgraph, and the expected degree approaches
``2 * beta / (1 - lam)`` away from the boundary. Generation is
seed-deterministic.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from collections import defaultdict

import numpy as np

from generank.sparse import SparseSymMatrix

# Offsets whose remaining expected edge total falls below this are not
# sampled; the total-variation distance to exact sampling is below it.
_TAIL_EPS = 1e-12


@dataclass(frozen=True)
class RengaParams:
    """Range-dependent random graph parameters."""

    n: int
    lam: float
    beta: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lambda must lie in [0, 1), got {self.lam}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")


def _sample_offset_hits(rng, m, p):
    """Indices in [0, m) selected by independent Bernoulli(p) trials.

    Sampled by geometric gap skipping, so cost is proportional to the
    number of hits rather than to m. Below a small-probability threshold
    the geometric draws would overflow int64, so the (equally exact)
    binomial-count-plus-uniform-positions scheme is used instead.
    """
    if p >= 1.0:
        return np.arange(m, dtype=np.int64)
    if p < 1e-9:
        count = int(rng.binomial(m, p))
        if count == 0:
            return np.zeros(0, dtype=np.int64)
        return np.sort(rng.choice(m, size=count, replace=False)).astype(np.int64)
    mean = m * p
    batch = int(mean + 8.0 * math.sqrt(mean + 1.0) + 8.0)
    chunks = []
    pos = -1
    while True:
        gaps = rng.geometric(p, size=batch)
        positions = pos + np.cumsum(gaps)
        cut = int(np.searchsorted(positions, m))
        chunks.append(positions[:cut])
        if cut < positions.shape[0]:
            break
        pos = int(positions[-1])
        batch = max(16, batch // 4)
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


def generate_renga(params):
    """Sample one range-dependent random graph as a 0/1 adjacency matrix."""
    n, lam, beta = params.n, params.lam, params.beta
    rng = np.random.default_rng(params.seed)
    rows = []
    cols = []
    p = beta
    for k in range(1, n):
        if p <= 0.0:
            break
        # remaining expected edges over all offsets >= k is at most
        # n * p / (1 - lam); stop once that bound is negligible
        if n * p < _TAIL_EPS * (1.0 - lam):
            break
        hits = _sample_offset_hits(rng, n - k, p)
        if hits.shape[0]:
            rows.append(hits)
            cols.append(hits + k)
        p *= lam
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
    else:
        r = np.zeros(0, dtype=np.int64)
        c = np.zeros(0, dtype=np.int64)
    return SparseSymMatrix.from_edges(n, r, c)


def _generate_renga_naive(params):
    """Reference O(n^2) sampler used to validate the skipping sampler."""
    n, lam, beta = params.n, params.lam, params.beta
    rng = np.random.default_rng(params.seed)
    rows = []
    cols = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < beta * lam ** (j - i - 1):
                rows.append(i)
                cols.append(j)
    return SparseSymMatrix.from_edges(
        n, np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)
    )


def expected_mean_degree(params):
    """Exact expectation of the mean degree under the range-dependent model."""
    n, lam, beta = params.n, params.lam, params.beta
    ks = np.arange(1, n, dtype=np.float64)
    with np.errstate(under="ignore"):
        probs = beta * lam ** (ks - 1.0)
    return float(2.0 * np.sum((n - ks) * probs) / n)


# -- annotation-derived networks ------------------------------------------------


class AnnotationTable:
    """Mapping from gene identifier to its set of annotation identifiers."""

    def __init__(self, mapping):
        if not mapping:
            raise ValueError("annotation table is empty")
        self.genes = {g: frozenset(a) for g, a in mapping.items()}

    @classmethod
    def from_items(cls, items):
        """Build from (gene_id, annotations) pairs; duplicate ids are an error."""
        mapping = {}
        for gene, anns in items:
            if gene in mapping:
                raise ValueError(f"duplicate gene id {gene!r}")
            mapping[gene] = set(anns)
        return cls(mapping)

    @classmethod
    def from_tsv(cls, path):
        """Parse `gene_id<TAB>annotation_id` lines, aggregated per gene.

        A line with no annotation column registers an isolated gene.
        """
        mapping = defaultdict(set)
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                gene = parts[0].strip()
                if not gene:
                    raise ValueError(f"{path}:{lineno}: empty gene id")
                if len(parts) == 1 or not parts[1].strip():
                    mapping[gene]  # register, possibly with no annotations
                elif len(parts) == 2:
                    mapping[gene].add(parts[1].strip())
                else:
                    raise ValueError(f"{path}:{lineno}: expected at most two tab-separated columns")
        return cls(dict(mapping))


def build_adjacency_from_annotations(table):
    """Link two distinct genes iff their annotation sets intersect.

    Returns (adjacency, gene_ids) with rows in sorted gene-id order, so
    the result is independent of input ordering.
    """
    gene_ids = sorted(table.genes)
    index = {g: i for i, g in enumerate(gene_ids)}
    by_annotation = defaultdict(list)
    for gene, anns in table.genes.items():
        for a in anns:
            by_annotation[a].append(index[gene])
    edges = set()
    for members in by_annotation.values():
        members.sort()
        for a_pos in range(len(members)):
            for b_pos in range(a_pos + 1, len(members)):
                edges.add((members[a_pos], members[b_pos]))
    if edges:
        arr = np.array(sorted(edges), dtype=np.int64)
        W = SparseSymMatrix.from_edges(len(gene_ids), arr[:, 0], arr[:, 1])
    else:
        W = SparseSymMatrix.empty(len(gene_ids))
    return W, gene_ids


# -- expression vectors ----------------------------------------------------------


def read_expression_file(path):
    """Parse an expression vector file.

    Either one value per line, or CSV with a `gene_id,ex` header; values
    must be finite and nonnegative. Returns (values, gene_ids_or_None).
    """
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if "," in first:
            header = [c.strip().lower() for c in first.split(",")]
            if header != ["gene_id", "ex"]:
                raise ValueError(
                    f"{path}: CSV expression file must have header 'gene_id,ex', got {first.strip()!r}"
                )
            ids = []
            vals = []
            reader = csv.reader(fh)
            for row in reader:
                if not row:
                    continue
                if len(row) != 2:
                    raise ValueError(f"{path}: expected two CSV columns, got {row!r}")
                ids.append(row[0].strip())
                vals.append(float(row[1]))
            values = np.asarray(vals, dtype=np.float64)
            gene_ids = ids
        else:
            rest = [first] + fh.readlines()
            vals = [float(line) for line in rest if line.strip()]
            values = np.asarray(vals, dtype=np.float64)
            gene_ids = None
    if values.size == 0:
        raise ValueError(f"{path}: expression file is empty")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{path}: expression values must be finite")
    if np.any(values < 0.0):
        i = int(np.flatnonzero(values < 0.0)[0])
        raise ValueError(f"{path}: expression values must be nonnegative; entry {i} is {values[i]}")
    return values, gene_ids


def make_expression_vector(kind, n, seed=0, path=None):
    """Build an expression vector of the requested kind.

    uniform: every entry 1/n. random: entries drawn in (0, 1) and
    normalized to unit sum (a probability vector). file: parsed
    from `path` and validated against n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if kind == "uniform":
        return np.full(n, 1.0 / n, dtype=np.float64)
    if kind == "random":
        rng = np.random.default_rng(seed)
        v = rng.random(n)
        while np.any(v == 0.0):  # keep entries in the open interval
            v[v == 0.0] = rng.random(int((v == 0.0).sum()))
        return v / v.sum()
    if kind == "file":
        if path is None:
            raise ValueError("kind='file' requires a path")
        values, _ = read_expression_file(path)
        if values.shape[0] != n:
            raise ValueError(
                f"expression file has {values.shape[0]} entries but the matrix has n={n}"
            )
        return values
    raise ValueError(f"unknown expression kind {kind!r}; expected uniform, random, or file")
