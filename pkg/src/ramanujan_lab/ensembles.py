"""Random d-regular multigraph ensembles.

Four base families, each sampled uniformly from its construction space:

* ``B``: bipartite; the identity plus ``d - 1`` random permutations of one
  side, each vertex ``i`` on the left joined to ``pi(i) + N/2``.
* ``G``: ``d/2`` random permutations of all ``N`` vertices, each contributing
  the edges ``{i, pi(i)}``.
* ``H``: as ``G`` but every permutation is a single ``N``-cycle.
* ``I``: union of ``d`` random perfect matchings.

Vertices are 0-based in memory and 1-based in the text serialization.
A self-loop ``(v, v)`` adds 2 to the degree of ``v`` and to ``a_vv``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ._validation import as_generator, check_int
from .exceptions import SamplingExhaustedError

FAMILIES = ("B", "G", "H", "I")
CONSTRAINTS = ("none", "connected", "simple_connected")
_PREFIX = {"none": "", "connected": "C", "simple_connected": "SC"}

DEFAULT_MAX_REJECTIONS = 10_000


@dataclass(frozen=True, eq=False)
class RegularGraph:
    """A d-regular multigraph stored as an ``(m, 2)`` edge array."""

    n_vertices: int
    degree: int
    edges: np.ndarray
    family: str
    bipartite: bool = False

    def __post_init__(self):
        edges = np.ascontiguousarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", edges)
        if edges.size and (edges.min() < 0 or edges.max() >= self.n_vertices):
            raise ValueError("edge endpoint outside 0..N-1")
        deg = np.bincount(edges.ravel(), minlength=self.n_vertices)
        if np.any(deg != self.degree):
            raise ValueError("graph is not regular of the stated degree")
        if self.bipartite:
            half = self.n_vertices // 2
            if np.any((edges[:, 0] < half) == (edges[:, 1] < half)):
                raise ValueError("bipartite graph has an edge inside one side")

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_key(self):
        """Sorted multiset of edges; equal keys mean equal graphs."""
        e = np.sort(self.edges, axis=1)
        return e[np.lexsort((e[:, 1], e[:, 0]))]

    def __eq__(self, other):
        if not isinstance(other, RegularGraph):
            return NotImplemented
        return (
            self.n_vertices == other.n_vertices
            and self.degree == other.degree
            and self.family == other.family
            and np.array_equal(self.edge_key(), other.edge_key())
        )

    __hash__ = None


@dataclass(frozen=True)
class EnsembleSpec:
    family: str
    constraint: str = "none"
    n_vertices: int = 26
    degree: int = 3
    max_rejections: int = DEFAULT_MAX_REJECTIONS

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.constraint not in CONSTRAINTS:
            raise ValueError(
                f"constraint must be one of {CONSTRAINTS}, got {self.constraint!r}"
            )
        check_int(self.n_vertices, "n_vertices", minimum=2, even=True)
        check_int(self.degree, "degree", minimum=1)
        check_int(self.max_rejections, "max_rejections", minimum=1)
        if self.family in "GH" and self.degree % 2:
            raise ValueError(f"family {self.family} requires even degree")

    @property
    def label(self):
        """Family label with connectivity prefix, e.g. ``"SCI"``."""
        return _PREFIX[self.constraint] + self.family

    @classmethod
    def from_label(cls, label, n_vertices, degree, **kwargs):
        label = label.upper()
        for constraint in ("simple_connected", "connected", "none"):
            prefix = _PREFIX[constraint]
            if label.startswith(prefix) and label[len(prefix):] in FAMILIES:
                return cls(label[len(prefix):], constraint, n_vertices, degree, **kwargs)
        raise ValueError(f"unrecognised family label {label!r}")


def sample_permutation(n, rng=None):
    """Uniform random permutation of ``range(n)``."""
    n = check_int(n, "n", minimum=1)
    return as_generator(rng).permutation(n)


def sample_n_cycle(n, rng=None):
    """Uniform random permutation consisting of a single ``n``-cycle.

    A uniform shuffle is read as the cycle order; each cycle arises from
    exactly ``n`` rotations, so the result is uniform over the ``(n-1)!``
    cyclic permutations.
    """
    n = check_int(n, "n", minimum=2)
    order = as_generator(rng).permutation(n)
    perm = np.empty(n, dtype=np.int64)
    perm[order] = np.roll(order, -1)
    return perm


def sample_perfect_matching(n, rng=None):
    """Uniform perfect matching of ``range(n)`` as an ``(n/2, 2)`` array."""
    n = check_int(n, "n", minimum=2, even=True)
    return as_generator(rng).permutation(n).reshape(-1, 2)


def _check_permutation(perm, n):
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError(f"expected a permutation of length {n}")
    return perm


def build_bipartite(n_vertices, degree, perms):
    """Bipartite graph with edges ``(i, perms[j][i] + N/2)``.

    ``perms[0]`` must be the identity.
    """
    n = check_int(n_vertices, "n_vertices", minimum=2, even=True)
    d = check_int(degree, "degree", minimum=1)
    half = n // 2
    if len(perms) != d:
        raise ValueError(f"need {d} permutations, got {len(perms)}")
    perms = [_check_permutation(p, half) for p in perms]
    if not np.array_equal(perms[0], np.arange(half)):
        raise ValueError("the first permutation must be the identity")
    left = np.arange(half)
    edges = np.concatenate([np.column_stack([left, p + half]) for p in perms])
    return RegularGraph(n, d, edges, "B", bipartite=True)


def build_perm_model(n_vertices, degree, perms, family="G"):
    """Graph with one edge ``{i, pi(i)}`` per vertex ``i`` and permutation.

    Listing ``(i, pi(i))`` and ``(i, pi^-1(i))`` for every ``i`` names each
    such edge from both ends; a fixed point gives a self-loop and a 2-cycle
    a doubled edge.
    """
    n = check_int(n_vertices, "n_vertices", minimum=1)
    d = check_int(degree, "degree", minimum=2, even=True)
    if len(perms) != d // 2:
        raise ValueError(f"need {d // 2} permutations, got {len(perms)}")
    perms = [_check_permutation(p, n) for p in perms]
    idx = np.arange(n)
    edges = np.concatenate([np.column_stack([idx, p]) for p in perms])
    return RegularGraph(n, d, edges, family)


def build_cyclic_model(n_vertices, degree, cycles):
    return build_perm_model(n_vertices, degree, cycles, family="H")


def build_matching_model(n_vertices, degree, matchings):
    """Union multigraph of ``degree`` perfect matchings."""
    n = check_int(n_vertices, "n_vertices", minimum=2, even=True)
    d = check_int(degree, "degree", minimum=1)
    if len(matchings) != d:
        raise ValueError(f"need {d} matchings, got {len(matchings)}")
    blocks = []
    for m in matchings:
        m = np.asarray(m, dtype=np.int64)
        if m.shape != (n // 2, 2) or not np.array_equal(np.sort(m.ravel()), np.arange(n)):
            raise ValueError(f"expected a perfect matching on {n} vertices")
        blocks.append(m)
    return RegularGraph(n, d, np.concatenate(blocks), "I")


def _sparse_adjacency(g):
    e = g.edges
    data = np.ones(len(e))
    return coo_matrix((data, (e[:, 0], e[:, 1])), shape=(g.n_vertices,) * 2).tocsr()


def is_connected(g):
    if g.n_vertices <= 1:
        return True
    n_comp = connected_components(_sparse_adjacency(g), directed=False, return_labels=False)
    return n_comp == 1


def is_simple(g):
    e = g.edges
    if np.any(e[:, 0] == e[:, 1]):
        return False
    key = np.sort(e, axis=1)
    return len(np.unique(key, axis=0)) == len(key)


def bipartition(g):
    """Return a +/-1 side vector if ``g`` is connected and bipartite, else None.

    A connected graph is bipartite exactly when its bipartite double cover
    (vertex ``v`` split into ``v`` and ``v + N``) falls into two components.
    """
    n = g.n_vertices
    if g.bipartite:
        half = n // 2
        return np.r_[np.ones(half), -np.ones(n - half)]
    e = g.edges
    u, v = e[:, 0], e[:, 1]
    rows = np.r_[u, v]
    cols = np.r_[v + n, u + n]
    cover = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(2 * n, 2 * n))
    n_comp, labels = connected_components(cover, directed=False)
    if n_comp != 2 or np.any(labels[:n] == labels[n:]):
        return None
    return np.where(labels[:n] == labels[0], 1.0, -1.0)


def draw_base(spec, rng):
    """One draw from the unconstrained family described by ``spec``."""
    rng = as_generator(rng)
    n, d = spec.n_vertices, spec.degree
    if spec.family == "B":
        half = n // 2
        perms = [np.arange(half)] + [rng.permutation(half) for _ in range(d - 1)]
        return build_bipartite(n, d, perms)
    if spec.family == "G":
        return build_perm_model(n, d, [rng.permutation(n) for _ in range(d // 2)])
    if spec.family == "H":
        return build_cyclic_model(n, d, [sample_n_cycle(n, rng) for _ in range(d // 2)])
    return build_matching_model(n, d, [sample_perfect_matching(n, rng) for _ in range(d)])


def satisfies(g, constraint):
    if constraint == "none":
        return True
    if constraint == "simple_connected" and not is_simple(g):
        return False
    return is_connected(g)


def sample_ensemble(spec, rng=None):
    """Draw until the constraint holds.

    Returns ``(graph, rejections)``. Rejection sampling keeps the draw
    uniform over the constrained subset of the base family.
    """
    rng = as_generator(rng)
    for rejections in range(spec.max_rejections + 1):
        g = draw_base(spec, rng)
        if satisfies(g, spec.constraint):
            return g, rejections
    raise SamplingExhaustedError(
        f"{spec.label} N={spec.n_vertices} d={spec.degree}: no admissible graph "
        f"after {spec.max_rejections} rejections"
    )


def write_graph(g, fh):
    """Write ``"N d family"`` then one 1-based ``"u v"`` line per edge."""
    fh.write(f"{g.n_vertices} {g.degree} {g.family}\n")
    for u, v in (g.edges + 1).tolist():
        fh.write(f"{u} {v}\n")


def read_graph(fh):
    header = fh.readline().split()
    if len(header) != 3:
        raise ValueError("graph header must be 'N d family'")
    n, d, family = int(header[0]), int(header[1]), header[2]
    rows = [line.split() for line in fh if line.strip()]
    edges = np.array(rows, dtype=np.int64).reshape(-1, 2) - 1
    return RegularGraph(n, d, edges, family, bipartite=(family == "B"))

