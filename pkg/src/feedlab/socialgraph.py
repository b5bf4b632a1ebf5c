"""Classroom-level graph structures.

Two undirected weighted graphs drive the projector views: the user
similarity network (edges where profile cosine passes tau) and the picture
co-engagement network (edges counting users who engaged strongly with both
images).  Clustering is plain connected components over the thresholded
similarity graph: deterministic and explainable to children, no iterative
algorithm with unstated convergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import AffinityProfile, EngagementCell
from .profiling import cosine_similarity

DEFAULT_TAU = 0.35
DEFAULT_THETA = 2.0  # roughly one like under the default weight table


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph; edges stored once with u < v."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]

    def neighbors(self, node: str) -> list[str]:
        out = []
        for u, v, _ in self.edges:
            if u == node:
                out.append(v)
            elif v == node:
                out.append(u)
        return sorted(out)

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [[u, v, w] for u, v, w in self.edges],
        }


def similarity_graph(
    profiles: Mapping[str, AffinityProfile] | Iterable[AffinityProfile],
    tau: float,
) -> Graph:
    """Users with engagement as nodes; edges where similarity >= tau."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    if isinstance(profiles, Mapping):
        profiles = profiles.values()
    engaged = sorted(
        (p for p in profiles if p.total_engagement > 0), key=lambda p: p.user
    )
    nodes = tuple(p.user for p in engaged)
    edges = []
    for i, p in enumerate(engaged):
        for q in engaged[i + 1 :]:
            sim = cosine_similarity(p, q)
            if sim >= tau:
                edges.append((p.user, q.user, sim))
    return Graph(nodes=nodes, edges=tuple(edges))


def clusters(graph: Graph) -> list[list[str]]:
    """Connected components, largest first, ties by smallest member.

    Singleton users appear as singleton clusters, so the output always
    partitions the node set.
    """
    adjacency: dict[str, set[str]] = {node: set() for node in graph.nodes}
    for u, v, _ in graph.edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    seen: set[str] = set()
    components: list[list[str]] = []
    for node in graph.nodes:
        if node in seen:
            continue
        stack = [node]
        comp = []
        seen.add(node)
        while stack:
            current = stack.pop()
            comp.append(current)
            for nxt in sorted(adjacency[current]):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        components.append(sorted(comp))
    components.sort(key=lambda comp: (-len(comp), comp[0]))
    return components


def classroom_affinity(
    profiles: Mapping[str, AffinityProfile] | Iterable[AffinityProfile],
) -> dict[str, float]:
    """Summed affinity vector over all engaged users: the class-wide topic view.

    Each user contributes their normalized affinities, so one hyperactive
    user counts the same as any other engaged user.
    """
    if isinstance(profiles, Mapping):
        profiles = profiles.values()
    total: dict[str, float] = {}
    for profile in sorted(profiles, key=lambda p: p.user):
        for topic in sorted(profile.affinities):
            total[topic] = total.get(topic, 0.0) + profile.affinities[topic]
    return {t: total[t] for t in sorted(total)}


def co_engagement(cells: Iterable[EngagementCell], theta: float) -> Graph:
    """Image pairs weighted by how many users pass theta on both."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    strong: dict[str, set[str]] = {}
    for cell in cells:
        if cell.score >= theta:
            strong.setdefault(cell.user, set()).add(cell.image)
    weights: dict[tuple[str, str], int] = {}
    nodes: set[str] = set()
    for user in sorted(strong):
        images = sorted(strong[user])
        nodes.update(images)
        for i, a in enumerate(images):
            for b in images[i + 1 :]:
                weights[(a, b)] = weights.get((a, b), 0) + 1
    edges = tuple(
        (a, b, float(count)) for (a, b), count in sorted(weights.items()) if count > 0
    )
    return Graph(nodes=tuple(sorted(nodes)), edges=edges)
