"""Social Alignment Graph: a directed weighted multigraph of accusations,
defenses and votes, with the collusion / pressure / suspicion analyses built on it."""

from __future__ import annotations

import json
from array import array
from typing import Any, Iterable, NamedTuple, Optional

from ..engine.types import Role
from . import kernels
from .acts import ACT_EDGE, EDGE_WEIGHTS, ActKind, SagEdge, SocialAct

DEFAULT_COLLUSION_THRESHOLD = 2.0


class Pressure(NamedTuple):
    score: float
    accusers: int


class SocialAlignmentGraph:
    def __init__(self, roster: Iterable[int]):
        self.roster: tuple[int, ...] = tuple(sorted(roster))
        self._index = {pid: i for i, pid in enumerate(self.roster)}
        self.alive: dict[int, bool] = {pid: True for pid in self.roster}
        self.claims: dict[int, list[tuple[Role, int]]] = {pid: [] for pid in self.roster}
        self.edges: list[SagEdge] = []
        # columnar copy of the edge list for the kernels
        self._src = array("q")
        self._dst = array("q")
        self._w = array("d")
        self._day = array("q")
        self._cache: dict[Any, Any] = {}

    def __len__(self) -> int:
        return len(self.edges)

    def _idx(self, pid: int) -> int:
        try:
            return self._index[pid]
        except KeyError:
            raise KeyError(f"player {pid} is not in the roster") from None

    def record_act(self, act: SocialAct) -> "SocialAlignmentGraph":
        src = self._idx(act.src)
        if act.kind is ActKind.CLAIM:
            self.claims[act.src].append((act.role, act.day))
            return self
        dst = self._idx(act.dst)
        if self.edges and (act.day, act.turn) < (self.edges[-1].day, self.edges[-1].turn):
            raise ValueError("acts must arrive in (day, turn) order")
        kind = ACT_EDGE[act.kind]
        edge = SagEdge(act.src, act.dst, kind, EDGE_WEIGHTS[kind], act.day, act.turn)
        self.edges.append(edge)
        self._src.append(src)
        self._dst.append(dst)
        self._w.append(edge.weight)
        self._day.append(edge.day)
        self._cache.clear()
        return self

    def mark_dead(self, pid: int) -> None:
        self._idx(pid)
        self.alive[pid] = False
        self._cache.clear()

    def living(self) -> list[int]:
        return [p for p in self.roster if self.alive[p]]

    def latest_claim(self, pid: int) -> Optional[Role]:
        claims = self.claims.get(pid)
        return claims[-1][0] if claims else None

    # -- aggregated views -------------------------------------------------

    def _sums(self, max_day: int = -1):
        key = ("sums", max_day)
        if key not in self._cache:
            n = len(self.roster)
            self._cache[key] = kernels.pair_sums(n, self._src, self._dst, self._w, self._day, max_day)
        return self._cache[key]

    def _in(self, exclude: Optional[int]):
        key = ("in", exclude)
        if key not in self._cache:
            pos, neg = self._sums()
            ex = -1 if exclude is None else self._idx(exclude)
            self._cache[key] = kernels.in_scores(len(self.roster), pos, neg, ex)
        return self._cache[key]

    def net_weight(self, src: int, dst: int) -> float:
        if src not in self._index or dst not in self._index:
            return 0.0
        pos, neg = self._sums()
        cell = self._index[src] * len(self.roster) + self._index[dst]
        return pos[cell] + neg[cell]

    def positive_weight(self, src: int, dst: int) -> float:
        pos, _ = self._sums()
        return pos[self._idx(src) * len(self.roster) + self._idx(dst)]

    def mutual_support_score(self, a: int, b: int) -> float:
        """Weakest direction of the two-way defense between ``a`` and ``b``."""
        if a == b:
            return 0.0
        return min(self.positive_weight(a, b), self.positive_weight(b, a))

    def pressure_score(self, target: int) -> Pressure:
        pressure, accusers, _ = self._in(None)
        i = self._idx(target)
        return Pressure(pressure[i], int(accusers[i]))

    def defense_in_weight(self, target: int, exclude: Optional[int] = None) -> float:
        _, _, support = self._in(exclude)
        return support[self._idx(target)]

    def collusion_pairs(self, threshold: float = DEFAULT_COLLUSION_THRESHOLD) -> list[tuple[tuple[int, int], float]]:
        if threshold < 0:
            raise ValueError("threshold must be non-negative")
        pos, _ = self._sums()
        found = [((self.roster[a], self.roster[b]), score)
                 for a, b, score in kernels.mutual_pairs(len(self.roster), pos, threshold)]
        found.sort(key=lambda item: (-item[1], item[0]))
        return found

    def suspicion_scores(self, viewer: Optional[int] = None) -> dict[int, float]:
        """Pressure minus defense in-weight for every player; the viewer's own
        accusations and defenses are left out so an agent never feeds on itself."""
        pressure, _, support = self._in(viewer)
        return {pid: pressure[i] - support[i] for i, pid in enumerate(self.roster)}

    def suspicion_ranking(self, viewer: Optional[int] = None) -> list[tuple[int, float]]:
        scores = self.suspicion_scores(viewer)
        ranked = [(pid, scores[pid]) for pid in self.roster if self.alive[pid]]
        ranked.sort(key=lambda item: (-item[1], item[0]))
        return ranked

    def edges_into(self, target: int) -> list[SagEdge]:
        return [e for e in self.edges if e.dst == target]

    # -- export -----------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "roster": list(self.roster),
            "alive": {str(p): a for p, a in self.alive.items()},
            "claims": {str(p): [[r.value, d] for r, d in c] for p, c in self.claims.items()},
            "edges": [e.to_dict() for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SocialAlignmentGraph":
        graph = cls(data["roster"])
        for p, a in data["alive"].items():
            graph.alive[int(p)] = bool(a)
        for p, c in data["claims"].items():
            graph.claims[int(p)] = [(Role(r), int(d)) for r, d in c]
        for rec in data["edges"]:
            edge = SagEdge.from_dict(rec)
            graph.edges.append(edge)
            graph._src.append(graph._idx(edge.src))
            graph._dst.append(graph._idx(edge.dst))
            graph._w.append(edge.weight)
            graph._day.append(edge.day)
        return graph

    def adjacency_lines(self) -> list[str]:
        """One JSON line per edge ordered by (src, dst, day, turn) for bit-exact diffing."""
        ordered = sorted(self.edges, key=lambda e: (e.src, e.dst, e.day, e.turn))
        return [json.dumps(e.to_dict(), sort_keys=True) for e in ordered]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SocialAlignmentGraph):
            return NotImplemented
        return (self.roster, self.alive, self.claims, self.edges) == (
            other.roster, other.alive, other.claims, other.edges)
