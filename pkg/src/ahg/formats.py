"""Instance documents: a JSON form carrying graph, partition and provenance, and a
DIMACS-like edge list (``p ahg <n> <m>`` then ``e i j`` lines) for bare graphs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ParseError, ValidationError
from .gadgets import GadgetLayout
from .game import CoalitionStructure, GameInstance, UtilityModel
from .graph import build_graph
from .reductions import TARGET_MODELS, ReductionArtifact

FORMAT_VERSION = "1"


@dataclass(frozen=True)
class InstanceDocument:
    players: int
    edges: tuple[tuple[int, int], ...] = ()
    partition: Optional[tuple[tuple[int, ...], ...]] = None
    names: Optional[tuple[str, ...]] = None
    model: Optional[str] = None
    provenance: Optional[dict] = None
    format_version: str = FORMAT_VERSION

    def canonical(self) -> "InstanceDocument":
        edges = tuple(sorted({(min(e), max(e)) for e in self.edges}))
        partition = None
        if self.partition is not None:
            blocks = [tuple(sorted(b)) for b in self.partition]
            partition = tuple(sorted(blocks, key=lambda b: b[0] if b else -1))
        return replace(self, edges=edges, partition=partition)

    def game(self) -> GameInstance:
        return GameInstance(build_graph(self.players, self.edges))

    def coalition_structure(self) -> Optional[CoalitionStructure]:
        if self.partition is None:
            return None
        return CoalitionStructure.of(self.players, self.partition)


def _fail_if(cond, field, message):
    if cond:
        raise ValidationError(field, message)


def validate(doc: InstanceDocument) -> InstanceDocument:
    n = doc.players
    _fail_if(not isinstance(n, int) or isinstance(n, bool) or n < 0, "players", f"expected a count, got {n!r}")
    for e in doc.edges:
        _fail_if(len(e) != 2 or not all(isinstance(x, int) for x in e), "edges", f"malformed edge {list(e)!r}")
        i, j = e
        _fail_if(i == j, "edges", f"self-loop ({i}, {j})")
        _fail_if(not (0 <= i < n and 0 <= j < n), "edges", f"edge ({i}, {j}) out of range 0..{n - 1}")
    if doc.partition is not None:
        seen: set[int] = set()
        for block in doc.partition:
            _fail_if(len(block) == 0, "partition", "empty block")
            for p in block:
                _fail_if(not isinstance(p, int) or not 0 <= p < n, "partition", f"player {p!r} out of range")
                _fail_if(p in seen, "partition", f"overlapping blocks (player {p} appears twice)")
                seen.add(p)
        missing = sorted(set(range(n)) - seen)
        _fail_if(bool(missing), "partition", f"players {missing} not covered")
    if doc.names is not None:
        _fail_if(len(doc.names) != n, "names", f"expected {n} names, got {len(doc.names)}")
    if doc.model is not None:
        try:
            UtilityModel.parse(doc.model)
        except ValueError as exc:
            raise ValidationError("model", str(exc)) from None
    return doc.canonical()


def _parse_edgelist(text: str) -> InstanceDocument:
    n = declared = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "p":
                if len(parts) != 4 or parts[1] != "ahg" or n is not None:
                    raise ParseError("expected a single header 'p ahg <n> <m>'", lineno, 1)
                n, declared = int(parts[2]), int(parts[3])
            elif parts[0] == "e":
                if n is None:
                    raise ParseError("edge line before 'p ahg' header", lineno, 1)
                if len(parts) != 3:
                    raise ParseError("expected 'e <i> <j>'", lineno, 1)
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise ParseError(f"unknown line type {parts[0]!r}", lineno, 1)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"non-integer field in {raw.strip()!r}", lineno) from None
    if n is None:
        raise ParseError("missing 'p ahg <n> <m>' header")
    _fail_if(declared != len(edges), "edges", f"header declares {declared} edges, found {len(edges)}")
    return validate(InstanceDocument(players=n, edges=tuple(edges)))


def _as_int_lists(value, field, depth):
    if not isinstance(value, list):
        raise ValidationError(field, f"expected a list, got {type(value).__name__}")
    if depth == 1:
        return tuple(value)
    return tuple(_as_int_lists(v, field, depth - 1) for v in value)


def parse_instance(text: str) -> InstanceDocument:
    """Parse either the JSON document form or the ``p ahg`` edge-list form."""
    first = next((line.strip() for line in text.splitlines() if line.strip()), "")
    if first.startswith(("p ", "c ", "e ")) or first in ("c", "p"):
        return _parse_edgelist(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ParseError("top-level value must be an object", 1, 1)
    unknown = set(data) - {"format_version", "players", "names", "edges", "partition", "model", "provenance"}
    _fail_if(bool(unknown), "document", f"unknown fields {sorted(unknown)}")
    _fail_if("players" not in data, "players", "missing")
    version = data.get("format_version", FORMAT_VERSION)
    _fail_if(version != FORMAT_VERSION, "format_version", f"unsupported version {version!r}")
    partition = data.get("partition")
    names = data.get("names")
    doc = InstanceDocument(
        players=data["players"],
        edges=_as_int_lists(data.get("edges", []), "edges", 2),
        partition=None if partition is None else _as_int_lists(partition, "partition", 2),
        names=None if names is None else tuple(str(x) for x in names),
        model=data.get("model"),
        provenance=data.get("provenance"),
        format_version=version,
    )
    return validate(doc)


def _compact(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(", ", ": "), ensure_ascii=False)


def serialize_instance(doc: InstanceDocument, fmt: str = "full") -> str:
    doc = doc.canonical()
    if fmt == "edgelist":
        lines = [f"p ahg {doc.players} {len(doc.edges)}"]
        lines += [f"e {i} {j}" for i, j in doc.edges]
        return "\n".join(lines) + "\n"
    if fmt != "full":
        raise ValueError(f"unknown format {fmt!r}")
    fields = {
        "format_version": doc.format_version,
        "players": doc.players,
        "edges": [list(e) for e in doc.edges],
    }
    if doc.names is not None:
        fields["names"] = list(doc.names)
    if doc.partition is not None:
        fields["partition"] = [list(b) for b in doc.partition]
    if doc.model is not None:
        fields["model"] = doc.model
    if doc.provenance is not None:
        fields["provenance"] = doc.provenance
    body = ",\n".join(f"  {json.dumps(k)}: {_compact(v)}" for k, v in sorted(fields.items()))
    return "{\n" + body + "\n}\n"


def game_document(game: GameInstance, gamma: Optional[CoalitionStructure] = None, **extra) -> InstanceDocument:
    partition = None if gamma is None else tuple(tuple(b.members) for b in gamma.blocks)
    return InstanceDocument(players=game.n, edges=game.graph.edges, partition=partition, **extra).canonical()


def artifact_document(r: ReductionArtifact) -> InstanceDocument:
    provenance = {
        "target": r.target,
        "target_models": [m.tag for m in r.target_models],
        "k": r.k_original,
        "k_effective": r.k_effective,
        "k_prime": r.k_prime,
        "source": {"players": r.source.num_vertices, "edges": [list(e) for e in r.source.edges]},
        "vertex_players": [[v, p] for v, p in sorted(r.vertex_players.items())],
        "edge_players": [[x, y, p] for (x, y), p in sorted(r.edge_players.items())],
        "incidence_players": [[v, x, y, p] for (v, (x, y)), p in sorted(r.incidence_players.items())],
        "dummy_players": [[x, y, list(g)] for (x, y), g in sorted(r.dummy_players.items())],
        "gadgets": [
            {"role": role, "key": list(key) if isinstance(key, tuple) else key, "layout": layout.to_dict()}
            for role, key, layout in r.gadgets
        ],
        "preprocessing_log": list(r.preprocessing_log),
    }
    return game_document(r.game, r.gamma, model=r.target_models[0].tag, provenance=provenance)


def _key(value):
    if isinstance(value, list):
        return tuple(_key(v) for v in value)
    return value


def artifact_from_document(doc: InstanceDocument) -> ReductionArtifact:
    prov = doc.provenance
    if not prov or "target" not in prov:
        raise ValidationError("provenance", "document carries no reduction provenance")
    gamma = doc.coalition_structure()
    if gamma is None:
        raise ValidationError("partition", "reduction documents must carry the partition")
    src = prov["source"]
    return ReductionArtifact(
        target=prov["target"],
        game=doc.game(),
        gamma=gamma,
        target_models=TARGET_MODELS[prov["target"]],
        source=build_graph(src["players"], src["edges"]),
        k_original=prov["k"],
        k_effective=prov["k_effective"],
        k_prime=prov["k_prime"],
        vertex_players={v: p for v, p in prov["vertex_players"]},
        edge_players={(x, y): p for x, y, p in prov["edge_players"]},
        incidence_players={(v, (x, y)): p for v, x, y, p in prov["incidence_players"]},
        dummy_players={(x, y): tuple(g) for x, y, g in prov["dummy_players"]},
        gadgets=[(g["role"], _key(g["key"]), GadgetLayout.from_dict(g["layout"])) for g in prov["gadgets"]],
        preprocessing_log=list(prov["preprocessing_log"]),
    )
