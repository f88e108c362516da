"""Dependency graph and deterministic recalculation over a snapshot.

Full recalculation every run: fixtures are desk-scale and the live
engine already debounces, so incremental recomputation buys nothing
here.  Cells on a reference cycle report a cycle error; their
dependents see it through normal error propagation.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field

from .addressing import CellAddress, check_bounds
from .errors import UnknownSheet
from .formula import evaluate, references
from .grid import FrozenWorkbook
from .values import BLANK, CYCLE, CellValue


@dataclass
class DependencyGraph:
    """Edges map each formula cell to its precedent multiset."""

    edges: dict[CellAddress, Counter]
    topo_order: list[CellAddress]
    cycles: frozenset[CellAddress]


@dataclass
class ComputedState:
    values: dict[CellAddress, CellValue] = field(default_factory=dict)

    def value(self, addr: CellAddress) -> CellValue:
        return self.values.get(addr, BLANK)


def _sort_key(snapshot: FrozenWorkbook):
    order = {name: i for i, name in enumerate(snapshot.sheet_names)}

    def key(addr: CellAddress):
        return (order[addr.sheet], addr.row, addr.col)

    return key


def build_graph(snapshot: FrozenWorkbook) -> DependencyGraph:
    edges: dict[CellAddress, Counter] = {}
    for addr, content in snapshot.formula_cells():
        edges[addr] = references(content.ast, addr.sheet)

    # Strongly connected components over the formula-to-formula subgraph.
    # Iterative Tarjan: deep dependency chains must not hit the recursion
    # limit.
    formula_edges = {
        addr: sorted((p for p in refs if p in edges), key=_sort_key(snapshot))
        for addr, refs in edges.items()
    }
    cycles = _cycle_members(formula_edges)

    key = _sort_key(snapshot)
    indegree: dict[CellAddress, int] = {}
    dependents: dict[CellAddress, list[CellAddress]] = {}
    for addr, precedents in formula_edges.items():
        if addr in cycles:
            continue
        live = [p for p in precedents if p not in cycles]
        indegree[addr] = len(live)
        for p in live:
            dependents.setdefault(p, []).append(addr)

    ready = [(key(a), a) for a, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    topo: list[CellAddress] = []
    while ready:
        _, addr = heapq.heappop(ready)
        topo.append(addr)
        for dep in dependents.get(addr, ()):
            indegree[dep] -= 1
            if indegree[dep] == 0:
                heapq.heappush(ready, (key(dep), dep))
    return DependencyGraph(edges=edges, topo_order=topo, cycles=cycles)


def _cycle_members(graph: dict[CellAddress, list[CellAddress]]) -> frozenset[CellAddress]:
    """Members of SCCs of size > 1, plus self-loops."""
    index: dict[CellAddress, int] = {}
    lowlink: dict[CellAddress, int] = {}
    on_stack: set[CellAddress] = set()
    stack: list[CellAddress] = []
    counter = [0]
    members: set[CellAddress] = set()

    for root in graph:
        if root in index:
            continue
        work = [(root, iter(graph[root]))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = lowlink[nxt] = counter[0]
                    counter[0] += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(graph[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    lowlink[node] = min(lowlink[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                scc = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    scc.append(member)
                    if member == node:
                        break
                if len(scc) > 1:
                    members.update(scc)
                elif scc[0] in graph[scc[0]]:
                    members.add(scc[0])
    return frozenset(members)


def recalculate(
    snapshot: FrozenWorkbook,
    overrides: dict[CellAddress, CellValue] | None = None,
) -> ComputedState:
    """Evaluate every cell; overrides shadow literals and formulas alike."""
    overrides = overrides or {}
    for addr in overrides:
        if not snapshot.has_sheet(addr.sheet):
            raise UnknownSheet(addr.sheet)
        check_bounds(addr.col, addr.row)

    graph = build_graph(snapshot)
    values: dict[CellAddress, CellValue] = {}
    for addr, content in snapshot.iter_cells():
        if content.is_value:
            values[addr] = content.value
    for addr in graph.cycles:
        values[addr] = CYCLE
    values.update(overrides)

    def resolver(addr: CellAddress) -> CellValue:
        return values.get(addr, BLANK)

    for addr in graph.topo_order:
        if addr in overrides:
            continue
        content = snapshot.cell(addr)
        values[addr] = evaluate(content.ast, resolver, addr.sheet)
    return ComputedState(values)
