"""Graphs, tree decompositions and their nice form."""
from collections import defaultdict, deque
from dataclasses import dataclass, field

from .errors import ValidationError


class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    def __init__(self, n, edges=()):
        if n < 0:
            raise ValidationError("vertex count must be non-negative")
        es = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            es.add((min(u, v), max(u, v)))
        self.n = n
        self.edges = tuple(sorted(es))
        self.adj = [set() for _ in range(n)]
        for u, v in self.edges:
            self.adj[u].add(v)
            self.adj[v].add(u)

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"


@dataclass
class TreeDecomposition:
    bags: list
    edges: list = field(default_factory=list)

    def __post_init__(self):
        self.bags = [frozenset(b) for b in self.bags]
        self.edges = [tuple(e) for e in self.edges]

    @property
    def width(self):
        return max((len(b) for b in self.bags), default=0) - 1

    def problems(self, graph=None):
        """All violated invariants, as human-readable strings (empty when valid)."""
        out = []
        nb = len(self.bags)
        for i, j in self.edges:
            if not (0 <= i < nb and 0 <= j < nb):
                out.append(f"tree edge ({i}, {j}) references a missing bag")
        if out:
            return out
        adj = defaultdict(list)
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        if nb and (len(self.edges) != nb - 1 or len(_reach(adj, 0, range(nb))) != nb):
            out.append("bags do not form a tree")
        occ = defaultdict(list)
        for i, b in enumerate(self.bags):
            for v in b:
                occ[v].append(i)
        for v, where in sorted(occ.items()):
            if len(_reach(adj, where[0], set(where))) != len(where):
                out.append(f"bags containing vertex {v} are not connected")
        if graph is not None:
            for v in range(graph.n):
                if v not in occ:
                    out.append(f"vertex {v} is in no bag")
            for v in occ:
                if not 0 <= v < graph.n:
                    out.append(f"bag vertex {v} is not a graph vertex")
            for u, v in graph.edges:
                if not any(u in b and v in b for b in self.bags):
                    out.append(f"edge ({u}, {v}) is in no bag")
        return out

    def validate(self, graph=None):
        probs = self.problems(graph)
        if probs:
            raise ValidationError("invalid tree decomposition: " + "; ".join(probs))


def _reach(adj, start, allowed):
    allowed = set(allowed)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y in allowed and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


@dataclass(frozen=True)
class NiceNode:
    kind: str  # "leaf", "introduce", "forget" or "join"
    bag: tuple
    vertex: int = None
    children: tuple = ()


@dataclass
class NiceTreeDecomposition:
    """Nodes are stored children-first, so index order is a valid bottom-up order.

    The last node is the root.
    """

    nodes: list

    @property
    def root(self):
        return len(self.nodes) - 1

    @property
    def width(self):
        return max(len(nd.bag) for nd in self.nodes) - 1

    def problems(self, graph=None):
        out = []
        parent = {}
        for i, nd in enumerate(self.nodes):
            for c in nd.children:
                if not 0 <= c < i:
                    out.append(f"node {i}: child {c} does not precede it")
                    continue
                if c in parent:
                    out.append(f"node {c} has two parents")
                parent[c] = i
            bag = set(nd.bag)
            kids = [set(self.nodes[c].bag) for c in nd.children if 0 <= c < i]
            if list(nd.bag) != sorted(bag):
                out.append(f"node {i}: bag is not a sorted vertex tuple")
            if nd.kind == "leaf":
                if nd.children or bag:
                    out.append(f"node {i}: leaf must have no children and an empty bag")
            elif nd.kind == "introduce":
                if len(kids) != 1 or nd.vertex in kids[0] or bag != kids[0] | {nd.vertex}:
                    out.append(f"node {i}: bad introduce of {nd.vertex}")
            elif nd.kind == "forget":
                if len(kids) != 1 or nd.vertex not in kids[0] or bag != kids[0] - {nd.vertex}:
                    out.append(f"node {i}: bad forget of {nd.vertex}")
            elif nd.kind == "join":
                if len(kids) != 2 or any(k != bag for k in kids):
                    out.append(f"node {i}: join children must both carry the parent bag")
            else:
                out.append(f"node {i}: unknown kind {nd.kind!r}")
        if self.nodes and len(parent) != len(self.nodes) - 1:
            out.append("nodes do not form a single rooted tree")
        if self.nodes and self.nodes[-1].bag:
            out.append("root bag is not empty")
        # each vertex's nodes must be connected: exactly one node whose parent lacks it
        tops = defaultdict(int)
        for i, nd in enumerate(self.nodes):
            for v in nd.bag:
                p = parent.get(i)
                if p is None or v not in self.nodes[p].bag:
                    tops[v] += 1
        for v, t in sorted(tops.items()):
            if t != 1:
                out.append(f"nodes containing vertex {v} are not connected")
        if graph is not None:
            seen = set(tops)
            for v in range(graph.n):
                if v not in seen:
                    out.append(f"vertex {v} is in no bag")
            for v in seen:
                if not 0 <= v < graph.n:
                    out.append(f"bag vertex {v} is not a graph vertex")
            bags = [set(nd.bag) for nd in self.nodes]
            for u, v in graph.edges:
                if not any(u in b and v in b for b in bags):
                    out.append(f"edge ({u}, {v}) is in no bag")
        return out

    def validate(self, graph=None):
        probs = self.problems(graph)
        if probs:
            raise ValidationError("invalid nice tree decomposition: " + "; ".join(probs))


def validate_nice(ntd, graph=None):
    ntd.validate(graph)
    return True


def make_nice(td, graph=None):
    """Convert a tree decomposition into a nice one of the same width.

    The decomposition is rooted at bag 0.  Between a bag and each child bag
    the vertices to drop are forgotten before new ones are introduced; a bag
    with several children becomes a chain of binary joins; finally every
    vertex of the root bag is forgotten so the root bag is empty.
    """
    td.validate(graph)
    nodes = []

    def add(kind, bag, vertex=None, children=()):
        nodes.append(NiceNode(kind, tuple(sorted(bag)), vertex, tuple(children)))
        return len(nodes) - 1

    def chain(node, src, dst):
        cur = set(src)
        for v in sorted(src - dst):
            cur.discard(v)
            node = add("forget", cur, v, (node,))
        for v in sorted(dst - src):
            cur.add(v)
            node = add("introduce", cur, v, (node,))
        return node

    if not td.bags:
        add("leaf", ())
        return NiceTreeDecomposition(nodes)

    adj = defaultdict(list)
    for i, j in td.edges:
        adj[i].append(j)
        adj[j].append(i)

    # iterative post-order from bag 0
    order, parent_of = [], {0: None}
    stack = [0]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in adj[x]:
            if y != parent_of[x]:
                parent_of[y] = x
                stack.append(y)
    top = {}
    for x in reversed(order):
        bag = td.bags[x]
        kids = [y for y in adj[x] if y != parent_of[x]]
        if not kids:
            top[x] = chain(add("leaf", ()), frozenset(), bag)
            continue
        subs = [chain(top[y], td.bags[y], bag) for y in kids]
        node = subs[0]
        for s in subs[1:]:
            node = add("join", bag, None, (node, s))
        top[x] = node
    chain(top[0], td.bags[0], frozenset())
    return NiceTreeDecomposition(nodes)
