"""Two-layer hierarchical attack model and security metrics.

The upper layer is a reachability graph over server instances (the
per-tier reachability template expanded across replicas); the lower
layer is an AND/OR attack tree per instance.  Replicas of a tier carry
identical trees.  Instances whose tree is empty cannot be compromised
and block traversal entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (AttackTreeNode, DesignSpec, PatchPolicy,
                    ReachabilityTemplate, apply_patch_policy)


@dataclass(frozen=True)
class Instance:
    tier: str
    index: int  # 1-based replica index

    @property
    def id(self) -> str:
        return f"{self.tier}{self.index}"

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class Harm:
    instances: tuple  # all Instance values, tier order then replica index
    upper_edges: frozenset  # (Instance, Instance)
    trees: dict  # tier -> AttackTreeNode | None
    entry_instances: tuple  # exploitable entries, sorted by id
    target_instances: tuple  # exploitable targets, sorted by id

    def tree_of(self, inst: Instance):
        return self.trees[inst.tier]

    def exploitable(self, inst: Instance) -> bool:
        return self.trees[inst.tier] is not None


@dataclass(frozen=True)
class SecurityMetrics:
    aim: float
    asp: float
    noev: int
    noap: int
    noep: int


def build_harm(design: DesignSpec, templates: dict,
               reachability: ReachabilityTemplate, patched: bool,
               policy: PatchPolicy | None = None) -> Harm:
    """Expand a design into a HARM, pre- or post-patch."""
    if patched:
        policy = policy or PatchPolicy()
        templates = {t: apply_patch_policy(tpl, policy) for t, tpl in templates.items()}
    trees = {t: templates[t].attack_tree for t in reachability.tiers}

    instances = tuple(
        Instance(tier, i)
        for tier in reachability.tiers
        for i in range(1, design.count(tier) + 1)
    )
    by_tier = {}
    for inst in instances:
        by_tier.setdefault(inst.tier, []).append(inst)

    # complete bipartite expansion of the tier-level edges
    edges = frozenset(
        (a, b)
        for src, dst in reachability.edges
        for a in by_tier[src]
        for b in by_tier[dst]
    )

    entries = sorted(
        (i for t in reachability.entry_tiers for i in by_tier[t]
         if trees[t] is not None),
        key=lambda i: i.id)
    targets = sorted(
        (i for i in by_tier[reachability.target_tier]
         if trees[i.tier] is not None),
        key=lambda i: i.id)
    return Harm(instances, edges, trees, tuple(entries), tuple(targets))


def enumerate_attack_paths(harm: Harm) -> list[tuple]:
    """All simple entry-to-target paths over exploitable instances,
    in lexicographic order of instance ids."""
    succ = {}
    for a, b in harm.upper_edges:
        if harm.exploitable(a) and harm.exploitable(b):
            succ.setdefault(a, []).append(b)
    for v in succ.values():
        v.sort(key=lambda i: i.id)
    targets = set(harm.target_instances)

    paths = []

    def dfs(path, visited):
        node = path[-1]
        if node in targets:
            paths.append(tuple(path))
            return
        for nxt in succ.get(node, ()):
            if nxt not in visited:
                visited.add(nxt)
                path.append(nxt)
                dfs(path, visited)
                path.pop()
                visited.discard(nxt)

    for entry in harm.entry_instances:
        dfs([entry], {entry})
    paths.sort(key=lambda p: [i.id for i in p])
    return paths


def tree_impact(node: AttackTreeNode | None) -> float | None:
    """Attack impact of a tree: leaf value, sum over AND, max over OR.
    None for an empty (unexploitable) tree."""
    if node is None:
        return None
    if node.kind == "leaf":
        return node.vulnerability.attack_impact
    child_values = [tree_impact(c) for c in node.children]
    return sum(child_values) if node.kind == "and" else max(child_values)


def tree_probability(node: AttackTreeNode | None) -> float | None:
    """Attack success probability: leaf value, product over AND, max over OR."""
    if node is None:
        return None
    if node.kind == "leaf":
        return node.vulnerability.attack_success_prob
    child_values = [tree_probability(c) for c in node.children]
    if node.kind == "and":
        prob = 1.0
        for v in child_values:
            prob *= v
        return prob
    return max(child_values)


def path_metrics(harm: Harm, path: tuple) -> tuple[float, float]:
    """(impact, probability) of one attack path: impacts add along the
    path, probabilities multiply."""
    impact = 0.0
    prob = 1.0
    for inst in path:
        impact += tree_impact(harm.tree_of(inst))
        prob *= tree_probability(harm.tree_of(inst))
    return impact, prob


def network_metrics(harm: Harm) -> SecurityMetrics:
    """Aggregate the five security metrics over all attack paths.

    ASP combines path successes as a noisy-OR (paths assumed
    independent); NoEV counts vulnerability instances over exploitable
    server instances, each replica contributing its own copies.
    """
    paths = enumerate_attack_paths(harm)
    aim = 0.0
    miss = 1.0
    for p in paths:
        impact, prob = path_metrics(harm, p)
        aim = max(aim, impact)
        miss *= 1.0 - prob
    asp = 1.0 - miss if paths else 0.0
    noev = sum(
        len({v.id for v in harm.tree_of(inst).leaves()})
        for inst in harm.instances if harm.exploitable(inst)
    )
    return SecurityMetrics(aim=aim, asp=asp, noev=noev,
                           noap=len(paths), noep=len(harm.entry_instances))
