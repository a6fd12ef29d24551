"""Domain model: network description, vulnerability catalog, server rate
parameters, patch policy, redundancy designs.

Everything is immutable after load; a validated model can be shared
read-only across concurrent evaluators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path


class ModelError(ValueError):
    """Validation failure, with a path to the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class Vulnerability:
    id: str
    attack_impact: float
    attack_success_prob: float
    critical: bool
    component: str  # "os" | "application"

    def __post_init__(self):
        if not self.id:
            raise ModelError("vulnerabilities", "empty vulnerability id")
        if not 0.0 <= self.attack_impact <= 10.0:
            raise ModelError(
                f"vulnerabilities[{self.id}].impact",
                f"attack impact {self.attack_impact} outside [0, 10]")
        if not 0.0 <= self.attack_success_prob <= 1.0:
            raise ModelError(
                f"vulnerabilities[{self.id}].probability",
                f"attack success probability {self.attack_success_prob} outside [0, 1]")
        if self.component not in ("os", "application"):
            raise ModelError(
                f"vulnerabilities[{self.id}].component",
                f"unknown component {self.component!r}")


@dataclass(frozen=True)
class AttackTreeNode:
    """AND/OR tree over vulnerabilities; leaves carry a Vulnerability."""

    kind: str  # "leaf" | "and" | "or"
    vulnerability: Vulnerability | None = None
    children: tuple = ()

    def __post_init__(self):
        if self.kind == "leaf":
            if self.vulnerability is None:
                raise ModelError("attack_tree", "leaf without vulnerability")
        elif self.kind in ("and", "or"):
            if not self.children:
                raise ModelError("attack_tree", f"{self.kind} node with no children")
        else:
            raise ModelError("attack_tree", f"unknown node kind {self.kind!r}")

    def leaves(self):
        if self.kind == "leaf":
            yield self.vulnerability
        else:
            for c in self.children:
                yield from c.leaves()


def leaf(v: Vulnerability) -> AttackTreeNode:
    return AttackTreeNode("leaf", vulnerability=v)


def and_node(*children) -> AttackTreeNode:
    return AttackTreeNode("and", children=tuple(children))


def or_node(*children) -> AttackTreeNode:
    return AttackTreeNode("or", children=tuple(children))


# Duration fields and their units; downstream rates are reciprocals
# (exponential assumption).
_HOUR_FIELDS = ("hw_mttf", "hw_mttr", "os_mttf", "os_mttr", "svc_mttf")
_MINUTE_FIELDS = (
    "os_patch_mean", "os_reboot_after_patch", "os_reboot_after_failure",
    "svc_mttr", "svc_patch_mean", "svc_reboot_after_patch",
    "svc_reboot_after_failure",
)


@dataclass(frozen=True)
class ServerTemplate:
    tier: str
    attack_tree: AttackTreeNode | None  # None = no exploitable vulnerabilities
    hw_mttf: float  # hours
    hw_mttr: float  # hours
    os_mttf: float  # hours
    os_mttr: float  # hours
    os_patch_mean: float  # minutes
    os_reboot_after_patch: float  # minutes
    os_reboot_after_failure: float  # minutes
    svc_mttf: float  # hours
    svc_mttr: float  # minutes
    svc_patch_mean: float  # minutes
    svc_reboot_after_patch: float  # minutes
    svc_reboot_after_failure: float  # minutes

    def __post_init__(self):
        for name in _HOUR_FIELDS + _MINUTE_FIELDS:
            value = getattr(self, name)
            if not value > 0:
                raise ModelError(f"servers.{self.tier}.{name}",
                                 f"duration must be strictly positive, got {value}")

    def rate_per_hour(self, name: str) -> float:
        """Reciprocal of a mean duration, converted to events per hour."""
        mean = getattr(self, name)
        if name in _MINUTE_FIELDS:
            return 60.0 / mean
        return 1.0 / mean

    @property
    def exploitable(self) -> bool:
        return self.attack_tree is not None

    def vulnerabilities(self) -> list[Vulnerability]:
        if self.attack_tree is None:
            return []
        return list(self.attack_tree.leaves())


@dataclass(frozen=True)
class ReachabilityTemplate:
    tiers: tuple
    edges: frozenset  # of (tier, tier)
    entry_tiers: frozenset
    target_tier: str

    def __post_init__(self):
        declared = set(self.tiers)
        if self.target_tier not in declared:
            raise ModelError("reachability.target_tier",
                             f"unknown tier {self.target_tier!r}")
        for t in self.entry_tiers:
            if t not in declared:
                raise ModelError("reachability.entry_tiers", f"unknown tier {t!r}")
        for a, b in self.edges:
            if a not in declared or b not in declared:
                raise ModelError("reachability.edges", f"unknown tier in edge ({a}, {b})")
        if not self._target_reachable():
            raise ModelError("reachability",
                             "no tier-path from any entry tier to the target tier")

    def _target_reachable(self) -> bool:
        succ = {}
        for a, b in self.edges:
            succ.setdefault(a, set()).add(b)
        frontier = set(self.entry_tiers)
        seen = set(frontier)
        while frontier:
            nxt = set()
            for t in frontier:
                nxt |= succ.get(t, set()) - seen
            seen |= nxt
            frontier = nxt
        return self.target_tier in seen


@dataclass(frozen=True)
class DesignSpec:
    label: str
    counts: tuple  # ((tier, count), ...) in tier order

    def count(self, tier: str) -> int:
        return dict(self.counts)[tier]

    @property
    def total(self) -> int:
        return sum(n for _, n in self.counts)


@dataclass(frozen=True)
class PatchPolicy:
    """Monthly-style patch schedule; selector decides what gets patched."""

    interval_mean: float = 720.0  # hours
    selector: object = field(default=None, compare=False)

    def __post_init__(self):
        if not self.interval_mean > 0:
            raise ModelError("patch_policy.interval_hours",
                             "patch interval must be positive")

    def matches(self, v: Vulnerability) -> bool:
        if self.selector is None:
            return v.critical
        return self.selector(v)


@dataclass(frozen=True)
class Bounds:
    asp_upper: float | None = None   # phi
    coa_lower: float | None = None   # psi
    noev_upper: int | None = None    # xi
    noap_upper: int | None = None    # omega
    noep_upper: int | None = None    # kappa

    def __post_init__(self):
        for name in ("asp_upper", "coa_lower"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ModelError(f"bounds.{name}", f"{value} outside [0, 1]")
        for name in ("noev_upper", "noap_upper", "noep_upper"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ModelError(f"bounds.{name}", f"{value} is negative")


@dataclass(frozen=True)
class Model:
    templates: dict  # tier -> ServerTemplate
    reachability: ReachabilityTemplate
    designs: dict    # label -> DesignSpec
    policy: PatchPolicy
    bounds: Bounds | None = None


def prune_attack_tree(node: AttackTreeNode | None, selector) -> AttackTreeNode | None:
    """Remove selector-matching leaves.  An AND with any removed child is
    removed entirely; an OR with all children removed is removed."""
    if node is None:
        return None
    if node.kind == "leaf":
        return None if selector(node.vulnerability) else node
    kept = [prune_attack_tree(c, selector) for c in node.children]
    if node.kind == "and":
        if any(c is None for c in kept):
            return None
        return AttackTreeNode("and", children=tuple(kept))
    kept = [c for c in kept if c is not None]
    if not kept:
        return None
    return AttackTreeNode("or", children=tuple(kept))


def apply_patch_policy(template: ServerTemplate, policy: PatchPolicy) -> ServerTemplate:
    """Post-patch template: attack tree with all patched leaves pruned."""
    return replace(template, attack_tree=prune_attack_tree(template.attack_tree,
                                                           policy.matches))


# -- loading -----------------------------------------------------------


def _require(mapping, key, path, kind=None):
    if key not in mapping:
        raise ModelError(f"{path}.{key}", "missing required field")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ModelError(f"{path}.{key}", f"expected {kind.__name__}")
    return value


def _parse_tree(node, catalog, path):
    if not isinstance(node, dict) or len(node) != 1:
        raise ModelError(path, "attack tree node must be a single-key object")
    (key, value), = node.items()
    if key == "vuln":
        if value not in catalog:
            raise ModelError(path, f"unknown vulnerability {value!r}")
        return leaf(catalog[value])
    if key in ("and", "or"):
        if not isinstance(value, list) or not value:
            raise ModelError(f"{path}.{key}", "needs a nonempty child list")
        children = [_parse_tree(c, catalog, f"{path}.{key}[{i}]")
                    for i, c in enumerate(value)]
        return AttackTreeNode(key, children=tuple(children))
    raise ModelError(path, f"unknown attack tree key {key!r}")


_SERVER_FIELD_KEYS = {
    "hw_mttf": "hw_mttf_hours",
    "hw_mttr": "hw_mttr_hours",
    "os_mttf": "os_mttf_hours",
    "os_mttr": "os_mttr_hours",
    "os_patch_mean": "os_patch_minutes",
    "os_reboot_after_patch": "os_reboot_after_patch_minutes",
    "os_reboot_after_failure": "os_reboot_after_failure_minutes",
    "svc_mttf": "svc_mttf_hours",
    "svc_mttr": "svc_mttr_minutes",
    "svc_patch_mean": "svc_patch_minutes",
    "svc_reboot_after_patch": "svc_reboot_after_patch_minutes",
    "svc_reboot_after_failure": "svc_reboot_after_failure_minutes",
}


def load_model(source) -> Model:
    """Load and validate a model document.

    ``source`` may be a path, a JSON string, or an already-parsed dict.
    """
    if isinstance(source, (str, Path)):
        if isinstance(source, Path) or not str(source).lstrip().startswith("{"):
            text = Path(source).read_text()
        else:
            text = str(source)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelError("$", f"invalid JSON: {e}") from e
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ModelError("$", "top level must be an object")

    tiers = _require(doc, "tiers", "$", list)
    if not tiers:
        raise ModelError("$.tiers", "no tiers")

    catalog = {}
    for i, row in enumerate(_require(doc, "vulnerabilities", "$", list)):
        path = f"$.vulnerabilities[{i}]"
        v = Vulnerability(
            id=_require(row, "id", path),
            attack_impact=float(_require(row, "impact", path)),
            attack_success_prob=float(_require(row, "probability", path)),
            critical=bool(_require(row, "critical", path)),
            component=_require(row, "component", path),
        )
        if v.id in catalog and catalog[v.id] != v:
            raise ModelError(f"{path}.id",
                             f"vulnerability {v.id!r} redefined with different values")
        catalog[v.id] = v

    servers = _require(doc, "servers", "$", dict)
    templates = {}
    for tier in tiers:
        if tier not in servers:
            raise ModelError(f"$.servers.{tier}", "missing server template")
        raw = servers[tier]
        path = f"$.servers.{tier}"
        fields = {}
        for field_name, key in _SERVER_FIELD_KEYS.items():
            fields[field_name] = float(_require(raw, key, path))
        tree = raw.get("attack_tree")
        parsed = _parse_tree(tree, catalog, f"{path}.attack_tree") if tree else None
        templates[tier] = ServerTemplate(tier=tier, attack_tree=parsed, **fields)
    for tier in servers:
        if tier not in tiers:
            raise ModelError(f"$.servers.{tier}", f"unknown tier {tier!r}")

    raw_reach = _require(doc, "reachability", "$", dict)
    reach = ReachabilityTemplate(
        tiers=tuple(tiers),
        edges=frozenset(tuple(e) for e in _require(raw_reach, "edges", "$.reachability", list)),
        entry_tiers=frozenset(_require(raw_reach, "entry_tiers", "$.reachability", list)),
        target_tier=_require(raw_reach, "target_tier", "$.reachability"),
    )

    designs = {}
    for label, counts in _require(doc, "designs", "$", dict).items():
        path = f"$.designs.{label}"
        for tier in tiers:
            n = counts.get(tier)
            if not isinstance(n, int) or n < 1:
                raise ModelError(f"{path}.{tier}", "replica count must be an integer >= 1")
        for tier in counts:
            if tier not in tiers:
                raise ModelError(f"{path}.{tier}", f"unknown tier {tier!r}")
        designs[label] = DesignSpec(label, tuple((t, counts[t]) for t in tiers))

    raw_policy = doc.get("patch_policy", {})
    policy = PatchPolicy(interval_mean=float(raw_policy.get("interval_hours", 720.0)))

    bounds = None
    if "bounds" in doc:
        raw_bounds = doc["bounds"]
        bounds = Bounds(
            asp_upper=raw_bounds.get("phi"),
            coa_lower=raw_bounds.get("psi"),
            noev_upper=raw_bounds.get("xi"),
            noap_upper=raw_bounds.get("omega"),
            noep_upper=raw_bounds.get("kappa"),
        )

    return Model(templates=templates, reachability=reach, designs=designs,
                 policy=policy, bounds=bounds)


def dump_model(model: Model) -> dict:
    """Serialize a model back to its document form (round-trips with load)."""
    catalog = {}
    servers = {}
    for tier, tpl in model.templates.items():
        raw = {key: getattr(tpl, field_name)
               for field_name, key in _SERVER_FIELD_KEYS.items()}
        if tpl.attack_tree is not None:
            raw["attack_tree"] = _dump_tree(tpl.attack_tree)
            for v in tpl.vulnerabilities():
                catalog[v.id] = v
        servers[tier] = raw
    return {
        "tiers": list(model.reachability.tiers),
        "reachability": {
            "edges": sorted(list(e) for e in model.reachability.edges),
            "entry_tiers": sorted(model.reachability.entry_tiers),
            "target_tier": model.reachability.target_tier,
        },
        "servers": servers,
        "vulnerabilities": [
            {"id": v.id, "impact": v.attack_impact,
             "probability": v.attack_success_prob,
             "critical": v.critical, "component": v.component}
            for v in sorted(catalog.values(), key=lambda v: v.id)
        ],
        "designs": {label: dict(d.counts) for label, d in model.designs.items()},
        "patch_policy": {"interval_hours": model.policy.interval_mean},
    }


def _dump_tree(node: AttackTreeNode):
    if node.kind == "leaf":
        return {"vuln": node.vulnerability.id}
    return {node.kind: [_dump_tree(c) for c in node.children]}


def example_network_path() -> Path:
    """Path of the bundled example model file."""
    return Path(__file__).parent / "data" / "example_network.json"
