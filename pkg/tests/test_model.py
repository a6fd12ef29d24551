import json
import math

import pytest

from patchdesign.model import (ModelError, PatchPolicy, apply_patch_policy,
                               dump_model, example_network_path, load_model,
                               prune_attack_tree)


def test_example_network_loads(model):
    assert list(model.reachability.tiers) == ["dns", "web", "app", "db"]
    assert len(model.templates) == 4
    # 16 vulnerability rows across the four templates (one CVE appears on
    # both the app and db servers)
    rows = sum(len(tpl.vulnerabilities()) for tpl in model.templates.values())
    assert rows == 16
    assert model.policy.interval_mean == 720.0
    assert "base" in model.designs
    assert dict(model.designs["base"].counts) == {"dns": 1, "web": 2, "app": 2, "db": 1}


def test_empty_tier_list_rejected():
    doc = json.loads(example_network_path().read_text())
    doc["tiers"] = []
    with pytest.raises(ModelError, match="no tiers"):
        load_model(doc)


def test_probability_out_of_range_names_vulnerability():
    doc = json.loads(example_network_path().read_text())
    doc["vulnerabilities"][0]["probability"] = 1.2
    vuln_id = doc["vulnerabilities"][0]["id"]
    with pytest.raises(ModelError, match=vuln_id):
        load_model(doc)


def test_impact_out_of_range_rejected():
    doc = json.loads(example_network_path().read_text())
    doc["vulnerabilities"][0]["impact"] = 10.5
    with pytest.raises(ModelError):
        load_model(doc)


def test_unknown_tier_in_design_rejected():
    doc = json.loads(example_network_path().read_text())
    doc["designs"]["base"]["cache"] = 2
    with pytest.raises(ModelError, match="cache"):
        load_model(doc)


def test_nonpositive_duration_rejected():
    doc = json.loads(example_network_path().read_text())
    doc["servers"]["dns"]["hw_mttr_hours"] = 0
    with pytest.raises(ModelError, match="hw_mttr"):
        load_model(doc)


def test_unknown_vulnerability_reference_rejected():
    doc = json.loads(example_network_path().read_text())
    doc["servers"]["dns"]["attack_tree"] = {"or": [{"vuln": "CVE-0000-0000"}]}
    with pytest.raises(ModelError, match="CVE-0000-0000"):
        load_model(doc)


def test_conflicting_duplicate_vulnerability_rejected():
    doc = json.loads(example_network_path().read_text())
    dup = dict(doc["vulnerabilities"][0])
    dup["impact"] = 5.0
    doc["vulnerabilities"].append(dup)
    with pytest.raises(ModelError, match="redefined"):
        load_model(doc)


def test_missing_tier_path_to_target_rejected():
    doc = json.loads(example_network_path().read_text())
    doc["reachability"]["edges"] = [["dns", "web"]]
    with pytest.raises(ModelError, match="target"):
        load_model(doc)


def test_round_trip(model):
    again = load_model(dump_model(model))
    assert again == model


def test_rates_are_reciprocals(model):
    dns = model.templates["dns"]
    assert dns.rate_per_hour("hw_mttf") == pytest.approx(1 / 87600)
    assert dns.rate_per_hour("svc_patch_mean") == pytest.approx(12.0)  # 5 min
    assert dns.rate_per_hour("os_patch_mean") == pytest.approx(3.0)  # 20 min


def test_infinite_mttf_allowed():
    import dataclasses
    doc = load_model(example_network_path())
    tpl = dataclasses.replace(doc.templates["dns"], hw_mttf=math.inf)
    assert tpl.rate_per_hour("hw_mttf") == 0.0


# -- patching ------------------------------------------------------------


def test_patch_removes_critical_or_branches(model):
    web = apply_patch_policy(model.templates["web"], model.policy)
    # OR(v1,v2,v3,AND(v4,v5)) with v1..v3 critical -> OR(AND(v4,v5))
    tree = web.attack_tree
    assert tree.kind == "or" and len(tree.children) == 1
    assert tree.children[0].kind == "and"
    ids = {v.id for v in tree.leaves()}
    assert ids == {"CVE-2016-4979", "CVE-2016-4805"}


def test_patch_empties_dns_tree(model):
    dns = apply_patch_policy(model.templates["dns"], model.policy)
    assert dns.attack_tree is None
    assert not dns.exploitable


def test_patch_removes_and_with_any_removed_child(model):
    # a patched conjunct disables the whole AND branch
    policy = PatchPolicy(selector=lambda v: v.id == "CVE-2016-4979")
    web = apply_patch_policy(model.templates["web"], policy)
    assert all(c.kind == "leaf" for c in web.attack_tree.children)
    assert len(web.attack_tree.children) == 3


def test_patch_with_empty_selector_is_identity(model):
    policy = PatchPolicy(selector=lambda v: False)
    for tpl in model.templates.values():
        assert apply_patch_policy(tpl, policy).attack_tree == tpl.attack_tree


def test_patch_is_idempotent(model):
    for tpl in model.templates.values():
        once = apply_patch_policy(tpl, model.policy)
        twice = apply_patch_policy(once, model.policy)
        assert once == twice


def test_patched_vulnerabilities_subset_of_original(model):
    for tpl in model.templates.values():
        before = {v.id for v in tpl.vulnerabilities()}
        after = {v.id for v in apply_patch_policy(tpl, model.policy).vulnerabilities()}
        assert after <= before


def test_prune_empty_tree_stays_empty(model):
    assert prune_attack_tree(None, model.policy.matches) is None
