import json
import xml.etree.ElementTree as ET

import pytest

from g2fourier.proptest import REGISTRY, junit_xml, run_all, write_reports

FAST = ["algebra.disc_resultant", "jordan.adjugate", "cubics.psd", "whittaker.ell1", "f4.nu_exc"]


def test_registry_covers_every_module():
    prefixes = {cid.split(".")[0] for cid in REGISTRY}
    assert prefixes == {"algebra", "jordan", "cubics", "qp", "rings", "f4", "meta", "whittaker"}
    for spec in REGISTRY.values():
        assert spec.description and spec.anchor
        assert 1 <= spec.quick_samples <= spec.samples


def test_metaplectic_checks_use_full_sample_count():
    meta = [s for s in REGISTRY.values() if s.id.startswith("meta.")]
    assert {s.id for s in meta} >= {"meta.cocycle", "meta.torus", "meta.gl2_cover_relations", "meta.steinberg_opposite", "meta.hilbert_product"}
    assert all(s.samples == 10000 for s in meta)


def test_same_seed_same_report():
    a = run_all(seed=7, quick=True, only=FAST)
    b = run_all(seed=7, quick=True, only=FAST)
    assert a == b
    assert [c["id"] for c in a["checks"]] == sorted(FAST)
    assert all(c["samples"] == REGISTRY[c["id"]].quick_samples for c in a["checks"])


def test_parallel_report_matches_serial():
    assert run_all(seed=1, quick=True, only=FAST, jobs=2) == run_all(seed=1, quick=True, only=FAST)


def test_crash_is_reported_as_failure(monkeypatch):
    from g2fourier import proptest

    def boom(rng, n):
        raise RuntimeError("boom")

    spec = REGISTRY["f4.nu_exc"]
    monkeypatch.setitem(REGISTRY, "f4.nu_exc", proptest.CheckSpec(spec.id, spec.description, spec.anchor, 1, 1, boom))
    rep = run_all(only=["f4.nu_exc"])
    assert not rep["passed"] and "RuntimeError" in rep["checks"][0]["failures"][0]["exception"]
    root = ET.fromstring(junit_xml(rep))
    assert root.get("failures") == "1"


def test_reports_written(tmp_path):
    rep = run_all(quick=True, only=FAST[:2])
    write_reports(rep, tmp_path / "r.json", tmp_path / "r.xml")
    assert json.loads((tmp_path / "r.json").read_text())["passed"] is True
    assert ET.parse(tmp_path / "r.xml").getroot().get("tests") == "2"


@pytest.mark.slow
def test_default_seed_suite_passes():
    rep = run_all(seed=0)
    failed = [c["id"] for c in rep["checks"] if not c["passed"]]
    assert not failed, failed
