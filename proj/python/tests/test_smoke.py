import pytest

import spfh


def test_version():
    assert spfh.engine_version == "1.0.0"


def test_normalize_and_dims():
    assert spfh.normalize("twist( id ,1)") == "twist(id,1)"
    assert spfh.functor_dim("sym(2)", 2) == 3
    with pytest.raises(ValueError):
        spfh.normalize("sym(")


def test_ext_of_frobenius_twist():
    assert spfh.ext("twist(id,1)", "twist(id,1)", max_degree=2) == [1, 0, 1]


def test_tor_is_dual_to_ext():
    assert spfh.tor("cdual(twist(id,1))", "twist(id,1)", max_degree=2) == [1, 0, 1]


def test_generic_ext():
    g = spfh.generic_ext("id", "id", max_degree=3)
    assert g.dims == [1, 0, 1, 0]
    assert g.certificate.startswith("stable-range")


def test_twist_map_is_iso_in_stable_range():
    for source, target, rank in spfh.twist_map("id", "id", 1, 3):
        assert source == target == rank


def test_finite_field_category():
    assert spfh.fqcat_ext("sym(1)", "sym(2)", q=2, N=2) == [1]
    assert spfh.fqcat_ext("id", "id", q=2, N=3, max_degree=3) == [1, 0, 1, 0]


def test_comparison_maps():
    strong = spfh.strong_phi("sym(1)", "sym(2)", q=2)
    assert strong["rows"][0]["verdict"] == "not surjective"
    gen = spfh.gen_comp_map("sym(1)", "sym(2)", q=2, s=2)
    assert gen["rows"][0]["verdict"] == "iso"
    assert not gen["contradiction"]


def test_oracles():
    assert spfh.ffss_series("GS", 1, 1, 2, 8, 2) == [1, 0, 0, 0, 1, 0, 0, 0, 2]
    assert all(x == 0 for x in spfh.gl_exterior_homology(3, 1, 1, 10))
    assert spfh.e_infty_ext("sym(2)", 4) == [1, 0, 1, 0, 2]


def test_run_job(tmp_path):
    doc, code = spfh.run_job(
        {"command": "ext", "F": "twist(id,1)", "G": "twist(id,1)", "max_degree": 2, "cache_dir": str(tmp_path)}
    )
    assert code == 0
    assert [row["dim"] for row in doc["rows"]] == [1, 0, 1]
    assert all("certificate" in row for row in doc["rows"])
    with pytest.raises(ValueError):
        spfh.run_job({"command": "nope"})


def test_cap_errors_surface():
    with pytest.raises(spfh.ResourceCapExceeded):
        spfh.fqcat_ext("id", "id", q=2, N=5)


def test_acceptance_subset():
    results = spfh.acceptance([1, 4, 9])
    assert [r["criterion"] for r in results] == [1, 4, 9]
    assert all(r["pass"] for r in results)
