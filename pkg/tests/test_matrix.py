import copy
import json
from importlib import resources

import pytest

from licenserec.catalog import ACTIONS, Category, ClauseProfile, Status, unknown_token
from licenserec.errors import MissingCategoryPair, SchemaError
from licenserec.matrix import (
    BUNDLED_MATRICES,
    STRICTNESS,
    EdgeContext,
    RuleSource,
    VerdictKind,
    check_invariants,
    default_matrix,
    derive_fallback_verdict,
    load_matrix,
)

C, I, K, U = (VerdictKind.COMPATIBLE, VerdictKind.INCOMPATIBLE, VerdictKind.CONDITIONAL,
              VerdictKind.UNKNOWN)


def profile(**statuses):
    base = {a: Status.SILENT for a in ACTIONS}
    base.update({k: Status(v) for k, v in statuses.items()})
    return ClauseProfile.from_mapping(base)


def _bundled_json(name="licenserec-default"):
    ref = resources.files("licenserec") / "data" / "matrices" / f"{name}.json"
    return json.loads(ref.read_text(encoding="utf-8"))


@pytest.mark.parametrize("name", BUNDLED_MATRICES)
def test_bundled_matrices_load_total(name):
    m = default_matrix(name)
    assert len(m.category_defaults) == 81
    assert m.name == name


def test_missing_category_pair(tmp_path):
    doc = _bundled_json()
    del doc["category_defaults"]["ML_LICENSE"]["PERMISSIVE"]
    p = tmp_path / "m.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(MissingCategoryPair) as err:
        load_matrix(p)
    assert (err.value.upstream, err.value.downstream) == ("ML_LICENSE", "PERMISSIVE")


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(explicit=[{"u": "NoSuchLicense", "d": "MIT", "kind": "Compatible"}]),
        lambda d: d.update(explicit=[{"u": "MIT", "d": "ISC", "kind": "Sometimes"}]),
        lambda d: d.update(explicit=[{"u": "MIT", "d": "ISC", "kind": "Compatible"},
                                     {"u": "mit", "d": "ISC", "kind": "Incompatible"}]),
        lambda d: d["category_defaults"]["NC"].update(NC="Perhaps"),
        lambda d: d.pop("name"),
    ],
)
def test_malformed_matrix(tmp_path, mutate):
    doc = copy.deepcopy(_bundled_json())
    mutate(doc)
    p = tmp_path / "m.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(SchemaError):
        load_matrix(p)


def test_empty_matrix_file(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("")
    with pytest.raises(SchemaError):
        load_matrix(p)


def test_verdict_examples(matrix):
    assert matrix.verdict("CC-BY-NC-4.0", "MIT").kind is I
    v = matrix.verdict("MIT", "CC0-1.0")
    assert v.kind is I
    assert matrix.verdict("MIT", "MIT").kind is C


def test_conditional_resolution(matrix):
    off = matrix.verdict("OpenRAIL-M", "Apache-2.0", EdgeContext(terms_preserved=False))
    on = matrix.verdict("OpenRAIL-M", "Apache-2.0", EdgeContext(terms_preserved=True))
    assert off.kind is I and off.reason == "ml_terms_not_preserved"
    assert on.kind is C and on.reason == "ml_terms_preserved"
    assert K.value in off.trail and K.value in on.trail
    assert matrix.lookup("OpenRAIL-M", "Apache-2.0").kind is K


def test_unknown_license_verdict(matrix):
    v = matrix.verdict(unknown_token("x"), "MIT")
    assert v.kind is U
    assert matrix.verdict("MIT", "definitely-not-a-license").kind is U


def test_cc_by_sa_to_gpl3_one_way(matrix):
    assert matrix.verdict("CC-BY-SA-4.0", "GPL-3.0-only").kind is C
    assert matrix.verdict("GPL-3.0-only", "CC-BY-SA-4.0").kind is I
    assert matrix.verdict("CC-BY-SA-4.0", "GPL-2.0-only").kind is I


def test_gpl_versions(matrix):
    assert matrix.verdict("GPL-2.0-only", "GPL-3.0-only").kind is I
    assert matrix.verdict("GPL-2.0-or-later", "GPL-3.0-only").kind is C
    assert matrix.verdict("LGPL-2.1-only", "GPL-2.0-only").kind is C


def test_tags_accepted_as_ids(matrix):
    assert matrix.verdict("cc-by-nc-4.0", "mit").kind is I
    assert matrix.verdict("gpl-2.0+", "GPL-3.0-only").kind is C


def test_compatible_set_cc0_is_everything(matrix, catalog):
    assert set(matrix.compatible_set("CC0-1.0")) == set(catalog.ids)


def test_compatible_set_nc(matrix, catalog):
    got = matrix.compatible_set("CC-BY-NC-4.0")
    expected = {e.id for e in catalog if matrix.verdict("CC-BY-NC-4.0", e.id).kind is C}
    assert set(got) == expected
    assert {catalog.categorize(i) for i in got} == {Category.NC, Category.NC_SA, Category.NC_ND}


def test_compatible_set_unknown(matrix):
    s = matrix.compatible_set(unknown_token("x"))
    assert len(s) == 0 and s.unknown


def test_compatible_set_conditional_counts_when_preserved(matrix):
    off = matrix.compatible_set("OpenRAIL-M")
    on = matrix.compatible_set("OpenRAIL-M", EdgeContext(True))
    assert set(off) == {"OpenRAIL-M"}
    assert "MIT" in on and off < on


def test_row_invariants_hold_for_default(matrix):
    assert check_invariants(matrix) == {k: [] for k in check_invariants(matrix)}


def test_alternate_matrices_are_more_lenient_on_ml(eu_matrix, peat_matrix):
    assert check_invariants(eu_matrix)["ml_row"]
    assert eu_matrix.verdict("OpenRAIL-M", "MIT").kind is C
    assert peat_matrix.verdict("CC-BY-NC-4.0", "MIT").kind is C
    assert peat_matrix.verdict("GPL-3.0-only", "MIT").kind is I


def test_explicit_entries_skip_derivation(matrix, catalog):
    for (u, d) in list(matrix.explicit)[:400]:
        entry_u, entry_d = catalog.get(u), catalog.get(d)
        assert matrix.lookup(entry_u.id, entry_d.id).source is RuleSource.EXPLICIT


def test_fallback_never_more_lenient_without_explicit(matrix, catalog):
    # For pairs with no explicit entry, derivation agrees with the category
    # default or is stricter.
    bad = []
    for eu in catalog:
        for ed in catalog:
            if eu is ed or matrix.has_explicit(eu.id, ed.id):
                continue
            want = matrix.category_defaults[(eu.category, ed.category)]
            got = derive_fallback_verdict(eu.profile, ed.profile).kind
            if want is U or got is U or STRICTNESS[got] < STRICTNESS[want]:
                bad.append((eu.id, ed.id, want, got))
    assert bad == []


def test_derivation_grant_contradiction():
    v = derive_fallback_verdict(profile(commercial_use="Prohibition"), profile(commercial_use="Permission"))
    assert v.kind is I and v.reason == "grant_contradiction:commercial_use"
    assert v.source is RuleSource.DERIVED


def test_derivation_duty_prohibited():
    v = derive_fallback_verdict(
        profile(share_alike_same_terms="Duty"),
        profile(share_alike_same_terms="Prohibition", commercial_use="Permission"),
    )
    assert v.kind is I and v.reason == "duty_prohibited:share_alike_same_terms"


def test_derivation_reverse_duty_prohibition():
    v = derive_fallback_verdict(profile(relicense_permissively="Prohibition"),
                                profile(relicense_permissively="Duty"))
    assert v.kind is I and v.reason.startswith("prohibited_duty")


def test_derivation_conditional_and_compatible():
    pu = profile(include_license_terms="Duty", attribution="Duty")
    pd = profile(attribution="Duty")
    assert derive_fallback_verdict(pu, pd).kind is K
    assert derive_fallback_verdict(profile(attribution="Duty"), pd).kind is C


def test_derivation_silent_is_unknown():
    assert derive_fallback_verdict(ClauseProfile.silent(), profile(attribution="Duty")).kind is U
    assert derive_fallback_verdict(profile(attribution="Duty"), ClauseProfile.silent()).kind is U


def test_expression_or_and(matrix):
    assert matrix.expression_verdict("CC-BY-NC-4.0 OR MIT", "Apache-2.0").kind is C
    assert matrix.expression_verdict("CC-BY-NC-4.0 AND MIT", "Apache-2.0").kind is I
    assert matrix.expression_verdict("MIT", "CC0-1.0 OR Apache-2.0").kind is C
    assert matrix.expression_verdict("MIT", "CC0-1.0 AND Apache-2.0").kind is I


def test_alternate_matrices_fail_exactly_their_policy_checks(eu_matrix, peat_matrix):
    def failing(m):
        return sorted(k for k, v in check_invariants(m).items() if v)

    assert failing(eu_matrix) == ["ml_row"]
    assert failing(peat_matrix) == ["ml_row", "nd_rows", "p_row"]
