#!/usr/bin/env python3
"""Regenerate the bundled matrix files under src/licenserec/data/matrices/.

Run after scripts/build_catalog.py. The default matrix carries explicit
rulings for well-known pairs (GPL version splits, weak-copyleft licenses
that cannot be relicensed under GPL, the CC BY-SA 4.0 -> GPLv3 one-way
route, ML cross-family pairs) plus explicit entries for the category cells
whose rulings clause profiles cannot express on their own (see
STRUCTURAL_PAIRS). The script fails if clause derivation would be more
lenient than the category default anywhere else.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

from licenserec.catalog import Category, default_catalog
from licenserec.matrix import STRICTNESS, VerdictKind, derive_fallback_verdict

OUT = Path(__file__).resolve().parents[1] / "src" / "licenserec" / "data" / "matrices"

C, I, K = "Compatible", "Incompatible", "ConditionalOnTermsPreservation"
CATS = [c.value for c in Category.known()]


def default_table() -> dict[str, dict[str, str]]:
    t = {u: {d: I for d in CATS} for u in CATS}
    t["PUBLIC_DOMAIN"] = {d: C for d in CATS}
    t["PERMISSIVE"] = {d: (I if d == "PUBLIC_DOMAIN" else C) for d in CATS}
    t["COPYLEFT"]["COPYLEFT"] = C
    t["SHARE_ALIKE"]["SHARE_ALIKE"] = C
    t["SHARE_ALIKE"]["COPYLEFT"] = C
    t["ML_LICENSE"] = {d: K for d in CATS}
    for d in ("NC", "NC_SA", "NC_ND"):
        t["NC"][d] = C
    t["NC_SA"]["NC_SA"] = C
    return t


def eu_jla_table() -> dict[str, dict[str, str]]:
    # CC-aware but with no notion of ML licenses: they behave as permissive.
    t = default_table()
    t["ML_LICENSE"] = dict(t["PERMISSIVE"])
    for u in CATS:
        t[u]["ML_LICENSE"] = t[u]["PERMISSIVE"]
    t["ML_LICENSE"]["ML_LICENSE"] = C
    return t


def peatmoss_table() -> dict[str, dict[str, str]]:
    # Software-only view: only strong copyleft constrains the downstream.
    t = {u: {d: C for d in CATS} for u in CATS}
    t["COPYLEFT"] = {d: (C if d == "COPYLEFT" else I) for d in CATS}
    return t


GPL_FAMILY = ["GPL-2.0-only", "GPL-2.0-or-later", "GPL-3.0-only", "GPL-3.0-or-later",
              "AGPL-3.0-only", "AGPL-3.0-or-later"]
GPL2_ONLY = ["GPL-2.0-only"]
GPL3_PLUS = ["GPL-3.0-only", "GPL-3.0-or-later", "AGPL-3.0-only", "AGPL-3.0-or-later"]
NOT_GPL_COMPATIBLE = ["CDDL-1.0", "CDDL-1.1", "EPL-1.0", "EPL-2.0", "MPL-1.0", "MPL-1.1",
                      "CPL-1.0", "MS-PL", "MS-RL", "APSL-2.0", "CC-BY-SA-1.0", "CC-BY-SA-2.0",
                      "CC-BY-SA-2.5", "CC-BY-SA-3.0", "OSL-3.0", "EUPL-1.1", "SSPL-1.0"]
ML_HEADS = ["OpenRAIL", "OpenRAIL-M", "CreativeML-OpenRAIL-M", "BigScience-OpenRAIL-M",
            "Llama2", "Llama3", "Gemma"]

STRUCTURAL_PAIRS = {
    # Every COPYLEFT/SHARE_ALIKE profile carries the same reciprocal duties,
    # so profiles alone cannot tell strong from weak copyleft.
    ("COPYLEFT", "SHARE_ALIKE"),
    # BY-NC-SA duties are a superset of BY-NC's; the downgrade is a CC chart rule.
    ("NC_SA", "NC"),
    # Distinct versions within a no-derivatives family.
    ("ND", "ND"),
    ("NC_ND", "NC_ND"),
}


def notable_entries() -> list[tuple[str, str, str]]:
    rows = []
    for u in GPL2_ONLY:
        rows += [(u, d, I) for d in GPL3_PLUS]
    for u in GPL3_PLUS:
        rows += [(u, d, I) for d in ("GPL-2.0-only", "GPL-2.0-or-later")]
    for u in ("LGPL-3.0-only", "LGPL-3.0-or-later"):
        rows.append((u, "GPL-2.0-only", I))
    for u in NOT_GPL_COMPATIBLE:
        rows += [(u, d, I) for d in GPL_FAMILY if d != u]
    rows += [("CC-BY-SA-4.0", d, C) for d in ("GPL-3.0-only", "GPL-3.0-or-later")]
    rows += [("CC-BY-SA-4.0", d, I) for d in ("GPL-2.0-only", "GPL-2.0-or-later")]
    rows += [(u, d, K) for u, d in itertools.permutations(ML_HEADS, 2)]
    return rows


def structural_entries(table, taken: set[tuple[str, str]]) -> list[tuple[str, str, str]]:
    catalog = default_catalog()
    rows = []
    for eu, ed in itertools.product(catalog.entries, repeat=2):
        if eu.id == ed.id or (eu.id.casefold(), ed.id.casefold()) in taken:
            continue
        want = VerdictKind(table[eu.category.value][ed.category.value])
        got = derive_fallback_verdict(eu.profile, ed.profile).kind
        if got is not VerdictKind.UNKNOWN and STRICTNESS[got] >= STRICTNESS[want]:
            continue
        pair = (eu.category.value, ed.category.value)
        if pair not in STRUCTURAL_PAIRS:
            raise SystemExit(f"derivation more lenient than default for {eu.id} -> {ed.id}: {got} < {want}")
        rows.append((eu.id, ed.id, want.value))
    return rows


def write(name: str, table, explicit) -> None:
    explicit = sorted(set(explicit), key=lambda r: (r[0].casefold(), r[1].casefold()))
    doc = {
        "name": name,
        "category_defaults": table,
        "explicit": [{"u": u, "d": d, "kind": k} for u, d, k in explicit],
    }
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path.name}: {len(explicit)} explicit entries")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    table = default_table()
    notable = notable_entries()
    taken = {(u.casefold(), d.casefold()) for u, d, _ in notable}
    write("licenserec-default", table, notable + structural_entries(table, taken))
    software_rules = [r for r in notable if r[2] != K]
    write("eu-jla-style", eu_jla_table(), software_rules)
    write("peatmoss-style", peatmoss_table(), [])


if __name__ == "__main__":
    main()
