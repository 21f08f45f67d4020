#!/usr/bin/env python3
"""Regenerate src/licenserec/data/catalog.json.

Each category lists its licenses most-frequent first. Frequency weights
split the category's repository count geometrically along that order, so
editing membership or order here is the only way weights change.

    python scripts/build_catalog.py
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "licenserec" / "data" / "catalog.json"

REPO_COUNTS = {
    "PERMISSIVE": 465_053, "COPYLEFT": 32_603, "ML_LICENSE": 995, "SHARE_ALIKE": 2_409,
    "PUBLIC_DOMAIN": 3_938, "NC": 4_844, "NC_SA": 2_672, "NC_ND": 842, "ND": 41,
}
DECAY = 0.6

PERM, DUTY, PROH, SIL = "Permission", "Duty", "Prohibition", "Silent"
ACTIONS = (
    "commercial_use", "create_derivatives", "distribute", "relicense_permissively",
    "share_alike_same_terms", "disclose_source", "attribution", "include_license_terms",
    "use_restrictions_ethical",
)


def profile(cu, cd, dist, relic, sa, ds, attr, ilt, eth):
    return dict(zip(ACTIONS, (cu, cd, dist, relic, sa, ds, attr, ilt, eth)))


# use_restrictions_ethical: Duty = field-of-use restrictions must travel with
# the work; Prohibition = no further restrictions may be added; Permission =
# recipients may add their own terms.
TEMPLATES = {
    "PUBLIC_DOMAIN": profile(PERM, PERM, PERM, PERM, SIL, SIL, SIL, SIL, PERM),
    "PERMISSIVE":    profile(PERM, PERM, PERM, PROH, SIL, SIL, DUTY, SIL, PERM),
    "SHARE_ALIKE":   profile(DUTY, DUTY, PERM, PROH, DUTY, DUTY, DUTY, SIL, PROH),
    "COPYLEFT":      profile(DUTY, DUTY, PERM, PROH, DUTY, DUTY, DUTY, SIL, PROH),
    "ML_LICENSE":    profile(PERM, PERM, PERM, PROH, SIL, SIL, DUTY, DUTY, DUTY),
    "NC":            profile(PROH, PERM, PERM, PROH, SIL, SIL, DUTY, SIL, DUTY),
    "NC_SA":         profile(PROH, DUTY, PERM, PROH, DUTY, SIL, DUTY, SIL, DUTY),
    "NC_ND":         profile(PROH, PROH, PERM, PROH, SIL, SIL, DUTY, SIL, DUTY),
    "ND":            profile(PERM, PROH, PERM, PROH, SIL, SIL, DUTY, SIL, PROH),
}

# Share-alike terms for content and data carry no source-code obligation.
NO_SOURCE_DUTY = {
    "CC-BY-SA-1.0", "CC-BY-SA-2.0", "CC-BY-SA-2.5", "CC-BY-SA-3.0", "CC-BY-SA-4.0",
    "ODbL-1.0", "CDLA-Sharing-1.0", "OFL-1.0", "OFL-1.1",
}

# (id, osi_approved, extra aliases)
LICENSES = {
    "PERMISSIVE": [
        ("MIT", True, ["mit license", "expat", "license :: osi approved :: mit license"]),
        ("Apache-2.0", True, ["apache 2.0", "apache2", "apache-2", "apache license 2.0",
                              "apache license, version 2.0", "asl 2.0"]),
        ("BSD-3-Clause", True, ["bsd", "bsd license", "new bsd", "modified bsd", "bsd-3"]),
        ("BSD-2-Clause", True, ["simplified bsd", "freebsd", "bsd-2"]),
        ("CC-BY-4.0", False, ["cc-by", "cc by 4.0", "attribution 4.0 international"]),
        ("ISC", True, ["isc license"]),
        ("Python-2.0", True, ["psf", "python software foundation license"]),
        ("PSF-2.0", False, []),
        ("Zlib", True, []),
        ("BSL-1.0", True, ["boost"]),
        ("CC-BY-3.0", False, []),
        ("Artistic-2.0", True, []),
        ("PostgreSQL", True, []),
        ("NCSA", True, []),
        ("BSD-3-Clause-Clear", False, []),
        ("X11", False, []),
        ("UPL-1.0", True, []),
        ("ODC-By-1.0", False, ["odc-by"]),
        ("CDLA-Permissive-2.0", False, []),
        ("CDLA-Permissive-1.0", False, []),
        ("ECL-2.0", True, []),
        ("AFL-3.0", True, []),
        ("CC-BY-2.0", False, []),
        ("CC-BY-2.5", False, []),
        ("CC-BY-1.0", False, []),
        ("Apache-1.1", True, []),
        ("Apache-1.0", False, []),
        ("BSD-4-Clause", False, ["original bsd"]),
        ("BSD-1-Clause", True, []),
        ("BSD-2-Clause-Patent", True, []),
        ("BSD-3-Clause-LBNL", True, []),
        ("BSD-3-Clause-Attribution", False, []),
        ("Unicode-DFS-2016", True, []),
        ("Unicode-3.0", True, []),
        ("W3C", True, []),
        ("OpenSSL", False, []),
        ("curl", False, []),
        ("Libpng", False, []),
        ("libpng-2.0", False, []),
        ("FTL", False, []),
        ("NTP", True, []),
        ("HPND", True, []),
        ("ICU", True, []),
        ("MIT-CMU", False, []),
        ("MIT-advertising", False, []),
        ("MIT-enna", False, []),
        ("MIT-feh", False, []),
        ("MITNFA", False, []),
        ("MIT-Modern-Variant", True, []),
        ("zlib-acknowledgement", False, []),
        ("PHP-3.0", True, []),
        ("PHP-3.01", True, []),
        ("ZPL-2.0", True, []),
        ("ZPL-2.1", True, []),
        ("AFL-1.1", True, []),
        ("AFL-1.2", True, []),
        ("AFL-2.0", True, []),
        ("AFL-2.1", True, []),
        ("Artistic-1.0", True, []),
        ("ECL-1.0", True, []),
        ("EFL-2.0", True, []),
        ("Fair", True, []),
        ("Naumen", True, []),
        ("AAL", True, []),
        ("Entessa", True, []),
        ("Xnet", True, []),
        ("OLDAP-2.8", True, []),
        ("Intel", True, []),
        ("TCL", False, []),
        ("Spencer-94", False, []),
        ("Beerware", False, []),
        ("LPPL-1.3c", True, []),
        ("etalab-2.0", False, []),
        ("OGL-UK-3.0", False, []),
        ("OGL-Canada-2.0", False, []),
        ("NLOD-2.0", False, []),
        ("DL-DE-BY-2.0", False, []),
        ("Apple-ASCL", False, []),
        ("OpenMDW-1.0", False, []),
    ],
    "PUBLIC_DOMAIN": [
        ("CC0-1.0", False, ["cc0", "cc-zero", "public domain dedication"]),
        ("Unlicense", True, ["the unlicense"]),
        ("MIT-0", True, []),
        ("0BSD", True, ["zero-clause bsd"]),
        ("WTFPL", False, []),
        ("PDDL-1.0", False, ["pddl", "odc-pddl"]),
        ("Public-Domain", False, ["public domain", "public-domain", "pd"]),
        ("blessing", False, []),
        ("SAX-PD", False, []),
    ],
    "COPYLEFT": [
        ("GPL-3.0-only", True, ["gpl-3.0", "gplv3", "gpl3", "gnu gpl v3"]),
        ("GPL-2.0-only", True, ["gpl-2.0", "gplv2", "gpl2", "gnu gpl v2"]),
        ("AGPL-3.0-only", True, ["agpl-3.0", "agplv3", "agpl"]),
        ("GPL-3.0-or-later", True, ["gpl", "gplv3+"]),
        ("GPL-2.0-or-later", True, ["gplv2+"]),
        ("AGPL-3.0-or-later", True, []),
        ("GFDL-1.3-or-later", False, ["gfdl"]),
        ("GFDL-1.3-only", False, ["gfdl-1.3"]),
        ("EUPL-1.2", True, []),
        ("EUPL-1.1", True, []),
        ("OSL-3.0", True, []),
        ("SSPL-1.0", False, []),
        ("GPL-1.0-only", False, ["gpl-1.0"]),
        ("GPL-1.0-or-later", False, []),
        ("AGPL-1.0-only", False, ["agpl-1.0"]),
        ("AGPL-1.0-or-later", False, []),
        ("GFDL-1.2-only", False, ["gfdl-1.2"]),
        ("GFDL-1.2-or-later", False, []),
        ("GFDL-1.1-only", False, ["gfdl-1.1"]),
        ("GFDL-1.1-or-later", False, []),
        ("EUPL-1.0", False, []),
        ("OSL-1.0", True, []),
        ("OSL-1.1", False, []),
        ("OSL-2.0", True, []),
        ("OSL-2.1", True, []),
        ("RPL-1.1", True, []),
        ("RPL-1.5", True, []),
        ("Sleepycat", True, []),
        ("CECILL-2.0", False, []),
        ("CECILL-2.1", True, []),
        ("QPL-1.0", True, []),
        ("CPAL-1.0", True, []),
    ],
    "SHARE_ALIKE": [
        ("MPL-2.0", True, ["mozilla public license 2.0"]),
        ("LGPL-3.0-only", True, ["lgpl-3.0", "lgplv3"]),
        ("LGPL-2.1-only", True, ["lgpl-2.1", "lgplv2.1"]),
        ("CC-BY-SA-4.0", False, ["cc-by-sa", "cc by-sa 4.0"]),
        ("LGPL-3.0-or-later", True, ["lgpl"]),
        ("LGPL-2.1-or-later", True, []),
        ("EPL-2.0", True, []),
        ("CC-BY-SA-3.0", False, []),
        ("EPL-1.0", True, []),
        ("ODbL-1.0", False, ["odbl"]),
        ("CDLA-Sharing-1.0", False, []),
        ("OFL-1.1", True, []),
        ("CDDL-1.0", True, []),
        ("MS-PL", True, []),
        ("LGPL-2.0-only", True, ["lgpl-2.0"]),
        ("LGPL-2.0-or-later", True, []),
        ("LGPLLR", False, ["lgpl-lr"]),
        ("MPL-1.1", True, []),
        ("MPL-1.0", True, []),
        ("MPL-2.0-no-copyleft-exception", True, []),
        ("CC-BY-SA-2.5", False, []),
        ("CC-BY-SA-2.0", False, []),
        ("CC-BY-SA-1.0", False, []),
        ("CDDL-1.1", False, []),
        ("CPL-1.0", True, []),
        ("MS-RL", True, []),
        ("APSL-2.0", True, []),
        ("OFL-1.0", False, []),
        ("CECILL-C", False, []),
        ("IPL-1.0", True, []),
        ("LPL-1.02", True, []),
        ("SISSL", True, []),
        ("Nokia", True, []),
        ("Motosoto", True, []),
        ("ErlPL-1.1", False, []),
        ("SPL-1.0", True, []),
        ("NPL-1.1", False, []),
    ],
    "ML_LICENSE": [
        ("OpenRAIL", False, ["openrail license"]),
        ("CreativeML-OpenRAIL-M", False, []),
        ("Llama2", False, ["llama 2", "llama-2", "llama 2 community license"]),
        ("Llama3", False, ["llama 3", "llama-3", "meta llama 3 community license"]),
        ("Llama3.1", False, ["llama-3.1"]),
        ("BigScience-OpenRAIL-M", False, []),
        ("Gemma", False, ["gemma terms of use"]),
        ("OpenRAIL-M", False, ["openrail-m"]),
        ("OpenRAIL++", False, ["openrail++-m"]),
        ("Llama3.2", False, ["llama-3.2"]),
        ("Llama3.3", False, ["llama-3.3"]),
        ("BigCode-OpenRAIL-M", False, []),
        ("BigScience-BLOOM-RAIL-1.0", False, []),
        ("Llama4", False, ["llama-4"]),
        ("DeepFloyd-IF", False, ["deepfloyd-if-license"]),
        ("AI2-ImpACT-LR", False, ["ai2-impact-low-risk"]),
        ("AI2-ImpACT-MR", False, ["ai2-impact-medium-risk"]),
        ("AI2-ImpACT-HR", False, ["ai2-impact-high-risk"]),
        ("Falcon-LLM-1.0", False, ["falcon-llm-license"]),
        ("Tongyi-Qianwen", False, ["tongyi-qianwen-license", "qwen"]),
        ("Yi-License", False, ["yi-license"]),
        ("DeepSeek-License", False, ["deepseek"]),
        ("Stability-AI-Community", False, ["stabilityai-community-license"]),
    ],
    "NC": [
        ("CC-BY-NC-4.0", False, ["cc-by-nc", "cc by-nc 4.0"]),
        ("CC-BY-NC-3.0", False, []),
        ("CC-BY-NC-2.0", False, []),
        ("Apple-AMLR", False, []),
        ("CC-BY-NC-2.5", False, []),
        ("CC-BY-NC-1.0", False, []),
        ("H-Research", False, []),
        ("Intel-Research", False, []),
        ("PolyForm-Noncommercial-1.0.0", False, []),
        ("NCGL-UK-2.0", False, []),
    ],
    "NC_SA": [
        ("CC-BY-NC-SA-4.0", False, ["cc-by-nc-sa", "cc by-nc-sa 4.0"]),
        ("CC-BY-NC-SA-3.0", False, []),
        ("CC-BY-NC-SA-2.0", False, []),
        ("CC-BY-NC-SA-2.5", False, []),
        ("CC-BY-NC-SA-1.0", False, []),
    ],
    "NC_ND": [
        ("CC-BY-NC-ND-4.0", False, ["cc-by-nc-nd", "cc by-nc-nd 4.0"]),
        ("CC-BY-NC-ND-3.0", False, []),
        ("CC-BY-NC-ND-2.0", False, []),
        ("CC-BY-NC-ND-2.5", False, []),
        ("CC-BY-NC-ND-1.0", False, []),
    ],
    "ND": [
        ("CC-BY-ND-4.0", False, ["cc-by-nd", "cc by-nd 4.0"]),
        ("CC-BY-ND-3.0", False, []),
        ("CC-BY-ND-2.0", False, []),
        ("CC-BY-ND-2.5", False, []),
        ("CC-BY-ND-1.0", False, []),
        ("C-UDA-1.0", False, ["c-uda"]),
    ],
}


def cc_family(license_id: str) -> dict | None:
    if license_id.startswith("CC0-"):
        return {"family": "CC0", "version": license_id.split("-", 1)[1]}
    if license_id.startswith("CC-"):
        family, version = license_id.rsplit("-", 1)
        return {"family": family, "version": version}
    return None


def weights(category: str, n: int) -> list[int]:
    # Geometric shares by list order, apportioned by largest remainder so
    # each category sums exactly to its repository count.
    raw = [DECAY ** i for i in range(n)]
    total = sum(raw)
    exact = [REPO_COUNTS[category] * r / total for r in raw]
    out = [int(x) for x in exact]
    by_remainder = sorted(range(n), key=lambda i: (-(exact[i] - out[i]), i))
    for i in by_remainder[: REPO_COUNTS[category] - sum(out)]:
        out[i] += 1
    return out


def build() -> list[dict]:
    entries = []
    for category, rows in LICENSES.items():
        for (license_id, osi, aliases), weight in zip(rows, weights(category, len(rows))):
            prof = dict(TEMPLATES[category])
            if license_id in NO_SOURCE_DUTY:
                prof["disclose_source"] = SIL
            cc = cc_family(license_id)
            whitelisted = (
                osi
                or category == "ML_LICENSE"
                or (cc is not None and cc["version"] == "4.0")
                or license_id == "CC0-1.0"
            )
            entry = {
                "id": license_id,
                "aliases": sorted(set(aliases)),
                "category": category,
                "profile": prof,
                "frequency_weight": weight,
                "whitelisted": whitelisted,
            }
            if cc:
                entry["cc_family"] = cc
            entries.append(entry)
    entries.sort(key=lambda e: e["id"].casefold())
    return entries


def main() -> None:
    entries = build()
    OUT.write_text(json.dumps(entries, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(entries)} entries to {OUT}")


if __name__ == "__main__":
    main()
