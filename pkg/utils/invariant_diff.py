"""
Invariant comparison utilities: explain why two forms are (not) isometric
"""

from data.lattice_forms import (GramForm, coradical, rational_class, jordan_invariant_oracle,
                                oracle_to_json)


def compare_constituents(old_oracle, new_oracle):
    """Compare Jordan constituents scale by scale"""
    old_by_scale = {s: (r, d.value) for s, r, d in old_oracle}
    new_by_scale = {s: (r, d.value) for s, r, d in new_oracle}
    changes = {}

    for scale in sorted(set(old_by_scale) | set(new_by_scale)):
        if scale not in old_by_scale:
            changes[str(scale)] = {"action": "added", "constituent": list(new_by_scale[scale])}
        elif scale not in new_by_scale:
            changes[str(scale)] = {"action": "removed", "constituent": list(old_by_scale[scale])}
        elif old_by_scale[scale] != new_by_scale[scale]:
            changes[str(scale)] = {
                "action": "changed",
                "old": list(old_by_scale[scale]),
                "new": list(new_by_scale[scale])
            }

    return changes


def compare_rational_classes(old_class, new_class):
    """Compare rank, discriminant class and Hasse invariant"""
    changes = {}
    old_json, new_json = old_class.to_json(), new_class.to_json()

    for key in ("rank", "disc_class", "hasse"):
        if old_json[key] != new_json[key]:
            changes[key] = {"action": "changed", "old": old_json[key], "new": new_json[key]}

    return changes


def compare_coradicals(old_profile, new_profile):
    changes = {}
    if old_profile.exponents != new_profile.exponents:
        changes["exponents"] = {
            "action": "changed",
            "old": list(old_profile.exponents),
            "new": list(new_profile.exponents)
        }
    if old_profile.rank_defect != new_profile.rank_defect:
        changes["rank_defect"] = {
            "action": "changed",
            "old": old_profile.rank_defect,
            "new": new_profile.rank_defect
        }
    return changes


def compare_forms(f: GramForm, g: GramForm):
    """Full invariant diff; empty when the forms share every invariant"""
    diff = {"coradical": compare_coradicals(coradical(f), coradical(g))}
    if f.epsilon == 1 and g.epsilon == 1 and not f.is_singular() and not g.is_singular():
        diff["rational_class"] = compare_rational_classes(rational_class(f), rational_class(g))
        diff["jordan"] = compare_constituents(jordan_invariant_oracle(f), jordan_invariant_oracle(g))

    # Only include sections with actual changes
    return {k: v for k, v in diff.items() if v}


def summarize_form(f: GramForm):
    summary = {"rank": f.rank, "coradical": coradical(f).to_json()}
    if f.epsilon == 1 and not f.is_singular():
        summary["rational_class"] = rational_class(f).to_json()
        summary["jordan"] = oracle_to_json(jordan_invariant_oracle(f))
    return summary
