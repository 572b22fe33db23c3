"""Registered feedback reason codes and their instruction templates.

Every evaluator failure carries a reason code from this registry; the
refiner renders the matching template into an actionable instruction.
Judge codes are namespaced (``judge.<kind>.<code>``) and rendered from
the judge's narrative, so the namespace is registered as a whole.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .errors import UnknownReasonCode

TAXONOMY_VERSION = "reason-codes/1"

#: Default code attached to passing outcomes.
PASS_CODE = "pass"


def _render_length_exceeded(details: Mapping) -> str:
    return (
        f"Shorten the {details['component']} to at most {details['limit']} "
        f"characters; it is currently {details['measured']}."
    )


def _render_length_too_short(details: Mapping) -> str:
    return (
        f"Lengthen the {details['component']} to at least {details['limit']} "
        f"characters; it is currently {details['measured']}."
    )


def _render_missing_group(details: Mapping) -> str:
    groups = details.get("missing", [])
    parts = ["include at least one of: " + ", ".join(repr(a) for a in g) for g in groups]
    return "Rewrite the copy to " + "; and ".join(parts) + "."


def _render_banned_present(details: Mapping) -> str:
    terms = sorted({f["term"] for f in details.get("found", [])})
    return "Remove the banned terms: " + ", ".join(repr(t) for t in terms) + "."


def _render_punct_after(details: Mapping) -> str:
    words = sorted({o["word"] for o in details.get("occurrences", [])})
    return (
        "Remove the punctuation mark immediately following "
        + ", ".join(repr(w) for w in words)
        + "."
    )


def _render_avoided_term(details: Mapping) -> str:
    sentences = [
        f"Use '{p['preferred']}' instead of '{p['avoided']}'."
        for p in details.get("pairs", [])
    ]
    return " ".join(sentences)


def _render_judge(details: Mapping) -> str:
    narrative = details.get("narrative", "the copy failed an automated review")
    criterion = details.get("criterion_id")
    suffix = f" (criterion: {criterion})" if criterion else ""
    return (
        f"Revise the copy to address this reviewer feedback: {narrative}{suffix}. "
        "Keep every other requirement satisfied."
    )


def _render_judge_unparseable(details: Mapping) -> str:
    criterion = details.get("criterion_id", "an automated review")
    return (
        f"Revise the copy so it clearly satisfies the {criterion} requirement."
    )


_EXACT: dict[str, Callable[[Mapping], str]] = {
    "length.exceeded": _render_length_exceeded,
    "length.too_short": _render_length_too_short,
    "keyword.missing_group": _render_missing_group,
    "keyword.banned_present": _render_banned_present,
    "punct.after_word": _render_punct_after,
    "lexical.avoided_term": _render_avoided_term,
    "judge.unparseable": _render_judge_unparseable,
}

#: Codes under these prefixes are registered as a namespace.
_NAMESPACES: dict[str, Callable[[Mapping], str]] = {
    "judge.": _render_judge,
}


def is_registered(code: str) -> bool:
    if code == PASS_CODE or code in _EXACT:
        return True
    return any(
        code.startswith(prefix) and code != prefix for prefix in _NAMESPACES
    )


def render_template(code: str, details: Mapping) -> str:
    """Render the instruction template for a registered failure code.

    Raises UnknownReasonCode for unregistered codes and for the pass
    default, which has no instruction.
    """
    renderer = _EXACT.get(code)
    if renderer is None:
        for prefix, ns_renderer in _NAMESPACES.items():
            if code.startswith(prefix) and code != prefix:
                renderer = ns_renderer
                break
    if renderer is None:
        raise UnknownReasonCode(code)
    return renderer(details)


def registered_codes() -> list[str]:
    """Exact codes plus namespace prefixes, for the published taxonomy document."""
    return sorted([*(_EXACT), *(p + "*" for p in _NAMESPACES), PASS_CODE])
