"""Diff rendering for review items: line-level for code, word-level for prose."""

from __future__ import annotations

import difflib
import re

_TOKEN_RE = re.compile(r"\S+|\s+")


def unified_code_diff(original: str, mutated: str, from_name: str = "original",
                      to_name: str = "mutated") -> str:
    lines = difflib.unified_diff(
        original.splitlines(keepends=True),
        mutated.splitlines(keepends=True),
        fromfile=from_name,
        tofile=to_name,
    )
    return "".join(lines)


def word_diff(original: str, mutated: str) -> list[dict]:
    """Word-level opcode segments: [{'op', 'a', 'b'}, ...].

    Whitespace runs are tokens too, so joining the 'a' parts reproduces
    the original text and the 'b' parts the mutated text.
    """
    a_tokens = _TOKEN_RE.findall(original)
    b_tokens = _TOKEN_RE.findall(mutated)
    matcher = difflib.SequenceMatcher(a=a_tokens, b=b_tokens, autojunk=False)
    segments = []
    for op, a_start, a_end, b_start, b_end in matcher.get_opcodes():
        segments.append(
            {
                "op": op,
                "a": "".join(a_tokens[a_start:a_end]),
                "b": "".join(b_tokens[b_start:b_end]),
            }
        )
    return segments
