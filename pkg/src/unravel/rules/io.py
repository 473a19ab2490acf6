"""Textual decision-list format.

    IF "key"=LEVEL AND "other key"=LEVEL THEN class (a/b)
    ...
    DEFAULT class

Keys are double-quoted (JSON string escaping); levels are the ASCII
renderings --, -, 0, +, ++. Writing, parsing, and writing again yields
byte-identical files.
"""

from __future__ import annotations

import json
import re

from ..skipgrams import LEVELS
from .part import DecisionList, Rule, Test
from .tree import InductionParams

_RULE_RE = re.compile(r"^IF (?P<tests>.+) THEN (?P<cls>\S+) \((?P<a>\d+)/(?P<b>\d+)\)$")
_DEFAULT_RE = re.compile(r"^DEFAULT (?P<cls>\S+)$")
_DECODER = json.JSONDecoder()


class RuleFormatError(ValueError):
    pass


def render_rule(rule: Rule) -> str:
    tests = " AND ".join(
        f"{json.dumps(t.key)}={LEVELS[t.level]}" for t in rule.tests
    )
    return f"IF {tests} THEN {rule.consequent} ({rule.a}/{rule.b})"


def render_decision_list(decision_list: DecisionList) -> str:
    lines = [render_rule(rule) for rule in decision_list.rules]
    lines.append(f"DEFAULT {decision_list.default}")
    return "\n".join(lines) + "\n"


def save_decision_list(decision_list: DecisionList, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_decision_list(decision_list))


def _parse_test(fragment: str, path: str, line_no: int) -> Test:
    try:
        key, end = _DECODER.raw_decode(fragment)
    except json.JSONDecodeError as exc:
        raise RuleFormatError(
            f"{path}:{line_no}: bad quoted key in {fragment!r}"
        ) from exc
    rest = fragment[end:]
    if not rest.startswith("="):
        raise RuleFormatError(f"{path}:{line_no}: expected '=' after key")
    level = rest[1:]
    if level not in LEVELS:
        raise RuleFormatError(f"{path}:{line_no}: unknown level {level!r}")
    return Test(key=key, level=LEVELS.index(level))


def _split_tests(text: str) -> list[str]:
    # skipgram keys are lowercase by invariant, so the uppercase
    # separator cannot occur inside a quoted key
    return text.split(" AND ")


def parse_decision_list(
    text: str, path: str = "<string>", params: InductionParams | None = None
) -> DecisionList:
    rules: list[Rule] = []
    default: str | None = None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    for line_no, line in enumerate(lines, start=1):
        if default is not None:
            raise RuleFormatError(f"{path}:{line_no}: content after DEFAULT line")
        match = _DEFAULT_RE.match(line)
        if match:
            default = match.group("cls")
            continue
        match = _RULE_RE.match(line)
        if match is None:
            raise RuleFormatError(f"{path}:{line_no}: unparseable rule line {line!r}")
        tests = tuple(
            _parse_test(frag, path, line_no)
            for frag in _split_tests(match.group("tests"))
        )
        rules.append(
            Rule(
                tests=tests,
                consequent=match.group("cls"),
                a=int(match.group("a")),
                b=int(match.group("b")),
            )
        )
    if default is None:
        raise RuleFormatError(f"{path}: missing DEFAULT line")
    keys = tuple(dict.fromkeys(t.key for rule in rules for t in rule.tests))
    return DecisionList(
        rules=rules,
        default=default,
        params=params or InductionParams(),
        keys=keys,
    )


def load_decision_list(path: str, params: InductionParams | None = None) -> DecisionList:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_decision_list(fh.read(), path=path, params=params)
