"""Keyword-rule question answering.

A rule matches when every one of its keywords appears as a token of the
normalized utterance; among matching rules the one with the most keywords
wins, with table order breaking ties. Rows of the built-in table whose
words are alternatives (e.g. "dance" / "dancing") are expanded into one
single-keyword rule per variant sharing the answer; rows whose words must
co-occur (e.g. "can" + "walk") stay one conjunctive rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

_KEEP = set("abcdefghijklmnopqrstuvwxyz0123456789'")


@dataclass(frozen=True)
class ResponseRule:
    keywords: frozenset[str]
    answer: str
    rank: int

    def __post_init__(self) -> None:
        if not self.keywords:
            raise ValueError("a rule needs at least one keyword")
        if not self.answer:
            raise ValueError("a rule needs a non-empty answer")


@dataclass(frozen=True)
class MatchResult:
    """Best rule for an utterance, if any, plus the tokens that were matched."""

    matched: tuple[ResponseRule, int] | None
    normalized_utterance: tuple[str, ...]


def normalize(text: str) -> list[str]:
    """Lowercase, strip punctuation (keeping apostrophes), split on whitespace."""
    cleaned = "".join(c if c in _KEEP else " " for c in text.lower())
    return cleaned.split()


def match_rule(rules: Sequence[ResponseRule], utterance: str) -> MatchResult:
    tokens = tuple(normalize(utterance))
    token_set = set(tokens)
    best: tuple[ResponseRule, int] | None = None
    for rule in rules:
        if rule.keywords <= token_set:
            count = len(rule.keywords)
            if (
                best is None
                or count > best[1]
                or (count == best[1] and rule.rank < best[0].rank)
            ):
                best = (rule, count)
    return MatchResult(matched=best, normalized_utterance=tokens)


def respond(rules: Sequence[ResponseRule], utterance: str) -> str | None:
    """Answer for the best-matching rule, or ``None`` when nothing matches."""
    result = match_rule(rules, utterance)
    if result.matched is None:
        return None
    return result.matched[0].answer


# Built-in question table. Each entry is (keyword groups, answer): every
# group is one rule, and a group with several words requires all of them.
_ANSWER_WHERE = (
    "Oh, I'm sorry. I don't know where it is. "
    "Maybe you can ask the crew or security."
)
EXPLAIN_ANSWER = (
    "My name is Lumen. I am robot guide and you are now in Lumen Super "
    "Intelligence Agent stand. I was made to be a tour guide robot. I am "
    "able to explain about my stand. I can also amuse you with dancing and "
    "singing. I was made by Syarif, Taki, and Putri. That is all about me."
)
DANCE_ANSWER = (
    "Of course I can dance. I will dance a Gangnam Style. Watch carefully, ok."
)
SING_ANSWER = (
    "Of course I can sing. I will sing Manuk Jajali Song. "
    "I will switch my voice to female voice."
)
_ANSWER_EXHIBITION = (
    "You are now in Electrical Engineering Days Exhibition. It's an "
    "exhibition to show final project of the students. It is held by "
    "electrical engineering department of ITB. There are 49 stands of "
    "bachelor students including this stand. That is all about EE Days."
)
_ANSWER_MADE = (
    "I am nao robot platform. I am from Aldebaran Robotics, a French "
    "robotics company. But, Lumen is programmed by Syarif, Taki, and Putri."
)
_ANSWER_WHAT_DO = (
    "I can recognize human face. I can understand human language and "
    "respond to them. I can also amuse people with my dancing and singing. "
    "I can even walk, you know?"
)
_ANSWER_BUSY = (
    "Well, actually I can. But today is a busy day. "
    "I need to be in this position for a while. I'm sorry."
)
_ANSWER_STANDS = (
    "There are 49 stands. In each stand presented the final product of "
    "electrical engineering students. For more information, you can ask "
    "the stand directly."
)

_RULE_TABLE: tuple[tuple[tuple[tuple[str, ...], ...], str], ...] = (
    ((("name",),), "My name is Lumen"),
    ((("toilet",), ("pray",), ("room",), ("door",)), _ANSWER_WHERE),
    ((("explain",),), EXPLAIN_ANSWER),
    ((("dance",), ("dancing",)), DANCE_ANSWER),
    ((("sing",), ("singing",)), SING_ANSWER),
    ((("exhibition",), ("event",)), _ANSWER_EXHIBITION),
    ((("made",), ("create",)), _ANSWER_MADE),
    ((("what", "do"),), _ANSWER_WHAT_DO),
    ((("can", "walk"),), _ANSWER_BUSY),
    ((("can", "sit"),), _ANSWER_BUSY),
    ((("can", "run"),), "I want to, but no. I can't run."),
    ((("speak", "slow"),), "I am sorry. I can only talk at this tempo."),
    ((("tall",), ("height",)), "I'm about 57 cm high."),
    ((("weight",), ("fat",)), "My weight is 5.2 kg. I'm not fat, right?"),
    (
        (("play",),),
        "Well, I want to play with you. But, I can't play around. I need to "
        "be in this stand. But I can show you my dancing and singing.",
    ),
    (
        (("programmed",), ("program",)),
        "I was programmed by Syarif, Taki, and Putri.",
    ),
    (
        (("lumen",),),
        "Lumen is a humanoid robot designed to be an exhibition guide.",
    ),
    (
        (("aldebaran",),),
        "Aldebaran is a robotic company from French. That's all I can tell you.",
    ),
    ((("old",),), "I am very young."),
    ((("weather",),), "I think it is nice. I don't care anyway."),
    ((("kind", "stand"),), _ANSWER_STANDS),
)


def default_rules() -> tuple[ResponseRule, ...]:
    """The built-in rule set, ranks contiguous in table order."""
    rules: list[ResponseRule] = []
    for groups, answer in _RULE_TABLE:
        for group in groups:
            rules.append(
                ResponseRule(
                    keywords=frozenset(group), answer=answer, rank=len(rules)
                )
            )
    return tuple(rules)


def dump_rules(rules: Sequence[ResponseRule]) -> str:
    """Render rules as ``keyword[&keyword...] TAB answer`` lines."""
    lines = []
    for rule in sorted(rules, key=lambda r: r.rank):
        lines.append("&".join(sorted(rule.keywords)) + "\t" + rule.answer)
    return "\n".join(lines) + "\n"


def load_rules(text: str) -> tuple[ResponseRule, ...]:
    """Parse the :func:`dump_rules` format; blank lines are skipped."""
    rules: list[ResponseRule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip():
            continue
        keywords, sep, answer = line.partition("\t")
        if not sep or not keywords.strip() or not answer.strip():
            raise ValueError(f"line {lineno}: expected 'keywords<TAB>answer'")
        group = frozenset(k.strip().lower() for k in keywords.split("&") if k.strip())
        if not group:
            raise ValueError(f"line {lineno}: no keywords")
        rules.append(ResponseRule(keywords=group, answer=answer.strip(), rank=len(rules)))
    return tuple(rules)
