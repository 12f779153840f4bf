"""Fifteen-state conversation engine for the exhibition guide.

Transitions are driven by lettered conditions (visitor present, face
recognized, request kinds, ...) plus a 20-second face-absence timeout.
States that finish on their own (saving a name, replying to a greeting,
completing a dance) chain onward through a distinguished automatic
condition. Unknown (state, condition) pairs are identity transitions, so
:func:`step` is total.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .gender import GenderLabel
from .qa import DANCE_ANSWER, EXPLAIN_ANSWER, SING_ANSWER, normalize

MAX_NAME_RETRIES = 2
TIMEOUT_SECONDS = 20.0


class Condition(Enum):
    """External events (Table of lettered conditions) plus the internal
    automatic marker used when a state completes on its own."""

    PERSON = "A"
    NO_PERSON = "!A"
    FACE_RECOGNIZED = "B"
    FACE_UNRECOGNIZED = "!B"
    NAME_GIVEN = "C"
    NO_NAME = "!C"
    GREETING_ANSWERED = "D"
    NO_GREETING = "!D"
    EXPLAIN_REQUEST = "E"
    DANCE_REQUEST = "F"
    SONG_REQUEST = "G"
    QUESTION_RECOGNIZED = "H"
    QUESTION_UNRECOGNIZED = "!H"
    NOTHING_ELSE = "I"
    PICTURE_REQUEST = "J"
    TIMEOUT_20S = "timeout20s"
    AUTO = "auto"


class Posture(Enum):
    STAND = "Stand"
    STAND_INIT = "StandInit"
    STAND_ZERO = "StandZero"
    SIT = "Sit"
    SIT_RELAX = "SitRelax"
    CROUCH = "Crouch"


class ActionKind(Enum):
    SPEAK = "Speak"
    POSTURE = "Posture"
    DANCE = "Dance"
    PLAY_SONG = "PlaySong"
    WAVE_HANDS = "WaveHands"
    POSE_PICTURE = "PosePicture"
    SAVE_NAME_FACE = "SaveNameFace"


@dataclass(frozen=True)
class RobotAction:
    kind: ActionKind
    text: str | None = None
    posture: Posture | None = None

    def __post_init__(self) -> None:
        if self.kind is ActionKind.SPEAK and not self.text:
            raise ValueError("Speak needs non-empty text")
        if self.kind is ActionKind.POSTURE and not isinstance(self.posture, Posture):
            raise ValueError("Posture needs one of the basic postures")
        if self.kind is ActionKind.SAVE_NAME_FACE and not self.text:
            raise ValueError("SaveNameFace needs a name")

    def describe(self) -> str:
        if self.kind is ActionKind.SPEAK:
            return f'Speak "{self.text}"'
        if self.kind is ActionKind.POSTURE:
            assert self.posture is not None
            return f"Posture {self.posture.value}"
        if self.kind is ActionKind.SAVE_NAME_FACE:
            return f"SaveNameFace {self.text}"
        return self.kind.value


def speak(text: str) -> RobotAction:
    return RobotAction(ActionKind.SPEAK, text=text)


def posture(value: Posture) -> RobotAction:
    return RobotAction(ActionKind.POSTURE, posture=value)


STATE_DESCRIPTIONS: dict[int, str] = {
    1: "Standby.",
    2: "Stand, face recognizing, face tracking, introduction.",
    3: "Asking name.",
    4: "Greeting with people's name",
    5: "Saving new name and face.",
    6: "Saying goodbye, waving hand.",
    7: "Replying greeting.",
    8: "Asking if there's any request.",
    9: "Explaining about the product in stand.",
    10: "Dancing",
    11: "Singing.",
    12: "Making pose to take picture.",
    13: "Answer first question.",
    14: "Asking if there's anything else.",
    15: "Answering a question.",
}


@dataclass(frozen=True)
class DialogueState:
    id: int
    description: str

    def __post_init__(self) -> None:
        if self.id not in STATE_DESCRIPTIONS:
            raise ValueError(f"no state numbered {self.id}")


def dialogue_state(state_id: int) -> DialogueState:
    return DialogueState(id=state_id, description=STATE_DESCRIPTIONS[state_id])


@dataclass(frozen=True)
class SessionContext:
    current_state: DialogueState
    visitor_name: str | None = None
    visitor_gender: GenderLabel | None = None
    seconds_since_face_seen: float = 0.0
    name_retries: int = 0

    def __post_init__(self) -> None:
        if self.seconds_since_face_seen < 0:
            raise ValueError("face-absence time cannot be negative")


def new_session() -> SessionContext:
    return SessionContext(current_state=dialogue_state(1))


# Conditioned arcs. The name-question retry cap and the automatic arcs out
# of states 5, 6, 7, 9-13 and 15 are design choices; nothing in the state
# descriptions forces them.
_TRANSITIONS: dict[tuple[int, Condition], int] = {
    (1, Condition.PERSON): 2,
    (2, Condition.FACE_RECOGNIZED): 4,
    (2, Condition.FACE_UNRECOGNIZED): 3,
    (3, Condition.NAME_GIVEN): 5,
    (3, Condition.NO_NAME): 3,
    (4, Condition.GREETING_ANSWERED): 7,
    (4, Condition.NO_GREETING): 8,
    (8, Condition.EXPLAIN_REQUEST): 9,
    (8, Condition.DANCE_REQUEST): 10,
    (8, Condition.SONG_REQUEST): 11,
    (8, Condition.PICTURE_REQUEST): 12,
    (8, Condition.QUESTION_RECOGNIZED): 13,
    (8, Condition.QUESTION_UNRECOGNIZED): 8,
    (8, Condition.NOTHING_ELSE): 6,
    (14, Condition.QUESTION_RECOGNIZED): 15,
    (14, Condition.NOTHING_ELSE): 6,
    (5, Condition.AUTO): 4,
    (6, Condition.AUTO): 1,
    (7, Condition.AUTO): 8,
    (9, Condition.AUTO): 14,
    (10, Condition.AUTO): 14,
    (11, Condition.AUTO): 14,
    (12, Condition.AUTO): 14,
    (13, Condition.AUTO): 14,
    (15, Condition.AUTO): 14,
}
for _state_id in range(2, 16):
    _TRANSITIONS[(_state_id, Condition.TIMEOUT_20S)] = 6

# Saving a name or replying to a greeting completes instantly, so those
# states chain onward within the same step; the others wait for the host
# to signal action completion.
IMMEDIATE_AUTO_STATES = frozenset({5, 7})

INTRODUCTION_TEXT = "Hello, my name is Lumen. I am a robot guide. Nice to meet you."
ASK_NAME_TEXT = "May I know your name?"
ASK_NAME_RETRY_TEXT = "I am sorry, I did not catch your name. May I know your name?"
REPLY_HAPPY_TEXT = "I am happy to hear that"
REPLY_SORRY_TEXT = "I am sorry to hear that, get well soon."
REPLY_REASK_TEXT = "How are you today?"
APOLOGY_TEXT = "I am sorry, I do not understand the question."
ASK_ANYTHING_ELSE_TEXT = "Is there anything else I can help you with?"
GOODBYE_TEXT = "Goodbye, nice to meet you."
PICTURE_TEXT = "Sure, let us take a picture together. Smile!"

def honorific(gender: GenderLabel) -> str:
    return "Sir" if gender is GenderLabel.MALE else "Ma'am"


def assist_prompt(gender: GenderLabel | None) -> str:
    if gender is None:
        return "what can I help you?"
    return f"what can I help you, {honorific(gender)}?"


def greet_response(answer_text: str) -> str:
    """Reply to the how-are-you answer; unintelligible answers re-ask."""
    tokens = normalize(answer_text)
    for first, second in zip(tokens, tokens[1:]):
        if (first, second) == ("not", "fine"):
            return REPLY_SORRY_TEXT
    if "fine" in tokens:
        return REPLY_HAPPY_TEXT
    return REPLY_REASK_TEXT


def _greeting(name: str | None) -> str:
    if name:
        return f"Good morning, how are you today {name}?"
    return "Good morning, how are you today?"


def _entry_actions(
    state_id: int, context: SessionContext, text: str | None
) -> list[RobotAction]:
    if state_id == 2:
        return [posture(Posture.STAND), speak(INTRODUCTION_TEXT)]
    if state_id == 3:
        return [speak(ASK_NAME_TEXT)]
    if state_id == 4:
        return [speak(_greeting(context.visitor_name))]
    if state_id == 5:
        return [RobotAction(ActionKind.SAVE_NAME_FACE, text=context.visitor_name)]
    if state_id == 6:
        return [speak(GOODBYE_TEXT), RobotAction(ActionKind.WAVE_HANDS), posture(Posture.SIT)]
    if state_id == 7:
        return [speak(greet_response(text or ""))]
    if state_id == 8:
        return [speak(assist_prompt(context.visitor_gender))]
    if state_id == 9:
        return [speak(EXPLAIN_ANSWER)]
    if state_id == 10:
        return [speak(DANCE_ANSWER), RobotAction(ActionKind.DANCE)]
    if state_id == 11:
        return [speak(SING_ANSWER), RobotAction(ActionKind.PLAY_SONG)]
    if state_id == 12:
        return [speak(PICTURE_TEXT), RobotAction(ActionKind.POSE_PICTURE)]
    if state_id in (13, 15):
        assert text is not None
        return [speak(text)]
    if state_id == 14:
        return [speak(ASK_ANYTHING_ELSE_TEXT)]
    return []


def step(
    context: SessionContext, condition: Condition, text: str | None = None
) -> tuple[SessionContext, list[RobotAction]]:
    """Apply one transition; unknown pairs leave everything unchanged.

    ``text`` carries the condition's payload: the visitor's name for
    NAME_GIVEN, their greeting answer for GREETING_ANSWERED, and the
    already-resolved answer for QUESTION_RECOGNIZED.
    """
    state_id = context.current_state.id
    key = (state_id, condition)
    if key not in _TRANSITIONS:
        return context, []
    target = _TRANSITIONS[key]

    if condition is Condition.QUESTION_RECOGNIZED and not text:
        raise ValueError("QUESTION_RECOGNIZED needs the answer text")

    if key == (3, Condition.NO_NAME):
        if context.name_retries >= MAX_NAME_RETRIES:
            # Give up on the name and move on to taking requests.
            updated = replace(context, current_state=dialogue_state(8), name_retries=0)
            return updated, _entry_actions(8, updated, None)
        updated = replace(context, name_retries=context.name_retries + 1)
        return updated, [speak(ASK_NAME_RETRY_TEXT)]

    if key == (8, Condition.QUESTION_UNRECOGNIZED):
        return context, [speak(APOLOGY_TEXT), speak(assist_prompt(context.visitor_gender))]

    updated = replace(context, current_state=dialogue_state(target))
    if condition is Condition.NAME_GIVEN and text:
        updated = replace(updated, visitor_name=text.strip())
    if condition is Condition.FACE_RECOGNIZED and text:
        updated = replace(updated, visitor_name=text.strip())
    if key == (6, Condition.AUTO):
        # Back to standby: the visitor is gone, forget them.
        updated = replace(
            updated,
            visitor_name=None,
            visitor_gender=None,
            seconds_since_face_seen=0.0,
            name_retries=0,
        )
    return updated, _entry_actions(target, updated, text)


def auto_successor(state_id: int) -> int | None:
    return _TRANSITIONS.get((state_id, Condition.AUTO))


def advance(
    context: SessionContext, condition: Condition, text: str | None = None
) -> tuple[SessionContext, list[RobotAction]]:
    """Apply a condition, then chase every automatic transition."""
    context, actions = step(context, condition, text)
    while auto_successor(context.current_state.id) is not None:
        context, more = step(context, Condition.AUTO)
        actions.extend(more)
    return context, actions


def export_transitions() -> str:
    """Render the transition table as ``state, condition -> state`` lines."""
    lines = [
        f"{state_id}, {condition.value} -> {target}"
        for (state_id, condition), target in sorted(
            _TRANSITIONS.items(), key=lambda item: (item[0][0], item[0][1].value)
        )
    ]
    return "\n".join(lines) + "\n"


def log_line(state_id: int, condition: Condition, action: RobotAction) -> str:
    return f"STATE {state_id} | COND {condition.value} | ACTION {action.describe()}"


class Conversation:
    """Single-session state holder over the pure transition functions."""

    def __init__(self, context: SessionContext | None = None) -> None:
        self.context = context if context is not None else new_session()

    @property
    def state_id(self) -> int:
        return self.context.current_state.id

    def step(self, condition: Condition, text: str | None = None) -> list[RobotAction]:
        self.context, actions = step(self.context, condition, text)
        return actions

    def advance(self, condition: Condition, text: str | None = None) -> list[RobotAction]:
        self.context, actions = advance(self.context, condition, text)
        return actions
