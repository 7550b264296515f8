import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .workspace import (
    BACKGROUNDS,
    CELL_NAMES,
    COLOR_RGB,
    SHAPES,
    Action,
    Entity,
    Workspace,
    cell_from_name,
    cell_name,
)
from ..constants import MAX_STEPS_PER_TASK, MAX_TEXT_TOKENS
from ..exceptions import DomainError

IT = "it"
THE_MIXTURE = "the mixture"

FUNCTION_WORDS: Tuple[str, ...] = (
    "a", "add", "at", "background", "combine", "from", "into", "it", "large",
    "mixture", "recolor", "set", "step", "the", "to", "turn", "with", ",",
)

_PREFIX = re.compile(r"^from step (?P<step>\d+) , (?P<rest>.+)$")
_ADD = re.compile(r"^add a (?P<color>\S+) (?P<shape>\S+) at the (?P<cell>.+)$")
_RECOLOR = re.compile(r"^recolor (?P<target>.+) (?P<color>\S+)$")
_COMBINE = re.compile(r"^combine (?P<target>.+) with (?P<other>.+)$")
_TRANSFORM = re.compile(r"^turn (?P<target>.+) into a (?P<shape>\S+)$")
_BACKGROUND = re.compile(r"^set the background to (?P<background>\S+)$")
_NOUN_PHRASE = re.compile(r"^the (?:(?P<large>large) )?(?P<color>\S+) (?P<shape>\S+)(?: at the (?P<cell>.+))?$")


def vocabulary_tokens() -> List[str]:
    """Every token the step grammar can produce, sorted."""
    tokens = set(FUNCTION_WORDS)
    tokens.update(COLOR_RGB)
    tokens.update(SHAPES)
    tokens.update(BACKGROUNDS)
    for name in CELL_NAMES:
        tokens.update(name.split())
    tokens.update(str(step) for step in range(1, MAX_STEPS_PER_TASK + 1))
    ordered = sorted(tokens)
    if len(ordered) > MAX_TEXT_TOKENS:
        raise DomainError("vocabulary_tokens", f"grammar exceeds {MAX_TEXT_TOKENS} tokens")
    return ordered


def _bare_description(entity: Entity) -> str:
    size_word = "large " if entity.size == 2 else ""
    return f"the {size_word}{entity.color} {entity.shape}"


def describe_entity(entity: Entity, workspace: Workspace) -> str:
    """Explicit noun phrase for ``entity``; the cell is named only when needed
    to tell it apart from a look-alike."""
    bare = _bare_description(entity)
    lookalikes = [e for e in workspace.entities if _bare_description(e) == bare]
    if len(lookalikes) > 1:
        return f"{bare} at the {cell_name(entity.cell)}"
    return bare


def match_entities(phrase: str, workspace: Workspace) -> List[Entity]:
    found = _NOUN_PHRASE.match(phrase)
    if not found:
        return []
    size = 2 if found.group("large") else 1
    matches = [
        entity
        for entity in workspace.entities
        if entity.color == found.group("color")
        and entity.shape == found.group("shape")
        and entity.size == size
    ]
    if found.group("cell"):
        try:
            cell = cell_from_name(found.group("cell"))
        except DomainError:
            return []
        matches = [entity for entity in matches if entity.cell == cell]
    return matches


def sentence(action: Action, target_phrase: Optional[str] = None, other_phrase: Optional[str] = None) -> str:
    if action.kind == "add":
        return f"add a {action.color} {action.shape} at the {cell_name(action.target or 0)}"
    if action.kind == "set_background":
        return f"set the background to {BACKGROUNDS[action.background_id or 0]}"
    if action.kind == "recolor":
        return f"recolor {target_phrase} {action.color}"
    if action.kind == "transform":
        return f"turn {target_phrase} into a {action.shape}"
    return f"combine {target_phrase} with {other_phrase}"


def _referring_expression(
    entity: Entity, workspace: Workspace, antecedent_focus: Optional[int], allow_it: bool
) -> str:
    if allow_it and antecedent_focus == entity.cell:
        return IT
    if entity.mixture and len(workspace.mixtures()) == 1:
        return THE_MIXTURE
    return describe_entity(entity, workspace)


def describe_step(
    action: Action,
    workspace: Workspace,
    index: int,
    antecedent: int,
    antecedent_focus: Optional[int] = None,
) -> Tuple[str, str]:
    """Raw and resolved text of a step applying ``action`` to ``workspace``.

    ``workspace`` is the antecedent state. The raw text refers back with
    "it" (the antecedent step's focus entity), "the mixture" (the only mixture
    on the desk) and a "from step k ," prefix when the antecedent is not the
    previous step. The resolved text spells every entity out.
    """
    target = workspace.entity_at(action.target) if action.target is not None else None
    other = workspace.entity_at(action.other) if action.other is not None else None

    if action.kind in ("add", "set_background"):
        resolved = sentence(action)
        raw = resolved
    else:
        if target is None:
            raise DomainError("describe_step", f"no entity at cell {action.target}")
        resolved_other = describe_entity(other, workspace) if other is not None else None
        resolved = sentence(action, describe_entity(target, workspace), resolved_other)
        raw_target = _referring_expression(target, workspace, antecedent_focus, allow_it=True)
        raw_other = (
            _referring_expression(other, workspace, antecedent_focus, allow_it=raw_target != IT)
            if other is not None
            else None
        )
        if raw_target == THE_MIXTURE and raw_other == THE_MIXTURE:
            raw_other = describe_entity(other, workspace)  # type: ignore[arg-type]
        raw = sentence(action, raw_target, raw_other)

    if index >= 2 and 1 <= antecedent != index - 1:
        raw = f"from step {antecedent} , {raw}"
    return raw, resolved


@dataclass(frozen=True)
class ParsedSentence:
    kind: str
    source_step: Optional[int] = None
    target: Optional[str] = None
    other: Optional[str] = None
    shape: Optional[str] = None
    color: Optional[str] = None
    cell: Optional[int] = None
    background_id: Optional[int] = None

    @property
    def phrases(self) -> List[str]:
        return [phrase for phrase in (self.target, self.other) if phrase is not None]


def parse_sentence(text: str) -> ParsedSentence:
    text = " ".join(text.split())
    source_step: Optional[int] = None
    prefixed = _PREFIX.match(text)
    if prefixed:
        source_step = int(prefixed.group("step"))
        text = prefixed.group("rest")

    found = _ADD.match(text)
    if found:
        return ParsedSentence(
            kind="add",
            source_step=source_step,
            color=found.group("color"),
            shape=found.group("shape"),
            cell=cell_from_name(found.group("cell")),
        )
    found = _BACKGROUND.match(text)
    if found:
        if found.group("background") not in BACKGROUNDS:
            raise DomainError("parse_sentence", f"unknown background '{found.group('background')}'")
        return ParsedSentence(
            kind="set_background",
            source_step=source_step,
            background_id=BACKGROUNDS.index(found.group("background")),
        )
    found = _COMBINE.match(text)
    if found:
        return ParsedSentence(
            kind="combine", source_step=source_step, target=found.group("target"), other=found.group("other")
        )
    found = _TRANSFORM.match(text)
    if found:
        return ParsedSentence(
            kind="transform", source_step=source_step, target=found.group("target"), shape=found.group("shape")
        )
    found = _RECOLOR.match(text)
    if found:
        return ParsedSentence(
            kind="recolor", source_step=source_step, target=found.group("target"), color=found.group("color")
        )
    raise DomainError("parse_sentence", f"'{text}' is not a step sentence")


__all__ = [
    "IT",
    "THE_MIXTURE",
    "vocabulary_tokens",
    "describe_entity",
    "match_entities",
    "sentence",
    "describe_step",
    "ParsedSentence",
    "parse_sentence",
]
