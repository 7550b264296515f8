from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from ..exceptions import DomainError, UnresolvedReference
from ..logger import get_logger
from ..synthio.corpus import Step
from ..synthio.grammar import IT, THE_MIXTURE, ParsedSentence, describe_entity, match_entities, parse_sentence, sentence
from ..synthio.workspace import Action, Entity, Workspace, apply_action

logger = get_logger()

HistoryItem = Union[str, Step]


@dataclass(frozen=True)
class _State:
    workspace: Workspace
    focus: Optional[int]


def _raw(item: HistoryItem) -> str:
    return item.raw_text if isinstance(item, Step) else item


def _parse(text: str) -> ParsedSentence:
    try:
        return parse_sentence(text)
    except DomainError as e:
        raise UnresolvedReference(text, text, "not a step sentence") from e


def _antecedent_of(parsed: ParsedSentence, index: int, hint: Optional[int], text: str) -> int:
    if parsed.source_step is not None:
        antecedent = parsed.source_step
    elif hint is not None:
        antecedent = hint
    else:
        antecedent = index - 1
    if not 0 <= antecedent < index:
        raise UnresolvedReference(f"from step {antecedent}", text, f"step {index} can only build on steps before it")
    return antecedent


def _resolve_phrase(phrase: str, text: str, antecedent: int, states: Sequence[_State]) -> Entity:
    state = states[antecedent]
    if phrase == IT:
        entity = state.workspace.entity_at(state.focus) if state.focus is not None else None
        if entity is None:
            raise UnresolvedReference(phrase, text, f"step {antecedent} left nothing in focus")
        return entity
    if phrase == THE_MIXTURE:
        mixtures = state.workspace.mixtures()
        if len(mixtures) != 1:
            raise UnresolvedReference(phrase, text, f"{len(mixtures)} mixtures on the desk")
        return mixtures[0]

    matches = match_entities(phrase, state.workspace)
    if len(matches) == 1:
        return matches[0]
    if len(matches) > 1:
        raise UnresolvedReference(phrase, text, "ambiguous")
    raise UnresolvedReference(phrase, text, f"no such entity after step {antecedent}")


def _to_action(parsed: ParsedSentence, targets: List[Entity]) -> Action:
    if parsed.kind == "add":
        return Action("add", target=parsed.cell, shape=parsed.shape, color=parsed.color)
    if parsed.kind == "set_background":
        return Action("set_background", background_id=parsed.background_id)
    target = targets[0].cell
    if parsed.kind == "combine":
        return Action("combine", target=target, other=targets[1].cell)
    return Action(parsed.kind, target=target, shape=parsed.shape, color=parsed.color)


def _replay(history: Sequence[HistoryItem]) -> List[_State]:
    """Workspace state after every history step, index 0 being the empty desk."""
    states = [_State(Workspace(), None)]
    for index, item in enumerate(history, start=1):
        text = _raw(item)
        parsed = _parse(text)
        antecedent = _antecedent_of(parsed, index, None, text)
        targets = [_resolve_phrase(phrase, text, antecedent, states) for phrase in parsed.phrases]
        try:
            workspace, focus = apply_action(states[antecedent].workspace, _to_action(parsed, targets))
        except DomainError as e:
            raise UnresolvedReference(text, text, f"step {index} cannot be replayed: {e.reason}") from e
        states.append(_State(workspace, focus))
    return states


def _explicit_phrase(phrase: str, text: str, antecedent: int, states: Sequence[_State]) -> str:
    # an already explicit phrase may come from any earlier state once its prefix is gone
    try:
        _resolve_phrase(phrase, text, antecedent, states)
        return phrase
    except UnresolvedReference as first_error:
        for state in reversed(states):
            if len(match_entities(phrase, state.workspace)) == 1:
                return phrase
        raise first_error


def contextualize(
    raw_text: str,
    history: Sequence[HistoryItem],
    antecedent_hint: Optional[int] = None,
) -> str:
    """Rewrite ``raw_text`` into a self-contained caption.

    ``history`` holds the raw texts (or Steps) of the steps before it, in
    order. "it" and "the mixture" are replaced by explicit descriptions of the
    entities they name in the antecedent state, and any "from step k ," prefix
    is dropped. Anything that cannot be resolved raises UnresolvedReference.
    """
    states = _replay(history)
    parsed = _parse(raw_text)
    index = len(history) + 1
    antecedent = _antecedent_of(parsed, index, antecedent_hint, raw_text)
    workspace = states[antecedent].workspace

    if parsed.kind in ("add", "set_background"):
        caption = sentence(_to_action(parsed, []))
    else:
        phrases: List[str] = []
        for phrase in parsed.phrases:
            if phrase in (IT, THE_MIXTURE):
                entity = _resolve_phrase(phrase, raw_text, antecedent, states)
                phrases.append(describe_entity(entity, workspace))
            else:
                phrases.append(_explicit_phrase(phrase, raw_text, antecedent, states))
        action = Action(parsed.kind, shape=parsed.shape, color=parsed.color)
        caption = sentence(action, phrases[0], phrases[1] if len(phrases) > 1 else None)

    logger.trace("Contextualized '%s' -> '%s'", raw_text, caption)
    return caption


def contextualize_task(steps: Sequence[Step]) -> List[Tuple[str, str]]:
    """(raw, caption) for every step of a task."""
    return [(step.raw_text, contextualize(step.raw_text, steps[: step.index - 1])) for step in steps]


__all__ = ["contextualize", "contextualize_task"]
