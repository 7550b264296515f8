from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from ..constants import GRID_SIZE, MAX_ENTITIES
from ..exceptions import DomainError

SHAPES: Tuple[str, ...] = ("circle", "square", "triangle", "bar")

COLOR_RGB: Dict[str, Tuple[int, int, int]] = {
    "red": (220, 30, 30),
    "green": (30, 170, 60),
    "blue": (30, 70, 220),
    "yellow": (240, 210, 20),
    "magenta": (210, 40, 200),
    "cyan": (20, 200, 210),
    "orange": (250, 130, 20),
    "purple": (110, 40, 160),
}

BACKGROUNDS: Tuple[str, ...] = ("white", "gray", "beige", "navy")
BACKGROUND_RGB: Dict[str, Tuple[int, int, int]] = {
    "white": (245, 245, 245),
    "gray": (120, 120, 120),
    "beige": (225, 205, 160),
    "navy": (15, 20, 70),
}

ROW_NAMES: Tuple[str, ...] = ("top", "middle", "bottom")
COLUMN_NAMES: Tuple[str, ...] = ("left", "center", "right")

ACTION_KINDS: Tuple[str, ...] = ("add", "recolor", "combine", "transform", "set_background")

N_CELLS = GRID_SIZE * GRID_SIZE


def cell_name(cell: int) -> str:
    if not 0 <= cell < N_CELLS:
        raise DomainError("cell_name", f"cell {cell} outside the {GRID_SIZE}x{GRID_SIZE} grid")
    row, column = divmod(cell, GRID_SIZE)
    if row == 1 and column == 1:
        return "center"
    return f"{ROW_NAMES[row]} {COLUMN_NAMES[column]}"


CELL_NAMES: Tuple[str, ...] = tuple(cell_name(cell) for cell in range(N_CELLS))


def cell_from_name(name: str) -> int:
    try:
        return CELL_NAMES.index(name)
    except ValueError as e:
        raise DomainError("cell_from_name", f"unknown cell '{name}'") from e


@dataclass(frozen=True)
class Entity:
    shape: str
    color: str
    cell: int
    size: int = 1
    mixture: bool = False

    def __post_init__(self) -> None:
        if self.shape not in SHAPES:
            raise DomainError("Entity", f"unknown shape '{self.shape}'")
        if self.color not in COLOR_RGB:
            raise DomainError("Entity", f"unknown color '{self.color}'")
        if not 0 <= self.cell < N_CELLS:
            raise DomainError("Entity", f"cell {self.cell} outside the grid")
        if self.size not in (1, 2):
            raise DomainError("Entity", f"size must be 1 or 2, got {self.size}")

    @property
    def rgb(self) -> Tuple[int, int, int]:
        return COLOR_RGB[self.color]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shape": self.shape,
            "color": self.color,
            "cell": self.cell,
            "size": self.size,
            "mixture": self.mixture,
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "Entity":
        return Entity(
            shape=data["shape"],
            color=data["color"],
            cell=int(data["cell"]),
            size=int(data.get("size", 1)),
            mixture=bool(data.get("mixture", False)),
        )


@dataclass(frozen=True)
class Workspace:
    """Desk state: a background and at most one entity per grid cell."""

    background_id: int = 0
    entities: Tuple[Entity, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not 0 <= self.background_id < len(BACKGROUNDS):
            raise DomainError("Workspace", f"unknown background id {self.background_id}")
        if len(self.entities) > MAX_ENTITIES:
            raise DomainError("Workspace", f"at most {MAX_ENTITIES} entities, got {len(self.entities)}")
        cells = [entity.cell for entity in self.entities]
        if len(set(cells)) != len(cells):
            raise DomainError("Workspace", "two entities share a cell")
        object.__setattr__(self, "entities", tuple(sorted(self.entities, key=lambda e: e.cell)))

    @property
    def background(self) -> str:
        return BACKGROUNDS[self.background_id]

    def entity_at(self, cell: int) -> Optional[Entity]:
        for entity in self.entities:
            if entity.cell == cell:
                return entity
        return None

    def free_cells(self) -> List[int]:
        taken = {entity.cell for entity in self.entities}
        return [cell for cell in range(N_CELLS) if cell not in taken]

    def mixtures(self) -> List[Entity]:
        return [entity for entity in self.entities if entity.mixture]

    def with_entity(self, entity: Entity) -> "Workspace":
        others = tuple(e for e in self.entities if e.cell != entity.cell)
        return replace(self, entities=others + (entity,))

    def without_cell(self, cell: int) -> "Workspace":
        return replace(self, entities=tuple(e for e in self.entities if e.cell != cell))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "background_id": self.background_id,
            "entities": [entity.to_dict() for entity in self.entities],
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "Workspace":
        return Workspace(
            background_id=int(data.get("background_id", 0)),
            entities=tuple(Entity.from_dict(item) for item in data.get("entities", [])),
        )


@dataclass(frozen=True)
class Action:
    """One edit of a workspace.

    ``target`` and ``other`` are cells of the workspace the action applies to;
    ``other`` is only used by combine.
    """

    kind: str
    target: Optional[int] = None
    other: Optional[int] = None
    shape: Optional[str] = None
    color: Optional[str] = None
    background_id: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in ACTION_KINDS:
            raise DomainError("Action", f"unknown action '{self.kind}'")

    def to_dict(self) -> Dict[str, Any]:
        return {key: value for key, value in self.__dict__.items() if value is not None}

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "Action":
        return Action(**data)


def apply_action(workspace: Workspace, action: Action) -> Tuple[Workspace, Optional[int]]:
    """Apply ``action`` and return the new workspace with the focus cell.

    The focus cell is the cell of the entity the action leaves behind
    (None for background changes).
    """
    if action.kind == "add":
        if action.target is None or action.shape is None or action.color is None:
            raise DomainError("add", "needs a cell, a shape and a color")
        if workspace.entity_at(action.target) is not None:
            raise DomainError("add", f"cell {cell_name(action.target)} is occupied")
        entity = Entity(shape=action.shape, color=action.color, cell=action.target)
        return workspace.with_entity(entity), action.target

    if action.kind == "set_background":
        if action.background_id is None:
            raise DomainError("set_background", "needs a background")
        return replace(workspace, background_id=action.background_id), None

    target = workspace.entity_at(action.target) if action.target is not None else None
    if target is None:
        raise DomainError(action.kind, f"no entity at cell {action.target}")

    if action.kind == "recolor":
        if action.color is None or action.color == target.color:
            raise DomainError("recolor", "needs a different color")
        return workspace.with_entity(replace(target, color=action.color)), target.cell

    if action.kind == "transform":
        if action.shape is None or action.shape == target.shape:
            raise DomainError("transform", "needs a different shape")
        return workspace.with_entity(replace(target, shape=action.shape)), target.cell

    other = workspace.entity_at(action.other) if action.other is not None else None
    if other is None or other.cell == target.cell:
        raise DomainError("combine", "needs a second, distinct entity")
    merged = replace(target, size=2, mixture=True)
    return workspace.without_cell(other.cell).with_entity(merged), target.cell


__all__ = [
    "SHAPES",
    "COLOR_RGB",
    "BACKGROUNDS",
    "BACKGROUND_RGB",
    "CELL_NAMES",
    "ACTION_KINDS",
    "N_CELLS",
    "cell_name",
    "cell_from_name",
    "Entity",
    "Workspace",
    "Action",
    "apply_action",
]
