from typing import Tuple

import numpy as np
from PIL import Image, ImageDraw

from .workspace import BACKGROUND_RGB, Entity, Workspace
from ..constants import GRID_SIZE
from ..exceptions import DomainError
from ..logger import get_logger

logger = get_logger()

Box = Tuple[int, int, int, int]


def cell_box(cell: int, size: int) -> Box:
    """Inclusive pixel bounds (x0, y0, x1, y1) of a grid cell."""
    row, column = divmod(cell, GRID_SIZE)
    x0 = column * size // GRID_SIZE
    x1 = (column + 1) * size // GRID_SIZE - 1
    y0 = row * size // GRID_SIZE
    y1 = (row + 1) * size // GRID_SIZE - 1
    return x0, y0, x1, y1


def cell_center(cell: int, size: int) -> Tuple[int, int]:
    """(row, column) pixel index of the middle of a cell."""
    x0, y0, x1, y1 = cell_box(cell, size)
    return (y0 + y1) // 2, (x0 + x1) // 2


def entity_box(entity: Entity, size: int) -> Box:
    x0, y0, x1, y1 = cell_box(entity.cell, size)
    if entity.size == 1:
        inset = max(1, (x1 - x0 + 1) // 4)
        return x0 + inset, y0 + inset, x1 - inset, y1 - inset
    return x0, y0, x1, y1


def _draw_entity(draw: ImageDraw.ImageDraw, entity: Entity, size: int) -> None:
    x0, y0, x1, y1 = entity_box(entity, size)
    fill = entity.rgb
    if entity.shape == "circle":
        draw.ellipse([x0, y0, x1, y1], fill=fill)
    elif entity.shape == "square":
        draw.rectangle([x0, y0, x1, y1], fill=fill)
    elif entity.shape == "triangle":
        draw.polygon([(x0, y1), (x1, y1), ((x0 + x1) // 2, y0)], fill=fill)
    else:
        middle = (y0 + y1) // 2
        half = max(0, (y1 - y0) // 4)
        draw.rectangle([x0, middle - half, x1, middle + half], fill=fill)


def render_image(workspace: Workspace, size: int = 16) -> Image.Image:
    if size < GRID_SIZE * 3:
        raise DomainError("render_scene", f"image size {size} too small for the grid")
    image = Image.new("RGB", (size, size), BACKGROUND_RGB[workspace.background])
    draw = ImageDraw.Draw(image)
    for entity in workspace.entities:
        _draw_entity(draw, entity, size)
    return image


def render_scene(workspace: Workspace, size: int = 16) -> np.ndarray:
    """Rasterize a workspace to a (size, size, 3) float32 array in [0, 1]."""
    pixels = np.asarray(render_image(workspace, size), dtype=np.float32) / 255.0
    logger.trace("Rendered workspace with %d entities at %dpx", len(workspace.entities), size)
    return pixels


def to_pil(scene: np.ndarray) -> Image.Image:
    quantized = np.clip(np.rint(np.asarray(scene) * 255.0), 0, 255).astype(np.uint8)
    return Image.fromarray(quantized)


def from_pil(image: Image.Image) -> np.ndarray:
    return np.asarray(image.convert("RGB"), dtype=np.float32) / 255.0


__all__ = [
    "cell_box",
    "cell_center",
    "entity_box",
    "render_image",
    "render_scene",
    "to_pil",
    "from_pil",
]
