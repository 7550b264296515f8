import numpy as np

from coseq.exceptions import DomainError
from coseq.synthio import Action, Entity, Workspace, apply_action, cell_center, render_scene
from coseq.synthio.workspace import BACKGROUND_RGB, COLOR_RGB, cell_from_name, cell_name
from tests.base_test_case import BaseTestCase


class TestWorkspace(BaseTestCase):
    def test_cell_names_round_trip(self):
        for cell in range(9):
            with self.subTest(cell=cell):
                self.assertEqual(cell_from_name(cell_name(cell)), cell)
        self.assertEqual(cell_name(4), "center")
        self.assertEqual(cell_name(0), "top left")

    def test_entities_are_kept_sorted_by_cell(self):
        workspace = Workspace(
            entities=(Entity("square", "blue", 7), Entity("circle", "red", 2))
        )
        self.assertEqual([e.cell for e in workspace.entities], [2, 7])

    def test_two_entities_cannot_share_a_cell(self):
        with self.assertRaises(DomainError):
            Workspace(entities=(Entity("square", "blue", 3), Entity("circle", "red", 3)))

    def test_at_most_six_entities(self):
        entities = tuple(Entity("circle", "red", cell) for cell in range(7))
        with self.assertRaises(DomainError):
            Workspace(entities=entities)

    def test_add_then_recolor_keeps_focus(self):
        workspace, focus = apply_action(Workspace(), Action("add", target=4, shape="circle", color="red"))
        self.assertEqual(focus, 4)
        workspace, focus = apply_action(workspace, Action("recolor", target=4, color="blue"))
        self.assertEqual(focus, 4)
        self.assertEqual(workspace.entity_at(4), Entity("circle", "blue", 4))

    def test_combine_leaves_one_large_mixture(self):
        workspace = Workspace(entities=(Entity("circle", "red", 0), Entity("square", "blue", 8)))
        merged, focus = apply_action(workspace, Action("combine", target=0, other=8))
        self.assertEqual(focus, 0)
        self.assertEqual(len(merged.entities), 1)
        entity = self.unwrap_optional(merged.entity_at(0))
        self.assertTrue(entity.mixture)
        self.assertEqual(entity.size, 2)

    def test_invalid_actions_raise(self):
        workspace = Workspace(entities=(Entity("circle", "red", 4),))
        cases = [
            Action("add", target=4, shape="square", color="blue"),
            Action("recolor", target=4, color="red"),
            Action("transform", target=1, shape="square"),
            Action("combine", target=4, other=4),
        ]
        for action in cases:
            with self.subTest(action=action):
                with self.assertRaises(DomainError):
                    apply_action(workspace, action)

    def test_dict_round_trip(self):
        workspace = Workspace(background_id=2, entities=(Entity("bar", "cyan", 5, size=2, mixture=True),))
        self.assertEqual(Workspace.from_dict(workspace.to_dict()), workspace)


class TestRenderScene(BaseTestCase):
    def test_empty_workspace_is_uniform_background(self):
        scene = render_scene(Workspace(background_id=1), 16)
        expected = np.array(BACKGROUND_RGB["gray"], dtype=np.float32) / 255.0
        self.assertEqual(scene.shape, (16, 16, 3))
        self.assertArrayClose(scene, np.broadcast_to(expected, scene.shape))

    def test_render_is_pure(self):
        workspace = Workspace(entities=(Entity("triangle", "green", 2), Entity("bar", "orange", 6, size=2)))
        np.testing.assert_array_equal(render_scene(workspace), render_scene(workspace))

    def test_red_circle_at_center_pixel(self):
        workspace = Workspace(entities=(Entity("circle", "red", 4),))
        scene = render_scene(workspace, 16)
        row, column = cell_center(4, 16)
        expected = np.array(COLOR_RGB["red"], dtype=np.float32) / 255.0
        self.assertArrayClose(scene[row, column], expected)

    def test_pixels_stay_in_unit_range(self):
        workspace = Workspace(background_id=3, entities=(Entity("square", "yellow", 0, size=2),))
        scene = render_scene(workspace, 24)
        self.assertGreaterEqual(float(scene.min()), 0.0)
        self.assertLessEqual(float(scene.max()), 1.0)

    def test_too_small_image_is_rejected(self):
        with self.assertRaises(DomainError):
            render_scene(Workspace(), 6)
