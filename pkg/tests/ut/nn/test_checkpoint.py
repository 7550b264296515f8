import struct
import tempfile
from collections import OrderedDict
from pathlib import Path

import numpy as np

from coseq.constants import CHECKPOINT_MAGIC
from coseq.exceptions import CheckpointFormatError
from coseq.nn import MLP, load_checkpoint, save_checkpoint
from coseq.nn.checkpoint import meta_path
from tests.base_test_case import BaseTestCase


class TestCheckpoint(BaseTestCase):
    def test_layout_starts_with_magic_and_record_count(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "model.ckpt"
            save_checkpoint(path, OrderedDict([("w", np.ones((2, 3)))]))
            payload = path.read_bytes()
            self.assertTrue(payload.startswith(CHECKPOINT_MAGIC))
            offset = len(CHECKPOINT_MAGIC)
            self.assertEqual(struct.unpack("<I", payload[offset:offset + 4])[0], 1)
            # magic + count + name_len + "w" + rank + 2 dims + 6 floats
            self.assertEqual(len(payload), len(CHECKPOINT_MAGIC) + 4 + 4 + 1 + 4 + 8 + 24)

    def test_module_state_and_meta_survive_save_and_load(self):
        model = MLP([3, 5, 2], np.random.default_rng(0))
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "nested" / "mlp.ckpt"
            save_checkpoint(path, model.state_dict(), meta={"kind": "mlp", "trained": True})
            tensors, meta = load_checkpoint(path)

            restored = MLP([3, 5, 2], np.random.default_rng(99))
            restored.load_state_dict(tensors)

            self.assertEqual(list(tensors), [name for name, _ in model.named_parameters()])
            self.assertEqual(meta, {"kind": "mlp", "trained": True})
            self.assertTrue(meta_path(path).exists())
            for name, value in model.state_dict().items():
                np.testing.assert_array_equal(restored.state_dict()[name], value)

    def test_bad_magic_is_rejected(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "bad.ckpt"
            path.write_bytes(b"NOTCKP\x00\x00\x00\x00")
            with self.assertRaises(CheckpointFormatError):
                load_checkpoint(path)

    def test_truncated_payload_is_rejected(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "cut.ckpt"
            save_checkpoint(path, {"w": np.ones(10)})
            path.write_bytes(path.read_bytes()[:-3])
            with self.assertRaises(CheckpointFormatError):
                load_checkpoint(path)

    def test_record_count_must_match_the_records(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "count.ckpt"
            save_checkpoint(path, OrderedDict([("a", np.ones(2)), ("b", np.zeros(3))]))
            payload = path.read_bytes()
            offset = len(CHECKPOINT_MAGIC)
            for count in (1, 3):
                with self.subTest(count=count):
                    path.write_bytes(payload[:offset] + struct.pack("<I", count) + payload[offset + 4:])
                    with self.assertRaises(CheckpointFormatError):
                        load_checkpoint(path)

    def test_load_state_dict_rejects_missing_names(self):
        model = MLP([2, 2], np.random.default_rng(0))
        with self.assertRaises(CheckpointFormatError):
            model.load_state_dict({"layers.0.weight": np.zeros((2, 2))})
