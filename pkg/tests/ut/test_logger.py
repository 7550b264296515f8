import logging
import unittest
from io import StringIO
from unittest.mock import patch

import colorama

from coseq.logger import (
    LevelFormatter,
    get_logger,
    set_log_level,
    Logger,
    StreamHandler,
    TRACE,
    SUCCESS,
)
from tests.base_test_case import BaseTestCase


class TestLogger(BaseTestCase):
    def test_get_logger_returns_logger_instance(self):
        logger = get_logger("test_module")
        self.assertIsInstance(logger, Logger)

    def test_get_logger_is_cached_by_name(self):
        self.assertIs(get_logger("test_module_cached"), get_logger("test_module_cached"))

    def test_get_logger_with_prefix(self):
        logger = get_logger("test_module_prefix", prefix="test-prefix")
        self.assertEqual(len(logger.handlers), 1)
        self.assertIn("test-prefix", logger.handlers[0].formatter._fmt)  # type: ignore[union-attr, arg-type]

    def test_logger_success_method(self):
        logger = get_logger("test_module")
        logger.setLevel(SUCCESS)
        with patch.object(logging.Logger, "_log") as mock_log:
            logger.success("Trained")
            mock_log.assert_called_once()
            self.assertEqual(mock_log.call_args[0][0], SUCCESS)

    def test_logger_trace_method(self):
        logger = get_logger("test_module")
        logger.setLevel(TRACE)
        with patch.object(logging.Logger, "_log") as mock_log:
            logger.trace("Epoch 1")
            mock_log.assert_called_once()
            self.assertEqual(mock_log.call_args[0][0], TRACE)

    def test_trace_suppressed_above_trace_level(self):
        logger = get_logger("test_module_quiet")
        logger.setLevel(logging.INFO)
        with patch.object(logging.Logger, "_log") as mock_log:
            logger.trace("hidden")
            mock_log.assert_not_called()

    def test_set_log_level_updates_existing_loggers(self):
        logger = get_logger("coseq.test_levels")
        try:
            set_log_level(logging.DEBUG)
            self.assertEqual(logger.level, logging.DEBUG)
            for handler in logger.handlers:
                self.assertEqual(handler.level, logging.DEBUG)
        finally:
            set_log_level(logging.INFO)

    def test_stream_handler_writes_error_to_stderr(self):
        stdout, stderr = StringIO(), StringIO()
        handler = StreamHandler(stdout, stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        record = logging.LogRecord("test", logging.ERROR, "test.py", 1, "Error message", (), None)
        with patch("builtins.__import__", side_effect=ImportError("No module named 'tqdm'")):
            handler.emit(record)
        self.assertIn("Error message", stderr.getvalue())
        self.assertEqual(stdout.getvalue(), "")

    def test_stream_handler_writes_warning_to_stderr(self):
        stdout, stderr = StringIO(), StringIO()
        handler = StreamHandler(stdout, stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        record = logging.LogRecord("test", logging.WARNING, "test.py", 1, "Unknown keys", (), None)
        with patch("builtins.__import__", side_effect=ImportError("No module named 'tqdm'")):
            handler.emit(record)
        self.assertEqual(stderr.getvalue(), "Unknown keys\n")
        self.assertEqual(stdout.getvalue(), "")

    def test_stream_handler_writes_info_to_stdout(self):
        stdout, stderr = StringIO(), StringIO()
        handler = StreamHandler(stdout, stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        record = logging.LogRecord("test", logging.INFO, "test.py", 1, "Info message", (), None)
        with patch("builtins.__import__", side_effect=ImportError("No module named 'tqdm'")):
            handler.emit(record)
        self.assertIn("Info message", stdout.getvalue())

    def test_level_formatter_colours_only_when_enabled(self):
        record = logging.LogRecord("coseq.test", SUCCESS, "test.py", 1, "Selector trained", (), None)
        plain = LevelFormatter("coseq").format(record)
        coloured = LevelFormatter("coseq", use_colors=True).format(record)
        self.assertNotIn("\x1b[", plain)
        self.assertIn(colorama.Fore.GREEN + "SUCCESS", coloured)
        self.assertIn(colorama.Style.RESET_ALL, coloured)
        self.assertEqual(record.levelname, "SUCCESS")
        for text in (plain, coloured):
            self.assertTrue(text.startswith("[coseq]"))
            self.assertTrue(text.endswith("| Selector trained"))

    def test_package_logger_has_package_prefix(self):
        logger = get_logger("coseq.test")
        self.assertEqual(len(logger.handlers), 1)
        formatter = logger.handlers[0].formatter
        self.assertIsNotNone(formatter)
        self.assertIn("coseq", formatter._fmt)  # type: ignore[union-attr, arg-type]


if __name__ == "__main__":
    unittest.main()
