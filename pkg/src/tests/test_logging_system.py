"""
Tests for the YAML logging setup and the run logger prefixes.
"""

import logging

from src.logging_system import RunLogger, get_logger, get_run_logger, setup_logging
from src.logging_system import logger as logger_module


class TestSetupLogging:

    def test_idempotent(self):
        setup_logging()
        handlers = list(logging.getLogger("src.tree_search").handlers)
        setup_logging()
        assert logging.getLogger("src.tree_search").handlers == handlers

    def test_packages_have_handlers(self):
        setup_logging()
        for name in ("src.core_linalg", "src.tree_search", "src.neural_heuristic", "src.sim_harness"):
            assert logging.getLogger(name).handlers

    def test_missing_file_falls_back(self, monkeypatch, tmp_path):
        monkeypatch.setattr(logger_module, "_logging_configured", False)
        setup_logging(tmp_path / "absent.yaml")
        assert logger_module._logging_configured

    def test_get_logger(self):
        assert get_logger("src.sim_harness.sweeps").name == "src.sim_harness.sweeps"


class TestRunLogger:

    def test_prefixes(self, caplog):
        run_logger = get_run_logger("hatsdetect_check.sweeps")
        assert isinstance(run_logger, RunLogger)
        assert run_logger.run_name == "sweeps"
        with caplog.at_level(logging.DEBUG, logger="hatsdetect_check"):
            run_logger.run_start("sweep", trials=10, seed=0)
            run_logger.run_debug("block done")
            run_logger.run_success("finished")
            run_logger.run_error("broken")
        messages = [r.getMessage() for r in caplog.records]
        assert messages == ["[RUN] sweep(trials='10', seed='0')", "[DEBUG] block done",
                            "[SUCCESS] finished", "[ERROR] broken"]
        assert caplog.records[-1].levelno == logging.ERROR

    def test_progress_and_metrics(self, caplog):
        run_logger = get_run_logger("hatsdetect_check.train")
        with caplog.at_level(logging.DEBUG, logger="hatsdetect_check"):
            run_logger.run_progress("train", 25, 100, loss=0.123456)
            run_logger.run_metrics("snr=10.0 sd", trials=4, ber=0.03125)
        assert [r.getMessage() for r in caplog.records] == [
            "[PROGRESS] train 25/100 (25%) loss=0.1235",
            "[METRICS] snr=10.0 sd: trials=4 ber=0.03125",
        ]

    def test_elapsed_is_reported_on_success(self, caplog):
        run_logger = get_run_logger("hatsdetect_check.sweep")
        assert run_logger.elapsed("sweep") is None
        with caplog.at_level(logging.INFO, logger="hatsdetect_check"):
            run_logger.run_start("sweep")
            run_logger.run_success("done", "sweep")
            run_logger.run_success("plain")
        assert run_logger.elapsed("sweep") >= 0.0
        assert caplog.records[1].getMessage().startswith("[SUCCESS] done (")
        assert caplog.records[2].getMessage() == "[SUCCESS] plain"
