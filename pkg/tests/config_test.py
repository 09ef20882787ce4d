import json
from pathlib import Path
import shutil
import tempfile
import unittest

from llmTestGen.config import PipelineMode, RunConfig, from_env, load_config
from llmTestGen.constants import DEFAULT_MAX_INVALID, DEFAULT_MODEL
from llmTestGen.errors import ConfigError
from llmTestGen.llm.cassette import CassetteMode


class Config_TC(unittest.TestCase):

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())
        self.cfg_file = self.tmp / "run.json"

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write_cfg(self, data):
        self.cfg_file.write_text(json.dumps(data), encoding="utf-8")
        return self.cfg_file

    def test_defaults(self):
        c = load_config({}, environ={})
        self.assertEqual(c, RunConfig())
        self.assertEqual(c.mode, PipelineMode.FULL)
        self.assertEqual(c.max_invalid, DEFAULT_MAX_INVALID)
        self.assertEqual(c.model_name, DEFAULT_MODEL)
        self.assertEqual(c.cassette_mode, CassetteMode.PASSTHROUGH)
        self.assertEqual((c.compile_timeout, c.execute_timeout), (120.0, 60.0))

    def test_precedence(self):
        env = {
            "LLMTESTGEN_MODE": "basic",
            "LLMTESTGEN_PARALLELISM": "4",
            "LLMTESTGEN_MAX_INVALID": "5",
            "LLMTESTGEN_TEMPERATURE": "0.5",
        }
        cfg = self.write_cfg({"parallelism": 2, "mode": "intention"})
        c = load_config({"mode": PipelineMode.FULL}, cfg, env)
        # flag > file > env
        self.assertEqual(c.mode, PipelineMode.FULL)
        self.assertEqual(c.parallelism, 2)
        self.assertEqual(c.max_invalid, 5)
        self.assertEqual(c.temperature, 0.5)
        self.assertEqual(c.hard_iteration_cap, RunConfig().hard_iteration_cap)

    def test_env_conversion(self):
        env = {
            "LLMTESTGEN_CASSETTE_PATH": "/tmp/c.jsonl",
            "LLMTESTGEN_CASSETTE_MODE": "replay",
            "LLMTESTGEN_KEEP_WORKSPACES": "yes",
            "LLMTESTGEN_CLASSPATH": "a.jar:b.jar",
            "LLMTESTGEN_REPEAT": "",
        }
        v = from_env(env)
        self.assertEqual(v["cassette_path"], Path("/tmp/c.jsonl"))
        self.assertEqual(v["cassette_mode"], CassetteMode.REPLAY)
        self.assertTrue(v["keep_workspaces"])
        self.assertNotIn("repeat", v)
        c = load_config({}, environ=env)
        self.assertEqual(c.cassette_mode, CassetteMode.REPLAY)

    def test_invalid_values(self):
        for flags in ({"parallelism": 0}, {"max_invalid": 0}, {"temperature": 3.0},
                      {"token_budget": 0}, {"rerun_on_failure": -1},
                      {"cassette_mode": CassetteMode.RECORD}):
            with self.assertRaises(ConfigError, msg=flags):
                load_config(flags, environ={})
        with self.assertRaises(ConfigError):
            load_config({}, environ={"LLMTESTGEN_PARALLELISM": "many"})
        with self.assertRaises(ConfigError):
            load_config({}, environ={"LLMTESTGEN_MODE": "turbo"})

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            load_config({}, self.write_cfg({"max_iterations": 3}), {})
        with self.assertRaises(ConfigError):
            load_config({"max_iterations": 3}, environ={})

    def test_bad_file(self):
        with self.assertRaises(ConfigError):
            load_config({}, self.tmp / "missing.json", {})
        self.cfg_file.write_text("[1, 2]", encoding="utf-8")
        with self.assertRaises(ConfigError):
            load_config({}, self.cfg_file, {})
        self.cfg_file.write_text("{mode: full", encoding="utf-8")
        with self.assertRaises(ConfigError):
            load_config({}, self.cfg_file, {})

    def test_replace(self):
        c = RunConfig().replace(repeat=2)
        self.assertEqual(c.repeat, 2)
        with self.assertRaises(ConfigError):
            c.replace(parallelism=0)


if __name__ == "__main__":
    unittest.main()
