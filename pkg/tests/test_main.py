"""Tests for the btstrata command line, run configuration and report utilities."""

import json
import os
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

# Add project root to sys.path to allow importing src modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

try:
    from src.exceptions import BadParametersError, BoundExceededError, PiModularExcludedError, WindowOverflowError
    from src.main import (
        _stratification_cases,
        build_parser,
        cmd_charts,
        cmd_strata,
        cmd_vertex,
        exit_code,
        main,
    )
    from src.utils.file_operations import (
        FileOperationError,
        render_csv,
        render_json,
        validate_path,
        write_report,
    )
    from src.utils.run_config import RunConfig, build_run_config, load_config_file, threads_from_env
    from src.utils.verification import (
        BOUND,
        SKIPPED,
        CheckResult,
        Report,
        bound_result,
        ordered_map,
    )
except ImportError as e:
    raise ImportError(
        "Failed to import modules. Ensure the src directory is structured correctly and accessible."
    ) from e


def _config(argv):
    """Parse argv and build a RunConfig with the environment ignored."""
    with patch("src.utils.run_config.threads_from_env", return_value=None):
        return build_run_config(build_parser().parse_args(argv))


class TestFileOperations:
    """Test file operations utilities."""

    def test_validate_path_success(self, tmp_path):
        """Test successful path validation."""
        result = validate_path(str(tmp_path))
        assert isinstance(result, Path)

    def test_validate_path_invalid_type(self):
        """Test path validation with invalid type."""
        with pytest.raises(TypeError):
            validate_path(123)  # type: ignore  # Invalid type for testing

    def test_validate_path_security_check(self):
        """Test path validation prevents directory traversal."""
        with pytest.raises(FileOperationError):
            validate_path("../../../etc/passwd")

    def test_render_json_sorted(self):
        """Keys are sorted so equal documents render to equal text."""
        text = render_json({"b": 1, "a": {"d": 2, "c": 3}})
        assert text.index('"a"') < text.index('"b"')
        assert text.index('"c"') < text.index('"d"')
        assert text == render_json({"a": {"c": 3, "d": 2}, "b": 1})

    def test_render_csv(self):
        """One header line plus one line per row."""
        rows = [{"command": "charts", "check_id": "chart_count", "params": "n=3", "status": "exhaustive", "pass": True}]
        lines = render_csv(rows).splitlines()
        assert lines[0] == "command,check_id,params,status,pass"
        assert lines[1] == "charts,chart_count,n=3,exhaustive,True"

    def test_write_report_creates_parent(self, tmp_path):
        """Missing parent folders are created."""
        out = tmp_path / "out" / "report.json"
        written = write_report("{}\n", str(out))
        assert written == out.resolve()
        assert out.read_text() == "{}\n"

    def test_write_report_nested(self, tmp_path):
        """Several missing levels are created in one go."""
        out = tmp_path / "nested" / "report" / "folder" / "r.csv"
        write_report("a\n", out)
        assert out.read_text() == "a\n"

    def test_write_report_invalid_type(self):
        """Non-path targets raise TypeError."""
        with pytest.raises(TypeError):
            write_report("{}\n", 123)  # type: ignore  # Invalid type for testing


class TestRunConfig:
    """Test configuration precedence and validation."""

    def test_desk_defaults(self):
        """Without overrides the desk profile applies."""
        cfg = _config(["vertex"])
        assert cfg.ns == (3, 4, 5)
        assert (cfg.p, cfg.m_max, cfg.window, cfg.strata_window) == (3, 2, 2, 1)
        assert cfg.h is None
        assert cfg.seed == 0
        assert cfg.fmt == "json"

    def test_deep_profile(self):
        """The deep profile runs n = 6 up to m = 3."""
        cfg = _config(["strata", "--profile", "deep"])
        assert cfg.ns == (6,)
        assert cfg.m_max == 3
        assert cfg.strata_window == 2

    def test_file_overrides_profile_and_flags_override_file(self, tmp_path):
        """Precedence: profile < config file < flags."""
        path = tmp_path / "run.cfg"
        path.write_text("N=3 4\nMMAX=1\nSEED=7\nFORMAT=csv\n")
        cfg = _config(["charts", "--config", str(path), "--seed", "9"])
        assert cfg.ns == (3, 4)
        assert cfg.m_max == 1
        assert cfg.seed == 9
        assert cfg.fmt == "csv"

    def test_unknown_config_key(self, tmp_path):
        """Unknown keys are listed in the error."""
        path = tmp_path / "run.cfg"
        path.write_text("N=3\nDEPTH=4\n")
        with pytest.raises(ValueError, match="DEPTH"):
            load_config_file(str(path))

    def test_missing_config_file(self, tmp_path):
        """A missing file raises ValueError."""
        with pytest.raises(ValueError, match="not found"):
            load_config_file(str(tmp_path / "absent.cfg"))

    def test_threads_from_environment(self):
        """BTSTRATA_THREADS sets the worker count and --threads overrides it."""
        with patch.dict(os.environ, {"BTSTRATA_THREADS": "4"}):
            assert threads_from_env() == 4
            assert build_run_config(build_parser().parse_args(["charts"])).threads == 4
            assert build_run_config(build_parser().parse_args(["charts", "--threads", "2"])).threads == 2

    @pytest.mark.parametrize("value", ["many", "0"])
    def test_bad_thread_count(self, value):
        """Non-integer or non-positive thread counts are rejected."""
        with patch.dict(os.environ, {"BTSTRATA_THREADS": value}):
            with pytest.raises(ValueError):
                threads_from_env()

    @pytest.mark.parametrize("p", ["2", "9"])
    def test_p_must_be_odd_prime(self, p):
        """p = 2 and composite p are rejected."""
        with pytest.raises(BadParametersError):
            _config(["vertex", "--p", p])

    def test_pi_modular_refused(self):
        """n = 4 with h = 2 is the excluded π-modular case."""
        with pytest.raises(PiModularExcludedError, match="π-modular case excluded"):
            _config(["vertex", "--n", "4", "--h", "2"])

    def test_h_out_of_range(self):
        """h above ⌊n/2⌋ is rejected."""
        with pytest.raises(BadParametersError):
            _config(["strata", "--n", "3", "--h", "2"])

    def test_r_only_for_charts(self):
        """Lattice suites run over q = p."""
        with pytest.raises(BadParametersError):
            _config(["strata", "--r", "2"])
        assert _config(["charts", "--r", "2"]).r == 2

    def test_levels(self):
        """Every admissible splitting level, without the π-modular one."""
        cfg = _config(["charts"])
        assert cfg.levels(4) == [0, 1]
        assert cfg.levels(5) == [0, 1, 2]
        assert _config(["charts", "--h", "1"]).levels(5) == [1]

    def test_bounds_recorded(self):
        """The caps in force are part of the configuration record."""
        data = _config(["charts"]).to_json()
        assert data["bounds"]["pair_sample"] == 10**4


class TestVerification:
    """Test check records, reports and the ordered pool."""

    def test_exit_codes(self):
        """0 on success, 3 on a bound hit, 2 on any failure."""
        report = Report("vertex", {})
        report.add(CheckResult("a", {}))
        assert report.exit_code() == 0
        report.add(bound_result("b", {}, BoundExceededError("cap")))
        assert report.exit_code() == 3
        report.add(CheckResult("c", {}, passed=False))
        assert report.exit_code() == 2

    def test_skipped_is_incomplete(self):
        """A skipped check passes but keeps the run from exiting with 0."""
        report = Report("strata", {}, [CheckResult("a", {}), CheckResult("b", {}, SKIPPED, True, {"reason": "window"})])
        assert report.passed
        assert report.incomplete
        assert report.exit_code() == 3
        assert exit_code([report, Report("charts", {}, [CheckResult("c", {}, passed=False)])]) == 2

    def test_combined_exit_code(self):
        """A failure anywhere wins over a bound hit elsewhere."""
        bound = Report("vertex", {}, [bound_result("b", {}, BoundExceededError("cap"))])
        failed = Report("charts", {}, [CheckResult("c", {}, passed=False)])
        assert exit_code([bound]) == 3
        assert exit_code([bound, failed]) == 2
        assert exit_code([]) == 0

    def test_check_json(self):
        """The witness key is present only when there is a witness."""
        assert "witness" not in CheckResult("a", {"n": 3}).to_json()
        data = CheckResult("a", {"n": 3}, witness={"x": 1}).to_json()
        assert data["witness"] == {"x": 1}
        assert data["pass"] is True

    def test_rows(self):
        """CSV rows flatten parameters in key order."""
        report = Report("charts", {}, [CheckResult("chart_count", {"n": 3, "h": 0})])
        assert report.rows()[0]["params"] == "h=0;n=3"

    @pytest.mark.parametrize("threads", [1, 4])
    def test_ordered_map(self, threads):
        """Results come back in input order."""
        assert ordered_map(lambda x: x * x, range(20), threads) == [x * x for x in range(20)]


class TestCommands:
    """Test the suites at the smallest sizes."""

    def test_charts_n3(self):
        """n = 3 has one Z chart (h = 0, t = 1) and one Y chart (h = 1, t = 0), both affine lines."""
        report = cmd_charts(RunConfig(command="charts", ns=(3,), h=None, m_max=2))
        assert report.passed, [c.to_json() for c in report.checks if not c.passed]
        ids = [c.check_id for c in report.checks]
        assert ids.count("chart_count") == 4
        assert ids.count("chart_dimension") == 2
        counts = [c.witness["counts"] for c in report.checks if c.check_id == "chart_count"]
        assert counts == [{"0": 3}, {"0": 9}, {"0": 3}, {"0": 9}]

    def test_vertex_n3(self):
        """n = 3, a = 1: even types only, duality and De Morgan hold."""
        report = cmd_vertex(RunConfig(command="vertex", ns=(3,), h=None, window=1))
        assert report.passed
        assert [c.check_id for c in report.checks] == [
            "vertex_types",
            "vertex_duality",
            "de_morgan",
            "standard_chain_duality",
            "scaled_base_lattice",
        ]
        assert set(report.checks[0].witness["types"]) <= {"0", "2"}

    def test_vertex_bound(self):
        """n = 7 exceeds the enumeration bound: the run exits with 3."""
        report = cmd_vertex(RunConfig(command="vertex", ns=(7,), h=None, window=1))
        assert report.checks[0].status == BOUND
        assert report.checks[-1].check_id == "scaled_base_lattice"
        assert report.exit_code() == 3

    @patch("src.main.INDEX_IDENTITY_DIMS", [4])
    @patch("src.main.STRATIFICATION_CASES", [])
    @patch("src.main.ORACLE_CASES", [(4, 0, 1)])
    @patch("src.main.FIBER_LAW_CASES", [(2, 0)])
    def test_strata_n3(self):
        """A reduced strata suite at n = 3 passes."""
        report = cmd_strata(RunConfig(command="strata", ns=(3,), h=None, m_max=2))
        assert report.passed, [c.to_json() for c in report.checks if not c.passed]
        ids = {c.check_id for c in report.checks}
        assert ids == {
            "fiber_law",
            "dimension_growth",
            "rprime_two_way",
            "worst_point",
            "oracle_equivalence",
            "vertex_hulls",
            "index_identity",
        }
        dims = [c.witness for c in report.checks if c.check_id == "dimension_growth"]
        assert [d["estimated_dim"] for d in dims] == [1, 1]

    def test_single_level_skips_dimension(self):
        """With m_max = 1 there is no consecutive pair of counts."""
        report = cmd_charts(RunConfig(command="charts", ns=(3,), h=0, m_max=1))
        dims = [c for c in report.checks if c.check_id == "chart_dimension"]
        assert dims and all(c.status == SKIPPED for c in dims)

    def test_stratification_cases(self):
        """Pinning h runs the stratification on every requested n."""
        assert _stratification_cases(RunConfig(command="strata", ns=(3, 5), h=1)) == [(3, 1), (5, 1)]
        assert _stratification_cases(RunConfig(command="strata", ns=(3,), h=None)) == [(4, 1)]


class TestMain:
    """Test the command-line entry point."""

    def test_json_report_file(self, tmp_path):
        """A passing run writes the report and exits with 0."""
        out = tmp_path / "charts.json"
        with patch("src.utils.run_config.threads_from_env", return_value=None):
            with pytest.raises(SystemExit) as exc:
                main(["charts", "--n", "3", "--out", str(out)])
        assert exc.value.code == 0
        data = json.loads(out.read_text())
        assert data["command"] == "charts"
        assert data["pass"] is True
        assert data["exit_code"] == 0
        assert data["reports"][0]["command"] == "charts"

    def test_deterministic_output(self, tmp_path):
        """Two identical runs write identical bytes."""
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        with patch("src.utils.run_config.threads_from_env", return_value=None):
            for path in paths:
                with pytest.raises(SystemExit):
                    main(["charts", "--n", "3", "--out", str(path)])
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_csv_to_stdout(self, capsys):
        """Without --out the report goes to stdout and progress to stderr."""
        with patch("src.utils.run_config.threads_from_env", return_value=None):
            with pytest.raises(SystemExit) as exc:
                main(["charts", "--n", "3", "--h", "1", "--format", "csv"])
        captured = capsys.readouterr()
        assert exc.value.code == 0
        assert captured.out.splitlines()[0] == "command,check_id,params,status,pass"
        assert "Complete: charts" in captured.err

    def test_invalid_configuration(self, capsys):
        """Invalid parameters exit with 2 and a message on stderr."""
        with patch("src.utils.run_config.threads_from_env", return_value=None):
            with pytest.raises(SystemExit) as exc:
                main(["vertex", "--n", "4", "--h", "2"])
        assert exc.value.code == 2
        assert "π-modular case excluded" in capsys.readouterr().err

    def test_missing_command(self):
        """A command is required."""
        with pytest.raises(SystemExit):
            main([])

    def _run_json(self, argv, out):
        with patch("src.utils.run_config.threads_from_env", return_value=None):
            with pytest.raises(SystemExit) as exc:
                main(argv + ["--out", str(out)])
        return exc.value.code, json.loads(out.read_text())

    def _checks(self, data, check_id):
        return [c for r in data["reports"] for c in r["checks"] if c["check_id"] == check_id]

    def test_vertex_scaled_base_lattice(self, tmp_path):
        """πΛ₀ at n = 3 is reported with type 6, not a vertex lattice, dual π^{-1}Λ₀."""
        code, data = self._run_json(["vertex", "--n", "3", "--window", "1"], tmp_path / "vertex.json")
        assert code == 0
        (check,) = self._checks(data, "scaled_base_lattice")
        assert check["pass"] is True
        assert check["params"] == {"n": 3, "p": 3, "window": 1}
        assert check["witness"]["type"] == 6
        assert check["witness"]["expected_type"] == 6
        assert check["witness"]["is_vertex"] is False
        assert check["witness"]["dual_is_inverse_scaling"] is True

    @patch("src.main.INDEX_IDENTITY_DIMS", [])
    @patch("src.main.STRATIFICATION_CASES", [])
    @patch("src.main.ORACLE_CASES", [(5, 2, 1)])
    @patch("src.main.FIBER_LAW_CASES", [])
    def test_strata_y_oracle_at_level_two(self, tmp_path):
        """The Y stratum (n, h, t) = (5, 2, 1) agrees between models over F_9."""
        code, data = self._run_json(["strata", "--n", "3", "--mmax", "2"], tmp_path / "strata.json")
        assert code == 0
        oracle = {c["params"]["m"]: c for c in self._checks(data, "oracle_equivalence")}
        assert set(oracle) == {1, 2}
        check = oracle[2]
        assert check["pass"] is True
        assert check["params"] == {"n": 5, "h": 2, "t": 1, "p": 3, "m": 2, "window": 1}
        assert check["witness"]["raw"] == check["witness"]["quotient"]
        assert check["witness"]["raw"] >= oracle[1]["witness"]["raw"] == 4
        assert check["witness"]["automatic_violations"] == 0

    @patch("src.main.INDEX_IDENTITY_DIMS", [])
    @patch("src.main.STRATIFICATION_CASES", [])
    @patch("src.main.ORACLE_CASES", [])
    @patch("src.main.FIBER_LAW_CASES", [])
    def test_single_level_exits_incomplete(self, tmp_path, capsys):
        """One level is too little data for a growth rate: skipped, and the run exits with 3."""
        code, data = self._run_json(["strata", "--n", "3", "--mmax", "1"], tmp_path / "strata.json")
        assert code == 3
        assert data["exit_code"] == 3
        assert data["pass"] is True
        growth = self._checks(data, "dimension_growth")
        assert growth and all(c["status"] == SKIPPED for c in growth)
        assert "some checks hit a bound or were skipped" in capsys.readouterr().err

    @patch("src.main.INDEX_IDENTITY_DIMS", [])
    @patch("src.main.STRATIFICATION_CASES", [])
    @patch("src.main.ORACLE_CASES", [])
    @patch("src.main.FIBER_LAW_CASES", [])
    def test_undersized_window_exits_incomplete(self, tmp_path):
        """A stratum leaving the window is skipped, never silently passed."""
        error = WindowOverflowError("π^{-1}Λ leaves the window")
        with patch("src.main.worst_count_check", side_effect=error):
            code, data = self._run_json(["strata", "--n", "3", "--mmax", "2"], tmp_path / "strata.json")
        assert code == 3
        worst = self._checks(data, "worst_point")
        assert worst and all(c["status"] == SKIPPED for c in worst)
        assert worst[0]["witness"]["reason"] == "π^{-1}Λ leaves the window"
