"""
Unit tests for report and matrix persistence.
"""

import json
import os

import numpy as np
import pytest

from modules.errors import ConfigError
from modules.harness import TrialConfig, run_suite
from modules.matfun import HermitianMatrix
from modules.report_storage import ReportStorage


@pytest.fixture
def report():
    return run_suite(TrialConfig(suite='scalar_log_sum', trials=3, seed=1))


@pytest.mark.unit
class TestSerialization:
    """Test deterministic JSON output"""

    def test_dumps_sorted_with_newline(self, report):
        text = ReportStorage.dumps(report)
        assert text.endswith('\n')
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert data['suite'] == 'scalar_log_sum'

    def test_dumps_plain_dict(self):
        assert ReportStorage.dumps({'b': 1, 'a': 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'

    def test_write_creates_directories(self, tmp_path, report):
        path = tmp_path / 'nested' / 'deeper' / 'out.json'
        ReportStorage.write(report, str(path))
        assert json.loads(path.read_text())['trials'] == 3


@pytest.mark.unit
class TestReportStorage:
    """Test saving, loading and listing reports"""

    def test_save_and_load(self, report_storage, report):
        """Test a saved report loads back with the same headline numbers"""
        path = report_storage.save_report(report, 'first')
        assert path.endswith('first.json')
        loaded = report_storage.load_report('first')
        assert loaded['violations'] == report.violations
        assert loaded['worst_case_seed'] == report.worst_case_seed

    def test_name_is_sanitized(self, report_storage, report):
        path = report_storage.save_report(report, '../../escape')
        assert os.path.dirname(path) == report_storage.reports_folder

    def test_wrong_extension(self, report_storage, report):
        with pytest.raises(ConfigError):
            report_storage.save_report(report, 'report.txt')

    def test_empty_name(self, report_storage, report):
        with pytest.raises(ConfigError):
            report_storage.save_report(report, '..')

    def test_missing_report(self, report_storage):
        with pytest.raises(FileNotFoundError):
            report_storage.load_report('absent')

    def test_list_reports(self, report_storage, report):
        """Test listing skips foreign and unreadable files"""
        report_storage.save_report(report, 'b_run')
        report_storage.save_report({'suite': 'manual', 'trials': 1}, 'a_run')
        with open(os.path.join(report_storage.reports_folder, 'notes.txt'), 'w') as f:
            f.write('ignored')
        with open(os.path.join(report_storage.reports_folder, 'broken.json'), 'w') as f:
            f.write('{not json')

        listed = report_storage.list_reports()
        assert [r['name'] for r in listed] == ['a_run.json', 'b_run.json']
        assert listed[1]['suite'] == 'scalar_log_sum'
        assert listed[0]['violations'] is None

    def test_list_without_folder(self, tmp_path):
        assert ReportStorage(str(tmp_path / 'missing')).list_reports() == []


@pytest.mark.unit
class TestDocuments:
    """Test argument documents and exchange matrices on disk"""

    def test_load_document(self, write_json):
        assert ReportStorage.load_document(write_json('args.json', {'x': 1})) == {'x': 1}

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{')
        with pytest.raises(ConfigError):
            ReportStorage.load_document(str(path))

    def test_matrix_roundtrip(self, tmp_path):
        A = HermitianMatrix([[2, 1j], [-1j, 3]])
        path = ReportStorage.save_matrix(A, str(tmp_path / 'a.json'))
        assert ReportStorage.load_matrix(path).allclose(A)

    def test_general_matrix(self, write_json):
        path = write_json('x.json', {'n': 2, 're': [[0, 1], [0, 0]]})
        X = ReportStorage.load_matrix(path, hermitian=False)
        np.testing.assert_array_equal(X.real, [[0, 1], [0, 0]])
