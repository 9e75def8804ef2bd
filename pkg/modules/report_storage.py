import json
import logging
import os
from typing import Any, Dict, List

from werkzeug.utils import secure_filename

from config import Config
from .errors import ConfigError
from .harness import SuiteReport
from .matfun import matrix_from_exchange, to_exchange

logger = logging.getLogger(__name__)


class ReportStorage:
    """Class to handle storage and retrieval of suite reports and exchange matrices"""

    def __init__(self, reports_folder: str):
        self.reports_folder = reports_folder

    def _path(self, name: str) -> str:
        filename = secure_filename(name)
        if not filename:
            raise ConfigError(f"invalid report name {name!r}")
        if '.' not in filename:
            filename += '.json'
        if not Config.allowed_file(filename, Config.ALLOWED_REPORT_EXTENSIONS):
            raise ConfigError(f"report files must end in .json, got {filename!r}")
        return os.path.join(self.reports_folder, filename)

    @staticmethod
    def dumps(report: Any) -> str:
        """
        Serialize a report deterministically

        Args:
            report: SuiteReport or plain dict

        Returns:
            JSON text with sorted keys and a trailing newline
        """
        data = report.to_dict() if isinstance(report, SuiteReport) else report
        return json.dumps(data, indent=2, sort_keys=True) + '\n'

    @staticmethod
    def write(report: Any, path: str) -> str:
        """Write a report to an explicit path, creating parent directories"""
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
        with open(path, 'w') as f:
            f.write(ReportStorage.dumps(report))
        logger.info("Report written to %s", path)
        return path

    def save_report(self, report: Any, name: str) -> str:
        """
        Save a report under the reports folder

        Args:
            report: SuiteReport or plain dict
            name: Report name; sanitized, ".json" appended when missing

        Returns:
            Path of the written file
        """
        os.makedirs(self.reports_folder, exist_ok=True)
        return self.write(report, self._path(name))

    def load_report(self, name: str) -> Dict[str, Any]:
        path = self._path(name)
        if not os.path.exists(path):
            raise FileNotFoundError(f"Report {name} not found")
        with open(path, 'r') as f:
            return json.load(f)

    def list_reports(self) -> List[Dict[str, Any]]:
        """List stored reports with their headline numbers"""
        if not os.path.exists(self.reports_folder):
            return []

        reports = []
        for filename in sorted(os.listdir(self.reports_folder)):
            if not Config.allowed_file(filename, Config.ALLOWED_REPORT_EXTENSIONS):
                continue
            try:
                with open(os.path.join(self.reports_folder, filename), 'r') as f:
                    data = json.load(f)
            except (OSError, ValueError) as e:
                logger.warning("Skipping unreadable report %s: %s", filename, e)
                continue
            reports.append({
                'name': filename,
                'suite': data.get('suite'),
                'trials': data.get('trials'),
                'violations': data.get('violations'),
                'worst_gap': data.get('worst_gap'),
            })
        return reports

    @staticmethod
    def load_document(path: str) -> Any:
        """Read a JSON argument document"""
        try:
            with open(path, 'r') as f:
                return json.load(f)
        except ValueError as e:
            raise ConfigError(f"{path} is not valid JSON: {e}") from e

    @staticmethod
    def load_matrix(path: str, hermitian: bool = True) -> Any:
        """Read one matrix in exchange format"""
        return matrix_from_exchange(ReportStorage.load_document(path), hermitian)

    @staticmethod
    def save_matrix(matrix: Any, path: str) -> str:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, 'w') as f:
            json.dump(to_exchange(matrix), f, indent=2)
        return path
