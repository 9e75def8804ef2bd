import os


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value else default


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value else default


class Config:
    """Configuration for the inequality verifier and its JSON API"""

    # Report output
    REPORTS_FOLDER = os.environ.get('LOGSUM_REPORTS_FOLDER') or 'reports'
    LOG_LEVEL = os.environ.get('LOGSUM_LOG_LEVEL') or 'INFO'

    # Verdict tolerances (relative to max(1, |lhs|, |rhs|) or the residual norm)
    RELATIVE_TOLERANCE = _env_float('LOGSUM_RELATIVE_TOLERANCE', 1e-9)
    LOEWNER_TOLERANCE = _env_float('LOGSUM_LOEWNER_TOLERANCE', 1e-8)
    IDENTITY_TOLERANCE = 1e-12
    ORACLE_TOLERANCE = 1e-9

    # q-logarithm: natural log is substituted for |q - 1| <= window
    Q_LIMIT_WINDOW = 1e-9
    Q_LIMIT_WINDOW_MAX = 1e-6

    # Grid convexity checks
    CONVEXITY_GRID_POINTS = 101
    CONVEXITY_SLACK = 1e-9

    # Matrix analysis
    COMMUTATION_TOLERANCE = 1e-9
    HERMITIAN_TOLERANCE = 1e-12
    UNITARY_TOLERANCE = 1e-10
    PSD_CLAMP = 1e-12
    INVERSE_FLOOR = 1e-10
    SUPPORT_FLOOR = 1e-14
    DENSITY_TRACE_TOLERANCE = 1e-10
    JACOBI_MAX_SWEEPS = _env_int('LOGSUM_JACOBI_MAX_SWEEPS', 100)
    JACOBI_TOLERANCE = 1e-14

    # Harness bounds
    MAX_DIM = 64
    MAX_FAMILY_SIZE = 16
    DEFAULT_TRIALS = _env_int('LOGSUM_DEFAULT_TRIALS', 1000)
    DEFAULT_SEED = 42
    DEFAULT_SPECTRUM_RANGE = (0.1, 10.0)
    MAX_REGENERATIONS = 50
    COUNTEREXAMPLE_THRESHOLD = 1e-6
    MAX_REPORTED_FINDINGS = 25

    # JSON API
    MAX_API_TRIALS = _env_int('LOGSUM_MAX_API_TRIALS', 5000)
    ALLOWED_REPORT_EXTENSIONS = {'json'}

    @staticmethod
    def allowed_file(filename, allowed_extensions):
        """Check if file has an allowed extension"""
        return '.' in filename and \
               filename.rsplit('.', 1)[1].lower() in allowed_extensions
