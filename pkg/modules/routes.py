from flask import Blueprint, current_app, jsonify, request

from .errors import ConfigError, VerificationError
from .harness import SUITES, TrialConfig, run_suite
from .operations import evaluate_operation, list_operations
from .report_storage import ReportStorage

api_bp = Blueprint('api', __name__, url_prefix='/api')

# Initialize storage
report_storage = None


@api_bp.before_app_request
def initialize_storage():
    """Initialize report storage with app config"""
    global report_storage
    folder = current_app.config['REPORTS_FOLDER']
    if report_storage is None or report_storage.reports_folder != folder:
        report_storage = ReportStorage(folder)


def _error(e: VerificationError):
    current_app.logger.warning("%s: %s", type(e).__name__, e)
    return jsonify({'error': str(e), 'type': type(e).__name__}), e.http_status


def _json_body():
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ConfigError('Request body must be a JSON object')
    return data


@api_bp.route('/suites', methods=['GET'])
def list_suites():
    """List registered property suites and evaluable operations"""
    return jsonify({
        'suites': [SUITES[name].to_dict() for name in sorted(SUITES)],
        'operations': list_operations(),
    })


@api_bp.route('/check', methods=['POST'])
def check_suite():
    """Run a suite from a TrialConfig document and return its report"""
    try:
        data = _json_body()
        save_as = data.pop('save_as', None)
        data.pop('workers', None)
        config = TrialConfig.from_dict(data)

        max_trials = current_app.config['MAX_API_TRIALS']
        if config.trials > max_trials:
            return jsonify({'error': f'trials must not exceed {max_trials}'}), 400

        report = run_suite(config)
        body = report.to_dict()
        if save_as:
            body['saved_to'] = report_storage.save_report(report, save_as)
        return jsonify(body)

    except VerificationError as e:
        return _error(e)


@api_bp.route('/eval/<op>', methods=['POST'])
def eval_operation(op):
    """One-shot evaluation of a named operation"""
    try:
        return jsonify(evaluate_operation(op, _json_body()))
    except VerificationError as e:
        return _error(e)


@api_bp.route('/reports', methods=['GET'])
def list_reports():
    return jsonify({'reports': report_storage.list_reports()})


@api_bp.route('/reports/<name>', methods=['GET'])
def get_report(name):
    """Fetch a stored report"""
    try:
        return jsonify(report_storage.load_report(name))
    except FileNotFoundError as e:
        return jsonify({'error': str(e)}), 404
    except VerificationError as e:
        return _error(e)
