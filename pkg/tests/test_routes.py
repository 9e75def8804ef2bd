"""
Unit tests for the JSON API routes.

This module tests:
- suite and operation listing
- suite runs through POST /api/check, including trial limits and saving
- one-shot operation evaluation through POST /api/eval/<op>
- stored report listing and retrieval
- error translation to status codes
"""

import math

import pytest

from modules.errors import NumericError


@pytest.mark.routes
class TestListing:
    """Test registry listing"""

    def test_list_suites(self, client):
        """Test GET /api/suites returns suites and operations"""
        response = client.get('/api/suites')

        assert response.status_code == 200
        data = response.get_json()
        names = [suite['name'] for suite in data['suites']]
        assert 'theorem6' in names
        assert names == sorted(names)
        assert 'q_log' in data['operations']


@pytest.mark.routes
class TestCheckRoute:
    """Test suite runs over the API"""

    def test_check_success(self, client):
        """Test a small run returns the full report"""
        response = client.post('/api/check', json={'suite': 'scalar_log_sum', 'trials': 5, 'seed': 3})

        assert response.status_code == 200
        data = response.get_json()
        assert data['suite'] == 'scalar_log_sum'
        assert data['trials'] == 5
        assert data['violations'] == 0
        assert 'saved_to' not in data

    def test_check_ignores_workers(self, client):
        response = client.post('/api/check', json={'suite': 'scalar_log_sum', 'trials': 2, 'workers': 8})
        assert response.status_code == 200

    def test_check_saves_report(self, client, app):
        """Test save_as stores the report for later retrieval"""
        response = client.post('/api/check', json={'suite': 'jensen', 'trials': 3, 'save_as': 'jensen_run'})

        assert response.status_code == 200
        assert response.get_json()['saved_to'].endswith('jensen_run.json')

        listed = client.get('/api/reports').get_json()['reports']
        assert [r['name'] for r in listed] == ['jensen_run.json']

        fetched = client.get('/api/reports/jensen_run')
        assert fetched.status_code == 200
        assert fetched.get_json()['suite'] == 'jensen'

    def test_check_trial_limit(self, client):
        """Test the configured MAX_API_TRIALS is enforced"""
        response = client.post('/api/check', json={'suite': 'scalar_log_sum', 'trials': 51})

        assert response.status_code == 400
        assert 'exceed' in response.get_json()['error']

    def test_check_unknown_suite(self, client):
        response = client.post('/api/check', json={'suite': 'nope', 'trials': 1})

        assert response.status_code == 400
        assert response.get_json()['type'] == 'UnknownSuiteError'

    def test_check_unknown_field(self, client):
        response = client.post('/api/check', json={'suite': 'jensen', 'trails': 1})

        assert response.status_code == 400
        assert response.get_json()['type'] == 'ConfigError'

    def test_check_requires_json_object(self, client):
        response = client.post('/api/check', data='not json', content_type='text/plain')

        assert response.status_code == 400
        assert 'JSON object' in response.get_json()['error']

    def test_check_numeric_failure(self, client, mocker):
        """Test numeric failures map to 500"""
        mocker.patch('modules.routes.run_suite', side_effect=NumericError('eigensolver failed'))

        response = client.post('/api/check', json={'suite': 'jensen', 'trials': 1})

        assert response.status_code == 500
        assert response.get_json()['type'] == 'NumericError'


@pytest.mark.routes
class TestEvalRoute:
    """Test one-shot operation evaluation"""

    def test_eval_q_log(self, client):
        response = client.post('/api/eval/q_log', json={'x': 4.0, 'q': 0.5})

        assert response.status_code == 200
        assert response.get_json()['result'] == pytest.approx(2.0)

    def test_eval_verdict(self, client):
        response = client.post('/api/eval/generalized_log_sum_gap',
                               json={'f': 'log', 'g': 'identity', 'a': [1, 2], 'b': [2, 1]})

        data = response.get_json()
        assert data['holds'] is True
        assert data['result']['gap'] == pytest.approx(math.log(2.0))

    def test_eval_matrix_operation(self, client, exchange, scalar_matrices):
        response = client.post('/api/eval/theorem10_residual_2', json={
            'f': 'power:0.5',
            'A_family': exchange(scalar_matrices([1, 100])),
            'B_family': exchange(scalar_matrices([1, 1])),
        })

        assert response.status_code == 200
        assert response.get_json()['holds'] is False

    def test_eval_unknown_operation(self, client):
        response = client.post('/api/eval/q_exp', json={})
        assert response.status_code == 400

    def test_eval_domain_error(self, client):
        response = client.post('/api/eval/q_log', json={'x': 0.0, 'q': 0.5})

        assert response.status_code == 400
        assert response.get_json()['type'] == 'DomainError'


@pytest.mark.routes
class TestReportRoutes:
    """Test stored report access"""

    def test_empty_listing(self, client):
        response = client.get('/api/reports')

        assert response.status_code == 200
        assert response.get_json() == {'reports': []}

    def test_missing_report(self, client):
        response = client.get('/api/reports/absent')
        assert response.status_code == 404

    def test_invalid_report_name(self, client):
        response = client.get('/api/reports/notes.txt')
        assert response.status_code == 400
