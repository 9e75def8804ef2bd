import logging
import os

from flask import Flask

from config import Config
from modules.routes import api_bp


def create_app(config_object=Config):
    """Application factory pattern for Flask app creation"""
    app = Flask(__name__)
    app.config.from_object(config_object)
    app.logger.setLevel(getattr(logging, str(app.config['LOG_LEVEL']).upper(), logging.INFO))

    # Ensure report directory exists
    os.makedirs(app.config['REPORTS_FOLDER'], exist_ok=True)

    # Register blueprints
    app.register_blueprint(api_bp)

    return app


if __name__ == '__main__':
    app = create_app()
    app.run(debug=True, host='0.0.0.0', port=5000)
