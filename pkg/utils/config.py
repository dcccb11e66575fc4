"""
Runtime configuration for the amenability toolkit.
"""
import os
from typing import Optional
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Settings:
    """Manages toolkit settings read from the environment"""

    _instance: Optional['Settings'] = None

    def __new__(cls):
        """Singleton pattern to ensure only one instance exists"""
        if cls._instance is None:
            cls._instance = super(Settings, cls).__new__(cls)
            cls._instance._initialize()
        return cls._instance

    def _initialize(self):
        """Read settings from environment variables"""
        self.log_level = os.getenv("AMENABILITY_LOG_LEVEL", "INFO").upper()

        try:
            self.float_tolerance = float(os.getenv("AMENABILITY_FLOAT_TOLERANCE", "1e-9"))
            self.seed = int(os.getenv("AMENABILITY_SEED", "0"))
            self.workers = int(os.getenv("AMENABILITY_WORKERS", "1"))
        except ValueError as e:
            raise ValueError(
                "AMENABILITY_FLOAT_TOLERANCE must be a float, AMENABILITY_SEED and "
                f"AMENABILITY_WORKERS integers: {str(e)}"
            )

        if self.float_tolerance <= 0:
            raise ValueError("AMENABILITY_FLOAT_TOLERANCE must be positive.")
        if self.workers < 1:
            raise ValueError("AMENABILITY_WORKERS must be at least 1.")

    def reload(self):
        """Re-read the environment (used by tests that patch variables)"""
        self._initialize()
        return self
