import os
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Optional

from dotenv import load_dotenv
from loguru import logger
from pydantic import BaseModel, Field, model_validator

"""Initialize configuration with environment variables."""
dotenv_file = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", ".env")
load_dotenv(dotenv_path=dotenv_file)

# Logger configuration
logger_format = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
    "<yellow>[{extra[run_id]}]</yellow> | "
    "<level>{level: <8}</level> | "
    "<cyan>{module}.{function}:{line}</cyan> - <level>{message}</level>"
)

default_run_id = "INIT"


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("true", "1", "t")


@dataclass
class LogConfig:
    """Logging configuration settings."""

    level: str = field(default_factory=lambda: os.getenv("MEXPAND_LOG_LEVEL", "INFO"))
    format: str = logger_format
    diagnose: bool = False
    backtrace: bool = False
    log_file: str = field(default_factory=lambda: os.getenv("MEXPAND_LOG_FILE", ""))
    rotation: str = "1 week"
    retention: str = "1 month"


@dataclass
class QuadratureConfig:
    """Quadrature settings for band-limited kernels and local averages."""

    # Gauss-Legendre nodes per panel
    nodes_per_panel: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_GL_NODES", "12"))
    )
    min_panels: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_GL_MIN_PANELS", "8"))
    )
    # panels per axis grow as panel_scale * |x| * diam(S)
    panel_scale: float = field(
        default_factory=lambda: float(os.getenv("MEXPAND_GL_PANEL_SCALE", "4.0"))
    )
    max_panels: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_GL_MAX_PANELS", "200000"))
    )
    phi_tol: float = field(
        default_factory=lambda: float(os.getenv("MEXPAND_PHI_TOL", "1e-9"))
    )
    average_tol: float = field(
        default_factory=lambda: float(os.getenv("MEXPAND_AVERAGE_TOL", "1e-10"))
    )
    average_max_nodes: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_AVERAGE_MAX_NODES", "256"))
    )
    scheme_nodes: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_SCHEME_NODES", "64"))
    )
    # (point, lattice index) pairs evaluated per vectorised block
    block_pairs: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_BLOCK_PAIRS", "1048576"))
    )


@dataclass
class DifferentiationConfig:
    """Extrapolated finite-difference settings."""

    initial_step: float = field(
        default_factory=lambda: float(os.getenv("MEXPAND_FD_STEP", "0.1"))
    )
    step_ratio: float = field(
        default_factory=lambda: float(os.getenv("MEXPAND_FD_RATIO", "1.4"))
    )
    tableau_size: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_FD_TABLEAU", "10"))
    )
    safe: float = 2.0
    # fixed halving schedule for transform derivatives
    richardson_steps: tuple[float, ...] = field(
        default_factory=lambda: tuple(
            float(h) for h in os.getenv("MEXPAND_FD_SCHEDULE", "1e-2,5e-3,2.5e-3").split(",")
        )
    )


@dataclass
class AnalysisConfig:
    """Defaults for measurement and experiments."""

    theta_margin: float = field(
        default_factory=lambda: float(os.getenv("MEXPAND_THETA_MARGIN", "0.99"))
    )
    grid_half_width: float = field(
        default_factory=lambda: float(os.getenv("MEXPAND_GRID_T", "4.0"))
    )
    grid_points_1d: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_GRID_N1", "1024"))
    )
    grid_points_2d: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_GRID_N2", "128"))
    )
    fit_window: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_FIT_WINDOW", "4"))
    )
    strang_fix_radius: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_STRANG_FIX_RADIUS", "3"))
    )
    compat_samples: int = field(
        default_factory=lambda: int(os.getenv("MEXPAND_COMPAT_SAMPLES", "1000"))
    )
    divergence_threshold: float = 0.05
    truncation_tol: float = field(
        default_factory=lambda: float(os.getenv("MEXPAND_TRUNCATION_TOL", "1e-3"))
    )
    truncation_cap: int = 100_000
    tail_rel_tol: float = 1e-6


class Config:
    """Library configuration class."""

    def __init__(self):
        self.env: str = os.getenv("MEXPAND_ENV", "development")
        self.debug: bool = _env_bool("MEXPAND_DEBUG", "False")
        self.diagnose: bool = False
        self.app_name: str = "mexpand"
        self.version: str = "0.1.0"

        self.log = LogConfig()
        self.quadrature = QuadratureConfig()
        self.differentiation = DifferentiationConfig()
        self.analysis = AnalysisConfig()

        self.init_logger()

    def init_logger(self, log_file: Optional[str] = None):
        """Initialize logger with configured settings."""
        logger.configure(extra={"run_id": default_run_id})
        logger.remove()

        backtrace = self.diagnose or self.log.backtrace
        diagnose = self.diagnose or self.log.diagnose
        logger.add(
            sys.stderr,
            format=self.log.format,
            backtrace=backtrace,
            diagnose=diagnose,
            enqueue=False,
            level="DEBUG" if self.debug or self.diagnose else self.log.level,
        )

        target = log_file or self.log.log_file
        if target:
            logger.add(
                target,
                format=self.log.format,
                backtrace=backtrace,
                diagnose=diagnose,
                enqueue=False,
                rotation=self.log.rotation,
                retention=self.log.retention,
                level="DEBUG",
            )

    def update(self, diagnose: Optional[bool] = None, debug: Optional[bool] = None):
        """Update logging flags and reinstall the sinks."""
        if diagnose is not None:
            self.diagnose = diagnose
        if debug is not None:
            self.debug = debug
        self.init_logger()

    def to_json(self) -> dict[str, Any]:
        """Convert configuration to JSON-serializable dict."""
        return {
            "env": self.env,
            "debug": self.debug,
            "diagnose": self.diagnose,
            "app_name": self.app_name,
            "version": self.version,
            "quadrature": {
                "nodes_per_panel": self.quadrature.nodes_per_panel,
                "min_panels": self.quadrature.min_panels,
                "panel_scale": self.quadrature.panel_scale,
                "phi_tol": self.quadrature.phi_tol,
                "average_tol": self.quadrature.average_tol,
                "scheme_nodes": self.quadrature.scheme_nodes,
            },
            "differentiation": {
                "initial_step": self.differentiation.initial_step,
                "step_ratio": self.differentiation.step_ratio,
                "tableau_size": self.differentiation.tableau_size,
                "richardson_steps": list(self.differentiation.richardson_steps),
            },
            "analysis": {
                "theta_margin": self.analysis.theta_margin,
                "grid_half_width": self.analysis.grid_half_width,
                "grid_points_1d": self.analysis.grid_points_1d,
                "grid_points_2d": self.analysis.grid_points_2d,
                "fit_window": self.analysis.fit_window,
                "strang_fix_radius": self.analysis.strang_fix_radius,
                "compat_samples": self.analysis.compat_samples,
                "truncation_tol": self.analysis.truncation_tol,
            },
        }


# Create a singleton config instance
config = Config()


@lru_cache
def get_config() -> Config:
    """Get the library configuration (cached)."""
    return config


class ConfigModel(BaseModel):
    """Pydantic model for runtime configuration updates."""

    diagnose: Optional[bool] = Field(None, description="Enable diagnostic logging")
    debug: Optional[bool] = Field(None, description="Enable debug logging")

    @model_validator(mode="before")
    @classmethod
    def validate_config(cls, data):
        """Validate that at least one field is provided."""
        if isinstance(data, dict) and not any(v is not None for v in data.values()):
            raise ValueError("At least one configuration parameter must be provided")
        return data
