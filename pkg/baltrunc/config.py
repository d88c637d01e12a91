import os
import logging
from dataclasses import dataclass

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

TOL_ENV_VAR = "BALTRUNC_TOL"

# Relative to the model scale max(|A|_F, |B|_F, |C|_F)
DEFAULT_RANK_TOL = 1e-10
DEFAULT_GAP_TOL = 1e-8
DEFAULT_DEDUP_TOL = 1e-6
DEFAULT_HSV_FLOOR = 1e-14
DEFAULT_CHOLESKY_SHIFT_TOL = 1e-14
# Largest order solved with the Kronecker-vectorized Lyapunov system
DEFAULT_KRONECKER_LIMIT = 60


@dataclass(frozen=True)
class Settings:
    rank_tol: float = DEFAULT_RANK_TOL
    gap_tol: float = DEFAULT_GAP_TOL
    dedup_tol: float = DEFAULT_DEDUP_TOL
    hsv_floor: float = DEFAULT_HSV_FLOOR
    cholesky_shift_tol: float = DEFAULT_CHOLESKY_SHIFT_TOL
    kronecker_limit: int = DEFAULT_KRONECKER_LIMIT


def _read_positive_float(name, default):
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}")
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {raw!r}")
    logger.debug(f"{name} overrides default {default} with {value}")
    return value


def load_settings(dotenv_path=None):
    """Build Settings from the environment (and an optional .env file).

    Args:
        dotenv_path: Explicit .env file; when None python-dotenv searches
            upwards from the working directory.
    """
    load_dotenv(dotenv_path=dotenv_path, override=False)
    return Settings(rank_tol=_read_positive_float(TOL_ENV_VAR, DEFAULT_RANK_TOL))


def default_rank_tol():
    """Rank tolerance used when a caller passes rel_tol=None."""
    return _read_positive_float(TOL_ENV_VAR, DEFAULT_RANK_TOL)
