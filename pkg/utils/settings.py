import os

from dotenv import load_dotenv

import utils.sc_logging

# Numerical settings - loaded from .env and the environment
zero_tol = 1e-8
svd_cutoff = 1e-10
spectral_scaling = False

# Experiment settings
master_seed = 0
trials = 100
max_retries = 200
workers = 1
noise_variance = 1e-5

# Output settings
output_dir = "results"
profile_dir = "Configurables/Profiles"


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == "true"


def load_settings():
    """Load settings from environment variables (and a .env file if present)"""
    global zero_tol, svd_cutoff, spectral_scaling
    global master_seed, trials, max_retries, workers, noise_variance
    global output_dir, profile_dir

    load_dotenv()

    zero_tol = float(os.getenv("ZERO_TOL", "1e-8"))
    svd_cutoff = float(os.getenv("SVD_CUTOFF", "1e-10"))
    spectral_scaling = _env_bool("SPECTRAL_SCALING", "false")

    master_seed = int(os.getenv("MASTER_SEED", "0"))
    trials = int(os.getenv("TRIALS", "100"))
    max_retries = int(os.getenv("MAX_RETRIES", "200"))
    workers = int(os.getenv("WORKERS", "1"))
    noise_variance = float(os.getenv("NOISE_VARIANCE", "1e-5"))

    output_dir = os.getenv("OUTPUT_DIR", "results")
    profile_dir = os.getenv("PROFILE_DIR", "Configurables/Profiles")

    utils.sc_logging.update_debug_log("Settings loaded from environment")


def get_setting(setting_name: str, default_value=None):
    """Get a specific setting value"""
    return globals().get(setting_name, default_value)


def set_setting(setting_name: str, value):
    """Set a specific setting value"""
    if setting_name in globals():
        globals()[setting_name] = value
        utils.sc_logging.update_debug_log(f"Setting updated: {setting_name} = {value}")
        return True
    return False


# Load settings on import
load_settings()
