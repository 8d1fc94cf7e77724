import json
import os

import utils.sc_logging
import utils.settings

# Loaded experiment profiles, keyed by file name without .json
available_profiles = {}


DEFAULT_PROFILES = {
    "full": {
        "name": "full",
        "description": "Full-scale two-hole sweep: 300 points, W0 = W2 = 50, P = 10",
        "complex": "two-hole",
        "two_hole": {"num_points": 300, "seed": 0},
        "w0": 50,
        "w2": 50,
        "r1": 2,
        "p_shifts": 10,
        # 100 and 200 are stand-in sizes next to 50
        "sample_sizes": [50, 100, 200],
        "variances": [0.0, 1e-6, 1e-5, 1e-4, 1e-3],
        "trials": 100,
        "spectral_scaling": True,
        "tolerance": 1e-6,
    },
    "ci": {
        "name": "ci",
        "description": "Scaled two-hole run for quick checks",
        "complex": "two-hole",
        "two_hole": {"num_points": 150, "seed": 0},
        "w0": 20,
        "w2": 20,
        "r1": 2,
        "p_shifts": 10,
        "sample_sizes": [30],
        "variances": [0.0, 1e-6, 1e-5, 1e-4],
        "trials": 20,
        "spectral_scaling": True,
        "tolerance": 1e-5,
    },
    "small": {
        "name": "small",
        "description": "Seven-node complex with two holes, P = W0 + W2 + 1 and |S| = R1",
        "complex": "small",
        "w0": 4,
        "w2": 1,
        "r1": 2,
        "p_shifts": 6,
        "sample_sizes": [2],
        "variances": [0.0],
        "trials": 20,
        "spectral_scaling": False,
        "tolerance": 1e-6,
    },
}


def profile_path(name: str) -> str:
    return os.path.join(utils.settings.profile_dir, f"{name}.json")


def create_default_profiles():
    """Write the built-in profiles that are missing from the profile directory"""
    os.makedirs(utils.settings.profile_dir, exist_ok=True)

    for name, profile in DEFAULT_PROFILES.items():
        path = profile_path(name)
        if os.path.exists(path):
            continue
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(profile, f, indent=2)
            f.write("\n")
        utils.sc_logging.update_debug_log(f"Created default profile: {path}")


def load_profiles() -> dict:
    """Load every profile in the profile directory, creating the defaults first"""
    global available_profiles

    create_default_profiles()
    available_profiles = {}

    for filename in sorted(os.listdir(utils.settings.profile_dir)):
        if not filename.endswith('.json'):
            continue
        name = filename[:-5]
        try:
            with open(os.path.join(utils.settings.profile_dir, filename), 'r', encoding='utf-8') as f:
                available_profiles[name] = json.load(f)
        except json.JSONDecodeError as e:
            utils.sc_logging.log_error(f"Invalid JSON in profile file {filename}: {e}", "CONFIG")

    utils.sc_logging.update_debug_log(f"Loaded {len(available_profiles)} experiment profiles")
    return available_profiles


def get_profile(name: str):
    """Profile dict by name, or None when it does not exist"""
    if name not in available_profiles:
        load_profiles()
    profile = available_profiles.get(name)
    if profile is None:
        return None
    return dict(profile)


def list_profiles() -> list:
    if not available_profiles:
        load_profiles()
    return sorted(available_profiles)
