"""
Simplicial sampling application entry point
Alternative entry point that runs a whole experiment profile: noiseless
recovery first, then the MSE sweep
"""

import os
import sys

import colorama
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Add current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import main
import utils.profiles
import utils.sc_logging
import utils.settings


def start_application(profile_name: str = None) -> int:
    """Run recover and sweep for one profile (APP_PROFILE, default 'full')"""
    profile_name = profile_name or os.getenv("APP_PROFILE", "full")

    print(f"{colorama.Fore.CYAN}Simplicial sampling experiments, profile '{profile_name}'{colorama.Fore.RESET}")
    utils.sc_logging.update_debug_log(f"Application starting with profile {profile_name}")
    print(f"Results go to {utils.settings.output_dir}, logs to {utils.sc_logging.get_log_dir()}")

    status = main.main(["recover", "--profile", profile_name])
    if status == main.EXIT_CONFIG:
        print(colorama.Fore.YELLOW + "Noiseless run is not identifiable, continuing with the sweep" + colorama.Fore.RESET)

    sweep_status = main.main(["sweep", "--profile", profile_name])
    return max(status, sweep_status)


if __name__ == "__main__":
    colorama.init()
    sys.exit(start_application(sys.argv[1] if len(sys.argv) > 1 else None))
