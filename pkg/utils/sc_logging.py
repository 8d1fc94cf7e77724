import os
import threading
from datetime import datetime

# Logging variables
debug_log_name = "debug.log"
error_log_name = "error.log"
experiment_log_name = "experiments.log"
log_lock = threading.Lock()


def get_log_dir() -> str:
    """Directory the log files live in, from SC_LOG_DIR"""
    return os.getenv("SC_LOG_DIR", "logs")


def logging_enabled() -> bool:
    return os.getenv("DEBUG_LOGGING", "true").lower() == "true"


def _log_path(name: str) -> str:
    return os.path.join(get_log_dir(), name)


def _append(name: str, text: str) -> bool:
    with log_lock:
        try:
            os.makedirs(get_log_dir(), exist_ok=True)
            with open(_log_path(name), 'a', encoding='utf-8') as f:
                f.write(text)
            return True
        except OSError as e:
            # Fallback to console if file logging fails
            print(f"Logging error: {e}")
            return False


def update_debug_log(message: str):
    """Update debug log with timestamped message"""
    if not logging_enabled():
        return

    timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    if not _append(debug_log_name, f"[{timestamp}] {message}\n"):
        print(f"Debug: {message}")


def log_experiment(name: str, summary: dict):
    """Log the summary block of a finished experiment run"""
    if not logging_enabled():
        return

    timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")

    log_entry = f"\n--- Experiment {name} [{timestamp}] ---\n"
    for key, value in summary.items():
        log_entry += f"{key}: {value}\n"
    log_entry += "--- End Experiment ---\n"

    if not _append(experiment_log_name, log_entry):
        update_debug_log(f"Experiment logging failed for {name}")


def log_error(error_message: str, error_type: str = "ERROR"):
    """Log error with type"""
    if not logging_enabled():
        return

    timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    _append(error_log_name, f"[{timestamp}] {error_type}: {error_message}\n")

    # Also log to debug
    update_debug_log(f"{error_type}: {error_message}")


def _log_files() -> dict:
    return {
        "debug": _log_path(debug_log_name),
        "error": _log_path(error_log_name),
        "experiment": _log_path(experiment_log_name),
    }


def clear_logs():
    """Clear all log files"""
    for log_file in _log_files().values():
        try:
            if os.path.exists(log_file):
                open(log_file, 'w').close()
        except OSError as e:
            print(f"Error clearing {log_file}: {e}")

    update_debug_log("Log files cleared")


def get_log_size(log_type: str = "debug") -> int:
    """Get log file size in bytes"""
    log_file = _log_files().get(log_type, _log_path(debug_log_name))

    try:
        if os.path.exists(log_file):
            return os.path.getsize(log_file)
        return 0
    except OSError:
        return 0


def rotate_logs(max_size_mb: int = 10):
    """Rotate logs if they exceed max size"""
    max_size_bytes = max_size_mb * 1024 * 1024

    for log_file in _log_files().values():
        try:
            if os.path.exists(log_file) and os.path.getsize(log_file) > max_size_bytes:
                os.replace(log_file, f"{log_file}.backup")
                update_debug_log(f"Rotated log file: {log_file}")
        except OSError as e:
            print(f"Error rotating {log_file}: {e}")


def tail_log(log_type: str = "debug", lines: int = 50) -> str:
    """Get last N lines from log file"""
    log_file = _log_files().get(log_type, _log_path(debug_log_name))

    try:
        if os.path.exists(log_file):
            with open(log_file, 'r', encoding='utf-8') as f:
                all_lines = f.readlines()
                return ''.join(all_lines[-lines:])
        return ""
    except OSError as e:
        return f"Error reading log: {e}"


def initialize():
    rotate_logs()
    update_debug_log("Simplicial sampling logging initialized")
