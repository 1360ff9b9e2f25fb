# CLI Package
from .commands import DEFAULT_OUT_DIR, cmd_curves, cmd_hu, cmd_info, load_image
from .checks import (
    BreachLog,
    CheckReport,
    InvariantBreach,
    builtin_battery,
    check_hu_table,
    glob_battery,
    load_battery_file,
    run_checks,
)
