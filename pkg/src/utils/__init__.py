# src/utils/__init__.py

from .helpers import calculate_percent, format_percent, round_half_up, safe_share
from .validators import (
    sanitize_text_input,
    validate_country_code,
    validate_fraction,
    validate_iso_date,
    validate_positive_int,
)

__all__ = [
    # Validators
    "sanitize_text_input",
    "validate_country_code",
    "validate_fraction",
    "validate_iso_date",
    "validate_positive_int",
    # Helpers
    "calculate_percent",
    "format_percent",
    "round_half_up",
    "safe_share",
]
