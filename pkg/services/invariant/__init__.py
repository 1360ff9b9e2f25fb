# Invariant Representation Package
from .hu import (
    DigitString,
    HuDecodeError,
    HuTable,
    MissingLevelError,
    encode,
    encode_at_cut,
    hu_image,
    negate_digits,
    pixel_bits,
    replay,
    validate_table,
    value,
)
