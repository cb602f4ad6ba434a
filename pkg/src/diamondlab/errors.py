class CapacityError(ValueError):
    """Raised when an input exceeds a size guard of the dense algorithms."""
