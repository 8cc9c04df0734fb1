from ._hbem import (
    __version__,
    branch_sqrt,
    example_config,
    half_cone_angle,
    hankel1_0,
    hankel1_1,
    kernel,
    normalize_config,
    run,
)

__all__ = [
    "__version__",
    "branch_sqrt",
    "example_config",
    "half_cone_angle",
    "hankel1_0",
    "hankel1_1",
    "kernel",
    "normalize_config",
    "run",
]
