import logging
import os
from typing import Tuple

# Superpixel granularities used for augmentation and multi-resolution voting
DEFAULT_GRANULARITIES: Tuple[int, ...] = (900, 925, 950, 975, 1000)

# Median of the granularity set; used at test time
DEFAULT_TEST_GRANULARITY = 950

DEFAULT_FILTERS = 32


class GridSegConfig:
    @classmethod
    def get_log_level(cls) -> int:
        """Get the root log level from GRIDSEG_LOG_LEVEL (name or number)."""
        value = os.getenv('GRIDSEG_LOG_LEVEL', 'INFO').strip()
        if value.isdigit():
            return int(value)
        level = logging.getLevelName(value.upper())
        return level if isinstance(level, int) else logging.INFO

    @classmethod
    def get_threads(cls) -> int:
        """Get the default worker count for per-image stages."""
        value = os.getenv('GRIDSEG_THREADS')
        if value:
            try:
                return max(1, int(value))
            except ValueError:
                pass
        return 1

    @classmethod
    def get_granularity(cls) -> int:
        """Get the test-time superpixel count."""
        value = os.getenv('GRIDSEG_GRANULARITY')
        if value:
            try:
                return int(value)
            except ValueError:
                pass
        return DEFAULT_TEST_GRANULARITY

    @classmethod
    def get_vote_granularities(cls) -> Tuple[int, ...]:
        """Get the granularity list used by majority voting."""
        value = os.getenv('GRIDSEG_VOTE_GRANULARITIES')
        if value:
            try:
                return tuple(int(v) for v in value.split(',') if v.strip())
            except ValueError:
                pass
        return DEFAULT_GRANULARITIES
