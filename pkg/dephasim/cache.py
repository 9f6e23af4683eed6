"""
Memoization for expensive kernel evaluations
"""

import logging
import threading
from collections import OrderedDict
from typing import Any, Callable, Dict, Hashable, Optional

logger = logging.getLogger("dephasim.cache")


class KernelCache:
    """Thread-safe LRU cache for quadrature results keyed by (params, time, ...)"""

    def __init__(self, max_cache_size: int = 200000):
        self.cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self.max_cache_size = max_cache_size
        self.lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get_cached_result(self, key: Hashable) -> Optional[Any]:
        """Retrieve a cached value, refreshing its recency"""
        with self.lock:
            if key not in self.cache:
                self.misses += 1
                return None
            self.hits += 1
            self.cache.move_to_end(key)
            return self.cache[key]

    def cache_result(self, key: Hashable, value: Any) -> None:
        """Store a value, evicting the least recently used entry when full"""
        with self.lock:
            self.cache[key] = value
            self.cache.move_to_end(key)
            if len(self.cache) > self.max_cache_size:
                self.cache.popitem(last=False)

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        # compute outside the lock; concurrent misses on one key both compute the same pure value
        cached = self.get_cached_result(key)
        if cached is not None:
            return cached
        value = compute()
        self.cache_result(key, value)
        return value

    def clear(self) -> None:
        with self.lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0
        logger.debug("Kernel cache cleared")

    def get_stats(self) -> Dict[str, Any]:
        with self.lock:
            total = self.hits + self.misses
            return {
                'entries': len(self.cache),
                'hits': self.hits,
                'misses': self.misses,
                'hit_rate': self.hits / total if total else 0.0,
            }


# Global cache instance
kernel_cache = KernelCache()
