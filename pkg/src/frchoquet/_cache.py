import threading


class WriteOnceCache:
    """Thread-safe memo table keyed by subset mask.

    Concurrent callers may compute the same key twice, but only the first
    result is stored and every caller gets that stored value back.
    """

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key, compute):
        try:
            return self._data[key]
        except KeyError:
            pass
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)

    def __getstate__(self):
        return {"_data": dict(self._data)}

    def __setstate__(self, state):
        self._data = state["_data"]
        self._lock = threading.Lock()

    def __contains__(self, key):
        return key in self._data

    def __len__(self):
        return len(self._data)

    def items(self):
        with self._lock:
            return list(self._data.items())
