"""Error codes shared by the fleet API and its HTTP surface."""

DEVICE_OFFLINE = "DeviceOffline"
NOT_CONFIGURED = "NotConfigured"
UNSUPPORTED_ACTION = "UnsupportedAction"
FORBIDDEN = "Forbidden"
SCHEMA_ORDER = "SchemaOrder"
NOT_FOUND = "NotFound"
CONFLICT = "Conflict"


class FabricError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message
