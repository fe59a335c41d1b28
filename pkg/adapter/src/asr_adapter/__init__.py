"""Reference recognizer adapter for the stdio wire protocol."""

from .engines import EchoEngine, EngineError, VoskEngine, build_engine
from .service import AdapterService, ProtocolViolation

__version__ = "0.1.0"
