from abc import ABC, abstractmethod


class ArtifactStorage(ABC):
    """Abstract interface for run-artifact backends."""

    @abstractmethod
    def build_path(self, *parts: str) -> str:
        """Build a storage path from parts."""
        raise NotImplementedError

    @abstractmethod
    def save_text(self, path: str, content: str, encoding: str = "utf-8") -> str:
        """Save text content and return the storage reference."""
        raise NotImplementedError

    @abstractmethod
    def read_text(self, path: str, encoding: str = "utf-8") -> str:
        raise NotImplementedError

    @abstractmethod
    def exists(self, path: str) -> bool:
        raise NotImplementedError
