from .main import main, run  # noqa: F401
