from .cli import main, run
