"""Allow ``python -m graphsig ...`` to reach the command line front end."""

from .cli import entry_point

if __name__ == "__main__":
    entry_point()
