"""Main entry point for the falqon-lab command line."""

from falqon_lab.cli import app


def main() -> None:
    """Main entry point for the application."""
    app()


if __name__ == "__main__":
    main()
