"""Allow ``python -m falqon_lab``."""

from falqon_lab.main import main

if __name__ == "__main__":
    main()
