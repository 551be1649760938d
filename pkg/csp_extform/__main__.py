"""Allow running csp_extform as a module: python -m csp_extform"""

from csp_extform.cli import main

if __name__ == "__main__":
    main()
