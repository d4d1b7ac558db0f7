"""
Main entry point for the kappanull command line
"""
import sys

from kappanull.cli import run


def main():
    """Main entry point"""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
