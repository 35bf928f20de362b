"""
Main application entry point for the charvar command line tool
"""
from cli import cli


def main():
    """Main application entry point"""
    cli(prog_name='charvar')


if __name__ == "__main__":
    main()
