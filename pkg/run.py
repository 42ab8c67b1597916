"""
Command line entry point
Runs the gausscert CLI
"""
from gausscert.cli import cli

if __name__ == '__main__':
    cli()
