import sys
from dataclasses import dataclass
from typing import Optional

from hypertoric_toolbox.reports import Report


@dataclass
class CommandResponse:
    status: str
    message: str
    exit_code: int = 0
    report: Optional[Report] = None


def error_response(message: str, exit_code: int = 1) -> CommandResponse:
    """
    Returns a CommandResponse with an error message and exit code.
    Prints the message before returning.
    """
    print(f"ERROR: {message}", file=sys.stderr)
    return CommandResponse(status="error", message=message, exit_code=exit_code)


def success_response(message: str, report: Report) -> CommandResponse:
    """
    Returns a CommandResponse carrying the report.
    Prints the message before returning.
    """
    print(f"SUCCESS: {message}", file=sys.stderr)
    return CommandResponse(status="success", message=message, report=report)


def refused_response(message: str, report: Report) -> CommandResponse:
    """
    Returns a CommandResponse for a weight that could not be certified.
    Not certified is a normal outcome, so the exit code stays 0.
    """
    print(f"NOT CERTIFIED: {message}", file=sys.stderr)
    return CommandResponse(status="not_certified", message=message, report=report)
